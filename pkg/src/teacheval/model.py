"""Core domain types for teaching-evaluation campaigns.

Everything in this module is an immutable value object. Construction
validates; afterwards instances are safe to share between concurrent
request handlers without coordination.
"""
from __future__ import annotations

import ipaddress
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

DEFAULT_BANK_SIZE = 58

#: Canonical five-point answer labels, keyed by raw value.
LIKERT_LABELS = {
    1: "foarte puțin sau deloc",
    2: "puțin",
    3: "nici prea mult, nici prea puțin",
    4: "mult",
    5: "foarte mult",
}

LABEL_TO_RAW = {label: raw for raw, label in LIKERT_LABELS.items()}


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class DomainError(Exception):
    """Base class for every expected application error.

    ``code`` is the stable machine identifier used on the wire and in logs.
    """

    code = "DOMAIN_ERROR"


class OutOfRange(DomainError):
    """Raw answer value outside 1..5 (tampered or malformed submission)."""

    code = "VALUE_OUT_OF_RANGE"


class BankGap(DomainError):
    code = "BANK_GAP"


class BankDuplicate(DomainError):
    code = "BANK_DUPLICATE"


class BankEmptyText(DomainError):
    code = "BANK_EMPTY_TEXT"


class InvalidAddress(DomainError):
    code = "INVALID_ADDRESS"


class ResetForbidden(DomainError):
    code = "RESET_FORBIDDEN"


class NoTeacherSelected(DomainError):
    code = "NO_TEACHER_SELECTED"


class Unauthorized(DomainError):
    code = "UNAUTHORIZED"


class TeacherInUse(DomainError):
    code = "TEACHER_IN_USE"


class TeacherNotFound(DomainError):
    code = "TEACHER_NOT_FOUND"


class NotFound(DomainError):
    code = "NOT_FOUND"


class IncompleteSession(DomainError):
    code = "INCOMPLETE"


class DeadlineExceeded(DomainError):
    code = "DEADLINE_EXCEEDED"


class StorageFailure(DomainError):
    code = "STORAGE_FAILURE"


# ---------------------------------------------------------------------------
# Timestamps and addresses
# ---------------------------------------------------------------------------

def utc_now() -> datetime:
    """Current UTC time truncated to whole seconds (storage precision)."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def to_iso(moment: datetime) -> str:
    return moment.astimezone(timezone.utc).replace(microsecond=0).isoformat()


def from_iso(text: str) -> datetime:
    return datetime.fromisoformat(text)


def canonical_address(value: str) -> str:
    """Canonical textual form of an IP address (v4 or v6).

    Raises InvalidAddress for anything :mod:`ipaddress` will not parse,
    including empty strings and hostnames.
    """
    if not isinstance(value, str) or not value.strip():
        raise InvalidAddress(f"not a valid IP address: {value!r}")
    try:
        return str(ipaddress.ip_address(value.strip()))
    except ValueError:
        raise InvalidAddress(f"not a valid IP address: {value!r}") from None


# ---------------------------------------------------------------------------
# Questionnaire items and answers
# ---------------------------------------------------------------------------

class Direction(str, Enum):
    """How an item is scored: as answered, or reflected on the scale."""

    DIRECT = "direct"
    INVERSE = "inverse"


@dataclass(frozen=True)
class Question:
    index: int
    text: str
    direction: Direction

    def __post_init__(self):
        if not isinstance(self.index, int) or isinstance(self.index, bool) or self.index < 1:
            raise BankGap(f"item index must be a positive integer, got {self.index!r}")
        if not isinstance(self.text, str) or not self.text.strip():
            raise BankEmptyText(f"item {self.index} has empty text")
        if not isinstance(self.direction, Direction):
            object.__setattr__(self, "direction", Direction(self.direction))


@dataclass(frozen=True)
class AnswerValue:
    raw: int
    label: str


def make_answer_value(raw) -> AnswerValue:
    """Validated answer value with its canonical label.

    Accepts exactly the integers 1..5; anything else (including booleans,
    floats and strings) raises OutOfRange.
    """
    if not isinstance(raw, int) or isinstance(raw, bool) or raw not in LIKERT_LABELS:
        raise OutOfRange(f"answer value must be an integer 1..5, got {raw!r}")
    return AnswerValue(raw=raw, label=LIKERT_LABELS[raw])


@dataclass(frozen=True)
class Teacher:
    id: str
    display_name: str

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id.strip():
            raise DomainError("teacher id must be a non-empty string")
        if not isinstance(self.display_name, str) or not self.display_name.strip():
            raise DomainError("teacher display name must be non-empty")


class SessionMode(str, Enum):
    OFFICIAL = "official"
    DEMO = "demo"
    CLOSED = "closed"


@dataclass(frozen=True)
class EvaluationSession:
    """Per-(client IP, teacher) progress record.

    ``mode`` is fixed at first contact and is never rewritten by later
    campaign-config changes. Closed classifications are never persisted.
    """

    client_ip: str
    teacher_id: str
    last_answered: int
    mode: SessionMode
    started_at: datetime
    completed_at: Optional[datetime] = None
    questionnaire_no: Optional[int] = None

    def __post_init__(self):
        if self.last_answered < 0:
            raise DomainError("last_answered cannot be negative")
        if self.mode not in (SessionMode.OFFICIAL, SessionMode.DEMO):
            raise DomainError("persisted sessions are official or demo only")

    @property
    def completed(self) -> bool:
        return self.completed_at is not None


@dataclass(frozen=True)
class AnswerRecord:
    client_ip: str
    teacher_id: str
    question_index: int
    value: AnswerValue
    answered_at: datetime


# ---------------------------------------------------------------------------
# Campaign configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CampaignConfig:
    """Snapshot of campaign state plus the admin credential digest.

    The activation flag, current teacher, allowlist and deadline are
    persisted and admin-editable; the admin credentials come from startup
    configuration and ride along so one object describes the whole campaign.
    """

    active: bool
    current_teacher: Optional[str]
    allowlist: frozenset = field(default_factory=frozenset)
    deadline_seconds: Optional[int] = None
    admin_username: str = ""
    admin_password_hash: str = ""

    def __post_init__(self):
        if self.active and not self.current_teacher:
            raise NoTeacherSelected("an active campaign requires a selected teacher")
        if self.deadline_seconds is not None and self.deadline_seconds <= 0:
            raise DomainError("deadline_seconds must be a positive integer")
        canonical = frozenset(canonical_address(entry) for entry in self.allowlist)
        object.__setattr__(self, "allowlist", canonical)


# ---------------------------------------------------------------------------
# Question bank
# ---------------------------------------------------------------------------

def validate_question_bank(items: Iterable[Question], n_expected: int) -> list[Question]:
    """Accepts a bank iff its indices are exactly 1..n_expected.

    Returns the items ordered by index. Raises BankDuplicate for a repeated
    index, BankGap for a missing or out-of-range one, BankEmptyText for a
    blank item (also enforced at Question construction).
    """
    seen: dict[int, Question] = {}
    for item in items:
        if not item.text.strip():
            raise BankEmptyText(f"item {item.index} has empty text")
        if item.index in seen:
            raise BankDuplicate(f"duplicate item index {item.index}")
        if item.index < 1 or item.index > n_expected:
            raise BankGap(
                f"item index {item.index} outside expected range 1..{n_expected}"
            )
        seen[item.index] = item
    for i in range(1, n_expected + 1):
        if i not in seen:
            raise BankGap(f"missing item index {i}")
    return [seen[i] for i in range(1, n_expected + 1)]


class QuestionBank:
    """An ordered questionnaire: items with indices exactly 1..len(bank)."""

    def __init__(self, items: Iterable[Question], n_expected: Optional[int] = None):
        items = list(items)
        if n_expected is None:
            n_expected = len(items)
        self._items = tuple(validate_question_bank(items, n_expected))

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    @property
    def total(self) -> int:
        return len(self._items)

    def question(self, index: int) -> Question:
        if index < 1 or index > len(self._items):
            raise NotFound(f"no question with index {index}")
        return self._items[index - 1]

    def by_direction(self) -> tuple[list[Question], list[Question]]:
        """(direct items, inverse items), each in index order."""
        direct = [q for q in self._items if q.direction is Direction.DIRECT]
        inverse = [q for q in self._items if q.direction is Direction.INVERSE]
        return direct, inverse


def load_question_bank(path, n_expected: Optional[int] = None) -> QuestionBank:
    """Read a bank file: a JSON array of {index, text, direction} records."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise StorageFailure(f"question bank file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, list):
        raise StorageFailure(f"question bank file {path} must contain a JSON array")
    questions = []
    for record in data:
        try:
            questions.append(
                Question(
                    index=record["index"],
                    text=record["text"],
                    direction=Direction(record["direction"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise StorageFailure(f"malformed question record in {path}: {record!r} ({exc})") from None
    return QuestionBank(questions, n_expected)


class BankHolder:
    """Holds the active bank; admin reload swaps it atomically."""

    def __init__(self, bank: QuestionBank, source_path=None):
        self._bank = bank
        self.source_path = source_path
        self._lock = threading.Lock()

    def get(self) -> QuestionBank:
        return self._bank

    def replace(self, bank: QuestionBank) -> None:
        with self._lock:
            self._bank = bank

    def reload(self) -> QuestionBank:
        """Re-read the source file. The new bank must keep the same length
        so in-flight sessions keep a well-defined current question."""
        if self.source_path is None:
            raise StorageFailure("no question bank file configured for reload")
        bank = load_question_bank(self.source_path, n_expected=len(self._bank))
        self.replace(bank)
        return bank
