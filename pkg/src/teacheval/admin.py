"""The authenticated control plane: login tokens, the status view,
campaign parameter changes and the teacher roster.

Admin access is credential-gated only — it is deliberately not subject to
the student-plane IP allowlist.
"""
from __future__ import annotations

import hashlib
import hmac
import json
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Optional

from .model import (
    CampaignConfig,
    NoTeacherSelected,
    Teacher,
    TeacherInUse,
    TeacherNotFound,
    Unauthorized,
    canonical_address,
)
from .store import SCHEMA_VERSION, EvaluationStore

TOKEN_TTL_SECONDS = 1800  # sliding

_PBKDF2_ITERATIONS = 120_000

#: distinguishes "parameter not supplied" from an explicit None.
UNSET = object()


def hash_password(password: str, *, iterations: int = _PBKDF2_ITERATIONS, salt: Optional[bytes] = None) -> str:
    if salt is None:
        salt = secrets.token_bytes(16)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations)
    return f"pbkdf2_sha256${iterations}${salt.hex()}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    """Constant-time comparison against a stored salted digest."""
    try:
        scheme, iterations, salt_hex, digest_hex = stored.split("$")
        if scheme != "pbkdf2_sha256":
            return False
        candidate = hashlib.pbkdf2_hmac(
            "sha256", password.encode("utf-8"), bytes.fromhex(salt_hex), int(iterations)
        )
        return hmac.compare_digest(candidate.hex(), digest_hex)
    except (ValueError, TypeError):
        return False


@dataclass(frozen=True)
class SessionCounts:
    official: int
    demo: int
    completed: int
    in_progress: int


@dataclass(frozen=True)
class RespondentProgress:
    """Where a respondent is — progress counters only, never answer values."""

    client_ip: str
    teacher_id: str
    mode: str
    answered: int
    total: int
    state: str  # in_progress | completed | expired
    started_at: datetime
    completed_at: Optional[datetime] = None
    questionnaire_no: Optional[int] = None


@dataclass(frozen=True)
class StoreHealth:
    schema_version: str
    sessions: int
    answers: int
    integrity_ok: bool
    violations: tuple = ()


@dataclass(frozen=True)
class StatusReport:
    active: bool
    current_teacher: Optional[str]
    counts: SessionCounts
    respondents: tuple
    store_health: StoreHealth


@dataclass
class _TokenRecord:
    username: str
    expires_at: datetime


class AdminService:
    def __init__(
        self,
        store: EvaluationStore,
        admin_username: str,
        admin_password_hash: str,
        token_ttl_seconds: int = TOKEN_TTL_SECONDS,
    ):
        self._store = store
        self._username = admin_username
        self._password_hash = admin_password_hash
        self._ttl = timedelta(seconds=token_ttl_seconds)
        self._tokens: dict[str, _TokenRecord] = {}
        self._lock = threading.Lock()

    # -- authentication --------------------------------------------------------

    def authenticate(self, username: str, password: str, now: datetime) -> str:
        """Exchange credentials for an expiring opaque token. Wrong username
        and wrong password fail identically, so neither is an oracle."""
        name_ok = hmac.compare_digest(
            (username or "").encode("utf-8"), self._username.encode("utf-8")
        )
        pass_ok = verify_password(password or "", self._password_hash)
        if not (name_ok and pass_ok):
            raise Unauthorized("wrong username or password")
        token = secrets.token_urlsafe(32)
        with self._lock:
            self._prune(now)
            self._tokens[token] = _TokenRecord(username=username, expires_at=now + self._ttl)
        return token

    def require(self, token: Optional[str], now: datetime) -> str:
        """Validate a token and slide its expiry; returns the username."""
        with self._lock:
            record = self._tokens.get(token or "")
            if record is None or record.expires_at < now:
                if record is not None:
                    del self._tokens[token]
                raise Unauthorized("missing, invalid or expired admin token")
            record.expires_at = now + self._ttl
            return record.username

    def _prune(self, now: datetime) -> None:
        expired = [t for t, rec in self._tokens.items() if rec.expires_at < now]
        for t in expired:
            del self._tokens[t]

    @property
    def token_count(self) -> int:
        with self._lock:
            return len(self._tokens)

    # -- status -----------------------------------------------------------------

    def view_status(self, token: str, now: datetime, bank_total: int) -> StatusReport:
        self.require(token, now)
        config = self._load_config()
        counts = self._store.session_counts()
        respondents = []
        for entry in self._store.list_session_progress():
            if entry["completed_at"] is not None:
                state = "completed"
            elif config.deadline_seconds is not None and (
                now - entry["started_at"]
            ).total_seconds() > config.deadline_seconds:
                state = "expired"
            else:
                state = "in_progress"
            respondents.append(
                RespondentProgress(
                    client_ip=entry["client_ip"],
                    teacher_id=entry["teacher_id"],
                    mode=entry["mode"].value,
                    answered=entry["last_answered"],
                    total=bank_total,
                    state=state,
                    started_at=entry["started_at"],
                    completed_at=entry["completed_at"],
                    questionnaire_no=entry["questionnaire_no"],
                )
            )
        violations = self._store.integrity_scan()
        current_display = None
        if config.current_teacher:
            teacher = self._store.get_teacher(config.current_teacher)
            current_display = teacher.display_name if teacher else config.current_teacher
        return StatusReport(
            active=config.active,
            current_teacher=current_display,
            counts=SessionCounts(
                official=counts["official"],
                demo=counts["demo"],
                completed=counts["completed"],
                in_progress=counts["in_progress"],
            ),
            respondents=tuple(respondents),
            store_health=StoreHealth(
                schema_version=SCHEMA_VERSION,
                sessions=counts["total"],
                answers=self._store.count_answers(),
                integrity_ok=not violations,
                violations=tuple(violations),
            ),
        )

    # -- parameters ---------------------------------------------------------------

    def _load_config(self) -> CampaignConfig:
        return self._store.load_config(self._username, self._password_hash)

    def set_parameters(
        self,
        token: str,
        now: datetime,
        *,
        active=UNSET,
        current_teacher=UNSET,
        allowlist=UNSET,
        deadline_seconds=UNSET,
    ) -> CampaignConfig:
        """Apply the provided fields to the campaign config as one atomic,
        audited replacement. Activating requires a selectable teacher."""
        username = self.require(token, now)
        current = self._load_config()
        changes: dict = {}

        new_active = current.active
        if active is not UNSET and active is not None:
            new_active = bool(active)
            if new_active != current.active:
                changes["active"] = {"old": current.active, "new": new_active}

        new_teacher = current.current_teacher
        if current_teacher is not UNSET:
            new_teacher = current_teacher
            if new_teacher is not None:
                teacher = self._store.get_teacher(new_teacher)
                if teacher is None or self._store.is_teacher_hidden(new_teacher):
                    raise TeacherNotFound(
                        f"teacher {new_teacher!r} is not selectable for evaluation"
                    )
            if new_teacher != current.current_teacher:
                changes["current_teacher"] = {
                    "old": current.current_teacher,
                    "new": new_teacher,
                }

        new_allowlist = current.allowlist
        if allowlist is not UNSET and allowlist is not None:
            new_allowlist = frozenset(canonical_address(entry) for entry in allowlist)
            if new_allowlist != current.allowlist:
                changes["allowlist"] = {
                    "old": sorted(current.allowlist),
                    "new": sorted(new_allowlist),
                }

        new_deadline = current.deadline_seconds
        if deadline_seconds is not UNSET:
            if deadline_seconds is not None:
                deadline_seconds = int(deadline_seconds)
            new_deadline = deadline_seconds
            if new_deadline != current.deadline_seconds:
                changes["deadline_seconds"] = {
                    "old": current.deadline_seconds,
                    "new": new_deadline,
                }

        if new_active and not new_teacher:
            raise NoTeacherSelected("cannot activate the campaign without a teacher")

        updated = CampaignConfig(
            active=new_active,
            current_teacher=new_teacher,
            allowlist=new_allowlist,
            deadline_seconds=new_deadline,
            admin_username=self._username,
            admin_password_hash=self._password_hash,
        )
        if changes:
            self._store.save_config(updated, changed_by=username, changes=changes, now=now)
        return updated

    # -- roster ---------------------------------------------------------------------

    def upsert_teacher(self, token: str, now: datetime, teacher: Teacher) -> Teacher:
        self.require(token, now)
        self._store.upsert_teacher(teacher)
        return teacher

    def list_teachers(self, token: str, now: datetime) -> list[Teacher]:
        self.require(token, now)
        return self._store.list_teachers(include_hidden=False)

    def remove_teacher(self, token: str, now: datetime, teacher_id: str) -> None:
        """Soft-hide a teacher. Historic sessions keep referring to the row,
        so past results stay listable. The actively evaluated teacher cannot
        be removed; if an inactive campaign still points at the teacher, the
        selection is cleared."""
        username = self.require(token, now)
        config = self._load_config()
        if self._store.get_teacher(teacher_id) is None:
            raise TeacherNotFound(f"unknown teacher {teacher_id!r}")
        if config.active and config.current_teacher == teacher_id:
            raise TeacherInUse(
                f"teacher {teacher_id!r} is being evaluated by the active campaign"
            )
        self._store.hide_teacher(teacher_id)
        if config.current_teacher == teacher_id:
            cleared = CampaignConfig(
                active=config.active,
                current_teacher=None,
                allowlist=config.allowlist,
                deadline_seconds=config.deadline_seconds,
                admin_username=self._username,
                admin_password_hash=self._password_hash,
            )
            self._store.save_config(
                cleared,
                changed_by=username,
                changes={"current_teacher": {"old": teacher_id, "new": None}},
                now=now,
            )
