"""The questionnaire state machine.

Serves the current question, accepts answers strictly in sequence, rejects
replays and skips against the persisted progress (never against anything the
client sent), and handles completion, demo reset and the optional
whole-session deadline.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from typing import Optional, Union

from .access import CLOSED_MESSAGE, AccessDecision, authorize_reset, classify_access
from .model import (
    BankHolder,
    CampaignConfig,
    DeadlineExceeded,
    EvaluationSession,
    NoTeacherSelected,
    OutOfRange,
    Question,
    SessionMode,
    Teacher,
    TeacherNotFound,
    canonical_address,
    make_answer_value,
)
from .store import EvaluationStore, SequenceConflict


@dataclass(frozen=True)
class QuestionView:
    """What the student sees: the current question with progress context."""

    question: Question
    teacher_display_name: str
    answered: int
    total: int
    mode: SessionMode
    reset_allowed: bool
    status_message: Optional[str] = None

    def __post_init__(self):
        if self.question.index != self.answered + 1:
            raise AssertionError("view must show the first unanswered question")
        if self.answered >= self.total:
            raise AssertionError("view only exists while questions remain")

    @property
    def progress(self) -> tuple[int, int]:
        return (self.answered, self.total)


@dataclass(frozen=True)
class CompletedNotice:
    teacher_display_name: str
    mode: SessionMode
    questionnaire_no: Optional[int]
    completed_at: Optional[datetime]


@dataclass(frozen=True)
class ClosedNotice:
    message: str = CLOSED_MESSAGE


class RejectReason(str, Enum):
    OUT_OF_SEQUENCE = "OUT_OF_SEQUENCE"
    MISSING_SELECTION = "MISSING_SELECTION"
    VALUE_OUT_OF_RANGE = "VALUE_OUT_OF_RANGE"
    ALREADY_COMPLETED = "ALREADY_COMPLETED"
    CAMPAIGN_CLOSED = "CAMPAIGN_CLOSED"
    DEADLINE_EXCEEDED = "DEADLINE_EXCEEDED"


@dataclass(frozen=True)
class Accepted:
    next_view: QuestionView


@dataclass(frozen=True)
class Completed:
    notice: CompletedNotice


@dataclass(frozen=True)
class Rejected:
    """State is untouched; ``retry`` re-serves the true current question
    whenever one exists so the client can self-heal."""

    reason: RejectReason
    message: str
    retry: Optional[QuestionView] = None
    mode: Optional[SessionMode] = None


SubmitOutcome = Union[Accepted, Completed, Rejected]


def deadline_exceeded(
    session: EvaluationSession, config: CampaignConfig, now: datetime
) -> bool:
    """True iff a completion budget is configured and strictly more than
    that many seconds elapsed since the session started. Exactly on the
    boundary is still within budget."""
    if config.deadline_seconds is None:
        return False
    return (now - session.started_at).total_seconds() > config.deadline_seconds


class SessionEngine:
    """Coordinates access classification, the store and the question bank."""

    def __init__(self, store: EvaluationStore, bank: BankHolder):
        self._store = store
        self._bank = bank

    # -- helpers -------------------------------------------------------------

    def _current_teacher(self, config: CampaignConfig) -> Teacher:
        if not config.current_teacher:
            raise NoTeacherSelected("campaign is active but no teacher is selected")
        teacher = self._store.get_teacher(config.current_teacher)
        if teacher is None:
            raise TeacherNotFound(
                f"configured teacher {config.current_teacher!r} is not in the roster"
            )
        return teacher

    def _view(
        self,
        session: EvaluationSession,
        teacher: Teacher,
        decision: AccessDecision,
        status_message: Optional[str] = None,
    ) -> QuestionView:
        bank = self._bank.get()
        return QuestionView(
            question=bank.question(session.last_answered + 1),
            teacher_display_name=teacher.display_name,
            answered=session.last_answered,
            total=bank.total,
            mode=session.mode,
            reset_allowed=decision.reset_allowed,
            status_message=status_message,
        )

    def _completed_notice(self, session: EvaluationSession, teacher: Teacher) -> CompletedNotice:
        return CompletedNotice(
            teacher_display_name=teacher.display_name,
            mode=session.mode,
            questionnaire_no=session.questionnaire_no,
            completed_at=session.completed_at,
        )

    # -- operations ------------------------------------------------------------

    def open_or_resume(
        self, client_ip: str, config: CampaignConfig, now: datetime
    ) -> Union[QuestionView, CompletedNotice, ClosedNotice]:
        """First contact creates the session at question 1; afterwards the
        first unanswered question is re-served until the questionnaire is
        done, after which the same address gets the completion notice (one
        evaluation per teacher)."""
        ip = canonical_address(client_ip)
        decision = classify_access(ip, config)
        if decision.mode is SessionMode.CLOSED:
            return ClosedNotice()
        teacher = self._current_teacher(config)
        session = self._store.get_session(ip, teacher.id)
        if session is None:
            session = self._store.ensure_session(ip, teacher.id, decision.mode, now)
        if session.completed:
            return self._completed_notice(session, teacher)
        if deadline_exceeded(session, config, now):
            raise DeadlineExceeded(
                "the completion budget for this session has run out; "
                "answers so far are kept"
            )
        return self._view(session, teacher, decision)

    def submit_answer(
        self,
        client_ip: str,
        teacher_id: str,
        question_index,
        raw,
        config: CampaignConfig,
        now: datetime,
    ) -> SubmitOutcome:
        """Accept iff the submitted index is exactly last_answered + 1 and
        the value is a valid selection, atomically; any other submission
        leaves the store untouched and reports why."""
        ip = canonical_address(client_ip)
        decision = classify_access(ip, config)
        if decision.mode is SessionMode.CLOSED:
            return Rejected(RejectReason.CAMPAIGN_CLOSED, CLOSED_MESSAGE, mode=SessionMode.CLOSED)
        teacher = self._store.get_teacher(teacher_id)
        if teacher is None:
            raise TeacherNotFound(f"unknown teacher {teacher_id!r}")
        session = self._store.get_session(ip, teacher_id)
        if session is None:
            session = self._store.ensure_session(ip, teacher_id, decision.mode, now)
        if session.completed:
            return Rejected(
                RejectReason.ALREADY_COMPLETED,
                "this questionnaire was already completed; one evaluation per teacher",
                mode=session.mode,
            )
        if deadline_exceeded(session, config, now):
            return Rejected(
                RejectReason.DEADLINE_EXCEEDED,
                "the completion budget for this session has run out",
                mode=session.mode,
            )

        def retry(message: str) -> QuestionView:
            return self._view(session, teacher, decision, status_message=message)

        expected = session.last_answered + 1
        if (
            not isinstance(question_index, int)
            or isinstance(question_index, bool)
            or question_index != expected
        ):
            message = f"question {expected} is the one to answer now"
            return Rejected(
                RejectReason.OUT_OF_SEQUENCE, message, retry(message), mode=session.mode
            )
        if raw is None:
            message = "please select one of the five answers"
            return Rejected(
                RejectReason.MISSING_SELECTION, message, retry(message), mode=session.mode
            )
        try:
            value = make_answer_value(raw)
        except OutOfRange:
            message = "the submitted answer value is not one of the five options"
            return Rejected(
                RejectReason.VALUE_OUT_OF_RANGE, message, retry(message), mode=session.mode
            )

        bank = self._bank.get()
        try:
            new_last, questionnaire_no = self._store.record_answer_and_advance(
                ip, teacher_id, question_index, value, now, total=bank.total
            )
        except SequenceConflict:
            fresh = self._store.get_session(ip, teacher_id)
            if fresh is not None and fresh.completed:
                return Rejected(
                    RejectReason.ALREADY_COMPLETED,
                    "this questionnaire was already completed; one evaluation per teacher",
                    mode=fresh.mode,
                )
            message = "that question is not the one to answer now"
            fresh_retry = None
            if fresh is not None:
                fresh_retry = self._view(fresh, teacher, decision, status_message=message)
            return Rejected(
                RejectReason.OUT_OF_SEQUENCE,
                message,
                fresh_retry,
                mode=fresh.mode if fresh is not None else session.mode,
            )

        if questionnaire_no is not None:
            return Completed(
                CompletedNotice(
                    teacher_display_name=teacher.display_name,
                    mode=session.mode,
                    questionnaire_no=questionnaire_no,
                    completed_at=now,
                )
            )
        advanced = replace(session, last_answered=new_last)
        return Accepted(self._view(advanced, teacher, decision))

    def reset_demo(self, client_ip: str, config: CampaignConfig) -> int:
        """Wipe every recording for this address so a demo user can start
        over. Idempotent; forbidden outside demo mode."""
        ip = canonical_address(client_ip)
        decision = classify_access(ip, config)
        authorize_reset(decision)
        return self._store.purge_ip(ip)
