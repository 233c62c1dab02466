"""Teaching-evaluation campaigns: a sequential Likert questionnaire server
with IP-based access control, an authenticated admin plane and scored
per-teacher results."""

from .access import AccessDecision, authorize_reset, classify_access
from .engine import (
    Accepted,
    ClosedNotice,
    Completed,
    CompletedNotice,
    QuestionView,
    Rejected,
    RejectReason,
    SessionEngine,
    deadline_exceeded,
)
from .model import (
    AnswerRecord,
    AnswerValue,
    BankHolder,
    CampaignConfig,
    Direction,
    DomainError,
    EvaluationSession,
    LIKERT_LABELS,
    Question,
    QuestionBank,
    SessionMode,
    Teacher,
    load_question_bank,
    make_answer_value,
    validate_question_bank,
)
from .scoring import PrintableReport, ResultRow, list_results, printable_report, score_item
from .store import EvaluationStore

__version__ = "0.1.0"

__all__ = [
    "AccessDecision",
    "Accepted",
    "AnswerRecord",
    "AnswerValue",
    "BankHolder",
    "CampaignConfig",
    "ClosedNotice",
    "Completed",
    "CompletedNotice",
    "Direction",
    "DomainError",
    "EvaluationSession",
    "EvaluationStore",
    "LIKERT_LABELS",
    "PrintableReport",
    "Question",
    "QuestionBank",
    "QuestionView",
    "Rejected",
    "RejectReason",
    "ResultRow",
    "SessionEngine",
    "SessionMode",
    "Teacher",
    "authorize_reset",
    "classify_access",
    "deadline_exceeded",
    "list_results",
    "load_question_bank",
    "make_answer_value",
    "printable_report",
    "score_item",
    "validate_question_bank",
]
