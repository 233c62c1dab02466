from __future__ import annotations

from datetime import datetime, timezone

import pytest

from teacheval.admin import AdminService, hash_password
from teacheval.engine import SessionEngine
from teacheval.model import (
    BankHolder,
    CampaignConfig,
    Direction,
    Question,
    QuestionBank,
    Teacher,
)
from teacheval.store import EvaluationStore

ADMIN_USER = "admin"
ADMIN_PASS = "s3cret-pass"
ADMIN_HASH = hash_password(ADMIN_PASS, iterations=1000)  # cheap for tests

ALLOWED_IP = "10.1.0.7"
OTHER_IP = "192.168.3.44"

T0 = datetime(2026, 5, 11, 12, 0, 0, tzinfo=timezone.utc)


def at(seconds: int) -> datetime:
    """Deterministic clock: T0 plus an offset."""
    from datetime import timedelta

    return T0 + timedelta(seconds=seconds)


def make_bank(n: int = 10) -> QuestionBank:
    """Small bank with inverse items at every index divisible by 3."""
    return QuestionBank(
        Question(
            index=i,
            text=f"Enunț de test nr. {i}.",
            direction=Direction.INVERSE if i % 3 == 0 else Direction.DIRECT,
        )
        for i in range(1, n + 1)
    )


def make_config(
    active: bool = True,
    teacher: str | None = "t1",
    allowlist=(ALLOWED_IP,),
    deadline_seconds: int | None = None,
) -> CampaignConfig:
    return CampaignConfig(
        active=active,
        current_teacher=teacher,
        allowlist=frozenset(allowlist),
        deadline_seconds=deadline_seconds,
        admin_username=ADMIN_USER,
        admin_password_hash=ADMIN_HASH,
    )


class ReferenceModel:
    """Brute-force oracle for the state machine: accepts a submission iff
    the session is incomplete, the index is exactly last+1 and the value is
    an integer 1..5. Everything else changes nothing."""

    def __init__(self, total: int):
        self.total = total
        self.last = 0
        self.answers: dict[int, int] = {}
        self.completed = False

    def submit(self, index, value) -> bool:
        if self.completed:
            return False
        if not isinstance(index, int) or isinstance(index, bool) or index != self.last + 1:
            return False
        if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
            return False
        self.answers[index] = value
        self.last = index
        if self.last == self.total:
            self.completed = True
        return True


@pytest.fixture
def store(tmp_path):
    s = EvaluationStore(tmp_path / "store.db")
    yield s
    s.close()


@pytest.fixture
def mem_store():
    s = EvaluationStore(":memory:")
    yield s
    s.close()


@pytest.fixture
def bank10():
    return make_bank(10)


@pytest.fixture
def roster(store):
    store.upsert_teacher(Teacher(id="t1", display_name="Conf.dr. Tiberiu Marius Karnyanszky"))
    store.upsert_teacher(Teacher(id="t2", display_name="Conf. dr. Lucian Luca"))
    return store


@pytest.fixture
def engine(roster, bank10):
    return SessionEngine(roster, BankHolder(bank10))


@pytest.fixture
def admin_service(roster):
    return AdminService(roster, ADMIN_USER, ADMIN_HASH, token_ttl_seconds=1800)


def stored_answers(store, ip, teacher_id) -> dict[int, int]:
    return store.answers_for(ip, teacher_id)
