"""Behavioral acceptance suite, one test per gate criterion.

Each test prints an ``ACCEPTANCE PASS`` line on success (visible with
``pytest -s``); any failure fails the suite. Runs headlessly with no
frontend built.
"""
from __future__ import annotations

import random
import signal
import subprocess
import sys
import threading
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from teacheval.access import classify_access
from teacheval.api import create_app
from teacheval.engine import Accepted, Completed, Rejected, RejectReason, SessionEngine
from teacheval.model import (
    BankHolder,
    Direction,
    InvalidAddress,
    ResetForbidden,
    SessionMode,
    Teacher,
    load_question_bank,
)
from teacheval.scoring import list_results, score_item
from teacheval.store import EvaluationStore

from conftest import (
    ADMIN_HASH,
    ADMIN_PASS,
    ADMIN_USER,
    ALLOWED_IP,
    OTHER_IP,
    ReferenceModel,
    at,
    make_bank,
    make_config,
    stored_answers,
)


def ok(label: str) -> None:
    print(f"ACCEPTANCE PASS: {label}")


def test_adversarial_prefix_fuzz_10000_runs():
    """10,000 randomized submit sequences against a 10-item bank must leave
    exactly the state of the brute-force reference model, within 30 s."""
    rng = random.Random(20260511)
    store = EvaluationStore(":memory:")
    store.upsert_teacher(Teacher(id="t1", display_name="Conf.dr. Exemplu"))
    engine = SessionEngine(store, BankHolder(make_bank(10)))
    config = make_config(allowlist=())
    junk_values = [0, 6, -3, None, "4", 3.7, True, 99]
    junk_indices = [-1, 0, 11, 12, 99, "3", True]

    started = time.monotonic()
    runs = 10_000
    for n in range(runs):
        ip = f"10.{(n >> 16) & 255}.{(n >> 8) & 255}.{n & 255}"
        model = ReferenceModel(total=10)
        for step in range(rng.randint(5, 18)):
            if rng.random() < 0.55:
                index = model.last + 1
            else:
                index = rng.choice(junk_indices)
            if rng.random() < 0.70:
                value = rng.randint(1, 5)
            else:
                value = rng.choice(junk_values)
            outcome = engine.submit_answer(ip, "t1", index, value, config, at(step))
            accepted = isinstance(outcome, (Accepted, Completed))
            assert accepted == model.submit(index, value), (n, step, index, value)
        session = store.get_session(ip, "t1")
        last = session.last_answered if session else 0
        assert last == model.last, (n, last, model.last)
        assert stored_answers(store, ip, "t1") == model.answers, n
    elapsed = time.monotonic() - started
    store.close()
    assert elapsed < 30, f"fuzz took {elapsed:.1f}s"
    ok(
        f"adversarial-prefix fuzz: {runs}/{runs} runs matched the reference "
        f"model in {elapsed:.1f}s"
    )


def test_concurrent_submissions_single_winner(tmp_path):
    """16 concurrent submissions of the same next index, 200 rounds: exactly
    one acceptance per round and last_answered advances by exactly 1."""
    store = EvaluationStore(tmp_path / "race.db")
    store.upsert_teacher(Teacher(id="t1", display_name="Conf.dr. Exemplu"))
    engine = SessionEngine(store, BankHolder(make_bank(250)))
    config = make_config()
    engine.open_or_resume(ALLOWED_IP, config, at(0))

    rounds = 200
    workers = 16
    for round_no in range(rounds):
        next_index = store.get_session(ALLOWED_IP, "t1").last_answered + 1
        assert next_index == round_no + 1
        barrier = threading.Barrier(workers)
        outcomes = [None] * workers

        def submit(slot):
            barrier.wait()
            outcomes[slot] = engine.submit_answer(
                ALLOWED_IP, "t1", next_index, 3, config, at(round_no + 1)
            )

        threads = [threading.Thread(target=submit, args=(slot,)) for slot in range(workers)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        accepted = [o for o in outcomes if isinstance(o, Accepted)]
        rejected = [o for o in outcomes if isinstance(o, Rejected)]
        assert len(accepted) == 1, f"round {round_no}: {len(accepted)} acceptances"
        assert len(rejected) == workers - 1
        assert all(o.reason is RejectReason.OUT_OF_SEQUENCE for o in rejected)
        assert store.get_session(ALLOWED_IP, "t1").last_answered == next_index
    store.close()
    ok(f"concurrency race: 1 acceptance + {workers - 1} out-of-sequence in all {rounds} rounds")


def test_three_state_classification_matrix():
    """All combinations of campaign activation and address standing produce
    exactly the documented classification."""
    active = make_config(active=True)
    inactive = make_config(active=False, teacher=None)
    table = [
        (active, ALLOWED_IP, SessionMode.OFFICIAL),
        (active, OTHER_IP, SessionMode.DEMO),
        (active, "not-an-ip", InvalidAddress),
        (inactive, ALLOWED_IP, SessionMode.CLOSED),
        (inactive, OTHER_IP, SessionMode.CLOSED),
        (inactive, "not-an-ip", InvalidAddress),
    ]
    for config, ip, expected in table:
        if expected is InvalidAddress:
            with pytest.raises(InvalidAddress):
                classify_access(ip, config)
        else:
            decision = classify_access(ip, config)
            assert decision.mode is expected, (config.active, ip)
            assert decision.reset_allowed == (expected is SessionMode.DEMO)
    ok("three-state matrix: all 6 activation/address combinations classified exactly")


@pytest.fixture
def walkthrough_client(tmp_path):
    store = EvaluationStore(tmp_path / "walk.db")
    store.upsert_teacher(Teacher(id="t1", display_name="Conf.dr. Tiberiu Marius Karnyanszky"))
    bank_path = Path(__file__).resolve().parents[1] / "src/teacheval/data/sample_bank.json"
    app = create_app(
        store=store,
        bank_holder=BankHolder(load_question_bank(bank_path)),
        admin_username=ADMIN_USER,
        admin_password_hash=ADMIN_HASH,
        trust_proxy_header=True,
    )
    client = TestClient(app)
    yield client, store
    store.close()


def test_full_walkthrough_of_shipped_bank(walkthrough_client):
    """A scripted client completes all 58 items of the shipped sample bank;
    the session shows up as one complete result row; a repeat attempt gets
    the completion notice."""
    client, store = walkthrough_client
    headers = {"X-Forwarded-For": ALLOWED_IP}
    admin = client.post(
        "/api/admin/login", json={"username": ADMIN_USER, "password": ADMIN_PASS}
    ).json()
    auth = {"Authorization": f"Bearer {admin['token']}"}
    assert (
        client.put(
            "/api/admin/config",
            json={"active": True, "current_teacher": "t1", "allowlist": [ALLOWED_IP]},
            headers=auth,
        ).status_code
        == 200
    )

    view = client.get("/api/session", headers=headers).json()
    assert view["question"]["index"] == 1
    assert view["progress"]["total"] == 58
    answered = 0
    while view["state"] == "question":
        index = view["question"]["index"]
        response = client.post(
            "/api/session/answer",
            json={"question_index": index, "value": (index % 5) + 1},
            headers=headers,
        )
        assert response.status_code == 200, response.text
        view = response.json()
        answered += 1
    assert answered == 58
    assert view["state"] == "completed"
    assert view["questionnaire_no"] == 1

    results = client.get("/api/results", headers=auth).json()
    assert results["total"] == 1
    row = results["results"][0]
    assert row["questionnaire_no"] == 1
    assert len(row["raw_answers"]) == 58

    again = client.get("/api/session", headers=headers).json()
    assert again["state"] == "completed"
    resubmit = client.post(
        "/api/session/answer", json={"question_index": 1, "value": 3}, headers=headers
    )
    assert resubmit.status_code == 409
    assert resubmit.json()["error"]["code"] == "ALREADY_COMPLETED"
    ok("full walkthrough: 58 items completed once, repeat attempt refused")


def test_reset_semantics(roster, bank10):
    """A demo address can restart from question 1; an official reset attempt
    is refused and leaves the store byte-identical."""
    engine = SessionEngine(roster, BankHolder(bank10))
    config = make_config()
    engine.open_or_resume(OTHER_IP, config, at(0))
    for i in range(1, 8):
        engine.submit_answer(OTHER_IP, "t1", i, 2, config, at(i))
    assert engine.reset_demo(OTHER_IP, config) == 7
    view = engine.open_or_resume(OTHER_IP, config, at(20))
    assert view.question.index == 1

    engine.open_or_resume(ALLOWED_IP, config, at(30))
    engine.submit_answer(ALLOWED_IP, "t1", 1, 5, config, at(31))
    before = roster.dump().encode("utf-8")
    with pytest.raises(ResetForbidden):
        engine.reset_demo(ALLOWED_IP, config)
    after = roster.dump().encode("utf-8")
    assert after == before
    ok("reset semantics: demo restarts at question 1, official reset kept the store byte-identical")


def test_scoring_properties_exhaustive():
    """Direct identity, inverse reflection, involution and the midpoint
    fixed point, for every value on the scale. Zero tolerance."""
    for v in range(1, 6):
        assert score_item(v, Direction.DIRECT) == v
        assert score_item(v, Direction.INVERSE) == 6 - v
        assert score_item(score_item(v, Direction.INVERSE), Direction.INVERSE) == v
    assert score_item(3, Direction.INVERSE) == 3
    ok("scoring properties: identity, 6-v reflection, involution and fixed point hold for v=1..5")


def test_crash_safety_integrity_scan(tmp_path):
    """Kill the submitting process at 50 random points; the store must pass
    the contiguity scan after every recovery."""
    store_path = tmp_path / "crash.db"
    driver = Path(__file__).with_name("crash_driver.py")
    rng = random.Random(4242)
    rounds = 50
    total_answers_seen = 0
    for round_no in range(rounds):
        proc = subprocess.Popen(
            [sys.executable, str(driver), str(store_path), str(round_no)],
            stdout=subprocess.PIPE,
            text=True,
        )
        try:
            line = proc.stdout.readline()
            assert line.strip() == "ready", f"driver said {line!r}"
            time.sleep(rng.uniform(0.01, 0.15))
        finally:
            proc.kill()
            proc.wait()
        store = EvaluationStore(store_path)
        violations = store.integrity_scan()
        assert violations == [], f"round {round_no}: {violations}"
        total_answers_seen = store.count_answers()
        store.close()
    assert total_answers_seen > 0
    ok(f"crash safety: store passed the integrity scan after all {rounds} kills "
       f"({total_answers_seen} answers survived)")


def test_demo_filter_counts():
    """With k demo and m official completions, the listing returns m rows
    without demo and k+m rows with it, for randomized k,m <= 20."""
    rng = random.Random(77)
    for trial in range(4):
        k = rng.randint(0, 20)
        m = rng.randint(0, 20)
        store = EvaluationStore(":memory:")
        store.upsert_teacher(Teacher(id="t1", display_name="Conf.dr. Exemplu"))
        bank = make_bank(6)
        engine = SessionEngine(store, BankHolder(bank))
        official_ips = [f"10.9.0.{i + 1}" for i in range(m)]
        demo_ips = [f"198.51.100.{i + 1}" for i in range(k)]
        config = make_config(allowlist=official_ips)
        for ip in official_ips + demo_ips:
            for i in range(1, 7):
                outcome = engine.submit_answer(ip, "t1", i, rng.randint(1, 5), config, at(i))
                assert isinstance(outcome, (Accepted, Completed))
        without_demo = list_results(store, bank, include_demo=False)
        with_demo = list_results(store, bank, include_demo=True)
        assert len(without_demo) == m, (trial, k, m)
        assert len(with_demo) == k + m, (trial, k, m)
        assert all(not row.demo for row in without_demo)
        assert sum(row.demo for row in with_demo) == k
        store.close()
    ok("demo filter: m official rows without demo, k+m rows with it, over randomized k,m <= 20")
