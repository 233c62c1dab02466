"""Subprocess target for the kill-based crash-safety check.

Opens the store at argv[1] and feeds it an endless stream of valid
sequential submissions across many addresses until the parent kills the
process. Prints ``ready`` once the first answer has committed so the
parent only starts the kill timer on a store with real state in it.
"""
from __future__ import annotations

import sys

from teacheval.engine import SessionEngine
from teacheval.model import BankHolder, CampaignConfig, Direction, Question, QuestionBank, Teacher, utc_now
from teacheval.store import EvaluationStore


def main() -> None:
    store_path = sys.argv[1]
    round_no = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    store = EvaluationStore(store_path)
    store.upsert_teacher(Teacher(id="t1", display_name="Conf.dr. Exemplu"))
    bank = QuestionBank(
        Question(
            index=i,
            text=f"Enunț {i}.",
            direction=Direction.INVERSE if i % 3 == 0 else Direction.DIRECT,
        )
        for i in range(1, 11)
    )
    engine = SessionEngine(store, BankHolder(bank))
    config = CampaignConfig(
        active=True,
        current_teacher="t1",
        allowlist=frozenset(),
        admin_username="a",
        admin_password_hash="h",
    )
    announced = False
    serial = 0
    while True:
        serial += 1
        ip = f"10.{round_no % 200}.{(serial >> 8) % 256}.{serial % 256}"
        for i in range(1, 11):
            engine.submit_answer(ip, "t1", i, (i % 5) + 1, config, utc_now())
            if not announced:
                print("ready", flush=True)
                announced = True


if __name__ == "__main__":
    main()
