from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from teacheval.admin import verify_password
from teacheval.cli import main
from teacheval.engine import SessionEngine
from teacheval.model import BankHolder, SessionMode, Teacher, make_answer_value
from teacheval.store import EvaluationStore

from conftest import at, make_bank, make_config


@pytest.fixture
def runner():
    return CliRunner()


def build_store_with_results(tmp_path, bank_path):
    bank = make_bank(4)
    bank_path.write_text(
        json.dumps(
            [
                {"index": q.index, "text": q.text, "direction": q.direction.value}
                for q in bank
            ],
            ensure_ascii=False,
        ),
        encoding="utf-8",
    )
    store = EvaluationStore(tmp_path / "cli.db")
    store.upsert_teacher(Teacher(id="t1", display_name="Conf.dr. Exemplu"))
    engine = SessionEngine(store, BankHolder(bank))
    config = make_config()
    for ip, value in [("10.1.0.7", 5), ("198.51.100.4", 2)]:
        engine.open_or_resume(ip, config, at(0))
        for i in range(1, 5):
            engine.submit_answer(ip, "t1", i, value, config, at(i))
    store.close()
    return store


class TestHashPassword:
    def test_prints_verifiable_digest(self, runner):
        result = runner.invoke(main, ["hash-password", "--password", "hunter2"])
        assert result.exit_code == 0
        assert verify_password("hunter2", result.output.strip())


class TestScan:
    def test_clean_store(self, runner, tmp_path):
        EvaluationStore(tmp_path / "ok.db").close()
        result = runner.invoke(main, ["scan", "--store-path", str(tmp_path / "ok.db")])
        assert result.exit_code == 0
        assert "integrity ok" in result.output

    def test_violations_exit_nonzero(self, runner, tmp_path):
        store = EvaluationStore(tmp_path / "bad.db")
        store.upsert_teacher(Teacher(id="t1", display_name="X Y"))
        store.ensure_session("10.0.0.1", "t1", SessionMode.OFFICIAL, at(0))
        store.record_answer_and_advance("10.0.0.1", "t1", 1, make_answer_value(3), at(1), 10)
        store._conn().execute("DELETE FROM answers")
        store.close()
        result = runner.invoke(main, ["scan", "--store-path", str(tmp_path / "bad.db")])
        assert result.exit_code == 1
        assert "VIOLATION" in result.output


class TestExport:
    def test_csv_to_file(self, runner, tmp_path):
        bank_path = tmp_path / "bank.json"
        build_store_with_results(tmp_path, bank_path)
        out = tmp_path / "results.csv"
        result = runner.invoke(
            main,
            [
                "export",
                "--store-path",
                str(tmp_path / "cli.db"),
                "--questions-file",
                str(bank_path),
                "--include-demo",
                "-o",
                str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "questionnaire_no,demo,completed_at,teacher,e1,e2,e3,e4"
        assert len(lines) == 3
        assert any(",DEMO," in line for line in lines[1:])

    def test_default_excludes_demo(self, runner, tmp_path):
        bank_path = tmp_path / "bank.json"
        build_store_with_results(tmp_path, bank_path)
        result = runner.invoke(
            main,
            [
                "export",
                "--store-path",
                str(tmp_path / "cli.db"),
                "--questions-file",
                str(bank_path),
            ],
        )
        assert result.exit_code == 0
        data_lines = [l for l in result.output.splitlines() if l and not l.startswith("wrote")]
        assert len(data_lines) == 2  # header + the official row

    def test_scored_flag(self, runner, tmp_path):
        bank_path = tmp_path / "bank.json"
        build_store_with_results(tmp_path, bank_path)
        result = runner.invoke(
            main,
            [
                "export",
                "--store-path",
                str(tmp_path / "cli.db"),
                "--questions-file",
                str(bank_path),
                "--include-demo",
                "--scored",
                "--delimiter",
                ";",
            ],
        )
        assert result.exit_code == 0
        demo_line = next(l for l in result.output.splitlines() if "DEMO" in l)
        # items 3 of 4 are inverse in the test bank: raw 2 scores as 4 there
        assert demo_line.endswith("2;2;4;2")


class TestServeWiring:
    def test_requires_credentials(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["serve", "--store-path", str(tmp_path / "s.db"), "--admin-user", "admin"],
        )
        assert result.exit_code != 0
        assert "--admin-pass-hash or --admin-pass" in result.output

    def test_builds_app_and_applies_deadline(self, runner, tmp_path, monkeypatch):
        captured = {}

        def fake_run(app, **kwargs):
            captured["app"] = app
            captured["kwargs"] = kwargs

        import uvicorn

        monkeypatch.setattr(uvicorn, "run", fake_run)
        result = runner.invoke(
            main,
            [
                "serve",
                "--store-path",
                str(tmp_path / "s.db"),
                "--admin-user",
                "admin",
                "--admin-pass",
                "pw",
                "--port",
                "9999",
                "--deadline-seconds",
                "1800",
            ],
        )
        assert result.exit_code == 0, result.output
        assert captured["kwargs"]["port"] == 9999
        assert "serving 58-item questionnaire" in result.output
        store = EvaluationStore(tmp_path / "s.db")
        assert store.load_config().deadline_seconds == 1800
        assert store.config_audit()[0]["changed_by"] == "startup"
        store.close()
