"""Durable storage: sessions, answers, teacher roster, campaign config and
a config-change audit trail, all in one embedded SQLite file.

Writes are transactional (the sequence check and the answer insert commit as
one unit) and the store serializes concurrent writers; reads used by the
results plane are single-statement snapshots.
"""
from __future__ import annotations

import json
import sqlite3
import threading
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Optional

from .model import (
    AnswerValue,
    CampaignConfig,
    DomainError,
    EvaluationSession,
    SessionMode,
    StorageFailure,
    Teacher,
    from_iso,
    to_iso,
)

SCHEMA_VERSION = "1"

_SCHEMA = """
CREATE TABLE IF NOT EXISTS meta (
    key   TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS teachers (
    id           TEXT PRIMARY KEY,
    display_name TEXT NOT NULL,
    hidden       INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS sessions (
    client_ip        TEXT NOT NULL,
    teacher_id       TEXT NOT NULL REFERENCES teachers(id),
    mode             TEXT NOT NULL CHECK (mode IN ('official', 'demo')),
    last_answered    INTEGER NOT NULL DEFAULT 0 CHECK (last_answered >= 0),
    started_at       TEXT NOT NULL,
    completed_at     TEXT,
    questionnaire_no INTEGER UNIQUE,
    PRIMARY KEY (client_ip, teacher_id)
);
CREATE TABLE IF NOT EXISTS answers (
    client_ip      TEXT NOT NULL,
    teacher_id     TEXT NOT NULL,
    question_index INTEGER NOT NULL CHECK (question_index >= 1),
    value          INTEGER NOT NULL CHECK (value BETWEEN 1 AND 5),
    answered_at    TEXT NOT NULL,
    PRIMARY KEY (client_ip, teacher_id, question_index),
    FOREIGN KEY (client_ip, teacher_id) REFERENCES sessions(client_ip, teacher_id)
);
CREATE TABLE IF NOT EXISTS config (
    id               INTEGER PRIMARY KEY CHECK (id = 1),
    active           INTEGER NOT NULL DEFAULT 0,
    current_teacher  TEXT,
    allowlist        TEXT NOT NULL DEFAULT '[]',
    deadline_seconds INTEGER
);
CREATE TABLE IF NOT EXISTS config_audit (
    seq        INTEGER PRIMARY KEY AUTOINCREMENT,
    changed_at TEXT NOT NULL,
    changed_by TEXT NOT NULL,
    change     TEXT NOT NULL
);
"""


class SequenceConflict(DomainError):
    """The guarded advance lost: the submitted index no longer equals
    last_answered + 1 (raced or replayed). Surfaced upstream as an
    out-of-sequence rejection."""

    code = "OUT_OF_SEQUENCE"


def _iso_or_none(value: Optional[datetime]) -> Optional[str]:
    return None if value is None else to_iso(value)


def _dt_or_none(value: Optional[str]) -> Optional[datetime]:
    return None if value is None else from_iso(value)


class EvaluationStore:
    """Embedded transactional store over a single server-local file.

    ``:memory:`` is supported for tests and uses one shared connection
    guarded by a lock; file-backed stores use one connection per thread and
    rely on SQLite (WAL + immediate transactions) for serialization.
    """

    def __init__(self, path, busy_timeout_ms: int = 30000):
        self._path = str(path)
        self._memory = self._path == ":memory:"
        self._busy_timeout_ms = busy_timeout_ms
        self._local = threading.local()
        self._lock = threading.RLock() if self._memory else _NullLock()
        self._shared_conn: Optional[sqlite3.Connection] = None
        if self._memory:
            self._shared_conn = self._new_connection()
        self._init_schema()

    # -- connections --------------------------------------------------------

    def _new_connection(self) -> sqlite3.Connection:
        conn = sqlite3.connect(
            self._path,
            timeout=self._busy_timeout_ms / 1000.0,
            isolation_level=None,
            check_same_thread=not self._memory,
        )
        conn.row_factory = sqlite3.Row
        conn.execute(f"PRAGMA busy_timeout = {int(self._busy_timeout_ms)}")
        conn.execute("PRAGMA foreign_keys = ON")
        if not self._memory:
            conn.execute("PRAGMA journal_mode = WAL")
            conn.execute("PRAGMA synchronous = NORMAL")
        return conn

    def _conn(self) -> sqlite3.Connection:
        if self._memory:
            return self._shared_conn
        conn = getattr(self._local, "conn", None)
        if conn is None:
            conn = self._new_connection()
            self._local.conn = conn
        return conn

    def close(self) -> None:
        if self._memory and self._shared_conn is not None:
            self._shared_conn.close()
            self._shared_conn = None
            return
        conn = getattr(self._local, "conn", None)
        if conn is not None:
            conn.close()
            self._local.conn = None

    @contextmanager
    def _tx(self, immediate: bool = False):
        """Manual transaction; commits on success, rolls back on any error."""
        with self._lock:
            conn = self._conn()
            conn.execute("BEGIN IMMEDIATE" if immediate else "BEGIN")
            try:
                yield conn
            except BaseException:
                conn.execute("ROLLBACK")
                raise
            conn.execute("COMMIT")

    def _init_schema(self) -> None:
        with self._lock:
            # executescript manages its own transaction boundaries
            self._conn().executescript(_SCHEMA)
        with self._tx(immediate=True) as conn:
            row = conn.execute("SELECT value FROM meta WHERE key = 'schema_version'").fetchone()
            if row is None:
                conn.execute(
                    "INSERT INTO meta (key, value) VALUES ('schema_version', ?)",
                    (SCHEMA_VERSION,),
                )
            elif row["value"] != SCHEMA_VERSION:
                raise StorageFailure(
                    f"store schema version {row['value']} is not supported "
                    f"(expected {SCHEMA_VERSION})"
                )
            conn.execute("INSERT OR IGNORE INTO config (id) VALUES (1)")

    # -- teachers ------------------------------------------------------------

    def upsert_teacher(self, teacher: Teacher) -> None:
        with self._tx() as conn:
            conn.execute(
                "INSERT INTO teachers (id, display_name, hidden) VALUES (?, ?, 0) "
                "ON CONFLICT(id) DO UPDATE SET display_name = excluded.display_name, hidden = 0",
                (teacher.id, teacher.display_name),
            )

    def get_teacher(self, teacher_id: str) -> Optional[Teacher]:
        """Returns the teacher even if hidden; results need historic names."""
        row = self._conn().execute(
            "SELECT id, display_name FROM teachers WHERE id = ?", (teacher_id,)
        ).fetchone()
        return None if row is None else Teacher(id=row["id"], display_name=row["display_name"])

    def is_teacher_hidden(self, teacher_id: str) -> bool:
        row = self._conn().execute(
            "SELECT hidden FROM teachers WHERE id = ?", (teacher_id,)
        ).fetchone()
        return bool(row and row["hidden"])

    def list_teachers(self, include_hidden: bool = False) -> list[Teacher]:
        sql = "SELECT id, display_name FROM teachers"
        if not include_hidden:
            sql += " WHERE hidden = 0"
        sql += " ORDER BY display_name"
        return [
            Teacher(id=row["id"], display_name=row["display_name"])
            for row in self._conn().execute(sql)
        ]

    def hide_teacher(self, teacher_id: str) -> bool:
        with self._tx() as conn:
            cur = conn.execute("UPDATE teachers SET hidden = 1 WHERE id = ?", (teacher_id,))
            return cur.rowcount > 0

    # -- campaign config -----------------------------------------------------

    def load_config(self, admin_username: str = "", admin_password_hash: str = "") -> CampaignConfig:
        row = self._conn().execute(
            "SELECT active, current_teacher, allowlist, deadline_seconds FROM config WHERE id = 1"
        ).fetchone()
        if row is None:
            raise StorageFailure("config row missing; store not initialized")
        return CampaignConfig(
            active=bool(row["active"]),
            current_teacher=row["current_teacher"],
            allowlist=frozenset(json.loads(row["allowlist"])),
            deadline_seconds=row["deadline_seconds"],
            admin_username=admin_username,
            admin_password_hash=admin_password_hash,
        )

    def save_config(self, config: CampaignConfig, changed_by: str, changes: dict, now: datetime) -> None:
        """Replace the campaign parameters atomically and audit the change."""
        with self._tx(immediate=True) as conn:
            conn.execute(
                "UPDATE config SET active = ?, current_teacher = ?, allowlist = ?, "
                "deadline_seconds = ? WHERE id = 1",
                (
                    1 if config.active else 0,
                    config.current_teacher,
                    json.dumps(sorted(config.allowlist)),
                    config.deadline_seconds,
                ),
            )
            conn.execute(
                "INSERT INTO config_audit (changed_at, changed_by, change) VALUES (?, ?, ?)",
                (to_iso(now), changed_by, json.dumps(changes, sort_keys=True)),
            )

    def config_audit(self, limit: int = 50) -> list[dict]:
        rows = self._conn().execute(
            "SELECT changed_at, changed_by, change FROM config_audit ORDER BY seq DESC LIMIT ?",
            (limit,),
        ).fetchall()
        return [
            {
                "changed_at": row["changed_at"],
                "changed_by": row["changed_by"],
                "change": json.loads(row["change"]),
            }
            for row in rows
        ]

    # -- sessions and answers -------------------------------------------------

    def _session_from_row(self, row) -> EvaluationSession:
        return EvaluationSession(
            client_ip=row["client_ip"],
            teacher_id=row["teacher_id"],
            last_answered=row["last_answered"],
            mode=SessionMode(row["mode"]),
            started_at=from_iso(row["started_at"]),
            completed_at=_dt_or_none(row["completed_at"]),
            questionnaire_no=row["questionnaire_no"],
        )

    def get_session(self, client_ip: str, teacher_id: str) -> Optional[EvaluationSession]:
        row = self._conn().execute(
            "SELECT * FROM sessions WHERE client_ip = ? AND teacher_id = ?",
            (client_ip, teacher_id),
        ).fetchone()
        return None if row is None else self._session_from_row(row)

    def ensure_session(
        self, client_ip: str, teacher_id: str, mode: SessionMode, now: datetime
    ) -> EvaluationSession:
        """Create the (ip, teacher) session if absent; racing creators all
        end up reading the same single row."""
        try:
            with self._tx(immediate=True) as conn:
                conn.execute(
                    "INSERT OR IGNORE INTO sessions "
                    "(client_ip, teacher_id, mode, last_answered, started_at) "
                    "VALUES (?, ?, ?, 0, ?)",
                    (client_ip, teacher_id, mode.value, to_iso(now)),
                )
        except sqlite3.IntegrityError as exc:
            raise StorageFailure(f"cannot create session: {exc}") from None
        session = self.get_session(client_ip, teacher_id)
        if session is None:
            raise StorageFailure("session vanished after creation")
        return session

    def record_answer_and_advance(
        self,
        client_ip: str,
        teacher_id: str,
        question_index: int,
        value: AnswerValue,
        now: datetime,
        total: int,
    ) -> tuple[int, Optional[int]]:
        """Insert the answer and advance last_answered in one transaction.

        The UPDATE is guarded on ``last_answered = question_index - 1`` and
        on the session being incomplete, so under contention exactly one of
        several equal submissions commits. Completion (reaching ``total``)
        stamps completed_at and assigns the next questionnaire ordinal inside
        the same transaction.

        Returns (new last_answered, questionnaire_no or None).
        """
        try:
            with self._tx(immediate=True) as conn:
                cur = conn.execute(
                    "UPDATE sessions SET last_answered = ? "
                    "WHERE client_ip = ? AND teacher_id = ? AND last_answered = ? "
                    "AND completed_at IS NULL",
                    (question_index, client_ip, teacher_id, question_index - 1),
                )
                if cur.rowcount != 1:
                    raise SequenceConflict(
                        f"question {question_index} is not the next unanswered one"
                    )
                conn.execute(
                    "INSERT INTO answers (client_ip, teacher_id, question_index, value, answered_at) "
                    "VALUES (?, ?, ?, ?, ?)",
                    (client_ip, teacher_id, question_index, value.raw, to_iso(now)),
                )
                if question_index >= total:
                    next_no = conn.execute(
                        "SELECT COALESCE(MAX(questionnaire_no), 0) + 1 FROM sessions"
                    ).fetchone()[0]
                    conn.execute(
                        "UPDATE sessions SET completed_at = ?, questionnaire_no = ? "
                        "WHERE client_ip = ? AND teacher_id = ?",
                        (to_iso(now), next_no, client_ip, teacher_id),
                    )
                    return question_index, next_no
                return question_index, None
        except sqlite3.IntegrityError:
            # Duplicate answer index: the uniqueness constraint is the last
            # line of defense against replays. The transaction rolled back.
            raise SequenceConflict(
                f"question {question_index} was already answered"
            ) from None
        except sqlite3.OperationalError as exc:
            raise StorageFailure(str(exc)) from None

    def answers_for(self, client_ip: str, teacher_id: str) -> dict[int, int]:
        """Raw answers of one session as {question_index: value}."""
        rows = self._conn().execute(
            "SELECT question_index, value FROM answers "
            "WHERE client_ip = ? AND teacher_id = ?",
            (client_ip, teacher_id),
        ).fetchall()
        return {row["question_index"]: row["value"] for row in rows}

    def purge_ip(self, client_ip: str) -> int:
        """Delete every session and answer for an address. Returns the number
        of answer records removed."""
        with self._tx(immediate=True) as conn:
            cur = conn.execute("DELETE FROM answers WHERE client_ip = ?", (client_ip,))
            deleted = cur.rowcount
            conn.execute("DELETE FROM sessions WHERE client_ip = ?", (client_ip,))
            return deleted

    # -- results and status reads ---------------------------------------------

    def snapshot_results(
        self,
        teacher_id: Optional[str] = None,
        include_demo: bool = True,
        include_incomplete: bool = False,
    ) -> list[dict]:
        """Point-in-time result rows, newest completion first.

        Each row: session fields, teacher display name, and an
        ``answers`` map of question_index -> raw value. Single-statement
        read, so concurrent submissions cannot tear it.
        """
        conditions = []
        params: list = []
        if teacher_id is not None:
            conditions.append("s.teacher_id = ?")
            params.append(teacher_id)
        if not include_demo:
            conditions.append("s.mode = 'official'")
        if not include_incomplete:
            conditions.append("s.completed_at IS NOT NULL")
        where = (" WHERE " + " AND ".join(conditions)) if conditions else ""
        sql = (
            "SELECT s.client_ip, s.teacher_id, s.mode, s.last_answered, s.started_at, "
            "s.completed_at, s.questionnaire_no, t.display_name, "
            "a.question_index, a.value "
            "FROM sessions s "
            "JOIN teachers t ON t.id = s.teacher_id "
            "LEFT JOIN answers a ON a.client_ip = s.client_ip AND a.teacher_id = s.teacher_id "
            f"{where} "
            "ORDER BY s.completed_at DESC, s.questionnaire_no DESC, s.started_at DESC"
        )
        grouped: dict[tuple, dict] = {}
        for row in self._conn().execute(sql, params):
            key = (row["client_ip"], row["teacher_id"])
            entry = grouped.get(key)
            if entry is None:
                entry = {
                    "client_ip": row["client_ip"],
                    "teacher_id": row["teacher_id"],
                    "teacher_display_name": row["display_name"],
                    "mode": SessionMode(row["mode"]),
                    "last_answered": row["last_answered"],
                    "started_at": from_iso(row["started_at"]),
                    "completed_at": _dt_or_none(row["completed_at"]),
                    "questionnaire_no": row["questionnaire_no"],
                    "answers": {},
                }
                grouped[key] = entry
            if row["question_index"] is not None:
                entry["answers"][row["question_index"]] = row["value"]
        return list(grouped.values())

    def get_by_questionnaire_no(self, questionnaire_no: int) -> Optional[dict]:
        row = self._conn().execute(
            "SELECT client_ip, teacher_id FROM sessions WHERE questionnaire_no = ?",
            (questionnaire_no,),
        ).fetchone()
        if row is None:
            return None
        rows = self.snapshot_results(teacher_id=row["teacher_id"], include_incomplete=True)
        for entry in rows:
            if entry["questionnaire_no"] == questionnaire_no:
                return entry
        return None

    def list_session_progress(self) -> list[dict]:
        """Progress per respondent for the status view. Deliberately carries
        no answer values."""
        rows = self._conn().execute(
            "SELECT client_ip, teacher_id, mode, last_answered, started_at, "
            "completed_at, questionnaire_no FROM sessions "
            "ORDER BY started_at DESC, client_ip"
        ).fetchall()
        return [
            {
                "client_ip": row["client_ip"],
                "teacher_id": row["teacher_id"],
                "mode": SessionMode(row["mode"]),
                "last_answered": row["last_answered"],
                "started_at": from_iso(row["started_at"]),
                "completed_at": _dt_or_none(row["completed_at"]),
                "questionnaire_no": row["questionnaire_no"],
            }
            for row in rows
        ]

    def session_counts(self) -> dict:
        row = self._conn().execute(
            "SELECT "
            "SUM(CASE WHEN mode = 'official' THEN 1 ELSE 0 END) AS official, "
            "SUM(CASE WHEN mode = 'demo' THEN 1 ELSE 0 END) AS demo, "
            "SUM(CASE WHEN completed_at IS NOT NULL THEN 1 ELSE 0 END) AS completed, "
            "SUM(CASE WHEN completed_at IS NULL THEN 1 ELSE 0 END) AS in_progress, "
            "COUNT(*) AS total FROM sessions"
        ).fetchone()
        return {
            "official": row["official"] or 0,
            "demo": row["demo"] or 0,
            "completed": row["completed"] or 0,
            "in_progress": row["in_progress"] or 0,
            "total": row["total"] or 0,
        }

    def count_answers(self) -> int:
        return self._conn().execute("SELECT COUNT(*) FROM answers").fetchone()[0]

    # -- integrity -------------------------------------------------------------

    def integrity_scan(self) -> list[str]:
        """Store-wide invariant check. Returns human-readable violations;
        an empty list means the store is coherent."""
        conn = self._conn()
        violations: list[str] = []
        for row in conn.execute(
            "SELECT a.client_ip, a.teacher_id, COUNT(*) AS n FROM answers a "
            "LEFT JOIN sessions s ON s.client_ip = a.client_ip AND s.teacher_id = a.teacher_id "
            "WHERE s.client_ip IS NULL GROUP BY a.client_ip, a.teacher_id"
        ):
            violations.append(
                f"orphan answers: {row['n']} record(s) for ({row['client_ip']}, "
                f"{row['teacher_id']}) without a session"
            )
        for row in conn.execute(
            "SELECT s.client_ip, s.teacher_id, s.last_answered, "
            "COUNT(a.question_index) AS n, COALESCE(MAX(a.question_index), 0) AS hi, "
            "COALESCE(MIN(a.question_index), 1) AS lo "
            "FROM sessions s "
            "LEFT JOIN answers a ON a.client_ip = s.client_ip AND a.teacher_id = s.teacher_id "
            "GROUP BY s.client_ip, s.teacher_id"
        ):
            # Index uniqueness is the PK, so count==last and max==last and
            # min>=1 together force the answer set to be exactly 1..last.
            ok = (
                row["n"] == row["last_answered"]
                and row["hi"] == row["last_answered"]
                and row["lo"] >= 1
            ) or (row["last_answered"] == 0 and row["n"] == 0)
            if not ok:
                violations.append(
                    f"session ({row['client_ip']}, {row['teacher_id']}): "
                    f"last_answered={row['last_answered']} but answers are not "
                    f"exactly 1..{row['last_answered']} "
                    f"(count={row['n']}, max={row['hi']})"
                )
        for row in conn.execute(
            "SELECT client_ip, teacher_id FROM sessions "
            "WHERE (completed_at IS NULL) != (questionnaire_no IS NULL)"
        ):
            violations.append(
                f"session ({row['client_ip']}, {row['teacher_id']}): completion "
                "timestamp and questionnaire number must be set together"
            )
        for row in conn.execute(
            "SELECT s.client_ip, s.teacher_id FROM sessions s "
            "LEFT JOIN teachers t ON t.id = s.teacher_id WHERE t.id IS NULL"
        ):
            violations.append(
                f"session ({row['client_ip']}, {row['teacher_id']}) references a missing teacher"
            )
        if conn.execute("SELECT COUNT(*) FROM config WHERE id = 1").fetchone()[0] != 1:
            violations.append("config row missing")
        return violations

    def dump(self) -> str:
        """Logical dump of the whole store; equal dumps mean equal state."""
        with self._lock:
            return "\n".join(self._conn().iterdump())


class _NullLock:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False
