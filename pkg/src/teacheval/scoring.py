"""Item scoring and the results plane: per-teacher tables, the printable
single-questionnaire report, and the delimited archival export.
"""
from __future__ import annotations

import csv
import html
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

from .model import (
    Direction,
    IncompleteSession,
    LIKERT_LABELS,
    NotFound,
    QuestionBank,
    SessionMode,
    StorageFailure,
    to_iso,
)
from .store import EvaluationStore


def score_item(raw: int, direction: Direction) -> int:
    """Direct items keep the raw value; inverse items reflect it on the
    five-point scale (6 - raw), making 3 the fixed point. The reflection
    lives only here so an alternative convention is a one-line change."""
    if direction is Direction.DIRECT:
        return raw
    return 6 - raw


def answer_text(raw: int) -> str:
    """Display form of an answer, e.g. ``5 - foarte mult``."""
    return f"{raw} - {LIKERT_LABELS[raw]}"


@dataclass(frozen=True)
class ResultRow:
    """One completed questionnaire as raw and direction-adjusted vectors."""

    questionnaire_no: int
    demo: bool
    completed_at: datetime
    teacher_id: str
    teacher_display_name: str
    raw_answers: tuple
    scored_answers: tuple


@dataclass(frozen=True)
class ReportItem:
    index: int
    text: str
    raw: int
    label: str

    @property
    def answer_display(self) -> str:
        return answer_text(self.raw)


@dataclass(frozen=True)
class PrintableReport:
    """The single-questionnaire report: items split into the direct-scored
    and inverse-scored groups, each listing the answer as given."""

    questionnaire_no: int
    teacher_display_name: str
    completed_at: datetime
    demo: bool
    direct_items: tuple
    inverse_items: tuple


def _vectors(entry: dict, bank: QuestionBank) -> tuple[tuple, tuple]:
    answers = entry["answers"]
    raw = []
    scored = []
    for question in bank:
        try:
            value = answers[question.index]
        except KeyError:
            raise StorageFailure(
                f"completed questionnaire {entry['questionnaire_no']} has no answer "
                f"for item {question.index}; store and bank disagree on length"
            ) from None
        raw.append(value)
        scored.append(score_item(value, question.direction))
    return tuple(raw), tuple(scored)


def list_results(
    store: EvaluationStore,
    bank: QuestionBank,
    teacher_id: Optional[str] = None,
    include_demo: bool = False,
) -> list[ResultRow]:
    """Completed questionnaires only, newest first. Demo rows are excluded
    unless asked for; toggling the filter never changes a row's contents."""
    rows = []
    for entry in store.snapshot_results(
        teacher_id=teacher_id, include_demo=include_demo, include_incomplete=False
    ):
        raw, scored = _vectors(entry, bank)
        rows.append(
            ResultRow(
                questionnaire_no=entry["questionnaire_no"],
                demo=entry["mode"] is SessionMode.DEMO,
                completed_at=entry["completed_at"],
                teacher_id=entry["teacher_id"],
                teacher_display_name=entry["teacher_display_name"],
                raw_answers=raw,
                scored_answers=scored,
            )
        )
    return rows


def printable_report(
    store: EvaluationStore, bank: QuestionBank, questionnaire_no: int
) -> PrintableReport:
    entry = store.get_by_questionnaire_no(questionnaire_no)
    if entry is None:
        raise NotFound(f"no questionnaire with number {questionnaire_no}")
    if entry["completed_at"] is None:
        raise IncompleteSession(f"questionnaire {questionnaire_no} is not finished")
    answers = entry["answers"]
    direct = []
    inverse = []
    for question in bank:
        raw = answers.get(question.index)
        if raw is None:
            raise StorageFailure(
                f"questionnaire {questionnaire_no} misses an answer for item {question.index}"
            )
        item = ReportItem(
            index=question.index,
            text=question.text,
            raw=raw,
            label=LIKERT_LABELS[raw],
        )
        (direct if question.direction is Direction.DIRECT else inverse).append(item)
    return PrintableReport(
        questionnaire_no=questionnaire_no,
        teacher_display_name=entry["teacher_display_name"],
        completed_at=entry["completed_at"],
        demo=entry["mode"] is SessionMode.DEMO,
        direct_items=tuple(direct),
        inverse_items=tuple(inverse),
    )


_PRINT_CSS = """
body { font-family: Georgia, 'Times New Roman', serif; margin: 2rem auto; max-width: 52rem; color: #111; }
h1 { font-size: 1.25rem; }
.meta { margin: 0.25rem 0; }
.groups { display: flex; gap: 2rem; align-items: flex-start; flex-wrap: wrap; }
table { border-collapse: collapse; margin-top: 0.75rem; }
caption { font-weight: bold; text-align: left; padding-bottom: 0.4rem; white-space: nowrap; }
th, td { border: 1px solid #777; padding: 0.25rem 0.6rem; text-align: left; }
.hint { font-size: 0.85rem; color: #444; margin-top: 1rem; }
@media print { .hint { display: none; } }
"""


def render_print_html(report: PrintableReport) -> str:
    """Self-contained, print-oriented document for one questionnaire."""

    def group_table(caption: str, items) -> str:
        body = "\n".join(
            "<tr>"
            f'<td title="{html.escape(item.text)}">{item.index}</td>'
            f"<td>{html.escape(item.answer_display)}</td>"
            "</tr>"
            for item in items
        )
        return (
            "<table>"
            f"<caption>{html.escape(caption)}</caption>"
            "<thead><tr><th>Nr. enunț</th><th>Răspunsul oferit</th></tr></thead>"
            f"<tbody>\n{body}\n</tbody></table>"
        )

    demo_badge = " (DEMO)" if report.demo else ""
    return f"""<!DOCTYPE html>
<html lang="ro">
<head>
<meta charset="utf-8">
<title>Chestionar nr. {report.questionnaire_no}</title>
<style>{_PRINT_CSS}</style>
</head>
<body>
<h1>Chestionar nr.: {report.questionnaire_no}{demo_badge}</h1>
<p class="meta">Cadru didactic evaluat: {html.escape(report.teacher_display_name)}</p>
<p class="meta">Data evaluării: {to_iso(report.completed_at)}</p>
<div class="groups">
{group_table("Întrebări cu cotare directă", report.direct_items)}
{group_table("Întrebări cu cotare inversă", report.inverse_items)}
</div>
<p class="hint">Poziționați cursorul deasupra numărului unui enunț pentru reamintirea textului.</p>
</body>
</html>
"""


def write_results_delimited(
    rows,
    bank: QuestionBank,
    fp,
    delimiter: str = ",",
    scored: bool = False,
) -> int:
    """Write result rows as a delimited table (one line per questionnaire,
    columns e1..eN). Returns the number of data rows written."""
    writer = csv.writer(fp, delimiter=delimiter, lineterminator="\n")
    header = ["questionnaire_no", "demo", "completed_at", "teacher"]
    header += [f"e{i}" for i in range(1, bank.total + 1)]
    writer.writerow(header)
    count = 0
    for row in rows:
        values = row.scored_answers if scored else row.raw_answers
        writer.writerow(
            [
                row.questionnaire_no,
                "DEMO" if row.demo else "",
                to_iso(row.completed_at),
                row.teacher_display_name,
                *values,
            ]
        )
        count += 1
    return count
