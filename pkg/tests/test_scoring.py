from __future__ import annotations

import csv
import io

import pytest

from teacheval.engine import SessionEngine
from teacheval.model import BankHolder, Direction, IncompleteSession, NotFound, SessionMode
from teacheval.scoring import (
    answer_text,
    list_results,
    printable_report,
    render_print_html,
    score_item,
    write_results_delimited,
)

from conftest import at, make_config


class TestScoreItem:
    def test_direct_identity(self):
        for v in range(1, 6):
            assert score_item(v, Direction.DIRECT) == v

    def test_inverse_reflection(self):
        # oracle: raw and its reflection always add up to 6
        for v in range(1, 6):
            assert score_item(v, Direction.INVERSE) + v == 6

    def test_inverse_extremes(self):
        assert score_item(5, Direction.INVERSE) == 1
        assert score_item(1, Direction.INVERSE) == 5

    def test_midpoint_is_fixed(self):
        assert score_item(3, Direction.INVERSE) == 3

    def test_involution(self):
        for v in range(1, 6):
            assert score_item(score_item(v, Direction.INVERSE), Direction.INVERSE) == v


def complete_session(store, engine, ip, value=5, config=None, start=0):
    config = config or make_config()
    engine.open_or_resume(ip, config, at(start))
    for i in range(1, 11):
        engine.submit_answer(ip, "t1", i, value, config, at(start + i))


@pytest.fixture
def populated(roster, bank10):
    engine = SessionEngine(roster, BankHolder(bank10))
    complete_session(roster, engine, "10.1.0.7", value=5, start=0)        # official
    complete_session(roster, engine, "198.51.100.4", value=2, start=100)  # demo
    return roster


class TestListResults:
    def test_official_only_by_default(self, populated, bank10):
        rows = list_results(populated, bank10)
        assert len(rows) == 1
        assert rows[0].demo is False

    def test_demo_included_on_request(self, populated, bank10):
        rows = list_results(populated, bank10, include_demo=True)
        assert len(rows) == 2
        assert any(row.demo for row in rows)

    def test_demo_only_store_filters_to_empty(self, roster, bank10):
        engine = SessionEngine(roster, BankHolder(bank10))
        complete_session(roster, engine, "198.51.100.4")
        assert list_results(roster, bank10) == []
        assert len(list_results(roster, bank10, include_demo=True)) == 1

    def test_newest_first(self, populated, bank10):
        rows = list_results(populated, bank10, include_demo=True)
        stamps = [row.completed_at for row in rows]
        assert stamps == sorted(stamps, reverse=True)

    def test_filter_never_rewrites_rows(self, populated, bank10):
        wide = {r.questionnaire_no: r for r in list_results(populated, bank10, include_demo=True)}
        narrow = list_results(populated, bank10, include_demo=False)
        for row in narrow:
            assert wide[row.questionnaire_no] == row

    def test_scored_vector_follows_directions(self, populated, bank10):
        row = next(r for r in list_results(populated, bank10, include_demo=True) if r.demo)
        assert row.raw_answers == (2,) * 10
        for question, raw, scored in zip(bank10, row.raw_answers, row.scored_answers):
            expected = raw if question.direction is Direction.DIRECT else 6 - raw
            assert scored == expected

    def test_teacher_filter(self, populated, bank10):
        assert list_results(populated, bank10, teacher_id="t2", include_demo=True) == []
        rows = list_results(populated, bank10, teacher_id="t1", include_demo=True)
        assert len(rows) == 2


class TestPrintableReport:
    def test_partition_covers_every_item_once(self, populated, bank10):
        report = printable_report(populated, bank10, 1)
        indices = [i.index for i in report.direct_items] + [
            i.index for i in report.inverse_items
        ]
        assert sorted(indices) == list(range(1, 11))
        assert all(i.index % 3 == 0 for i in report.inverse_items)

    def test_header_fields(self, populated, bank10):
        report = printable_report(populated, bank10, 1)
        assert report.questionnaire_no == 1
        assert report.teacher_display_name == "Conf.dr. Tiberiu Marius Karnyanszky"

    def test_answers_keep_labels(self, populated, bank10):
        report = printable_report(populated, bank10, 1)
        for item in report.direct_items:
            assert item.answer_display == "5 - foarte mult"

    def test_unknown_number(self, populated, bank10):
        with pytest.raises(NotFound):
            printable_report(populated, bank10, 999)

    def test_answer_text_rendering(self):
        assert answer_text(5) == "5 - foarte mult"
        assert answer_text(1) == "1 - foarte puțin sau deloc"


class TestPrintHtml:
    def test_document_structure(self, populated, bank10):
        html_doc = render_print_html(printable_report(populated, bank10, 1))
        assert html_doc.startswith("<!DOCTYPE html>")
        assert "Chestionar nr.: 1" in html_doc
        assert "Cadru didactic evaluat: Conf.dr. Tiberiu Marius Karnyanszky" in html_doc
        assert "Întrebări cu cotare directă" in html_doc
        assert "Întrebări cu cotare inversă" in html_doc
        assert "5 - foarte mult" in html_doc

    def test_item_text_available_on_hover(self, populated, bank10):
        html_doc = render_print_html(printable_report(populated, bank10, 1))
        assert 'title="Enunț de test nr. 1."' in html_doc

    def test_demo_flagged(self, populated, bank10):
        report = printable_report(populated, bank10, 2)
        assert report.demo is True
        assert "(DEMO)" in render_print_html(report)

    def test_html_escaping(self, roster, bank10):
        from teacheval.model import Teacher

        roster.upsert_teacher(Teacher(id="t1", display_name='Conf. <b>"X"</b> & Co'))
        engine = SessionEngine(roster, BankHolder(bank10))
        complete_session(roster, engine, "10.1.0.7")
        html_doc = render_print_html(printable_report(roster, bank10, 1))
        assert "<b>" not in html_doc
        assert "&lt;b&gt;" in html_doc


class TestDelimitedExport:
    def test_header_and_rows(self, populated, bank10):
        rows = list_results(populated, bank10, include_demo=True)
        buffer = io.StringIO()
        count = write_results_delimited(rows, bank10, buffer)
        assert count == 2
        parsed = list(csv.reader(io.StringIO(buffer.getvalue())))
        assert parsed[0] == ["questionnaire_no", "demo", "completed_at", "teacher"] + [
            f"e{i}" for i in range(1, 11)
        ]
        demo_row = next(r for r in parsed[1:] if r[1] == "DEMO")
        assert demo_row[4:] == ["2"] * 10

    def test_scored_export_applies_directions(self, populated, bank10):
        rows = [r for r in list_results(populated, bank10, include_demo=True) if r.demo]
        buffer = io.StringIO()
        write_results_delimited(rows, bank10, buffer, scored=True)
        parsed = list(csv.reader(io.StringIO(buffer.getvalue())))
        values = parsed[1][4:]
        assert values == ["4" if i % 3 == 0 else "2" for i in range(1, 11)]

    def test_custom_delimiter(self, populated, bank10):
        rows = list_results(populated, bank10)
        buffer = io.StringIO()
        write_results_delimited(rows, bank10, buffer, delimiter="\t")
        assert "\t" in buffer.getvalue().splitlines()[0]
