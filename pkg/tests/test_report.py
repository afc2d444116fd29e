"""Relative gain arithmetic and comparison tables against published rows."""

import json

import pytest

from slotforge.report import (
    ComparisonRow,
    IncomparableConfigs,
    RunRecord,
    ZeroBaseline,
    compare_runs,
    relative_gain,
    render_table,
)
from slotforge.slotmetrics import MatchConfig, ScoreReport

from conftest import REPORTED_HYBRID, REPORTED_SINGLE_MODE


def make_report(p, r, f1, match=MatchConfig()):
    return ScoreReport(
        precision=p, recall=r, f1=f1, tp=0, fp=0, fn=0,
        per_slot={}, n_examples=0, n_malformed=0, match=match,
    )


def run(label, mode, triple, match=MatchConfig()):
    return RunRecord(f"{label}/{mode}", label, mode, make_report(*triple, match=match))


def test_relative_gain_reported_examples():
    assert relative_gain(0.7610, 0.7312) == pytest.approx(4.08, abs=0.01)
    assert relative_gain(0.6936, 0.5652) == pytest.approx(22.72, abs=0.01)
    assert relative_gain(0.6338, 0.7550) == pytest.approx(-16.05, abs=0.01)


def test_relative_gain_identity_and_monotonicity():
    assert relative_gain(0.5, 0.5) == 0.0
    assert relative_gain(0.52, 0.5) > relative_gain(0.51, 0.5)


def test_relative_gain_zero_baseline():
    with pytest.raises(ZeroBaseline):
        relative_gain(0.5, 0.0)


def test_every_reported_delta_reproduced():
    for label, reg, rsn, printed in REPORTED_SINGLE_MODE:
        assert relative_gain(rsn[2], reg[2]) == pytest.approx(printed, abs=0.01), label
    for label, mode, base, hyb, printed in REPORTED_HYBRID:
        assert relative_gain(hyb[2], base[2]) == pytest.approx(printed, abs=0.01), (label, mode)


def test_compare_runs_hybrid_reasoning_row():
    base = run("Qwen3 4B", "reasoning", (0.4979, 0.8717, 0.6338))
    new = run("Qwen3 4B", "hybrid_reasoning", (0.6958, 0.9377, 0.7988))
    row = compare_runs(base, new)
    assert row.delta_f1 == pytest.approx(26.03, abs=0.01)
    assert row.base_f1 == 0.6338 and row.new_f1 == 0.7988


def test_compare_identical_runs_is_zero():
    a = run("x", "regular", (0.5, 0.5, 0.5))
    assert compare_runs(a, a).delta_f1 == 0.0


def test_compare_rejects_mismatched_match_configs():
    base = run("x", "regular", (0.5, 0.5, 0.5), match=MatchConfig(matching="exact"))
    new = run("x", "reasoning", (0.6, 0.6, 0.6), match=MatchConfig(matching="containment"))
    with pytest.raises(IncomparableConfigs):
        compare_runs(base, new)


def llama_row() -> ComparisonRow:
    base = run("Llama 3.1 8B Instruct", "regular", (0.6292, 0.8726, 0.7312))
    new = run("Llama 3.1 8B Instruct", "reasoning", (0.6431, 0.9319, 0.7610))
    return compare_runs(base, new)


def test_render_markdown():
    table = render_table([llama_row()])
    lines = table.splitlines()
    assert len(lines) == 3  # header, rule, one data row
    assert "| 0.7312 |" in lines[2]
    assert "| +4.08 |" in lines[2]


def test_render_markdown_empty():
    assert len(render_table([]).splitlines()) == 2


def test_render_csv_reported_row():
    table = render_table([llama_row()], "csv")
    data = table.splitlines()[1]
    assert ",0.7312," in data
    assert ",0.7610," in data
    assert data.endswith(",4.08")


def test_render_json():
    rows = json.loads(render_table([llama_row()], "json"))
    assert rows[0]["delta_f1"] == "4.08"
    assert rows[0]["base_f1"] == "0.7312"


def test_render_unknown_format():
    from slotforge.report import ReportError

    with pytest.raises(ReportError):
        render_table([], "html")
