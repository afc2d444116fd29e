"""Compare scored runs: relative F1 gain and presentation tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .slotmetrics import ScoreReport


class ReportError(Exception):
    pass


class ZeroBaseline(ReportError):
    pass


class IncomparableConfigs(ReportError):
    pass


@dataclass(frozen=True)
class RunRecord:
    run_id: str
    foundation_label: str
    mode: str  # regular | reasoning | hybrid_regular | hybrid_reasoning
    report: ScoreReport


@dataclass(frozen=True)
class ComparisonRow:
    foundation_label: str
    mode: str
    base_precision: float
    base_recall: float
    base_f1: float
    new_precision: float
    new_recall: float
    new_f1: float
    delta_f1: float  # percent, two decimals


def _round2(x: float) -> float:
    q = Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    return float(q) + 0.0  # fold -0.0 into 0.0


def relative_gain(f1_new: float, f1_base: float) -> float:
    """Percent change 100*(f1_new/f1_base - 1), reported to two decimals."""
    if f1_base <= 0:
        raise ZeroBaseline("baseline F1 must be positive")
    return _round2(100.0 * (f1_new / f1_base - 1.0))


def compare_runs(base: RunRecord, new: RunRecord) -> ComparisonRow:
    if base.report.match != new.report.match:
        raise IncomparableConfigs(
            f"match configs differ: {base.report.match} vs {new.report.match}"
        )
    return ComparisonRow(
        foundation_label=new.foundation_label,
        mode=new.mode,
        base_precision=base.report.precision,
        base_recall=base.report.recall,
        base_f1=base.report.f1,
        new_precision=new.report.precision,
        new_recall=new.report.recall,
        new_f1=new.report.f1,
        delta_f1=relative_gain(new.report.f1, base.report.f1),
    )


_COLUMNS = (
    "foundation",
    "mode",
    "base_precision",
    "base_recall",
    "base_f1",
    "new_precision",
    "new_recall",
    "new_f1",
    "delta_f1",
)


def _cells(row: ComparisonRow, signed_delta: bool) -> list[str]:
    delta = f"{row.delta_f1:+.2f}" if signed_delta else f"{row.delta_f1:.2f}"
    return [
        row.foundation_label,
        row.mode,
        f"{row.base_precision:.4f}",
        f"{row.base_recall:.4f}",
        f"{row.base_f1:.4f}",
        f"{row.new_precision:.4f}",
        f"{row.new_recall:.4f}",
        f"{row.new_f1:.4f}",
        delta,
    ]


def render_table(rows: list[ComparisonRow], fmt: str = "markdown") -> str:
    """P/R/F1 to four decimals, ΔF1 to two (signed in markdown)."""
    if fmt == "markdown":
        lines = [
            "| " + " | ".join(_COLUMNS) + " |",
            "| " + " | ".join("---" for _ in _COLUMNS) + " |",
        ]
        lines += ["| " + " | ".join(_cells(r, signed_delta=True)) + " |" for r in rows]
        return "\n".join(lines)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_COLUMNS)
        for r in rows:
            writer.writerow(_cells(r, signed_delta=False))
        return buf.getvalue().rstrip("\n")
    if fmt == "json":
        payload = [dict(zip(_COLUMNS, _cells(r, signed_delta=False))) for r in rows]
        return json.dumps(payload, ensure_ascii=False, indent=2)
    raise ReportError(f"unknown table format {fmt!r}")
