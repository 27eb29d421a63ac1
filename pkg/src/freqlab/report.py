"""Verification records and their text/CSV serialisations."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

REPORT_HEADER = "check\tlhs\trhs\tmargin\ttolerance\tpass\tr\tnote"
PROFILE_COLUMNS = ("r", "I", "D", "H", "F", "F_drift", "Ip", "Dp", "F_p", "F_p_tilde", "rn_residual")


def fmt(x) -> str:
    """17-significant-digit rendering used by every artifact."""
    if x is None:
        return ""
    if isinstance(x, (bool,)):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one inequality or identity check.

    ``margin = rhs - lhs``; the check passes when ``margin >= -tolerance``.
    Equalities are recorded as ``lhs = |residual|``, ``rhs = 0``.
    """

    name: str
    lhs: float
    rhs: float
    tolerance: float
    metadata: dict = field(default_factory=dict, compare=False)
    skipped: bool = False

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if self.skipped:
            return False
        m = self.margin
        return not math.isnan(m) and m >= -self.tolerance

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"

    @property
    def radius(self) -> float:
        r = self.metadata.get("r")
        return float("nan") if r is None else float(r)

    def line(self) -> str:
        note = self.metadata.get("note", "")
        r = self.metadata.get("r")
        return "\t".join(
            [self.name, fmt(self.lhs), fmt(self.rhs), fmt(self.margin), fmt(self.tolerance), self.status, fmt(r), str(note)]
        )

    def __str__(self):
        return self.line()


def failed(name: str, cause: str, **metadata) -> VerificationReport:
    """A failing report for a check that could not be evaluated."""
    metadata["note"] = cause
    return VerificationReport(name, float("nan"), float("nan"), 0.0, metadata)


def skip(name: str, cause: str, **metadata) -> VerificationReport:
    """A documented skip (e.g. frequency undefined); does not fail a run."""
    metadata["note"] = cause
    return VerificationReport(name, float("nan"), float("nan"), 0.0, metadata, skipped=True)


def equality(name: str, a: float, b: float, tolerance: float, **metadata) -> VerificationReport:
    metadata.setdefault("lhs_value", a)
    metadata.setdefault("rhs_value", b)
    return VerificationReport(name, abs(a - b), 0.0, tolerance, metadata)


def _sort_key(rep: VerificationReport):
    r = rep.radius
    return (rep.name, math.isnan(r), 0.0 if math.isnan(r) else r)


def render_report(reports: Iterable[VerificationReport]) -> str:
    reports = sorted(reports, key=_sort_key)
    buf = io.StringIO()
    buf.write("# freqlab verification report\n")
    buf.write(REPORT_HEADER + "\n")
    for rep in reports:
        buf.write(rep.line() + "\n")
    if reports:
        buf.write(f"# {summary_line(reports)}\n")
    return buf.getvalue()


def summary_line(reports: Iterable[VerificationReport]) -> str:
    """``PASS m/m`` or ``FAIL k/m``, plus ``(s skipped)`` when checks were skipped."""
    reports = list(reports)
    bad, total = summary(reports)
    skipped = sum(1 for r in reports if r.status == "SKIP")
    line = f"{'FAIL' if bad else 'PASS'} {bad if bad else total}/{total}"
    return line + (f" ({skipped} skipped)" if skipped else "")


def emit_report(reports: Iterable[VerificationReport], path) -> Path:
    """Write reports sorted by (check name, radius); output is byte-deterministic."""
    path = Path(path)
    path.write_text(render_report(reports), encoding="utf-8")
    return path


def summary(reports: Iterable[VerificationReport]) -> tuple[int, int]:
    """``(failures, total)``; skipped checks are not failures."""
    reports = list(reports)
    return sum(1 for r in reports if r.status == "FAIL"), len(reports)
