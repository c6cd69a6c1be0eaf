"""Verification reports shared by every suite."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class VerificationReport:
    """Outcome of one suite.

    ``status`` is ``pass``/``fail`` for checked suites, ``report`` for
    report-only suites, and ``inapplicable``/``rejected`` when a hypothesis
    or precondition fails before anything is checked.
    """

    suite: str
    range: dict
    checked: int = 0
    violations: list = field(default_factory=list)
    max_slack: float | None = None  # min over cases of (bound - value)
    details: dict = field(default_factory=dict)
    status: str | None = None
    max_witnesses: int = 50
    _dropped: int = 0

    def record(self, slack, witness: dict | None = None) -> None:
        """Count one case; negative slack is a violation."""
        self.checked += 1
        s = float(slack)
        if self.max_slack is None or s < self.max_slack:
            self.max_slack = s
        if slack < 0:
            self.violate(witness or {})

    def violate(self, witness: dict) -> None:
        if len(self.violations) < self.max_witnesses:
            self.violations.append(_jsonable(witness))
        else:
            self._dropped += 1

    @property
    def violation_count(self) -> int:
        return len(self.violations) + self._dropped

    @property
    def passed(self) -> bool:
        return self.outcome in ("pass", "report")

    @property
    def outcome(self) -> str:
        if self.status in ("inapplicable", "rejected", "report"):
            return self.status
        return "fail" if self.violation_count else "pass"

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        if other.suite != self.suite:
            raise ValueError("cannot merge reports of different suites")
        out = VerificationReport(self.suite, {**self.range, **other.range},
                                 self.checked + other.checked,
                                 self.violations + other.violations,
                                 None, {**self.details, **other.details}, self.status or other.status)
        slacks = [s for s in (self.max_slack, other.max_slack) if s is not None]
        out.max_slack = min(slacks) if slacks else None
        out._dropped = self._dropped + other._dropped
        return out

    def to_json(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "status": self.outcome,
            "range": _jsonable(self.range),
            "checked": self.checked,
            "violation_count": self.violation_count,
            "violations": self.violations,
            "max_slack": self.max_slack,
            "details": _jsonable(self.details),
        }

    def to_csv(self) -> str:
        """One row per detail entry if ``details['rows']`` exists, else a summary row."""
        buf = io.StringIO()
        rows = self.details.get("rows")
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow(_jsonable(r))
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["suite", "status", "checked", "violations", "max_slack"])
            w.writerow([self.suite, self.outcome, self.checked, self.violation_count, self.max_slack])
        return buf.getvalue()
