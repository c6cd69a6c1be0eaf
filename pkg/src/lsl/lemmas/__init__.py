"""Exact checks of the quantitative facts and lemmas."""

from .report import VerificationReport
from .suites import SUITES, run_suite

__all__ = ["VerificationReport", "SUITES", "run_suite"]
