"""Binomial coefficient and binary entropy inequalities.

Exact integer comparisons are used wherever the bound is rational after
clearing denominators.  ``2^(n H(k/n))`` equals ``n^n / (k^k (n-k)^(n-k))``
exactly, so most entropy bounds become integer inequalities too.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .report import VerificationReport

EXACT_LIMIT = 200
LOG_SLACK = 1e-9
PI_UPPER = Fraction(355, 113)  # > pi
PI_LOWER = Fraction(333, 106)  # < pi


def binary_entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def entropy_power(n: int, k: int) -> Fraction:
    """``2^(n H(k/n))`` as an exact rational."""
    if k in (0, n):
        return Fraction(1)
    return Fraction(n ** n, k ** k * (n - k) ** (n - k))


# ---------------------------------------------------------------------------
# nearby binomial coefficients


def verify_nearby_binom(n_max: int, exact_limit: int = EXACT_LIMIT,
                        max_delta: int = 1) -> VerificationReport:
    """``2^-n (C(n,b) - C(n,b+D)) <= 7D/n`` for all n <= n_max, 1 <= b <= n, 1 <= D <= max_delta."""
    rep = VerificationReport("nearby-binom", {"n_max": n_max, "exact_limit": exact_limit,
                                              "max_delta": max_delta})
    for n in range(1, n_max + 1):
        if n <= exact_limit:
            row = [math.comb(n, b) for b in range(n + 2)] + [0] * max_delta
            two_n = 1 << n
            for delta in range(1, max_delta + 1):
                for b in range(1, n + 1):
                    diff = row[b] - row[b + delta]
                    # 2^-n diff <= 7 delta / n  <=>  n diff <= 7 delta 2^n
                    slack = Fraction(7 * delta * two_n - n * diff, n * two_n)
                    rep.record(slack, {"n": n, "b": b, "delta": delta})
        else:
            _nearby_float(rep, n, max_delta)
    return rep


def _nearby_float(rep: VerificationReport, n: int, max_delta: int) -> None:
    k = np.arange(n + 1, dtype=np.float64)
    logc = np.concatenate([[0.0], np.cumsum(np.log((n - k[:-1]) / (k[:-1] + 1)))])
    logp = logc - n * math.log(2)
    mass = np.exp(logp)
    mass = np.concatenate([mass, np.zeros(max_delta)])
    b = np.arange(1, n + 1)
    for delta in range(1, max_delta + 1):
        diff = mass[b] - mass[b + delta]
        bound = 7 * delta / n
        slack = bound - diff
        # a case fails only beyond the relative log-domain slack
        for j in np.nonzero(slack < -LOG_SLACK * bound)[0]:
            rep.violate({"n": n, "b": int(b[j]), "delta": delta, "value": float(diff[j])})
        rep.checked += n
        worst = float(slack.min())
        rep.max_slack = worst if rep.max_slack is None else min(rep.max_slack, worst)


# ---------------------------------------------------------------------------
# entropy sandwich


def entropy_grid(points: int = 2001) -> list[Fraction]:
    return [Fraction(2 * k - (points - 1), points - 1) for k in range(points)]


def verify_entropy(grid: Sequence | None = None, series_terms: int = 400) -> VerificationReport:
    """``1 - x^2 <= H((1+x)/2) <= 1 - x^2 / (2 ln 2)`` on a grid in [-1, 1].

    Float evaluation; slack 1e-12.  The power series in the middle is also
    compared against the closed form for ``|x| <= 0.9``.
    """
    grid = entropy_grid() if grid is None else grid
    rep = VerificationReport("entropy", {"points": len(grid)})
    series_err = 0.0
    for x in grid:
        xf = float(x)
        h = binary_entropy((1 + xf) / 2)
        lo = 1 - xf * xf
        hi = 1 - xf * xf / (2 * math.log(2))
        rep.record(min(h - lo, hi - h) + 1e-12, {"x": xf, "H": h})
        if abs(xf) <= 0.9:
            ser = 1 - sum(xf ** (2 * k) / (k * (2 * k - 1)) for k in range(1, series_terms)) / (2 * math.log(2))
            series_err = max(series_err, abs(ser - h))
    rep.details["series_max_error"] = series_err
    if series_err > 1e-9:
        rep.violate({"series_max_error": series_err})
    return rep


# ---------------------------------------------------------------------------
# individual binomial coefficients


def verify_individual_binom(n_max: int) -> VerificationReport:
    """``E/sqrt(8k(1-k/n)) <= C(n,k) <= E/sqrt(pi k(1-k/n))`` with ``E = 2^(n H(k/n))``.

    Squared and cleared of denominators, with pi replaced by a rational upper
    bound (which only makes the upper inequality harder to pass).
    """
    rep = VerificationReport("individual-binom", {"n_max": n_max})
    for n in range(2, n_max + 1):
        for k in range(1, n):
            c = math.comb(n, k)
            e = entropy_power(n, k)
            var = Fraction(k * (n - k), n)
            lower_ok = c * c * 8 * var - e * e  # >= 0
            upper_ok = e * e - c * c * PI_UPPER * var  # >= 0
            # report relative slacks
            rep.record(min(lower_ok / (e * e), upper_ok / (e * e)), {"n": n, "k": k})
    return rep


# ---------------------------------------------------------------------------
# binomial tails


def verify_binom_tail(n_max: int) -> VerificationReport:
    """``sum_{i<=k} C(n,i) <= min(2^(n H(k/n)), C(n,k) (n-k+1)/(n-2k+1))`` for 1 <= k <= n/2."""
    rep = VerificationReport("binom-tail", {"n_max": n_max})
    for n in range(2, n_max + 1):
        row = [math.comb(n, i) for i in range(n // 2 + 1)]
        acc = 0
        prefix = []
        for c in row:
            acc += c
            prefix.append(acc)
        for k in range(1, n // 2 + 1):
            s = prefix[k]
            b1 = entropy_power(n, k)
            b2 = Fraction(row[k] * (n - k + 1), n - 2 * k + 1)
            bound = min(b1, b2)
            rep.record((bound - s) / bound, {"n": n, "k": k, "sum": s})
    return rep
