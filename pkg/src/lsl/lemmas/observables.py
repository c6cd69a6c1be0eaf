"""Exact reports of the observable quantities behind the weight-smoothness statements.

Nothing here asserts a bound: the statements carry unspecified constants, so
the reports give exact values and normalized forms only.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..distributions import WDist, binomial, fmt_prob
from ..engine import weight_distribution
from ..localfn import LocalFn


def continuity_report(f: LocalFn, deltas: Sequence[int] = (2,)) -> dict:
    """``max_x |Pr[|f|=x] - Pr[|f|=x+D]|`` per D, and the value times n/|D|."""
    w = weight_distribution(f)
    return continuity_of_weights(w, deltas)


def continuity_of_weights(w: WDist, deltas: Sequence[int]) -> dict:
    n = w.n
    rows = []
    for d in deltas:
        if d == 0:
            raise ValueError("delta must be nonzero")
        best, arg = Fraction(-1), None
        for x in range(n + 1):
            y = x + d
            other = w[y] if 0 <= y <= n else Fraction(0)
            diff = abs(w[x] - other)
            if diff > best:
                best, arg = diff, x
        rows.append({
            "delta": d,
            "even": d % 2 == 0,
            "max_diff": fmt_prob(best),
            "max_diff_float": float(best),
            "argmax_x": arg,
            "normalized": float(best * n / abs(d)),
            "binomial_reference": float(Fraction(7 * abs(d), n)),
        })
    # mass within n^(2/3) of the middle; below 1/2 means the statement's regime does not apply
    central = sum((w[x] for x in range(n + 1) if abs(2 * x - n) ** 3 <= 8 * n * n), Fraction(0))
    return {
        "n": n,
        "rows": rows,
        "central_mass": float(central),
        "far_from_central": central < Fraction(1, 2),
    }


# ---------------------------------------------------------------------------
# parity-split Kolmogorov comparison


def _parity_tails(w: WDist) -> tuple[list, list, list]:
    """For t = -1..n: Pr[X > t, even], Pr[X > t, odd], Pr[|U^n| > t]."""
    n = w.n
    b = binomial(n)
    ev, od, bt = [], [], []
    se = so = sb = Fraction(0)
    for t in range(n, -2, -1):
        ev.append(se)
        od.append(so)
        bt.append(sb)
        if t >= 0:
            if t % 2 == 0:
                se += w[t]
            else:
                so += w[t]
            sb += b[t]
    return ev[::-1], od[::-1], bt[::-1]


def _lines(w: WDist) -> list[tuple[Fraction, Fraction]]:
    """All (slope, intercept) pairs whose pointwise max is the objective in eta."""
    ev, od, bt = _parity_tails(w)
    out = []
    for e, o, b in zip(ev, od, bt):
        # |E - eta B| and |O - (1 - eta) B|
        for slope, icpt in ((-b, e), (b, o - b)):
            out.append((slope, icpt))
            out.append((-slope, -icpt))
    return out


def _upper_envelope(lines):
    best: dict[Fraction, Fraction] = {}
    for s, c in lines:
        if s not in best or c > best[s]:
            best[s] = c
    hull: list[tuple[Fraction, Fraction]] = []
    for s, c in sorted(best.items()):
        while len(hull) >= 2:
            (s1, c1), (s2, c2) = hull[-2], hull[-1]
            # drop the middle line if the new one overtakes line 1 no later than line 2 does
            if (c1 - c) * (s2 - s1) <= (c1 - c2) * (s - s1):
                hull.pop()
            else:
                break
        hull.append((s, c))
    return hull


def _objective(lines, eta: Fraction) -> Fraction:
    return max(s * eta + c for s, c in lines)


def kolmogorov_parity_report(w: WDist) -> dict:
    """Exact eta in [0, 1] minimizing the larger of the two parity deviations.

    The objective is the max of finitely many lines in eta, hence convex and
    piecewise linear; its minimum on [0, 1] is at 0, 1, or a breakpoint of the
    upper envelope.  Ties go to the smallest eta.
    """
    lines = _lines(w)
    hull = _upper_envelope(lines)
    cands = {Fraction(0), Fraction(1)}
    for (s1, c1), (s2, c2) in zip(hull, hull[1:]):
        x = (c1 - c2) / (s2 - s1)
        if 0 < x < 1:
            cands.add(x)
    val, eta = min((_objective(hull, e), e) for e in cands)
    ev, od, bt = _parity_tails(w)
    dev_even = max(abs(e - eta * b) for e, b in zip(ev, bt))
    dev_odd = max(abs(o - (1 - eta) * b) for o, b in zip(od, bt))
    assert max(dev_even, dev_odd) == val
    return {
        "n": w.n,
        "eta": fmt_prob(eta),
        "eta_float": float(eta),
        "max_even_dev": fmt_prob(dev_even),
        "max_odd_dev": fmt_prob(dev_odd),
        "objective": float(val),
        "breakpoints": len(cands),
    }


def kolmogorov_objective(w: WDist, eta) -> Fraction:
    """The max deviation at a given eta (for probing the minimizer)."""
    return _objective(_lines(w), Fraction(eta))

