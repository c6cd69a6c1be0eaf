"""The squared, rescaled Chebyshev polynomial ``p(y) = (T_r(y/r) / y)^2`` and its facts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .report import VerificationReport


@dataclass(frozen=True)
class RationalPoly:
    coeffs: tuple  # ascending degree, trailing zeros trimmed

    def __init__(self, coeffs: Sequence):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __call__(self, y) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def __mul__(self, other: "RationalPoly") -> "RationalPoly":
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(out)

    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]


def chebyshev_t(r: int) -> list[int]:
    """Integer coefficients of T_r via ``T_{k+1} = 2z T_k - T_{k-1}``."""
    prev, cur = [1], [0, 1]
    if r == 0:
        return prev
    for _ in range(r - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


def chebyshev_p_coeffs(r: int) -> RationalPoly:
    if r < 1 or r % 2 == 0:
        raise ValueError("r must be a positive odd integer")
    t = chebyshev_t(r)
    assert t[0] == 0  # odd polynomial
    # T_r(y/r) / y = sum_k t_k y^(k-1) / r^k
    q = RationalPoly([Fraction(t[k], r ** k) for k in range(1, len(t))])
    return q * q


def default_grid(r: int, step: Fraction = Fraction(1, 100)) -> list[Fraction]:
    k = int(3 * r / step)
    return [step * j for j in range(-k, k + 1)]


def verify_p_facts(r_set: Sequence[int] = tuple(range(1, 16, 2)),
                   grid=None) -> VerificationReport:
    """All five facts, exactly, on ``y = j/100`` in ``[-3r, 3r]``.

    Fact 4 uses the explicit constant 2: ``p <= (2|y|/r)^(2r)`` when ``|y| >= r``.
    """
    rep = VerificationReport("p-facts", {"r": list(r_set), "grid": "y = j/100 in [-3r, 3r]"})
    rows = []
    for r in r_set:
        p = chebyshev_p_coeffs(r)
        rep.record(2 * r - p.degree, {"r": r, "fact": 1, "degree": p.degree})
        if p.degree != 2 * r - 2:
            rep.violate({"r": r, "fact": "degree", "degree": p.degree})
        if p.coeffs[-1] < 0 or any(c != 0 for c in p.coeffs[1::2]):
            rep.violate({"r": r, "fact": "even terms and nonnegative lead"})
        pts = grid(r) if callable(grid) else (grid or default_grid(r))
        counts = [0] * 6
        for y in pts:
            v = p(y)
            ay = abs(y)
            rep.record(v, {"r": r, "fact": 5, "y": y})
            counts[5] += 1
            if ay <= Fraction(1, 10):
                rep.record(v - Fraction(1, 2), {"r": r, "fact": 2, "y": y})
                counts[2] += 1
            if ay <= r:
                cap = Fraction(1) if ay <= 1 else 1 / (y * y)
                rep.record(cap - v, {"r": r, "fact": 3, "y": y})
                counts[3] += 1
            if ay >= r:
                rep.record((2 * ay / r) ** (2 * r) - v, {"r": r, "fact": 4, "y": y})
                counts[4] += 1
        rows.append({"r": r, "degree": p.degree, "fact2": counts[2], "fact3": counts[3],
                     "fact4": counts[4], "fact5": counts[5]})
    rep.details["rows"] = rows
    return rep
