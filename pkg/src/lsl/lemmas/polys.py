"""Moment inequalities for low-degree multilinear polynomials on the +-1 cube.

Polynomials have +-1 coefficients on a random set of monomials, so every
value is an integer and all moments over the 2^n points are exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .report import VerificationReport


@dataclass(frozen=True)
class MultilinearPoly:
    n: int
    terms: tuple  # ((monomial bitmask, integer coefficient), ...)

    @property
    def degree(self) -> int:
        return max((bin(s).count("1") for s, c in self.terms if c), default=0)

    def values(self) -> np.ndarray:
        """Values at every point of {-1,1}^n; point x has x_i = -1 iff bit i is set."""
        pts = np.arange(1 << self.n, dtype=np.int64)
        out = np.zeros(1 << self.n, dtype=np.int64)
        for s, c in self.terms:
            parity = np.zeros_like(pts)
            for i in range(self.n):
                if s >> i & 1:
                    parity ^= (pts >> i) & 1
            out += c * (1 - 2 * parity)
        return out


def random_poly(rng: np.random.Generator, n: int, d: int, density: float = 0.3) -> MultilinearPoly:
    monos = [sum(1 << i for i in c) for k in range(d + 1) for c in itertools.combinations(range(n), k)]
    keep = [s for s in monos if rng.random() < density]
    if not keep:
        keep = [monos[int(rng.integers(len(monos)))]]
    return MultilinearPoly(n, tuple((s, int(rng.choice([-1, 1]))) for s in keep))


def _power_sum(vals, q: int) -> int:
    return sum(int(v) ** q for v in vals.tolist())


def verify_hypercontractivity(trials: int = 200, n_max: int = 12, d_max: int = 3,
                              q_set=(4, 6), seed: int = 0) -> VerificationReport:
    """``||p||_q <= (q-1)^(d/2) ||p||_2`` with exact integer moments.

    Raised to the q-th power and cleared of the 2^n normalization:
    ``sum p^q * N^(q/2-1) <= (q-1)^(q d/2) (sum p^2)^(q/2)``.
    """
    for q in q_set:
        if q % 2 or q < 2:
            raise ValueError("q must be an even integer >= 2")
    rng = np.random.default_rng(seed)
    rep = VerificationReport("hypercontractivity", {"trials": trials, "n_max": n_max, "d_max": d_max,
                                                    "q": list(q_set), "seed": seed})
    for trial in range(trials):
        n = int(rng.integers(1, n_max + 1))
        p = random_poly(rng, n, int(rng.integers(0, min(d_max, n) + 1)))
        d = p.degree
        vals = p.values()
        N = 1 << n
        s2 = _power_sum(vals, 2)
        for q in q_set:
            lhs = _power_sum(vals, q) * N ** (q // 2 - 1)
            rhs = (q - 1) ** (q * d // 2) * s2 ** (q // 2)
            rep.record((rhs - lhs) / rhs if rhs else -lhs,
                       {"trial": trial, "n": n, "d": d, "q": q})
    return rep


def verify_weak_anticoncentration(trials: int = 200, n_max: int = 12, d_max: int = 3,
                                  seed: int = 0) -> VerificationReport:
    """``Pr[|p| >= ||p||_2 / 2] >= 9^-d / 2``, exactly."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("weak-anticoncentration", {"trials": trials, "n_max": n_max,
                                                        "d_max": d_max, "seed": seed})
    for trial in range(trials):
        n = int(rng.integers(1, n_max + 1))
        p = random_poly(rng, n, int(rng.integers(0, min(d_max, n) + 1)))
        d = p.degree
        vals = p.values()
        N = 1 << n
        s2 = _power_sum(vals, 2)
        # |p(x)| >= ||p||_2 / 2  <=>  4 N p(x)^2 >= s2
        hits = int(np.count_nonzero(4 * N * vals.astype(object) ** 2 >= s2))
        # hits / N >= 1 / (2 9^d)  <=>  2 9^d hits >= N
        rep.record(hits / N - 1 / (2 * 9 ** d) if 2 * 9 ** d * hits >= N else -1.0,
                   {"trial": trial, "n": n, "d": d, "hits": hits})
    return rep


def poly_anticoncentration_report(trials: int = 50, n_max: int = 12, d_max: int = 3,
                                  ks=(1, 2, 3, 4), seed: int = 0) -> VerificationReport:
    """Report-only: ``Pr[|p| > K ||p||_2]`` per K, and whether it is nonincreasing in K."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("poly-anticoncentration", {"trials": trials, "n_max": n_max,
                                                        "d_max": d_max, "K": list(ks), "seed": seed})
    rep.status = "report"
    rows = []
    monotone = True
    for trial in range(trials):
        n = int(rng.integers(1, n_max + 1))
        p = random_poly(rng, n, int(rng.integers(1, min(d_max, n) + 1)))
        vals = p.values().astype(object)
        N = 1 << n
        s2 = _power_sum(p.values(), 2)
        tails = [sum(1 for v in vals if N * v * v > k * k * s2) / N for k in ks]
        monotone &= all(a >= b for a, b in zip(tails, tails[1:]))
        rep.checked += 1
        rows.append({"trial": trial, "n": n, "d": p.degree,
                     **{f"K={k}": tv for k, tv in zip(ks, tails)},
                     **{f"ref_K={k}": 2.0 ** (-((k / 2) ** (2 / max(p.degree, 1)))) for k in ks}})
    rep.details["rows"] = rows
    rep.details["nonincreasing_in_K"] = monotone
    return rep
