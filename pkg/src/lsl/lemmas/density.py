"""Density comparison for sums of independent bounded integer variables."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .convolution import IntPMF, convolve
from .report import VerificationReport

BOUND_CONSTANT = 22


@dataclass(frozen=True)
class DensityInstance:
    t: int
    pmfs: tuple
    Phi: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.t < 1:
            raise ValueError("t must be >= 1")
        for k, p in enumerate(self.pmfs):
            if p.lo < 0 or p.hi > self.t:
                raise ValueError(f"X_{k} is not supported in 0..{self.t}")
        bad = [r for r in self.Phi if not 2 <= r <= self.t]
        if bad:
            raise ValueError(f"Phi must lie in 2..{self.t}, got {sorted(bad)}")

    @property
    def n(self) -> int:
        return len(self.pmfs)


def residue_max(p: IntPMF, r: int) -> Fraction:
    """max over x of Pr[X = x mod r]."""
    buckets = [0] * r
    for v in p.support():
        buckets[v % r] += p.nums[v - p.offset]
    return Fraction(max(buckets), p.den)


@dataclass
class DensityParams:
    phi: int
    L_r: dict
    L: Fraction | None
    alpha: Fraction | None
    block_count: int
    applicable: bool
    reason: str | None = None

    def bound(self, delta: int) -> Fraction:
        return Fraction(BOUND_CONSTANT * abs(delta)) / (self.phi * self.alpha * self.block_count)

    def to_json(self) -> dict:
        out = {
            "phi": self.phi,
            "L_r": {str(r): f"{v.numerator}/{v.denominator}" for r, v in self.L_r.items()},
            "L": None if self.L is None else f"{self.L.numerator}/{self.L.denominator}",
            "alpha_float": None if self.alpha is None else float(self.alpha),
            "block_count": self.block_count,
            "applicable": self.applicable,
        }
        if self.reason:
            out["reason"] = self.reason
        return out


def density_params(inst: DensityInstance) -> DensityParams:
    t, n = inst.t, inst.n
    phi = math.lcm(*[v for v in range(1, t + 1) if v not in inst.Phi])
    L_r = {r: sum((1 - residue_max(p, r) for p in inst.pmfs), Fraction(0)) for r in sorted(inst.Phi)}
    if not inst.Phi:
        return DensityParams(phi, L_r, None, None, 0, False, "Phi is empty")
    L = min(L_r.values())
    if L <= 0:
        return DensityParams(phi, L_r, L, None, 0, False, "L = 0: some r in Phi has no spread")
    alpha = (L / (4 * n * (t + 1))) ** (t * t * phi)
    blocks = math.floor(L / (16 * t ** 4 * phi))
    if blocks < 1:
        return DensityParams(phi, L_r, L, alpha, blocks, False, "block count is 0")
    return DensityParams(phi, L_r, L, alpha, blocks, True)


# ---------------------------------------------------------------------------
# the comparison itself


def max_density_drop(s: IntPMF, delta: int) -> tuple[Fraction, int]:
    """max over y of Pr[S = y] - Pr[S = y + delta], with the maximizing y."""
    nums = s.nums
    size = len(nums)
    best, arg = None, None
    for k in range(size):
        j = k + delta
        other = nums[j] if 0 <= j < size else 0
        d = nums[k] - other
        if best is None or d > best:
            best, arg = d, s.offset + k
    return Fraction(best, s.den), arg


def _deltas(phi: int, delta_max: int) -> list[int]:
    steps = range(phi, delta_max + 1, phi)
    return sorted([d for d in steps] + [-d for d in steps])


def _check_sum(report: VerificationReport, s: IntPMF, deltas: Sequence[int], bound) -> None:
    worst_ratio = Fraction(0)
    for delta in deltas:
        drop, y = max_density_drop(s, delta)
        b = bound(delta)
        report.record(b - drop, {"y": y, "delta": delta, "value": float(drop), "bound": float(b)})
        if drop > 0:
            worst_ratio = max(worst_ratio, drop / b)
    report.details["max_value_over_bound"] = float(worst_ratio)


def check_density_lemma(ys: Sequence[IntPMF], phi: int, alpha, u: Sequence[int],
                        delta_max: int | None = None) -> VerificationReport:
    """Exact check of ``Pr[S=y] - Pr[S=y+D] <= 22|D|/(phi alpha m)`` for D in phi*Z."""
    alpha = Fraction(alpha)
    m = len(ys)
    delta_max = 20 * phi if delta_max is None else delta_max
    rep = VerificationReport("density-lemma", {"m": m, "phi": phi, "alpha": alpha, "delta_max": delta_max})
    for i, (y, ui) in enumerate(zip(ys, u)):
        if y(ui) < alpha or y(ui + phi) < alpha:
            rep.status = "rejected"
            rep.details["precondition"] = f"Y_{i} has Pr[u]={y(ui)}, Pr[u+phi]={y(ui + phi)} below alpha"
            return rep
    s = convolve(ys)
    _check_sum(rep, s, _deltas(phi, delta_max),
               lambda d: Fraction(BOUND_CONSTANT * abs(d)) / (phi * alpha * m))
    return rep


def check_density_theorem(inst: DensityInstance, delta_max: int | None = None,
                          deltas: Sequence[int] | None = None) -> VerificationReport:
    """Exact check of the theorem's bound on the full sum.

    Explicit ``deltas`` that are not multiples of phi are rejected before any
    computation, since the bound is not claimed for them.
    """
    prm = density_params(inst)
    delta_max = 20 * prm.phi if delta_max is None else delta_max
    rep = VerificationReport("density-theorem", {"n": inst.n, "t": inst.t, "Phi": sorted(inst.Phi),
                                                 "delta_max": delta_max})
    rep.details["params"] = prm.to_json()
    if deltas is not None:
        bad = [d for d in deltas if d % prm.phi]
        if bad:
            rep.status = "rejected"
            rep.details["precondition"] = f"deltas {bad} are not multiples of phi={prm.phi}"
            return rep
    if not prm.applicable:
        rep.status = "inapplicable"
        return rep
    s = convolve(list(inst.pmfs))
    _check_sum(rep, s, deltas if deltas is not None else _deltas(prm.phi, delta_max), prm.bound)
    rep.details["bezout"] = bezout_witness(inst, prm)
    return rep


def observed_drops(pmfs: Sequence[IntPMF], deltas: Sequence[int]) -> dict[int, Fraction]:
    """max_y Pr[S=y] - Pr[S=y+D] per D, with no hypotheses checked."""
    s = convolve(list(pmfs))
    return {d: max_density_drop(s, d)[0] for d in deltas}


# ---------------------------------------------------------------------------
# Bezout coefficients


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def bezout_combination(ws: Sequence[int], target: int, bound: int | None = None) -> list[int]:
    """Integers s with ``sum s_j w_j = target`` and small ``max |s_j|``.

    Default bound is ``(|target|/g) * max|w|/g``.  An extended-gcd chain gives
    a solution, every coefficient after the largest-|w| one is reduced modulo
    its step, and a bounded exhaustive search is the fallback.
    """
    ws = [int(w) for w in ws]
    if not ws or any(w == 0 for w in ws):
        raise ValueError("weights must be nonzero")
    g = 0
    for w in ws:
        g = math.gcd(g, w)
    if target % g:
        raise ValueError(f"gcd {g} does not divide {target}")
    if bound is None:
        bound = max(1, abs(target) // g) * (max(abs(w) for w in ws) // g)
    # chain: g_k = s . w[:k]
    s = [0] * len(ws)
    s[0], acc = (1 if ws[0] > 0 else -1), abs(ws[0])
    for k in range(1, len(ws)):
        acc2, a, b = _ext_gcd(acc, ws[k])
        if acc2 < 0:
            acc2, a, b = -acc2, -a, -b
        s = [c * a for c in s]
        s[k] = b
        acc = acc2
    scale = target // g
    s = [c * scale for c in s]
    # reduce every coefficient against the pivot with the largest |w|
    piv = max(range(len(ws)), key=lambda j: (abs(ws[j]), -j))
    for j in range(len(ws)):
        if j == piv:
            continue
        step_j = abs(ws[piv]) // math.gcd(ws[piv], ws[j])
        q = _round_div(s[j], step_j)
        s[j] -= q * step_j
        # keep the sum: s_piv absorbs q * step_j * w_j / w_piv
        s[piv] += q * step_j * ws[j] // ws[piv]
    if max(abs(c) for c in s) > bound:
        s = _bezout_search(ws, target, bound) or s
    assert sum(a * b for a, b in zip(s, ws)) == target
    return s


def _round_div(a: int, b: int) -> int:
    q, r = divmod(a, b)
    return q + (1 if 2 * r > b else 0)


def _bezout_search(ws, target, bound, budget=2_000_000):
    rest = list(range(len(ws) - 1))
    last = len(ws) - 1
    if (2 * bound + 1) ** len(rest) > budget:
        return None
    best = None
    for combo in itertools.product(range(-bound, bound + 1), repeat=len(rest)):
        r = target - sum(c * ws[j] for c, j in zip(combo, rest))
        if r % ws[last]:
            continue
        cand = list(combo) + [r // ws[last]]
        key = max(abs(c) for c in cand)
        if key <= bound and (best is None or key < best[0]):
            best = (key, cand)
    return best[1] if best else None


def bezout_witness(inst: DensityInstance, prm: DensityParams) -> dict:
    """Rebuild the pair ``z_r != z'_r (mod r)`` per r in Phi and check the Bezout step.

    For each r the pair is the one shared by the most variables with both
    masses at least ``L/(4n(t+1))``.  The gcd of the differences must divide
    phi, and the coefficients reaching phi must satisfy ``|s_j| <= t phi``.
    """
    t, n = inst.t, inst.n
    floor = prm.L / (4 * n * (t + 1))
    pairs, ws = {}, []
    for r in sorted(inst.Phi):
        best = None
        for z, z2 in itertools.combinations(range(t + 1), 2):
            if (z - z2) % r == 0:
                continue
            cnt = sum(1 for p in inst.pmfs if p(z) >= floor and p(z2) >= floor)
            if best is None or cnt > best[0]:
                best = (cnt, z, z2)
        pairs[r] = best
        ws.append(best[1] - best[2])
    g = 0
    for w in ws:
        g = math.gcd(g, w)
    out = {"pairs": {str(r): list(v) for r, v in pairs.items()}, "w": ws, "g": g}
    if prm.phi % g:
        out["ok"] = False
        out["problem"] = f"gcd {g} does not divide phi {prm.phi}"
        return out
    s = bezout_combination(ws, prm.phi)
    out["s"] = s
    out["ok"] = max(abs(c) for c in s) <= t * prm.phi
    return out


# ---------------------------------------------------------------------------
# random instances


def random_lemma_instance(rng: np.random.Generator) -> tuple[list[IntPMF], int, Fraction, list[int]]:
    """Variables with two atoms ``u, u+phi`` of mass >= alpha, alpha in [1/5, 1/2]."""
    phi = int(rng.integers(1, 4))
    m = int(rng.integers(20, 101))
    alpha = Fraction(int(rng.integers(20, 51)), 100)
    ys, us = [], []
    for _ in range(m):
        u = int(rng.integers(-3, 4))
        a = alpha + Fraction(int(rng.integers(0, 11)), 100) * (1 - 2 * alpha)
        b = alpha + Fraction(int(rng.integers(0, 11)), 100) * (1 - 2 * alpha)
        rest = 1 - a - b
        masses = {u: a, u + phi: b}
        if rest:
            extra = [int(v) for v in rng.integers(-5, 11, size=int(rng.integers(1, 4)))]
            for v in extra:
                masses[v] = masses.get(v, 0) + rest / len(extra)
        ys.append(IntPMF.from_dict(masses))
        us.append(u)
    return ys, phi, alpha, us
