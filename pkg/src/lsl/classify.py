"""Nearest special distribution, best-fitting uniform symmetric distribution, regimes."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .distributions import (
    Dist,
    PsiSet,
    SpecialKind,
    WDist,
    fmt_prob,
    popcount,
    special,
    special_weights,
    tv_distance,
    uniform_symmetric,
    uniform_symmetric_weights,
    weight_marginal,
)
from .engine import output_distribution, weight_distribution
from .localfn import LocalFn, ResourceLimit

BEST_PSI_MAX_N = 20
SCREEN_SLACK = 1e-9


def iota(psi: PsiSet) -> int:
    """Member closest to n/2; ties go to the smaller weight."""
    return min(psi.members, key=lambda s: (abs(2 * s - psi.n), s))


@dataclass(frozen=True)
class RegimeLabel:
    label: str
    iota: int
    threshold: float

    def to_json(self) -> dict:
        return {"label": self.label, "iota": self.iota, "threshold": self.threshold}


def regime(psi: PsiSet) -> RegimeLabel:
    n = psi.n
    i = iota(psi)
    # |i - n/2| > n^(2/3)  <=>  |n - 2i|^3 > 8 n^2, compared in integers
    tail = abs(n - 2 * i) ** 3 > 8 * n * n
    return RegimeLabel("tail" if tail else "central", i, n ** (2 / 3))


# ---------------------------------------------------------------------------
# distances to the special distributions


def special_tvs(p: Union[Dist, WDist], symmetric: bool = False) -> dict[SpecialKind, Fraction]:
    """tv to each of the six specials.

    A ``WDist`` argument is only meaningful when the caller knows the
    underlying string distribution is symmetric; then weight-level tv equals
    string-level tv.
    """
    if isinstance(p, WDist) or symmetric:
        w = p if isinstance(p, WDist) else weight_marginal(p)
        return {k: tv_distance(w, special_weights(k, w.n)) for k in SpecialKind}
    return {k: tv_distance(p, special(k, p.n)) for k in SpecialKind}


def nearest_special(p: Union[Dist, WDist], symmetric: bool = False):
    tvs = special_tvs(p, symmetric)
    kind = min(SpecialKind, key=lambda k: (tvs[k], int(k)))
    return kind, tvs[kind]


# ---------------------------------------------------------------------------
# tv to D_Psi


def tv_to_psi_naive(p: Dist, psi: PsiSet) -> Fraction:
    return tv_distance(p, uniform_symmetric(psi))


class SliceIndex:
    """Per-weight sorted masses and prefix sums for fast ``tv(p, D_Psi)``.

    Zero masses (strings outside the support) are accounted for by count, so
    the index stays sparse.
    """

    def __init__(self, p: Dist):
        if p.mode != "exact":
            raise ValueError("SliceIndex needs an exact distribution")
        self.n = n = p.n
        buckets: list[list[Fraction]] = [[] for _ in range(n + 1)]
        for x, v in p.pmf.items():
            buckets[popcount(x)].append(v)
        self.sorted = [sorted(b) for b in buckets]
        self.prefix = []
        for b in self.sorted:
            acc = [Fraction(0)]
            for v in b:
                acc.append(acc[-1] + v)
            self.prefix.append(acc)
        self.slice_mass = [pre[-1] for pre in self.prefix]
        self.slice_size = [math.comb(n, w) for w in range(n + 1)]

    def slice_l1(self, w: int, c: Fraction) -> Fraction:
        """sum over |x| = w of |p(x) - c|."""
        vals, pre = self.sorted[w], self.prefix[w]
        k = bisect.bisect_left(vals, c)
        zeros = self.slice_size[w] - len(vals)
        below = c * k - pre[k]
        above = (pre[-1] - pre[k]) - c * (len(vals) - k)
        return below + above + zeros * c

    def tv(self, psi: PsiSet) -> Fraction:
        z = sum(self.slice_size[w] for w in psi.members)
        c = Fraction(1, z)
        mem = set(psi.members)
        total = Fraction(0)
        for w in range(self.n + 1):
            total += self.slice_l1(w, c) if w in mem else self.slice_mass[w]
        return total / 2


def tv_to_psi(p: Dist, psi: PsiSet, index: SliceIndex | None = None) -> Fraction:
    if psi.n != p.n:
        raise ValueError("Psi and distribution disagree on n")
    return (index or SliceIndex(p)).tv(psi)


def tv_to_psi_weights(w: WDist, psi: PsiSet) -> Fraction:
    """Weight-level tv; equals string-level tv when the distribution is symmetric."""
    return tv_distance(w, uniform_symmetric_weights(psi))


def tv_to_psi_batch(p: Dist, psis: Sequence[PsiSet]) -> list[Fraction]:
    index = SliceIndex(p)
    return [index.tv(psi) for psi in psis]


def _screen_all_psi(index: SliceIndex) -> tuple[np.ndarray, np.ndarray]:
    """Float tv for every nonempty Psi, indexed by bitmask."""
    n = index.n
    masks = np.arange(1, 1 << (n + 1), dtype=np.int64)
    z = np.zeros(len(masks), dtype=np.float64)
    for w in range(n + 1):
        z += ((masks >> w) & 1) * float(index.slice_size[w])
    c = 1.0 / z
    total = np.zeros(len(masks), dtype=np.float64)
    for w in range(n + 1):
        member = ((masks >> w) & 1).astype(bool)
        vals = np.array([float(v) for v in index.sorted[w]], dtype=np.float64)
        pre = np.concatenate([[0.0], np.cumsum(vals)])
        cw = c[member]
        k = np.searchsorted(vals, cw, side="left")
        zeros = index.slice_size[w] - len(vals)
        l1 = (cw * k - pre[k]) + (pre[-1] - pre[k]) - cw * (len(vals) - k) + zeros * cw
        total[member] += l1
        total[~member] += float(index.slice_mass[w])
    return masks, total / 2


def best_psi(p: Dist, max_n: int = BEST_PSI_MAX_N) -> tuple[PsiSet, Fraction]:
    """Exact minimizer of ``tv(p, D_Psi)`` over all nonempty Psi.

    Every candidate is screened in float64; all candidates within
    ``SCREEN_SLACK`` of the float minimum are re-evaluated exactly.  Ties are
    broken by the lexicographically smallest member list.
    """
    if p.n > max_n:
        raise ResourceLimit(f"best_psi enumerates 2^(n+1) sets; n={p.n} > {max_n}")
    index = SliceIndex(p)
    masks, approx = _screen_all_psi(index)
    floor = approx.min()
    finalists = masks[approx <= floor + SCREEN_SLACK]
    best = None
    for mask in finalists.tolist():
        psi = PsiSet.from_mask(p.n, mask)
        val = index.tv(psi)
        key = (val, psi.members)
        if best is None or key < best[0]:
            best = (key, psi)
    (val, _), psi = best
    return psi, val


def best_psi_naive(p: Dist) -> tuple[PsiSet, Fraction]:
    """Reference: exact double loop over all Psi and all strings."""
    best = None
    for mask in range(1, 1 << (p.n + 1)):
        psi = PsiSet.from_mask(p.n, mask)
        val = tv_to_psi_naive(p, psi)
        key = (val, psi.members)
        if best is None or key < best[0]:
            best = (key, psi)
    (val, _), psi = best
    return psi, val


# ---------------------------------------------------------------------------
# tail truncation


@dataclass
class Truncation:
    psi: PsiSet
    truncated: PsiSet
    limit: int
    tv: Fraction

    def to_json(self) -> dict:
        return {
            "n": self.psi.n,
            "size": len(self.psi),
            "limit": self.limit,
            "kept": list(self.truncated.members),
            "tv": fmt_prob(self.tv),
            "tv_float": float(self.tv),
        }


def truncate_tail_support(psi: PsiSet, C: float = 6.0) -> Truncation:
    """Keep the ``ceil(C n^(1/3))`` members of a tail-regime Psi nearest to n/2."""
    if regime(psi).label != "tail":
        raise ValueError(f"{psi} is not in the tail regime")
    n = psi.n
    limit = math.ceil(C * n ** (1 / 3))
    ordered = sorted(psi.members, key=lambda s: (abs(2 * s - n), s))
    kept = PsiSet(n, ordered[:limit])
    tv = tv_distance(uniform_symmetric_weights(psi), uniform_symmetric_weights(kept))
    if n >= 100 and tv > Fraction(1, 2):
        raise AssertionError(f"truncation of {psi} left tv {float(tv)} > 1/2")
    return Truncation(psi, kept, limit, tv)


# ---------------------------------------------------------------------------
# full pipeline


@dataclass
class ClassificationReport:
    n: int
    special_tv: dict
    nearest: SpecialKind
    eps_special: Fraction
    best_psi: PsiSet
    eps_best: Fraction
    regime: RegimeLabel
    level: str  # "string" or "weight"

    @property
    def ratio(self):
        if self.eps_best == 0:
            return Fraction(1) if self.eps_special == 0 else math.inf
        return self.eps_special / self.eps_best

    def to_json(self) -> dict:
        ratio = self.ratio
        return {
            "n": self.n,
            "level": self.level,
            "special_tv": {k.label: fmt_prob(v) for k, v in self.special_tv.items()},
            "special_tv_float": {k.label: float(v) for k, v in self.special_tv.items()},
            "nearest": self.nearest.label,
            "tv": fmt_prob(self.eps_special),
            "best_psi": list(self.best_psi.members),
            "best_psi_tv": fmt_prob(self.eps_best),
            "ratio": "inf" if ratio == math.inf else fmt_prob(ratio),
            "ratio_float": float(ratio),
            "regime": self.regime.to_json(),
        }


def classify_distribution(p: Union[Dist, WDist], psi: PsiSet | None = None,
                          symmetric: bool | None = None) -> ClassificationReport:
    """Classify an explicit distribution.

    With ``psi`` given, that set is used as the fitted Psi instead of a search.
    Symmetric inputs (asserted, detected, or given as ``WDist``) are handled at
    weight level.
    """
    if isinstance(p, WDist):
        symmetric = True
        w = p
    else:
        if symmetric is None:
            symmetric = _is_symmetric(p)
        w = weight_marginal(p)
    n = w.n
    tvs = special_tvs(w) if symmetric else special_tvs(p)
    nearest = min(SpecialKind, key=lambda k: (tvs[k], int(k)))
    if psi is not None:
        eps = tv_to_psi_weights(w, psi) if symmetric else tv_to_psi(p, psi)
        best = psi
    elif symmetric:
        best, eps = best_psi_weights(w)
    else:
        best, eps = best_psi(p)
    return ClassificationReport(n, tvs, nearest, tvs[nearest], best, eps, regime(best),
                                "weight" if symmetric else "string")


def _is_symmetric(p: Dist) -> bool:
    """Every weight class is either absent or fully present with one common mass."""
    seen: dict[int, list] = {}
    for x, v in p.pmf.items():
        seen.setdefault(bin(x).count("1"), []).append(v)
    return all(len(vs) == math.comb(p.n, k) and min(vs) == max(vs) for k, vs in seen.items())


def best_psi_weights(w: WDist, max_n: int = BEST_PSI_MAX_N) -> tuple[PsiSet, Fraction]:
    """Exhaustive best Psi for a symmetric distribution given by its weights."""
    if w.n > max_n:
        # fall back to the six specials only; no exhaustive search at this size
        cands = [k.psi(w.n) for k in SpecialKind]
        vals = [(tv_to_psi_weights(w, c), c.members, c) for c in cands]
        val, _, psi = min(vals)
        return psi, val
    best = None
    for mask in range(1, 1 << (w.n + 1)):
        psi = PsiSet.from_mask(w.n, mask)
        key = (tv_to_psi_weights(w, psi), psi.members)
        if best is None or key < best[0]:
            best = (key, psi)
    return best[1], best[0][0]


def classify(f: LocalFn, psi: PsiSet | None = None, weight_level: bool = False) -> ClassificationReport:
    """Run the pipeline on ``f(U^m)``.

    ``weight_level`` asserts the output is symmetric, so only the weight
    distribution is computed (this scales to n in the hundreds).
    """
    if weight_level:
        return classify_distribution(weight_distribution(f), psi)
    return classify_distribution(output_distribution(f), psi)


# ---------------------------------------------------------------------------
# report-only experiments


@dataclass
class RatioTrial:
    trial: int
    m: int
    nearest: str
    eps_special: Fraction
    best_psi: list
    eps_best: Fraction
    ratio: object

    def row(self) -> dict:
        return {
            "trial": self.trial,
            "m": self.m,
            "nearest": self.nearest,
            "eps_special": fmt_prob(self.eps_special),
            "best_psi": " ".join(map(str, self.best_psi)),
            "eps_best": fmt_prob(self.eps_best),
            "ratio": "inf" if self.ratio == math.inf else float(self.ratio),
        }


def ratio_search(n: int, d: int, trials: int, seed: int, m: int | None = None) -> dict:
    """Observed ``eps_D / eps*`` over random d-local functions (report only)."""
    from .localfn import random_localfn

    rng = np.random.default_rng(seed)
    rows = []
    for k in range(trials):
        mm = m if m is not None else int(rng.integers(d, 2 * n + 1))
        f = random_localfn(n, mm, d, rng)
        rep = classify(f)
        rows.append(RatioTrial(k, mm, rep.nearest.label, rep.eps_special,
                               list(rep.best_psi.members), rep.eps_best, rep.ratio))
    finite = [r.ratio for r in rows if r.ratio != math.inf]
    return {
        "n": n,
        "d": d,
        "trials": trials,
        "seed": seed,
        "max_finite_ratio": float(max(finite)) if finite else None,
        "infinite_ratios": sum(r.ratio == math.inf for r in rows),
        "rows": [r.row() for r in rows],
    }


def slice_probe(f: LocalFn, k: int) -> dict:
    """tv between ``f(U^m)`` and the single slice ``D_{k}`` (report only)."""
    psi = PsiSet(f.n, [k])
    try:
        p = output_distribution(f)
        tv, level = tv_to_psi(p, psi), "string"
    except ResourceLimit:
        tv, level = tv_to_psi_weights(weight_distribution(f), psi), "weight-lower-bound"
    return {"n": f.n, "k": k, "level": level, "tv": fmt_prob(tv), "tv_float": float(tv)}


def tail_probe(f: LocalFn, psi: PsiSet) -> dict:
    """tv to a given ``D_Psi`` against the 1/3 threshold (report only)."""
    p = output_distribution(f)
    tv = tv_to_psi(p, psi)
    reg = regime(psi)
    return {
        "n": f.n,
        "psi": list(psi.members),
        "regime": reg.to_json(),
        "tv": fmt_prob(tv),
        "tv_float": float(tv),
        "above_one_third": tv > Fraction(1, 3),
    }
