"""Total variation identities and inequalities, and the two small-distance claims."""

from __future__ import annotations

import itertools
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from ..distributions import (
    Dist,
    SpecialKind,
    WDist,
    coupling_overlap,
    from_weights,
    marginal,
    max_event_gap,
    mixture,
    product,
    special,
    symmetrize,
    tv_distance,
    weight_marginal,
)
from ..engine import output_distribution
from ..localfn import (
    LocalFn,
    anf_parity,
    canonical,
    evens_with_flips,
    kwise_check,
    mixture_evens_odds,
    random_localfn,
)
from .report import VerificationReport


def random_dist(rng: np.random.Generator, n: int, density: float | None = None) -> Dist:
    """Random exact distribution with small integer weights on a random support."""
    size = 1 << n
    density = float(rng.uniform(0.1, 1.0)) if density is None else density
    w = rng.integers(1, 10, size=size) * (rng.random(size) < density)
    if not w.any():
        w[int(rng.integers(size))] = 1
    total = int(w.sum())
    return Dist(n, {x: Fraction(int(v), total) for x, v in enumerate(w.tolist()) if v})


def random_wdist(rng: np.random.Generator, n: int) -> WDist:
    w = rng.integers(0, 10, size=n + 1)
    if not w.any():
        w[0] = 1
    total = int(w.sum())
    return WDist(n, [Fraction(int(v), total) for v in w.tolist()])


def _events_gap(p: Dist, q: Dist) -> Fraction:
    """max over every event of P(E) - Q(E), by enumerating all events."""
    pts = list(range(1 << p.n))
    best = Fraction(0)
    for mask in range(1 << len(pts)):
        gap = sum((p(x) - q(x) for x in pts if mask >> x & 1), Fraction(0))
        best = max(best, gap)
    return best


def verify_tv_identities(trials: int = 200, n_max: int = 10, seed: int = 0) -> VerificationReport:
    """Event and coupling characterizations, plus data processing under |.| and marginals."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("tv-identities", {"trials": trials, "n_max": n_max, "seed": seed})
    for trial in range(trials):
        n = int(rng.integers(1, n_max + 1))
        p, q = random_dist(rng, n), random_dist(rng, n)
        tv = tv_distance(p, q)
        w = {"trial": trial, "n": n}
        rep.record(-abs(max_event_gap(p, q) - tv), {**w, "identity": "event"})
        rep.record(-abs(coupling_overlap(p, q) - (1 - tv)), {**w, "identity": "coupling"})
        if n <= 2:
            rep.record(-abs(_events_gap(p, q) - tv), {**w, "identity": "all events"})
        rep.record(tv - tv_distance(weight_marginal(p), weight_marginal(q)), {**w, "identity": "weights"})
        s = sorted(int(i) for i in rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        rep.record(tv - tv_distance(marginal(p, s), marginal(q, s)), {**w, "identity": "marginal", "s": s})
    return rep


def verify_distance_to_sym(trials: int = 200, n_max: int = 10, seed: int = 0) -> VerificationReport:
    """For symmetric B: ``tv(A,B) <= tv(A,A_sym) + tv(|A|,|B|) <= 3 tv(A,B)``."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("distance-to-sym", {"trials": trials, "n_max": n_max, "seed": seed})
    for trial in range(trials):
        n = int(rng.integers(1, n_max + 1))
        a = random_dist(rng, n)
        b = from_weights(random_wdist(rng, n))
        tv = tv_distance(a, b)
        rhs = tv_distance(a, symmetrize(a)) + tv_distance(weight_marginal(a), weight_marginal(b))
        rep.record(rhs - tv, {"trial": trial, "n": n, "direction": "upper"})
        rep.record(3 * tv - rhs, {"trial": trial, "n": n, "direction": "lower"})
    return rep


def verify_after_conditioning(trials: int = 200, n_max: int = 10, seed: int = 0) -> VerificationReport:
    """``tv(P,Q) >= 1 - (t+1) eps`` for mixtures P of components with ``tv(P_i,Q) >= 1 - eps``.

    Components mostly live off the support of Q with a small leak, so the
    bound is not vacuous; eps is the smallest value the hypothesis allows.
    """
    rng = np.random.default_rng(seed)
    rep = VerificationReport("after-conditioning", {"trials": trials, "n_max": n_max, "seed": seed})
    for trial in range(trials):
        n = int(rng.integers(2, n_max + 1))
        size = 1 << n
        split = int(rng.integers(1, size))
        q = Dist(n, _normalized({x: int(rng.integers(1, 5)) for x in range(split)}))
        t = int(rng.integers(1, 6))
        comps = []
        for _ in range(t):
            leak = Fraction(int(rng.integers(0, 6)), 100)
            inside = _normalized({int(rng.integers(split)): 1})
            outside = _normalized({int(x): int(rng.integers(1, 5))
                                   for x in rng.integers(split, size, size=3)})
            comps.append(mixture([leak, 1 - leak], [Dist(n, inside), Dist(n, outside)]))
        eps = 1 - min(tv_distance(c, q) for c in comps)
        wts = _normalized({k: int(rng.integers(1, 10)) for k in range(t)})
        p = mixture([wts[k] for k in range(t)], comps)
        rep.record(tv_distance(p, q) - (1 - (t + 1) * eps), {"trial": trial, "n": n, "t": t, "eps": eps})
    return rep


def _normalized(d: dict) -> dict:
    total = sum(d.values())
    return {k: Fraction(v, total) for k, v in d.items()}


def exp_lower(x: Fraction) -> Fraction:
    """A rational lower bound for ``e^(-x)`` (50 digits, rounded down)."""
    with localcontext() as ctx:
        ctx.prec = 50
        v = (-(Decimal(x.numerator) / Decimal(x.denominator))).exp()
    return Fraction(v) - Fraction(1, 10 ** 45)


def _bernoulli_product(ps) -> Dist:
    return product([Dist(1, {0: 1 - p, 1: p}) for p in ps])


def verify_after_product(trials: int = 200, n_max: int = 10, seed: int = 0) -> VerificationReport:
    """``tv(P,Q) >= 1 - 2 e^(-eps^2 s / 2) / eta`` on instances meeting all three hypotheses.

    P and W are products of biased bits, so their restrictions to S are
    products; the per-coordinate gap on S is at least eps; and
    ``Q = W h / <W, h>`` with ``h`` in [1/4, 1], so ``W >= eta Q`` with
    ``eta = <W, h> / max h``.  The exponential is replaced by a rational lower
    bound, which can only make the check stricter.
    """
    rng = np.random.default_rng(seed)
    rep = VerificationReport("after-product", {"trials": trials, "n_max": n_max, "seed": seed})
    nonvacuous = 0
    for trial in range(trials):
        n = int(rng.integers(1, n_max + 1))
        s = int(rng.integers(1, n + 1))
        # most trials separate every coordinate of S strongly, so the bound bites
        strong = rng.random() < 0.8
        ps, ws = [], []
        for i in range(n):
            a = Fraction(int(rng.integers(1, 20)), 20)
            b = Fraction(int(rng.integers(1, 20)), 20)
            if i < s and strong:
                a = Fraction(int(rng.integers(1, 3)), 20)
                b = 1 - Fraction(int(rng.integers(1, 3)), 20)
                if rng.random() < 0.5:
                    a, b = 1 - a, 1 - b
            ps.append(a)
            ws.append(b)
        eps = min(abs(ps[i] - ws[i]) for i in range(s))
        p, w = _bernoulli_product(ps), _bernoulli_product(ws)
        lo = 3 if strong else 1
        h = {x: Fraction(int(rng.integers(lo, 5)), 4) for x in range(1 << n)}
        z = sum(w(x) * h[x] for x in h)
        q = Dist(n, {x: w(x) * h[x] / z for x in h if w(x)})
        eta = z / max(h.values())
        bound = 1 - 2 * exp_lower(eps * eps * s / 2) / eta
        nonvacuous += bound > 0
        rep.record(tv_distance(p, q) - bound, {"trial": trial, "n": n, "s": s, "eps": eps})
    rep.details["nonvacuous"] = nonvacuous
    return rep


# ---------------------------------------------------------------------------
# small-distance claims on constructed samplers


def constructed_instances(n_max: int = 10) -> list[tuple[str, LocalFn]]:
    out = []
    for n in range(2, n_max + 1):
        for kind in SpecialKind:
            out.append((f"canonical({kind.label},{n})", canonical(kind, n)))
        out.append((f"mixture_evens_odds({n})", mixture_evens_odds(n)))
        for c in range(1, n + 1):
            if n + 2 * c <= 20:
                out.append((f"evens_with_flips({n},{c})", evens_with_flips(n, c)))
    return out


def random_instances(count: int, seed: int, n_max: int = 8, d_max: int = 3) -> list[tuple[str, LocalFn]]:
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(2, n_max + 1))
        d = int(rng.integers(1, d_max + 1))
        m = int(rng.integers(d, 2 * n + 2))
        out.append((f"random#{k}", random_localfn(n, m, d, rng)))
    return out


def verify_parity_claim(instances) -> VerificationReport:
    """``tv(f, D) < 2^-d`` for D in {evens, odds} implies ``supp f(U) within supp D``.

    d is the effective locality; the output parity's ANF degree must not
    exceed it either.
    """
    rep = VerificationReport("constant-parity", {"instances": len(instances)})
    applied = 0
    for name, f in instances:
        d = f.locality
        p = output_distribution(f)
        poly = anf_parity(f)
        rep.record(d - poly.degree, {"instance": name, "check": "anf degree"})
        for kind in (SpecialKind.EVENS, SpecialKind.ODDS):
            tgt = special(kind, f.n)
            if tv_distance(p, tgt) < Fraction(1, 2 ** d):
                applied += 1
                inside = all(tgt(x) > 0 for x in p.support())
                rep.record(0 if inside else -1, {"instance": name, "target": kind.label})
    rep.details["hypothesis_met"] = applied
    return rep


def verify_moment_matching_claim(instances) -> VerificationReport:
    """``tv(f, D) < 2^-(kd)`` for D in {evens, odds, all} and k < n implies k-wise independence.

    Only the largest k meeting the hypothesis is tested, since k-wise
    independence implies it for every smaller k.
    """
    rep = VerificationReport("moment-matching", {"instances": len(instances)})
    applied = 0
    for name, f in instances:
        d = max(f.locality, 1)
        p = output_distribution(f)
        tv = min(tv_distance(p, special(k, f.n)) for k in (SpecialKind.EVENS, SpecialKind.ODDS, SpecialKind.ALL))
        ks = [k for k in range(1, f.n) if tv < Fraction(1, 2 ** (k * d))]
        if not ks:
            continue
        applied += 1
        res = kwise_check(f, max(ks))
        rep.record(0 if res.passed else -1, {"instance": name, "k": max(ks), "witness": res.witness})
    rep.details["hypothesis_met"] = applied
    return rep


def kwise_by_transform(p: Dist, k: int) -> bool:
    """k-wise independence from the Walsh transform of the pmf (independent of the bias code)."""
    n = p.n
    for size in range(1, min(k, n) + 1):
        for s in itertools.combinations(range(n), size):
            mask = sum(1 << i for i in s)
            bias = sum((v if bin(x & mask).count("1") % 2 == 0 else -v for x, v in p.pmf.items()), Fraction(0))
            if bias:
                return False
    return True
