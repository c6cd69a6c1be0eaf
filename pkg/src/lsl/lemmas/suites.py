"""Named suites with their default ranges, as run by ``lsl verify``."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

import numpy as np

from . import binomial, chebyshev, polys, tv
from .convolution import IntPMF
from .density import DensityInstance, check_density_lemma, check_density_theorem, random_lemma_instance
from .report import VerificationReport


def density_lemma_sweep(trials: int = 50, seed: int = 0) -> VerificationReport:
    """Randomized lemma instances: alpha in [1/5, 1/2], phi in {1,2,3}, m in [20, 100]."""
    rng = np.random.default_rng(seed)
    rep = VerificationReport("density-lemma", {"trials": trials, "seed": seed})
    rows = []
    for k in range(trials):
        ys, phi, alpha, us = random_lemma_instance(rng)
        r = check_density_lemma(ys, phi, alpha, us)
        if r.outcome == "rejected":
            raise AssertionError(f"generator produced an instance violating the hypothesis: {r.details}")
        rows.append({"trial": k, "m": len(ys), "phi": phi, "alpha": float(alpha), "checked": r.checked,
                     "max_slack": r.max_slack, "value_over_bound": r.details["max_value_over_bound"]})
        _absorb(rep, r, {"trial": k})
    rep.details["rows"] = rows
    return rep


def _absorb(rep: VerificationReport, r: VerificationReport, tag: dict) -> None:
    rep.checked += r.checked
    for v in r.violations:
        rep.violate({**tag, **v})
    if r.max_slack is not None:
        rep.max_slack = r.max_slack if rep.max_slack is None else min(rep.max_slack, r.max_slack)


def theorem_instances(seed: int = 0) -> list[tuple[str, DensityInstance, list | None]]:
    """Fixed applicable instances, random ones, and the two expected non-runs."""
    u012 = IntPMF.uniform([0, 1, 2])
    out = [
        ("t=3 Phi={2,3} n=4096 uniform{0,1,2}", DensityInstance(3, (u012,) * 4096, frozenset({2, 3})), None),
        ("t=2 Phi={2} n=800 uniform{0,1,2}", DensityInstance(2, (u012,) * 800, frozenset({2})), None),
        ("t=3 Phi={3} n=4096 uniform{0,1,2}", DensityInstance(3, (u012,) * 4096, frozenset({3})), None),
    ]
    rng = np.random.default_rng(seed)
    for k in range(3):
        n = int(rng.integers(1200, 2001))
        pmfs = []
        for _ in range(n):
            w = rng.integers(1, 6, size=3)
            pmfs.append(IntPMF.from_masses([Fraction(int(v), int(w.sum())) for v in w]))
        out.append((f"random#{k} t=2 Phi={{2}} n={n}", DensityInstance(2, tuple(pmfs), frozenset({2})), None))
    u13 = IntPMF.uniform([1, 3])
    out.append(("parity remark: uniform{1,3}, delta=1", DensityInstance(3, (u13,) * 64, frozenset({3})), [1]))
    out.append(("small n: block count 0", DensityInstance(2, (u012,) * 50, frozenset({2})), None))
    return out


def density_theorem_sweep(seed: int = 0) -> VerificationReport:
    rep = VerificationReport("density-theorem", {"seed": seed})
    rows = []
    for name, inst, deltas in theorem_instances(seed):
        r = check_density_theorem(inst, deltas=deltas)
        rows.append({"instance": name, "status": r.outcome, "checked": r.checked,
                     "block_count": r.details["params"]["block_count"],
                     "phi": r.details["params"]["phi"],
                     "value_over_bound": r.details.get("max_value_over_bound"),
                     "bezout_ok": r.details.get("bezout", {}).get("ok")})
        _absorb(rep, r, {"instance": name})
        if r.outcome == "pass" and not r.details["bezout"]["ok"]:
            rep.violate({"instance": name, "bezout": r.details["bezout"]})
    rep.details["rows"] = rows
    return rep


def _claims(which: str, seed: int) -> VerificationReport:
    inst = tv.constructed_instances() + tv.random_instances(100, seed)
    return tv.verify_parity_claim(inst) if which == "parity" else tv.verify_moment_matching_claim(inst)


SUITES: dict[str, Callable[..., VerificationReport]] = {
    "nearby-binom": lambda n_max=2000, **_: binomial.verify_nearby_binom(n_max),
    "entropy": lambda **_: binomial.verify_entropy(),
    "individual-binom": lambda n_max=200, **_: binomial.verify_individual_binom(n_max),
    "binom-tail": lambda n_max=200, **_: binomial.verify_binom_tail(n_max),
    "p-facts": lambda r_max=15, **_: chebyshev.verify_p_facts(tuple(range(1, r_max + 1, 2))),
    "hypercontractivity": lambda trials=200, seed=0, **_: polys.verify_hypercontractivity(trials, seed=seed),
    "weak-anticoncentration": lambda trials=200, seed=0, **_: polys.verify_weak_anticoncentration(trials, seed=seed),
    "poly-anticoncentration": lambda trials=50, seed=0, **_: polys.poly_anticoncentration_report(trials, seed=seed),
    "tv-identities": lambda trials=200, seed=0, **_: tv.verify_tv_identities(trials, seed=seed),
    "distance-to-sym": lambda trials=200, seed=0, **_: tv.verify_distance_to_sym(trials, seed=seed),
    "after-conditioning": lambda trials=200, seed=0, **_: tv.verify_after_conditioning(trials, seed=seed),
    "after-product": lambda trials=200, seed=0, **_: tv.verify_after_product(trials, seed=seed),
    "constant-parity": lambda seed=0, **_: _claims("parity", seed),
    "moment-matching": lambda seed=0, **_: _claims("moment", seed),
    "density-lemma": lambda trials=50, seed=0, **_: density_lemma_sweep(trials, seed),
    "density-theorem": lambda seed=0, **_: density_theorem_sweep(seed),
}


def run_suite(name: str, **params) -> VerificationReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    clean = {k: v for k, v in params.items() if v is not None}
    return SUITES[name](**clean)
