import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsl.distributions import SpecialKind, WDist, binomial, special_weights, wpoint
from lsl.lemmas import SUITES, VerificationReport, run_suite
from lsl.lemmas.binomial import (
    PI_UPPER,
    binary_entropy,
    entropy_power,
    verify_binom_tail,
    verify_entropy,
    verify_individual_binom,
    verify_nearby_binom,
)
from lsl.lemmas.chebyshev import chebyshev_p_coeffs, chebyshev_t, verify_p_facts
from lsl.lemmas.convolution import IntPMF, convolve, convolve_direct, direct_mul, poly_mul
from lsl.lemmas.density import (
    DensityInstance,
    bezout_combination,
    check_density_lemma,
    check_density_theorem,
    density_params,
    observed_drops,
)
from lsl.lemmas.observables import (
    continuity_of_weights,
    continuity_report,
    kolmogorov_objective,
    kolmogorov_parity_report,
)
from lsl.lemmas.polys import MultilinearPoly, verify_hypercontractivity, verify_weak_anticoncentration
from lsl.lemmas.tv import exp_lower, kwise_by_transform, verify_moment_matching_claim, verify_parity_claim
from lsl.localfn import canonical, evens_with_flips, kwise_check

from oracles import binom_row


class TestReport:
    def test_record_and_merge(self):
        a = VerificationReport("x", {})
        a.record(Fraction(1, 3), {"k": 1})
        a.record(-1, {"k": 2})
        assert a.checked == 2 and a.violation_count == 1 and a.outcome == "fail"
        b = VerificationReport("x", {})
        b.record(0, {"k": 3})
        assert b.passed
        m1, m2 = a.merge(b), b.merge(a)
        assert m1.checked == m2.checked == 3 and m1.violation_count == m2.violation_count == 1
        json.loads(json.dumps(m1.to_json()))
        assert "suite,status" in b.to_csv()


class TestConvolution:
    def test_examples(self):
        h = IntPMF.uniform([0, 1])
        assert convolve([h, h]).masses() == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]
        assert convolve([IntPMF.point(3), IntPMF.point(4)]) == IntPMF.point(7)
        s = convolve([h] * 20)
        assert s.masses() == [Fraction(c, 1 << 20) for c in binom_row(20)]

    def test_validation(self):
        with pytest.raises(ValueError):
            IntPMF(0, (1, 1), 3)
        with pytest.raises(ValueError):
            IntPMF(0, (2, -1), 1)

    @given(st.lists(st.lists(st.integers(0, 9), min_size=1, max_size=12), min_size=1, max_size=12),
           st.lists(st.integers(-5, 5), min_size=12, max_size=12))
    @settings(max_examples=60, deadline=None)
    def test_matches_fold(self, weights, offsets):
        ps = []
        for w, off in zip(weights, offsets):
            if not any(w):
                w = w + [1]
            tot = sum(w)
            ps.append(IntPMF.from_masses([Fraction(v, tot) for v in w], off))
        ref = convolve_direct(ps)
        assert convolve(ps) == ref
        assert convolve(ps, method="direct") == ref

    @given(st.lists(st.integers(0, 10 ** 30), min_size=1, max_size=60),
           st.lists(st.integers(0, 10 ** 30), min_size=1, max_size=60))
    @settings(max_examples=60, deadline=None)
    def test_kronecker_product(self, a, b):
        assert poly_mul(a, b) == direct_mul(a, b)

    def test_negate_shift(self):
        p = IntPMF.from_dict({1: Fraction(1, 3), 4: Fraction(2, 3)})
        assert p.negate()(-4) == Fraction(2, 3)
        assert p.shift(2)(6) == Fraction(2, 3)
        assert p.support() == [1, 4]


class TestDensity:
    def test_params(self):
        u = IntPMF.uniform([0, 1, 2])
        prm = density_params(DensityInstance(3, (u,) * 10, frozenset({2, 3})))
        assert prm.phi == 1
        assert prm.L_r == {2: Fraction(10, 3), 3: Fraction(20, 3)}
        prm = density_params(DensityInstance(3, (IntPMF.point(0),) * 10, frozenset({2})))
        assert prm.L_r == {2: 0}
        assert density_params(DensityInstance(2, (u,), frozenset({2}))).phi == 1

    def test_lemma_examples(self):
        h = IntPMF.uniform([0, 1])
        rep = check_density_lemma([h, h], 1, Fraction(1, 2), [0, 0], delta_max=1)
        assert rep.passed
        assert observed_drops([h, h], [1])[1] == Fraction(1, 4)
        rep = check_density_lemma([h] * 100, 1, Fraction(1, 2), [0] * 100)
        assert rep.passed and rep.details["max_value_over_bound"] < 1
        y = IntPMF.from_dict({0: Fraction(3, 10), 2: Fraction(3, 10), 5: Fraction(4, 10)})
        assert check_density_lemma([y] * 50, 2, Fraction(3, 10), [0] * 50).passed

    def test_lemma_rejects_bad_alpha(self):
        y = IntPMF.from_dict({0: Fraction(9, 10), 1: Fraction(1, 10)})
        rep = check_density_lemma([y] * 20, 1, Fraction(1, 2), [0] * 20)
        assert rep.outcome == "rejected"

    def test_theorem_outcomes(self):
        u13 = IntPMF.uniform([1, 3])
        rep = check_density_theorem(DensityInstance(3, (u13,) * 64, frozenset({3})), deltas=[1])
        assert rep.outcome == "rejected"
        u = IntPMF.uniform([0, 1, 2])
        rep = check_density_theorem(DensityInstance(2, (u,) * 50, frozenset({2})))
        assert rep.outcome == "inapplicable"

    def test_theorem_4096(self):
        u = IntPMF.uniform([0, 1, 2])
        rep = check_density_theorem(DensityInstance(3, (u,) * 4096, frozenset({2, 3})))
        assert rep.outcome == "pass" and rep.details["bezout"]["ok"]

    def test_bezout_examples(self):
        assert bezout_combination([2, 3], 1) == [-1, 1]
        assert bezout_combination([4, 6], 2) == [-1, 1]
        with pytest.raises(ValueError):
            bezout_combination([4, 6], 3)

    @given(st.lists(st.integers(-40, 40).filter(bool), min_size=1, max_size=5), st.integers(-5, 5))
    @settings(max_examples=100, deadline=None)
    def test_bezout_identity(self, ws, k):
        g = 0
        for w in ws:
            g = math.gcd(g, w)
        s = bezout_combination(ws, k * g)
        assert sum(a * b for a, b in zip(s, ws)) == k * g


class TestBinomial:
    def test_examples(self):
        # n=4, b=2: (6 - 4)/16 = 1/8 <= 7/4
        assert Fraction(6 - 4, 16) <= Fraction(7, 4)
        rep = verify_nearby_binom(4)
        assert rep.passed and rep.checked == 1 + 2 + 3 + 4
        assert binary_entropy(0.5) == 1.0
        assert entropy_power(10, 5) == 2 ** 10
        assert entropy_power(4, 1) == Fraction(256, 27)

    def test_individual_example(self):
        c, e = 252, entropy_power(10, 5)
        assert e / math.sqrt(20) <= c <= e / math.sqrt(math.pi * 2.5)
        assert PI_UPPER > math.pi

    def test_tail_example(self):
        s = sum(math.comb(100, i) for i in range(31))
        assert s <= min(entropy_power(100, 30), Fraction(math.comb(100, 30) * 71, 41))

    def test_float_branch_agrees_with_exact(self):
        exact = verify_nearby_binom(260, exact_limit=260)
        mixed = verify_nearby_binom(260, exact_limit=200)
        assert exact.passed and mixed.passed and exact.checked == mixed.checked

    def test_suites_small(self):
        assert verify_entropy().passed
        assert verify_individual_binom(60).passed
        assert verify_binom_tail(80).passed


class TestChebyshev:
    def test_t(self):
        assert chebyshev_t(3) == [0, -3, 0, 4]
        for r in range(8):
            c = chebyshev_t(r)
            for z in (Fraction(1, 3), Fraction(-2, 5)):
                val = sum(a * z ** k for k, a in enumerate(c))
                assert abs(float(val) - math.cos(r * math.acos(float(z)))) < 1e-12

    def test_p(self):
        assert chebyshev_p_coeffs(1).coeffs == (1,)
        assert chebyshev_p_coeffs(3)(0) == 1
        for r in range(1, 16, 2):
            p = chebyshev_p_coeffs(r)
            assert p.degree == 2 * r - 2
            assert all(c == 0 for c in p.coeffs[1::2])
        with pytest.raises(ValueError):
            chebyshev_p_coeffs(4)

    def test_facts_small_grid(self):
        grid = lambda r: [Fraction(j, 10) for j in range(-30 * r, 30 * r + 1)]
        assert verify_p_facts((1, 3, 5, 7), grid).passed


class TestPolys:
    def test_single_variable(self):
        p = MultilinearPoly(3, ((1, 1),))
        v = p.values()
        assert sorted(set(v.tolist())) == [-1, 1]
        # E[p^4] = 1 <= 3^(4/2)
        assert (v.astype(float) ** 4).mean() == 1

    def test_suites(self):
        assert verify_hypercontractivity(trials=40, n_max=8).passed
        assert verify_weak_anticoncentration(trials=40, n_max=8).passed
        with pytest.raises(ValueError):
            verify_hypercontractivity(trials=1, q_set=(3,))


class TestObservables:
    def test_all16(self):
        from lsl.engine import weight_distribution
        res = continuity_report(canonical(SpecialKind.ALL, 16), [2])
        row = res["rows"][0]
        row16 = binom_row(16) + [0, 0]
        expect = max(abs(row16[x] - row16[x + 2]) for x in range(17))
        assert row["max_diff"] == f"{Fraction(expect, 1 << 16).numerator}/{Fraction(expect, 1 << 16).denominator}"
        assert row["max_diff_float"] <= 14 / 16

    def test_zeros(self):
        res = continuity_of_weights(wpoint(10, 0), [2])
        assert res["rows"][0]["max_diff_float"] == 1 and res["rows"][0]["argmax_x"] == 0
        assert res["far_from_central"]

    def test_kolmogorov(self):
        ev = kolmogorov_parity_report(special_weights(SpecialKind.EVENS, 10))
        assert ev["eta"] == "1/1"
        pt = kolmogorov_parity_report(wpoint(10, 0))
        assert pt["objective"] > 0.4
        al = kolmogorov_parity_report(binomial(11))
        assert abs(al["eta_float"] - 0.5) < 0.1

    @pytest.mark.parametrize("seed", range(5))
    def test_kolmogorov_is_minimum(self, seed):
        rng = np.random.default_rng(seed)
        w = rng.integers(0, 9, size=13)
        w[0] += 1
        wd = WDist(12, [Fraction(int(v), int(w.sum())) for v in w])
        res = kolmogorov_parity_report(wd)
        eta = Fraction(res["eta"])
        best = kolmogorov_objective(wd, eta)
        for k in range(401):
            assert kolmogorov_objective(wd, Fraction(k, 400)) >= best
        for d in (Fraction(1, 10 ** 6), -Fraction(1, 10 ** 6)):
            if 0 <= eta + d <= 1:
                assert kolmogorov_objective(wd, eta + d) >= best


class TestClaims:
    def test_exp_lower(self):
        for x in (Fraction(0), Fraction(1, 3), Fraction(5)):
            assert float(exp_lower(x)) <= math.exp(-float(x))
            assert math.exp(-float(x)) - float(exp_lower(x)) < 1e-12

    def test_on_examples(self):
        inst = [("evens8", canonical(SpecialKind.EVENS, 8)), ("flips", evens_with_flips(8, 2))]
        assert verify_parity_claim(inst).passed
        assert verify_moment_matching_claim(inst).passed

    def test_kwise_two_ways(self):
        from lsl.engine import output_distribution
        for f in (canonical(SpecialKind.EVENS, 6), evens_with_flips(6, 2)):
            p = output_distribution(f)
            for k in range(1, 7):
                assert kwise_by_transform(p, k) == kwise_check(f, k).passed


class TestRegistry:
    def test_names(self):
        assert {"nearby-binom", "p-facts", "density-theorem", "after-product"} <= set(SUITES)

    def test_run_suite_params(self):
        rep = run_suite("nearby-binom", n_max=50, trials=None)
        assert rep.passed and rep.checked == 50 * 51 // 2
