import math
from fractions import Fraction

import numpy as np
import pytest

from lsl.classify import (
    best_psi,
    best_psi_naive,
    best_psi_weights,
    classify,
    classify_distribution,
    iota,
    nearest_special,
    ratio_search,
    regime,
    slice_probe,
    tail_probe,
    truncate_tail_support,
    tv_to_psi,
    tv_to_psi_batch,
    tv_to_psi_naive,
    tv_to_psi_weights,
)
from lsl.distributions import (
    Dist,
    PsiSet,
    SpecialKind,
    WDist,
    mixture,
    point,
    special,
    special_weights,
    uniform_symmetric,
    uniform_symmetric_weights,
)
from lsl.engine import output_distribution
from lsl.lemmas.tv import random_dist
from lsl.localfn import ResourceLimit, canonical, evens_with_flips, mixture_evens_odds, random_localfn

from oracles import best_psi_brute, d_psi, pmf_of, tv


def remark_weights(n: int) -> WDist:
    """3/4 evens + 1/4 odds at weight level."""
    e, o = special_weights(SpecialKind.EVENS, n), special_weights(SpecialKind.ODDS, n)
    return WDist(n, [Fraction(3, 4) * a + Fraction(1, 4) * b for a, b in zip(e.pmf, o.pmf)])


class TestRegime:
    def test_iota(self):
        assert iota(PsiSet(10, [1, 7, 9])) == 7
        assert iota(PsiSet(10, [4, 6])) == 4
        assert iota(PsiSet(8, [0, 8])) == 0

    def test_regime(self):
        assert regime(PsiSet(1000, [10])).label == "tail"
        assert regime(PsiSet(1000, [480])).label == "central"
        # exactly on the boundary |0 - 4| = 8^(2/3) = 4: not strictly beyond
        assert regime(PsiSet(8, [0])).label == "central"

    def test_regime_matches_real_comparison(self):
        for n in range(1, 300):
            for i in range(n + 1):
                exact = abs(n - 2 * i) ** 3 > 8 * n * n
                assert (regime(PsiSet(n, [i])).label == "tail") == exact
                if abs(abs(i - n / 2) - n ** (2 / 3)) > 1e-9:
                    assert exact == (abs(i - n / 2) > n ** (2 / 3))


class TestNearest:
    def test_examples(self):
        assert nearest_special(special(SpecialKind.EVENS, 8)) == (SpecialKind.EVENS, 0)
        p = output_distribution(evens_with_flips(10, 3))
        assert nearest_special(p) == (SpecialKind.ALL, Fraction(1, 16))
        kind, v = nearest_special(remark_weights(12))
        assert kind is SpecialKind.EVENS and v == Fraction(1, 4)


class TestTvToPsi:
    def test_examples(self):
        psi = PsiSet(5, [1, 4])
        assert tv_to_psi(uniform_symmetric(psi), psi) == 0
        assert tv_to_psi(special(SpecialKind.ALL, 4), PsiSet(4, range(5))) == 0

    @pytest.mark.parametrize("seed", range(25))
    def test_fast_equals_naive(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 9))
        p = random_dist(rng, n)
        psis = [PsiSet.from_mask(n, int(rng.integers(1, 1 << (n + 1)))) for _ in range(5)]
        fast = tv_to_psi_batch(p, psis)
        for psi, v in zip(psis, fast):
            assert v == tv_to_psi_naive(p, psi) == tv(pmf_of(p), d_psi(n, psi.members))

    def test_weight_level_equals_string_level_when_symmetric(self):
        p = uniform_symmetric(PsiSet(6, [0, 3, 5]))
        w = uniform_symmetric_weights(PsiSet(6, [0, 3, 5]))
        for mask in range(1, 128):
            psi = PsiSet.from_mask(6, mask)
            assert tv_to_psi(p, psi) == tv_to_psi_weights(w, psi)


class TestBestPsi:
    def test_examples(self):
        psi, v = best_psi(output_distribution(canonical(SpecialKind.EVENS, 6)))
        assert v == 0 and psi.members == (0, 2, 4, 6)
        psi, v = best_psi(point(5, 31))
        assert v == 0 and psi.members == (5,)

    @pytest.mark.parametrize("seed", range(12))
    def test_against_oracle(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(1, 6))
        p = random_dist(rng, n)
        psi, v = best_psi(p)
        ref_psi, ref_v = best_psi_brute(pmf_of(p), n)
        assert v == ref_v
        assert tv(pmf_of(p), d_psi(n, psi.members)) == v
        assert (psi, v) == best_psi_naive(p)

    def test_resource_limit(self):
        with pytest.raises(ResourceLimit):
            best_psi(point(21, 0))

    def test_weights_small(self):
        w = remark_weights(6)
        psi, v = best_psi_weights(w)
        brute = min(tv_to_psi_weights(w, PsiSet.from_mask(6, m)) for m in range(1, 128))
        assert v == brute


class TestTruncation:
    def test_examples(self):
        t = truncate_tail_support(PsiSet(300, range(41)))
        assert t.limit == 41 and t.truncated.members == tuple(range(41)) and t.tv == 0
        t = truncate_tail_support(PsiSet(300, range(106)))
        assert len(t.truncated) == 41 and t.tv <= Fraction(1, 2)
        # the kept members are the ones nearest n/2
        assert t.truncated.members == tuple(range(65, 106))
        assert truncate_tail_support(PsiSet(300, [0])).truncated.members == (0,)

    def test_rejects_central(self):
        with pytest.raises(ValueError):
            truncate_tail_support(PsiSet(300, [150]))


class TestClassify:
    def test_canonical_evens(self):
        rep = classify(canonical(SpecialKind.EVENS, 10))
        assert rep.nearest is SpecialKind.EVENS
        assert rep.eps_special == rep.eps_best == 0 and rep.ratio == 1

    def test_flips(self):
        rep = classify(evens_with_flips(10, 4), weight_level=False)
        assert rep.nearest is SpecialKind.ALL and rep.eps_special == Fraction(1, 32)
        # the flipped ring depends only on the parity of y, so it is symmetric
        assert rep.level == "weight"

    def test_remark_weight_level(self):
        n = 180
        psi = PsiSet(n, [w for w in range(n + 1) if w % 6 in (0, 1, 2, 4)])
        rep = classify(mixture_evens_odds(n), psi=psi, weight_level=True)
        assert rep.eps_special == Fraction(1, 4)
        assert abs(float(rep.eps_best) - 1 / 6) <= 0.01
        assert rep.ratio >= Fraction(145, 100)
        assert rep.to_json()["nearest"] == "evens"

    def test_symmetry_detection(self):
        rep = classify_distribution(special(SpecialKind.ODDS, 5))
        assert rep.level == "weight"
        rep = classify_distribution(point(5, 3))
        # best fit is the weight-2 slice: 1 - 1/C(5,2)
        assert rep.level == "string" and rep.eps_best == Fraction(9, 10)

    def test_string_and_weight_agree_on_symmetric(self):
        p = mixture([Fraction(1, 3), Fraction(2, 3)], [special(SpecialKind.EVENS, 5), special(SpecialKind.ZEROS, 5)])
        a = classify_distribution(p, symmetric=False)
        b = classify_distribution(p)
        assert a.eps_best == b.eps_best and a.special_tv == b.special_tv

    def test_ratio_edge_cases(self):
        rep = classify_distribution(uniform_symmetric(PsiSet(5, [2])))
        assert rep.eps_best == 0 and rep.ratio == math.inf
        assert rep.to_json()["ratio"] == "inf"


class TestProbes:
    def test_ratio_search(self):
        res = ratio_search(6, 2, 30, seed=1)
        assert len(res["rows"]) == 30
        assert res["max_finite_ratio"] is None or res["max_finite_ratio"] >= 1
        assert res == ratio_search(6, 2, 30, seed=1)

    def test_slice_probe(self):
        f = random_localfn(8, 12, 2, np.random.default_rng(0))
        res = slice_probe(f, 4)
        assert 0 <= res["tv_float"] <= 1

    def test_tail_probe(self):
        # 66 weight-2 strings carry 1/2048 each under evens(12): tv = 1 - 66/2048
        res = tail_probe(canonical(SpecialKind.EVENS, 12), PsiSet(12, [2]))
        assert res["above_one_third"] and res["tv"] == "991/1024"
