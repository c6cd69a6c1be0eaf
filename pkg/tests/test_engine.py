from fractions import Fraction

import numpy as np
import pytest

from lsl.distributions import SpecialKind, binomial, weight_marginal
from lsl.engine import dp_counts, input_components, min_fill_order, output_distribution, weight_distribution
from lsl.localfn import LocalFn, OutputGate, ResourceLimit, canonical, evens_with_flips, random_localfn

from oracles import output_pmf, pmf_of


class TestExamples:
    def test_evens3(self):
        p = output_distribution(canonical(SpecialKind.EVENS, 3))
        assert pmf_of(p) == {x: Fraction(1, 4) for x in (0b000, 0b110, 0b101, 0b011)}

    def test_zerones4(self):
        p = output_distribution(canonical(SpecialKind.ZERONES, 4))
        assert pmf_of(p) == {0: Fraction(1, 2), 15: Fraction(1, 2)}

    def test_binomial(self):
        assert weight_distribution(canonical(SpecialKind.ALL, 5)) == binomial(5)

    def test_unread_inputs(self):
        f = LocalFn(5, (OutputGate((3,), "01"), OutputGate((), "1")))
        for engine in ("naive", "dp"):
            assert pmf_of(output_distribution(f, engine)) == {2: Fraction(1, 2), 3: Fraction(1, 2)}

    def test_unknown_engine(self):
        with pytest.raises(ValueError):
            output_distribution(canonical(SpecialKind.ALL, 2), "fast")


@pytest.mark.parametrize("seed", range(40))
def test_engines_agree_with_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    m = int(rng.integers(1, 13))
    d = int(rng.integers(1, 5))
    f = random_localfn(n, m, d, rng)
    oracle = output_pmf(f)
    naive = output_distribution(f, "naive")
    dp = output_distribution(f, "dp")
    assert pmf_of(naive) == oracle
    assert dp == naive
    assert weight_distribution(f, "dp") == weight_marginal(naive)
    assert weight_distribution(f, "naive") == weight_marginal(naive)


def test_components():
    f = LocalFn(6, (OutputGate((0, 1), "0110"), OutputGate((1, 2), "0110"),
                    OutputGate((4,), "01"), OutputGate((), "0")))
    comps = input_components(f)
    assert sorted(tuple(c[0]) for c in comps if c[0]) == [(0, 1, 2), (4,)]
    assert any(not c[0] and c[1] == [3] for c in comps)


def test_min_fill_order_is_permutation():
    order = min_fill_order([0, 1, 2, 3], [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert sorted(order) == [0, 1, 2, 3]


def test_dp_scales_on_sparse_structure():
    # six independent flips, each w.p. 1/4: Pr[odd] = (1 - (1/2)^6) / 2
    w = weight_distribution(evens_with_flips(60, 6))
    assert sum(w.pmf) == 1
    assert sum(w[k] for k in range(1, 61, 2)) == (1 - Fraction(1, 64)) / 2
    wd = weight_distribution(canonical(SpecialKind.EVENS, 200))
    assert all(wd[k] == 0 for k in range(1, 201, 2))


def test_resource_limit():
    ring = LocalFn(30, tuple(OutputGate((i, (i + 7) % 30), "0110") for i in range(30)))
    with pytest.raises(ResourceLimit):
        dp_counts(ring, max_frontier=2)
    with pytest.raises(ResourceLimit):
        dp_counts(ring, max_states=10)
