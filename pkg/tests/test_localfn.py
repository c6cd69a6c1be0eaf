import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsl.distributions import SpecialKind, bits_to_int, mixture, special, tv_distance
from lsl.engine import output_distribution
from lsl.localfn import (
    LocalFn,
    LocalFnFormatError,
    OutputGate,
    ResourceLimit,
    Subcube,
    anf_parity,
    anf_parity_bruteforce,
    canonical,
    constant,
    evaluate,
    evaluate_batch,
    evaluate_bits,
    evens_with_flips,
    identity,
    kwise_check,
    mixture_evens_odds,
    monomial_bias,
    random_localfn,
    restrict,
    sample,
)

from oracles import eval_gates, output_pmf, pmf_of, tv


def rand_fn(seed, n=6, m=8, d=3):
    return random_localfn(n, m, d, np.random.default_rng(seed))


class TestFormat:
    def test_roundtrip(self):
        f = rand_fn(0)
        assert LocalFn.loads(f.dumps()) == f
        assert LocalFn.from_json(json.loads(json.dumps(f.to_json()))) == f

    @pytest.mark.parametrize("obj, fragment", [
        ({"outputs": []}, "missing field"),
        ({"m": 2, "outputs": [{"inputs": [0], "table": "011"}]}, "outputs[0]"),
        ({"m": 2, "outputs": [{"inputs": [0, 0], "table": "0110"}]}, "duplicate"),
        ({"m": 2, "outputs": [{"inputs": [0], "table": "0x"}]}, "non-bit"),
        ({"m": 2, "outputs": [{"inputs": [3], "table": "01"}]}, "reads input 3"),
        ({"m": 2, "outputs": [{"table": "01"}]}, "outputs[0]"),
        ({"m": 2, "n": 2, "outputs": [{"inputs": [1], "table": "01"}]}, "n=2"),
        ({"m": 3, "d": 1, "outputs": [{"inputs": [0, 1], "table": "0110"}]}, "arity 2 > d=1"),
    ])
    def test_malformed(self, obj, fragment):
        with pytest.raises(LocalFnFormatError) as exc:
            LocalFn.from_json(obj)
        assert fragment in str(exc.value)

    def test_locality(self):
        f = LocalFn(4, (OutputGate((0, 1, 2), "01101001"), OutputGate((3,), "10")), 4)
        assert f.locality == 3 and f.declared_d == 4
        assert LocalFn(4, f.gates).declared_d == 3


class TestEvaluate:
    def test_examples(self):
        assert evaluate_bits(identity(3), "101") == "101"
        assert evaluate_bits(canonical(SpecialKind.EVENS, 3), "110") == "011"
        f = constant(4)
        assert evaluate_bits(f, "") == "0000"

    def test_bad_input(self):
        with pytest.raises(ValueError):
            evaluate(identity(3), "10")
        with pytest.raises(ValueError):
            evaluate(identity(3), 8)

    @given(st.integers(0, 10_000), st.integers(0, 255))
    @settings(max_examples=50, deadline=None)
    def test_against_oracle(self, seed, x):
        f = rand_fn(seed)
        assert evaluate(f, x) == eval_gates(f, x)

    def test_batch(self):
        f = rand_fn(7, n=9, m=12, d=4)
        xs = np.arange(1 << 12)
        assert evaluate_batch(f, xs).tolist() == [eval_gates(f, int(x)) for x in xs]


class TestSample:
    def test_degenerate(self):
        assert set(sample(canonical(SpecialKind.ZEROS, 5), 3, 50)) == {0}
        assert set(sample(canonical(SpecialKind.ONES, 5), 3, 50)) == {31}

    def test_reproducible(self):
        f = rand_fn(1)
        assert sample(f, 9, 200, shards=3) == sample(f, 9, 200, shards=3)
        assert sample(f, 9, 200) != sample(f, 10, 200)

    def test_empirical_tv(self):
        f = canonical(SpecialKind.EVENS, 8)
        xs = sample(f, 0, 100_000, shards=4)
        counts = np.bincount(xs, minlength=256)
        emp = {x: Fraction(int(c), len(xs)) for x, c in enumerate(counts) if c}
        assert float(tv(emp, pmf_of(special(SpecialKind.EVENS, 8)))) < 0.02

    def test_limit(self):
        with pytest.raises(ResourceLimit):
            sample(LocalFn(63, (OutputGate((62,), "01"),)), 0, 1)


class TestRestrict:
    def test_examples(self):
        r = restrict(identity(3), Subcube({0: 1}))
        assert r.m == 2 and evaluate_bits(r, "00") == "100"
        f = rand_fn(2)
        full = restrict(f, {i: (37 >> i) & 1 for i in range(f.m)})
        assert output_distribution(full) == output_distribution(
            LocalFn(0, tuple(OutputGate((), str((evaluate(f, 37) >> k) & 1)) for k in range(f.n))))

    @pytest.mark.parametrize("seed", range(8))
    def test_half_mixture(self, seed):
        f = rand_fn(seed)
        i = seed % f.m
        parts = [output_distribution(restrict(f, {i: b})) for b in (0, 1)]
        assert mixture([Fraction(1, 2)] * 2, parts) == output_distribution(f)

    def test_bad_subcube(self):
        with pytest.raises(ValueError):
            restrict(identity(2), {5: 1})
        with pytest.raises(ValueError):
            Subcube({0: 2})


class TestAnf:
    def test_examples(self):
        assert anf_parity(canonical(SpecialKind.EVENS, 7)).is_zero()
        p = anf_parity(mixture_evens_odds(6))
        # parity = r XOR r*x0 with x0 input 0 and r input 6
        assert p.monomials == {1 << 6, (1 << 6) | 1}
        assert anf_parity(identity(5)).monomials == {1 << i for i in range(5)}

    @pytest.mark.parametrize("seed", range(20))
    def test_against_bruteforce(self, seed):
        f = rand_fn(seed, n=7, m=10, d=4)
        poly = anf_parity(f)
        assert poly == anf_parity_bruteforce(f)
        assert poly.degree <= f.locality


class TestBias:
    def test_examples(self):
        f = canonical(SpecialKind.EVENS, 6)
        for s in ([0], [1, 3], [0, 1, 2, 3, 4]):
            assert monomial_bias(f, s) == 0
        assert monomial_bias(f, range(6)) == 1
        assert monomial_bias(constant(3), [1]) == 1
        assert kwise_check(f, 5).passed
        bad = kwise_check(f, 6)
        assert not bad.passed and bad.witness == list(range(6))

    @pytest.mark.parametrize("seed", range(10))
    def test_against_oracle(self, seed):
        f = rand_fn(seed, n=5, m=7)
        pmf = output_pmf(f)
        for s in ([0], [1, 2], [0, 2, 4]):
            mask = sum(1 << i for i in s)
            expect = sum((v if bin(y & mask).count("1") % 2 == 0 else -v for y, v in pmf.items()), Fraction(0))
            assert monomial_bias(f, s) == expect


class TestSamplers:
    @pytest.mark.parametrize("n", range(1, 9))
    @pytest.mark.parametrize("kind", list(SpecialKind))
    def test_canonical(self, kind, n):
        f = canonical(kind, n)
        assert tv(output_pmf(f), pmf_of(special(kind, n))) == 0

    def test_canonical_shapes(self):
        f = canonical(SpecialKind.ZERONES, 3)
        assert all(g.inputs == (0,) for g in f.gates)
        f = canonical(SpecialKind.EVENS, 4)
        assert [g.inputs for g in f.gates] == [(0, 1), (1, 2), (2, 3), (3, 0)]
        f = canonical(SpecialKind.ODDS, 1)
        assert evaluate(f, 0) == 1

    def test_flips(self):
        p = output_pmf(evens_with_flips(6, 1))
        assert tv(p, pmf_of(special(SpecialKind.ALL, 6))) == Fraction(1, 4)
        assert tv(p, pmf_of(special(SpecialKind.EVENS, 6))) == Fraction(1, 4)
        p = output_distribution(evens_with_flips(10, 3))
        assert tv_distance(p, special(SpecialKind.ALL, 10)) == Fraction(1, 16)
        with pytest.raises(ValueError):
            evens_with_flips(4, 5)

    def test_mixture(self):
        p = output_pmf(mixture_evens_odds(6))
        target = mixture([Fraction(3, 4), Fraction(1, 4)],
                         [special(SpecialKind.EVENS, 6), special(SpecialKind.ODDS, 6)])
        assert tv(p, pmf_of(target)) == 0
        assert tv(p, pmf_of(special(SpecialKind.EVENS, 6))) == Fraction(1, 4)
        assert tv(p, pmf_of(special(SpecialKind.ALL, 6))) == Fraction(1, 4)

    def test_random_shape(self):
        f = random_localfn(12, 20, 3, np.random.default_rng(0))
        assert f.n == 12 and f.m == 20 and f.locality <= 3
        assert random_localfn(12, 20, 3, np.random.default_rng(0)) == f
