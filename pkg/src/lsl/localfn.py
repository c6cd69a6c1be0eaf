"""d-local Boolean functions: representation, parsing, restriction and analysis.

A gate's truth table is a ``'0'/'1'`` string; character ``b`` is the output
when ``b = sum_j x[inputs[j]] * 2**j`` (LSB-first on ``inputs[0]``).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .distributions import SpecialKind, bits_to_int, int_to_bits

RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence.spawn"


class ResourceLimit(RuntimeError):
    """An exact computation would exceed its configured budget."""


class LocalFnFormatError(ValueError):
    """A LocalFn description is malformed."""


@dataclass(frozen=True)
class OutputGate:
    inputs: tuple[int, ...]
    table: str

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(int(i) for i in self.inputs))
        if len(set(self.inputs)) != len(self.inputs):
            raise LocalFnFormatError(f"duplicate input index in {list(self.inputs)}")
        if len(self.table) != 1 << len(self.inputs):
            raise LocalFnFormatError(
                f"table length {len(self.table)} != 2^{len(self.inputs)}")
        if set(self.table) - {"0", "1"}:
            raise LocalFnFormatError(f"table {self.table!r} has non-bit characters")

    @property
    def arity(self) -> int:
        return len(self.inputs)

    def value(self, x: int) -> int:
        b = 0
        for j, i in enumerate(self.inputs):
            b |= ((x >> i) & 1) << j
        return 1 if self.table[b] == "1" else 0

    def local_value(self, b: int) -> int:
        return 1 if self.table[b] == "1" else 0


@dataclass(frozen=True)
class LocalFn:
    """``f: {0,1}^m -> {0,1}^n``; output ``i`` is ``gates[i]``."""

    m: int
    gates: tuple[OutputGate, ...]
    declared_d: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.m < 0:
            raise LocalFnFormatError("m must be nonnegative")
        d = self.declared_d if self.declared_d is not None else self.locality
        object.__setattr__(self, "declared_d", d)
        for k, g in enumerate(self.gates):
            if g.arity > d:
                raise LocalFnFormatError(f"output {k} has arity {g.arity} > d={d}")
            for i in g.inputs:
                if not 0 <= i < self.m:
                    raise LocalFnFormatError(f"output {k} reads input {i}, but m={self.m}")

    @property
    def n(self) -> int:
        return len(self.gates)

    @property
    def locality(self) -> int:
        """Effective locality: the largest gate arity."""
        return max((g.arity for g in self.gates), default=0)

    def feeding(self, outputs: Iterable[int]) -> list[int]:
        """Sorted inputs read by the given outputs."""
        return sorted({i for k in outputs for i in self.gates[k].inputs})

    # -- file format ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "d": self.declared_d,
            "outputs": [{"inputs": list(g.inputs), "table": g.table} for g in self.gates],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "LocalFn":
        try:
            m = int(obj["m"])
            outs = obj["outputs"]
            d = obj.get("d")
        except (KeyError, TypeError) as exc:
            raise LocalFnFormatError(f"missing field: {exc}") from None
        gates = []
        for k, o in enumerate(outs):
            try:
                gates.append(OutputGate(tuple(o["inputs"]), str(o["table"])))
            except LocalFnFormatError as exc:
                raise LocalFnFormatError(f"outputs[{k}]: {exc}") from None
            except (KeyError, TypeError) as exc:
                raise LocalFnFormatError(f"outputs[{k}]: missing field {exc}") from None
        if "n" in obj and int(obj["n"]) != len(gates):
            raise LocalFnFormatError(f"n={obj['n']} but {len(gates)} outputs listed")
        return cls(m, tuple(gates), None if d is None else int(d))

    @classmethod
    def loads(cls, text: str) -> "LocalFn":
        return cls.from_json(json.loads(text))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# ---------------------------------------------------------------------------
# gate helpers


def xor_gate(inputs: Sequence[int], negate: bool = False) -> OutputGate:
    k = len(inputs)
    table = "".join(str((bin(b).count("1") + negate) & 1) for b in range(1 << k))
    return OutputGate(tuple(inputs), table)


def const_gate(bit: int) -> OutputGate:
    return OutputGate((), "1" if bit else "0")


def gate_from_function(inputs: Sequence[int], fn) -> OutputGate:
    """Tabulate ``fn(bits)`` where ``bits[j]`` is the value of ``inputs[j]``."""
    k = len(inputs)
    table = "".join(
        str(int(fn([(b >> j) & 1 for j in range(k)])) & 1) for b in range(1 << k))
    return OutputGate(tuple(inputs), table)


def identity(n: int) -> LocalFn:
    return LocalFn(n, tuple(OutputGate((i,), "01") for i in range(n)), 1)


def constant(n: int, bit: int = 0) -> LocalFn:
    return LocalFn(0, tuple(const_gate(bit) for _ in range(n)), 0)


# ---------------------------------------------------------------------------
# evaluation and sampling


def evaluate(f: LocalFn, x) -> int:
    """Evaluate on an input given as an int (bit i = input i) or a bit string."""
    if isinstance(x, str):
        if len(x) != f.m:
            raise ValueError(f"input has {len(x)} bits, expected m={f.m}")
        x = bits_to_int(x)
    elif not 0 <= x < (1 << f.m) and not (f.m == 0 and x == 0):
        raise ValueError(f"input {x} out of range for m={f.m}")
    y = 0
    for k, g in enumerate(f.gates):
        if g.value(x):
            y |= 1 << k
    return y


def evaluate_bits(f: LocalFn, x: str) -> str:
    return int_to_bits(evaluate(f, x), f.n)


def evaluate_batch(f: LocalFn, xs: np.ndarray) -> np.ndarray:
    """Vectorized evaluation; ``xs`` holds input integers (m <= 62)."""
    xs = np.asarray(xs, dtype=np.int64)
    out = np.zeros(xs.shape, dtype=np.int64)
    for k, g in enumerate(f.gates):
        idx = np.zeros(xs.shape, dtype=np.int64)
        for j, i in enumerate(g.inputs):
            idx |= ((xs >> i) & 1) << j
        table = np.frombuffer(g.table.encode(), dtype=np.uint8) - ord("0")
        out |= table[idx].astype(np.int64) << k
    return out


def sample(f: LocalFn, seed: int, count: int, shards: int = 1) -> list[int]:
    """Draw ``count`` outputs of ``f`` on uniform inputs.

    The seed stream is split into ``shards`` children; the concatenated
    result does not depend on how shards are later scheduled.
    """
    if f.m > 62:
        raise ResourceLimit("sampling supports m <= 62")
    children = np.random.SeedSequence(seed).spawn(max(1, shards))
    sizes = [count // len(children) + (s < count % len(children)) for s in range(len(children))]
    out: list[int] = []
    for child, size in zip(children, sizes):
        rng = np.random.Generator(np.random.PCG64(child))
        bits = rng.integers(0, 2, size=(size, f.m), dtype=np.int64)
        xs = (bits << np.arange(f.m, dtype=np.int64)).sum(axis=1) if f.m else np.zeros(size, np.int64)
        out.extend(int(v) for v in evaluate_batch(f, xs))
    return out


# ---------------------------------------------------------------------------
# restriction


@dataclass(frozen=True)
class Subcube:
    fixed: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        fixed = {int(k): int(v) for k, v in dict(self.fixed).items()}
        if any(v not in (0, 1) for v in fixed.values()):
            raise ValueError("subcube values must be bits")
        object.__setattr__(self, "fixed", fixed)


def restrict(f: LocalFn, c: Subcube | Mapping[int, int]) -> LocalFn:
    """Substitute fixed inputs; surviving inputs are renumbered in order."""
    fixed = c.fixed if isinstance(c, Subcube) else Subcube(c).fixed
    for i in fixed:
        if not 0 <= i < f.m:
            raise ValueError(f"subcube fixes input {i}, but m={f.m}")
    survivors = [i for i in range(f.m) if i not in fixed]
    new_index = {old: new for new, old in enumerate(survivors)}
    gates = []
    for g in f.gates:
        keep = [j for j, i in enumerate(g.inputs) if i not in fixed]
        base = 0
        for j, i in enumerate(g.inputs):
            if i in fixed and fixed[i]:
                base |= 1 << j
        table = []
        for b in range(1 << len(keep)):
            idx = base
            for jj, j in enumerate(keep):
                if (b >> jj) & 1:
                    idx |= 1 << j
            table.append(g.table[idx])
        gates.append(OutputGate(tuple(new_index[g.inputs[j]] for j in keep), "".join(table)))
    return LocalFn(len(survivors), tuple(gates), f.declared_d)


def subfunction(f: LocalFn, outputs: Sequence[int]) -> LocalFn:
    """Keep only the listed outputs (in the given order); inputs untouched."""
    return LocalFn(f.m, tuple(f.gates[k] for k in outputs), f.declared_d)


def compact(f: LocalFn) -> LocalFn:
    """Drop inputs no gate reads and renumber the rest in order."""
    used = f.feeding(range(f.n))
    remap = {old: new for new, old in enumerate(used)}
    gates = tuple(OutputGate(tuple(remap[i] for i in g.inputs), g.table) for g in f.gates)
    return LocalFn(len(used), gates, f.declared_d)


# ---------------------------------------------------------------------------
# GF(2) analysis


class Gf2Poly:
    """Multilinear polynomial over GF(2); monomials are input-index bitmasks."""

    __slots__ = ("monomials",)

    def __init__(self, monomials: Iterable[int] = ()):
        self.monomials = frozenset(monomials)

    @property
    def degree(self) -> int:
        if not self.monomials:
            return -1
        return max(bin(mono).count("1") for mono in self.monomials)

    def is_zero(self) -> bool:
        return not self.monomials

    def is_constant(self) -> bool:
        return self.monomials <= {0}

    def __xor__(self, other: "Gf2Poly") -> "Gf2Poly":
        return Gf2Poly(self.monomials ^ other.monomials)

    def __eq__(self, other) -> bool:
        return isinstance(other, Gf2Poly) and self.monomials == other.monomials

    def __hash__(self):
        return hash(self.monomials)

    def __call__(self, x: int) -> int:
        return sum((x & mono) == mono for mono in self.monomials) & 1

    def __repr__(self) -> str:
        if not self.monomials:
            return "0"
        terms = []
        for mono in sorted(self.monomials, key=lambda t: (bin(t).count("1"), t)):
            if mono == 0:
                terms.append("1")
            else:
                terms.append("*".join(f"x{i}" for i in range(mono.bit_length()) if (mono >> i) & 1))
        return " + ".join(terms)


def mobius(table: Sequence[int]) -> list[int]:
    """ANF coefficients of a truth table of length 2^k (in-place butterfly)."""
    a = list(table)
    k = len(a).bit_length() - 1
    for j in range(k):
        step = 1 << j
        for b in range(len(a)):
            if b & step:
                a[b] ^= a[b ^ step]
    return a


def gate_anf(g: OutputGate) -> Gf2Poly:
    coeffs = mobius([1 if ch == "1" else 0 for ch in g.table])
    monos = []
    for b, c in enumerate(coeffs):
        if c:
            mono = 0
            for j, i in enumerate(g.inputs):
                if (b >> j) & 1:
                    mono |= 1 << i
            monos.append(mono)
    return Gf2Poly(monos)


def anf_parity(f: LocalFn) -> Gf2Poly:
    """ANF of the output parity, XOR-accumulated gate by gate."""
    acc = Gf2Poly()
    for g in f.gates:
        acc = acc ^ gate_anf(g)
    return acc


def anf_parity_bruteforce(f: LocalFn, max_m: int = 26) -> Gf2Poly:
    """Full 2^m Mobius transform of the parity truth table."""
    if f.m > max_m:
        raise ResourceLimit(f"brute-force ANF needs m <= {max_m}")
    xs = np.arange(1 << f.m, dtype=np.int64)
    ys = evaluate_batch(f, xs)
    par = np.zeros(len(xs), dtype=np.uint8)
    for k in range(f.n):
        par ^= ((ys >> k) & 1).astype(np.uint8)
    for j in range(f.m):
        step = 1 << j
        view = par.reshape(-1, 2, step)
        view[:, 1, :] ^= view[:, 0, :]
    return Gf2Poly(int(b) for b in np.nonzero(par)[0])


def monomial_bias(f: LocalFn, s: Sequence[int], max_inputs: int = 24) -> Fraction:
    """E[prod_{i in s} (-1)^{f_i}] over uniform inputs, exact."""
    s = list(s)
    if not s:
        raise ValueError("monomial_bias needs a nonempty output set")
    inputs = f.feeding(s)
    if len(inputs) > max_inputs:
        raise ResourceLimit(f"bias of {s} depends on {len(inputs)} > {max_inputs} inputs")
    sub = compact(subfunction(f, s))
    ys = evaluate_batch(sub, np.arange(1 << sub.m, dtype=np.int64))
    par = np.zeros(len(ys), dtype=np.int64)
    for k in range(len(s)):
        par ^= (ys >> k) & 1
    odd = int(par.sum())
    total = 1 << len(inputs)
    return Fraction(total - 2 * odd, total)


@dataclass
class KwiseReport:
    k: int
    passed: bool
    checked: int
    witness: list[int] | None = None
    bias: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "passed": self.passed,
            "checked": self.checked,
            "witness": self.witness,
            "bias": None if self.bias is None else f"{self.bias.numerator}/{self.bias.denominator}",
        }


def kwise_check(f: LocalFn, k: int) -> KwiseReport:
    """All nonconstant characters of degree <= k have zero bias."""
    checked = 0
    for size in range(1, min(k, f.n) + 1):
        for s in itertools.combinations(range(f.n), size):
            checked += 1
            b = monomial_bias(f, s)
            if b != 0:
                return KwiseReport(k, False, checked, list(s), b)
    return KwiseReport(k, True, checked)


# ---------------------------------------------------------------------------
# explicit samplers


def canonical(kind: SpecialKind, n: int) -> LocalFn:
    """Minimal-locality sampler for one of the six special distributions."""
    kind = SpecialKind(kind)
    if n < 1:
        raise ValueError("n must be >= 1")
    if kind is SpecialKind.ZEROS:
        return constant(n, 0)
    if kind is SpecialKind.ONES:
        return constant(n, 1)
    if kind is SpecialKind.ZERONES:
        return LocalFn(1, tuple(OutputGate((0,), "01") for _ in range(n)), 1)
    if kind is SpecialKind.ALL:
        return identity(n)
    negate_first = kind is SpecialKind.ODDS
    if n == 1:
        # the only even weight is 0, the only odd weight is 1
        return LocalFn(0, (const_gate(int(negate_first)),), 2)
    gates = [xor_gate((i, (i + 1) % n), negate=(negate_first and i == 0)) for i in range(n)]
    return LocalFn(n, tuple(gates), 2)


def evens_with_flips(n: int, c: int) -> LocalFn:
    """Cyclic-XOR evens sampler whose first ``c`` outputs are flipped w.p. 1/4.

    Inputs ``0..n-1`` drive the XOR ring; inputs ``n+2j`` and ``n+2j+1`` are
    the AND pair that flips output ``j``.
    """
    if not 1 <= c <= n:
        raise ValueError(f"need 1 <= c <= n, got c={c}, n={n}")
    if n < 2:
        raise ValueError("evens_with_flips needs n >= 2")
    gates = []
    for i in range(n):
        ring = (i, (i + 1) % n)
        if i < c:
            a, b = n + 2 * i, n + 2 * i + 1
            gates.append(gate_from_function(ring + (a, b), lambda v: v[0] ^ v[1] ^ (v[2] & v[3])))
        else:
            gates.append(xor_gate(ring))
    return LocalFn(n + 2 * c, tuple(gates), 4)


def mixture_evens_odds(n: int) -> LocalFn:
    """3-local sampler of 3/4 evens + 1/4 odds; input ``n`` is the extra coin."""
    if n < 2:
        raise ValueError("mixture_evens_odds needs n >= 2")
    gates = [xor_gate((i, i + 1)) for i in range(n - 1)]
    gates.append(gate_from_function((n - 1, 0, n), lambda v: v[0] ^ (v[1] | v[2])))
    return LocalFn(n + 1, tuple(gates), 3)


def random_localfn(n: int, m: int, d: int, rng: np.random.Generator,
                   min_arity: int = 1) -> LocalFn:
    """Each gate reads a random arity in [min_arity, d] of distinct inputs and a random table."""
    gates = []
    for _ in range(n):
        k = int(rng.integers(min(min_arity, d, m), min(d, m) + 1))
        inputs = tuple(int(i) for i in rng.choice(m, size=k, replace=False)) if k else ()
        table = "".join(str(int(b)) for b in rng.integers(0, 2, size=1 << k))
        gates.append(OutputGate(inputs, table))
    return LocalFn(m, tuple(gates), d)
