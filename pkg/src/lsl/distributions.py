"""Exact and floating-point distributions over n-bit strings and Hamming weights.

Strings are encoded as integers: output bit ``i`` is bit ``i`` of the index.
Exact masses are :class:`fractions.Fraction`; float masses are ``float``.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
import warnings
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

Prob = Union[Fraction, float]

FLOAT_SLACK = 1e-12
EXACT = "exact"
FLOAT = "float"


class DimensionError(ValueError):
    """Two distributions do not share a sample space."""


class PromotionWarning(UserWarning):
    """An exact operand was converted to float to meet a float operand."""


def fmt_prob(x: Prob) -> str:
    """Render a probability; exact values always as ``num/den``."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def parse_prob(s) -> Prob:
    if isinstance(s, str):
        if "/" in s or s.lstrip("-").isdigit():
            return Fraction(s)
        return float(s)
    if isinstance(s, int):
        return Fraction(s)
    return float(s)


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits_to_int(s: str) -> int:
    """``"011"`` -> integer with bit i = character i."""
    out = 0
    for i, ch in enumerate(s):
        if ch == "1":
            out |= 1 << i
        elif ch != "0":
            raise ValueError(f"bad bit character {ch!r} at position {i}")
    return out


def int_to_bits(x: int, n: int) -> str:
    return "".join("1" if (x >> i) & 1 else "0" for i in range(n))


def _check_mode(mode: str) -> str:
    if mode not in (EXACT, FLOAT):
        raise ValueError(f"unknown mode {mode!r}")
    return mode


def _coerce(values: Iterable[Prob], mode: str):
    if mode == EXACT:
        out = []
        for v in values:
            if isinstance(v, float):
                raise TypeError("float mass in an exact distribution")
            out.append(Fraction(v))
        return out
    return [float(v) for v in values]


def _check_total(total: Prob, mode: str, what: str) -> None:
    if mode == EXACT:
        if total != 1:
            raise ValueError(f"{what} masses sum to {total}, not 1")
    elif abs(total - 1.0) > FLOAT_SLACK:
        raise ValueError(f"{what} masses sum to {total!r}, not 1")


class Dist:
    """A distribution over ``{0,1}^n`` stored as a sparse map of nonzero masses.

    Instances are immutable.  ``promoted`` is set when an operation mixed an
    exact and a float operand and the result had to fall back to floats.
    """

    __slots__ = ("_n", "_pmf", "_mode", "_promoted")

    def __init__(self, n: int, pmf: Mapping[int, Prob], mode: str = EXACT,
                 promoted: bool = False, check: bool = True):
        if n < 0:
            raise ValueError("n must be nonnegative")
        _check_mode(mode)
        keys = list(pmf.keys())
        vals = _coerce(pmf.values(), mode) if check else list(pmf.values())
        clean = {}
        for k, v in zip(keys, vals):
            if check:
                if not 0 <= k < (1 << n):
                    raise ValueError(f"support key {k} out of range for n={n}")
                if v < 0:
                    raise ValueError(f"negative mass {v} at {k}")
            if v != 0:
                clean[k] = v
        if check:
            _check_total(sum(clean.values(), Fraction(0) if mode == EXACT else 0.0), mode, "Dist")
        self._n = n
        self._pmf = MappingProxyType(clean)
        self._mode = mode
        self._promoted = promoted

    n = property(lambda self: self._n)
    pmf = property(lambda self: self._pmf)
    mode = property(lambda self: self._mode)
    promoted = property(lambda self: self._promoted)

    def __call__(self, x: int) -> Prob:
        return self._pmf.get(x, self._zero())

    def _zero(self) -> Prob:
        return Fraction(0) if self._mode == EXACT else 0.0

    def support(self) -> list[int]:
        return sorted(self._pmf)

    def to_float(self) -> "Dist":
        if self._mode == FLOAT:
            return self
        return Dist(self._n, {k: float(v) for k, v in self._pmf.items()}, FLOAT,
                    promoted=self._promoted, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dist):
            return NotImplemented
        return (self._n, self._mode, dict(self._pmf)) == (other._n, other._mode, dict(other._pmf))

    def __hash__(self):
        return hash((self._n, self._mode, frozenset(self._pmf.items())))

    def __repr__(self) -> str:
        head = ", ".join(f"{int_to_bits(k, self._n)}: {fmt_prob(v)}"
                         for k, v in sorted(self._pmf.items())[:6])
        more = ", ..." if len(self._pmf) > 6 else ""
        return f"Dist(n={self._n}, {self._mode}, {{{head}{more}}})"

    # serialization
    def to_json(self) -> dict:
        return {
            "n": self._n,
            "mode": self._mode,
            "pmf": {int_to_bits(k, self._n): fmt_prob(v) for k, v in sorted(self._pmf.items())},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Dist":
        n = int(obj["n"])
        mode = obj.get("mode", EXACT)
        pmf = {}
        for key, val in obj["pmf"].items():
            if len(key) != n:
                raise ValueError(f"pmf key {key!r} has length {len(key)}, expected {n}")
            pmf[bits_to_int(key)] = parse_prob(val) if mode == EXACT else float(parse_prob(val))
        return cls(n, pmf, mode)


class WDist:
    """A distribution over Hamming weights ``{0, ..., n}``."""

    __slots__ = ("_n", "_pmf", "_mode", "_promoted")

    def __init__(self, n: int, pmf: Sequence[Prob], mode: str = EXACT,
                 promoted: bool = False, check: bool = True):
        _check_mode(mode)
        if len(pmf) != n + 1:
            raise ValueError(f"WDist needs {n + 1} masses, got {len(pmf)}")
        vals = tuple(_coerce(pmf, mode)) if check else tuple(pmf)
        if check:
            if any(v < 0 for v in vals):
                raise ValueError("negative weight mass")
            _check_total(sum(vals, Fraction(0) if mode == EXACT else 0.0), mode, "WDist")
        self._n = n
        self._pmf = vals
        self._mode = mode
        self._promoted = promoted

    n = property(lambda self: self._n)
    pmf = property(lambda self: self._pmf)
    mode = property(lambda self: self._mode)
    promoted = property(lambda self: self._promoted)

    def __getitem__(self, w: int) -> Prob:
        return self._pmf[w]

    def __len__(self) -> int:
        return self._n + 1

    def to_float(self) -> "WDist":
        if self._mode == FLOAT:
            return self
        return WDist(self._n, [float(v) for v in self._pmf], FLOAT, self._promoted, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WDist):
            return NotImplemented
        return (self._n, self._mode, self._pmf) == (other._n, other._mode, other._pmf)

    def __hash__(self):
        return hash((self._n, self._mode, self._pmf))

    def __repr__(self) -> str:
        return f"WDist(n={self._n}, {self._mode}, [{', '.join(fmt_prob(v) for v in self._pmf[:8])}{', ...' if self._n > 7 else ''}])"

    def tail(self, t: int) -> Prob:
        """Pr[X > t]."""
        zero = Fraction(0) if self._mode == EXACT else 0.0
        return sum(self._pmf[max(t + 1, 0):], zero)

    def to_json(self) -> dict:
        return {"n": self._n, "mode": self._mode, "pmf": [fmt_prob(v) for v in self._pmf]}

    @classmethod
    def from_json(cls, obj: dict) -> "WDist":
        mode = obj.get("mode", EXACT)
        vals = [parse_prob(v) for v in obj["pmf"]]
        if mode == FLOAT:
            vals = [float(v) for v in vals]
        return cls(int(obj["n"]), vals, mode)


def load_distribution(obj: dict) -> Union[Dist, WDist]:
    if isinstance(obj.get("pmf"), list):
        return WDist.from_json(obj)
    return Dist.from_json(obj)


def dumps(d: Union[Dist, WDist]) -> str:
    return json.dumps(d.to_json(), sort_keys=True)


# ---------------------------------------------------------------------------
# PsiSet / special kinds


class PsiSet:
    """A nonempty set of admissible Hamming weights inside ``{0..n}``."""

    __slots__ = ("n", "members")

    def __init__(self, n: int, members: Iterable[int]):
        ms = tuple(sorted(set(int(m) for m in members)))
        if not ms:
            raise ValueError("Psi must be nonempty")
        if ms[0] < 0 or ms[-1] > n:
            raise ValueError(f"Psi members must lie in 0..{n}")
        self.n = n
        self.members = ms

    def __contains__(self, w: int) -> bool:
        return w in set(self.members)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __eq__(self, other) -> bool:
        return isinstance(other, PsiSet) and (self.n, self.members) == (other.n, other.members)

    def __hash__(self):
        return hash((self.n, self.members))

    def __repr__(self) -> str:
        return f"PsiSet(n={self.n}, {list(self.members)})"

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "PsiSet":
        return cls(n, [w for w in range(n + 1) if (mask >> w) & 1])

    def mask(self) -> int:
        out = 0
        for w in self.members:
            out |= 1 << w
        return out


class SpecialKind(enum.IntEnum):
    ZEROS = 0
    ONES = 1
    ZERONES = 2
    EVENS = 3
    ODDS = 4
    ALL = 5

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, s: str) -> "SpecialKind":
        try:
            return cls[s.upper()]
        except KeyError:
            raise ValueError(f"unknown special distribution {s!r}") from None

    def psi(self, n: int) -> PsiSet:
        if self is SpecialKind.ZEROS:
            return PsiSet(n, [0])
        if self is SpecialKind.ONES:
            return PsiSet(n, [n])
        if self is SpecialKind.ZERONES:
            return PsiSet(n, [0, n])
        if self is SpecialKind.EVENS:
            return PsiSet(n, range(0, n + 1, 2))
        if self is SpecialKind.ODDS:
            if n < 1:
                raise ValueError("odds needs n >= 1")
            return PsiSet(n, range(1, n + 1, 2))
        return PsiSet(n, range(n + 1))


# ---------------------------------------------------------------------------
# distances


def _same_kind(p, q):
    if type(p) is not type(q):
        raise DimensionError(f"cannot compare {type(p).__name__} with {type(q).__name__}")
    if p.n != q.n:
        raise DimensionError(f"dimension mismatch: n={p.n} vs n={q.n}")
    if p.mode != q.mode:
        warnings.warn("mixing exact and float distributions; result is float",
                      PromotionWarning, stacklevel=3)
        return p.to_float(), q.to_float(), True
    return p, q, p.promoted or q.promoted


def _pairs(p, q):
    if isinstance(p, Dist):
        zero = p._zero()
        for x in set(p.pmf) | set(q.pmf):
            yield p.pmf.get(x, zero), q.pmf.get(x, zero)
    else:
        yield from zip(p.pmf, q.pmf)


def tv_distance(p, q) -> Prob:
    """Half the L1 distance; exact when both operands are exact."""
    p, q, _ = _same_kind(p, q)
    zero = Fraction(0) if p.mode == EXACT else 0.0
    return sum((abs(a - b) for a, b in _pairs(p, q)), zero) / 2


def max_event_gap(p, q) -> Prob:
    """``max_E p(E) - q(E)``, attained by the event ``{x : p(x) > q(x)}``."""
    p, q, _ = _same_kind(p, q)
    zero = Fraction(0) if p.mode == EXACT else 0.0
    return sum((a - b for a, b in _pairs(p, q) if a > b), zero)


def coupling_overlap(p, q) -> Prob:
    p, q, _ = _same_kind(p, q)
    zero = Fraction(0) if p.mode == EXACT else 0.0
    return sum((min(a, b) for a, b in _pairs(p, q)), zero)


def kolmogorov_distance(p: WDist, q: WDist) -> Prob:
    p, q, _ = _same_kind(p, q)
    zero = Fraction(0) if p.mode == EXACT else 0.0
    best = zero
    tp = tq = zero  # Pr[X > t] for t = n, n-1, ..., -1
    for w in range(p.n, -1, -1):
        tp += p.pmf[w]
        tq += q.pmf[w]
        best = max(best, abs(tp - tq))
    return best


# ---------------------------------------------------------------------------
# transforms


def weight_marginal(p: Dist) -> WDist:
    zero = p._zero()
    out = [zero] * (p.n + 1)
    for x, v in p.pmf.items():
        out[popcount(x)] += v
    return WDist(p.n, out, p.mode, p.promoted, check=False)


def symmetrize(p: Dist) -> Dist:
    w = weight_marginal(p)
    return from_weights(w)


def from_weights(w: WDist) -> Dist:
    """The symmetric distribution whose weight marginal is ``w``."""
    n = w.n
    pmf = {}
    for k in range(n + 1):
        if w.pmf[k] == 0:
            continue
        mass = w.pmf[k] / math.comb(n, k)
        for x in strings_of_weight(n, k):
            pmf[x] = mass
    return Dist(n, pmf, w.mode, w.promoted, check=False)


def strings_of_weight(n: int, k: int):
    for combo in itertools.combinations(range(n), k):
        x = 0
        for i in combo:
            x |= 1 << i
        yield x


def marginal(p: Dist, s: Sequence[int]) -> Dist:
    """Marginal on coordinates ``s``; coordinate ``s[j]`` becomes bit ``j``."""
    s = list(s)
    if not s:
        raise ValueError("marginal needs a nonempty index set")
    if len(set(s)) != len(s) or any(not 0 <= i < p.n for i in s):
        raise ValueError(f"bad index set {s} for n={p.n}")
    out: dict[int, Prob] = {}
    zero = p._zero()
    for x, v in p.pmf.items():
        y = 0
        for j, i in enumerate(s):
            if (x >> i) & 1:
                y |= 1 << j
        out[y] = out.get(y, zero) + v
    return Dist(len(s), out, p.mode, p.promoted, check=False)


def permute(p: Dist, perm: Sequence[int]) -> Dist:
    """Move coordinate ``i`` to position ``perm[i]``."""
    out = {}
    for x, v in p.pmf.items():
        y = 0
        for i in range(p.n):
            if (x >> i) & 1:
                y |= 1 << perm[i]
        out[y] = v
    return Dist(p.n, out, p.mode, p.promoted, check=False)


def product(ps: Sequence[Dist]) -> Dist:
    """Product distribution; ``ps[0]`` occupies the lowest bits."""
    if not ps:
        raise ValueError("product of no distributions")
    mode = EXACT if all(p.mode == EXACT for p in ps) else FLOAT
    promoted = any(p.promoted for p in ps) or (mode == FLOAT and any(p.mode == EXACT for p in ps))
    if mode == FLOAT:
        ps = [p.to_float() for p in ps]
    acc = {0: Fraction(1) if mode == EXACT else 1.0}
    shift = 0
    for p in ps:
        nxt = {}
        for x, a in acc.items():
            for y, b in p.pmf.items():
                nxt[x | (y << shift)] = a * b
        acc = nxt
        shift += p.n
    return Dist(shift, acc, mode, promoted, check=False)


def mixture(weights: Sequence[Prob], ps: Sequence[Dist]) -> Dist:
    if len(weights) != len(ps) or not ps:
        raise ValueError("mixture needs one weight per component")
    n = ps[0].n
    if any(p.n != n for p in ps):
        raise DimensionError("mixture components must share n")
    exact = all(p.mode == EXACT for p in ps) and all(not isinstance(a, float) for a in weights)
    mode = EXACT if exact else FLOAT
    ws = [Fraction(a) for a in weights] if exact else [float(a) for a in weights]
    if any(a < 0 for a in ws):
        raise ValueError("negative mixture weight")
    _check_total(sum(ws, Fraction(0) if exact else 0.0), mode, "mixture weight")
    promoted = any(p.promoted for p in ps) or (not exact and any(p.mode == EXACT for p in ps))
    out: dict[int, Prob] = {}
    zero = Fraction(0) if exact else 0.0
    for a, p in zip(ws, ps):
        if not exact:
            p = p.to_float()
        for x, v in p.pmf.items():
            out[x] = out.get(x, zero) + a * v
    return Dist(n, out, mode, promoted, check=False)


def wmixture(weights: Sequence[Prob], ps: Sequence[WDist]) -> WDist:
    n = ps[0].n
    if any(p.n != n for p in ps):
        raise DimensionError("mixture components must share n")
    ws = [Fraction(a) for a in weights]
    if sum(ws) != 1 or any(a < 0 for a in ws):
        raise ValueError("mixture weights must be nonnegative and sum to 1")
    return WDist(n, [sum(a * p.pmf[w] for a, p in zip(ws, ps)) for w in range(n + 1)])


def point(n: int, x: int) -> Dist:
    return Dist(n, {x: Fraction(1)})


def wpoint(n: int, w: int) -> WDist:
    return WDist(n, [Fraction(int(k == w)) for k in range(n + 1)])


def binomial(n: int) -> WDist:
    den = 1 << n
    return WDist(n, [Fraction(math.comb(n, k), den) for k in range(n + 1)])


# ---------------------------------------------------------------------------
# uniform symmetric family


def uniform_symmetric_weights(psi: PsiSet) -> WDist:
    n = psi.n
    z = sum(math.comb(n, w) for w in psi.members)
    mem = set(psi.members)
    return WDist(n, [Fraction(math.comb(n, w), z) if w in mem else Fraction(0)
                     for w in range(n + 1)], check=False)


def uniform_symmetric(psi: PsiSet) -> Dist:
    n = psi.n
    z = sum(math.comb(n, w) for w in psi.members)
    mass = Fraction(1, z)
    pmf = {}
    for w in psi.members:
        for x in strings_of_weight(n, w):
            pmf[x] = mass
    return Dist(n, pmf, check=False)


def special(kind: SpecialKind, n: int) -> Dist:
    if n < 1:
        raise ValueError("special distributions need n >= 1")
    return uniform_symmetric(SpecialKind(kind).psi(n))


def special_weights(kind: SpecialKind, n: int) -> WDist:
    return uniform_symmetric_weights(SpecialKind(kind).psi(n))


def is_symmetric(p: Dist) -> bool:
    return tv_distance(p, symmetrize(p)) == 0
