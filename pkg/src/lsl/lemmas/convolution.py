"""Exact pmfs on contiguous integer ranges and their convolution.

Masses are stored as integer numerators over one common denominator.  Sums
of many variables are convolved by Kronecker substitution: each numerator
vector is packed into one big integer, the packed integers are multiplied
with GMP along a balanced product tree, and the result is unpacked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import gmpy2


@dataclass(frozen=True)
class IntPMF:
    offset: int
    nums: tuple  # integer numerators, nums[k] is the mass at offset + k
    den: int

    def __post_init__(self):
        if self.den <= 0 or any(c < 0 for c in self.nums):
            raise ValueError("masses must be nonnegative")
        if sum(self.nums) != self.den:
            raise ValueError("masses must sum to 1")

    @classmethod
    def from_masses(cls, masses: Sequence, offset: int = 0) -> "IntPMF":
        fr = [Fraction(m) for m in masses]
        den = math.lcm(*(f.denominator for f in fr)) if fr else 1
        nums = [f.numerator * (den // f.denominator) for f in fr]
        return cls(*_trim(nums, offset), den)._reduced()

    @classmethod
    def from_dict(cls, d: dict) -> "IntPMF":
        lo, hi = min(d), max(d)
        return cls.from_masses([d.get(k, 0) for k in range(lo, hi + 1)], lo)

    @classmethod
    def point(cls, v: int) -> "IntPMF":
        return cls(v, (1,), 1)

    @classmethod
    def uniform(cls, values: Sequence[int]) -> "IntPMF":
        return cls.from_dict({v: Fraction(1, len(values)) for v in values})

    def _reduced(self) -> "IntPMF":
        g = math.gcd(self.den, *self.nums)
        if g == 1:
            return self
        return IntPMF(self.offset, tuple(c // g for c in self.nums), self.den // g)

    @property
    def lo(self) -> int:
        return self.offset

    @property
    def hi(self) -> int:
        return self.offset + len(self.nums) - 1

    def __call__(self, v: int) -> Fraction:
        k = v - self.offset
        if 0 <= k < len(self.nums):
            return Fraction(self.nums[k], self.den)
        return Fraction(0)

    def masses(self) -> list[Fraction]:
        return [Fraction(c, self.den) for c in self.nums]

    def support(self) -> list[int]:
        return [self.offset + k for k, c in enumerate(self.nums) if c]

    def negate(self) -> "IntPMF":
        return IntPMF(-self.hi, tuple(reversed(self.nums)), self.den)

    def shift(self, s: int) -> "IntPMF":
        return IntPMF(self.offset + s, self.nums, self.den)


def _trim(nums: list[int], offset: int) -> tuple[int, tuple]:
    lo = 0
    while lo < len(nums) - 1 and nums[lo] == 0:
        lo += 1
    hi = len(nums)
    while hi > lo + 1 and nums[hi - 1] == 0:
        hi -= 1
    return offset + lo, tuple(nums[lo:hi])


# ---------------------------------------------------------------------------
# Kronecker substitution


def _pack(nums: Sequence[int], slot: int) -> gmpy2.mpz:
    width = slot // 4
    text = "".join(format(int(c), "x").zfill(width) for c in reversed(nums))
    return gmpy2.mpz(text, 16)


def _unpack(v: gmpy2.mpz, slot: int, length: int) -> list[int]:
    width = slot // 4
    text = v.digits(16).zfill(width * length)
    text = text[-width * length:]
    return [int(text[len(text) - width * (k + 1): len(text) - width * k], 16) for k in range(length)]


def poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Product of two nonnegative integer coefficient vectors."""
    if len(a) < 8 or len(b) < 8:
        return direct_mul(a, b)
    bound = min(len(a), len(b)) * max(a) * max(b)
    slot = max(4, bound.bit_length() + 1)
    slot += (-slot) % 4
    out = _pack(a, slot) * _pack(b, slot)
    return _unpack(out, slot, len(a) + len(b) - 1)


def direct_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Schoolbook convolution; the reference for ``poly_mul``."""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def convolve(ps: Sequence[IntPMF], method: str = "kronecker") -> IntPMF:
    """Exact distribution of the sum of independent variables."""
    if not ps:
        return IntPMF.point(0)
    mul = poly_mul if method == "kronecker" else direct_mul
    layer = [(p.offset, list(p.nums), p.den) for p in ps]
    while len(layer) > 1:
        nxt = []
        for k in range(0, len(layer) - 1, 2):
            (o1, a, d1), (o2, b, d2) = layer[k], layer[k + 1]
            nxt.append((o1 + o2, mul(a, b), d1 * d2))
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    off, nums, den = layer[0]
    return IntPMF(off, tuple(int(c) for c in nums), int(den))._reduced()


def convolve_direct(ps: Sequence[IntPMF]) -> IntPMF:
    """Left fold with Fractions; an independent oracle for ``convolve``."""
    acc = {0: Fraction(1)}
    for p in ps:
        nxt: dict[int, Fraction] = {}
        for x, a in acc.items():
            for v in p.support():
                nxt[x + v] = nxt.get(x + v, 0) + a * p(v)
        acc = nxt
    return IntPMF.from_dict(acc)
