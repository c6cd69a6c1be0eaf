"""Brute-force reference computations, written independently of the package internals."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def weight(x: int) -> int:
    return bin(x).count("1")


def pmf_of(p) -> dict:
    """Dense map of every nonzero mass of a Dist."""
    return {x: p(x) for x in range(1 << p.n) if p(x)}


def tv(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    return sum((abs(p.get(x, 0) - q.get(x, 0)) for x in keys), Fraction(0)) / 2


def uniform_over(xs) -> dict:
    xs = list(xs)
    return {x: Fraction(1, len(xs)) for x in xs}


def special_pmf(kind: str, n: int) -> dict:
    pts = range(1 << n)
    sel = {
        "zeros": lambda x: x == 0,
        "ones": lambda x: x == (1 << n) - 1,
        "zerones": lambda x: x in (0, (1 << n) - 1),
        "evens": lambda x: weight(x) % 2 == 0,
        "odds": lambda x: weight(x) % 2 == 1,
        "all": lambda x: True,
    }[kind]
    return uniform_over(x for x in pts if sel(x))


def d_psi(n: int, psi) -> dict:
    return uniform_over(x for x in range(1 << n) if weight(x) in set(psi))


def eval_gates(f, x: int) -> int:
    """Evaluate a LocalFn by reading its truth tables directly."""
    y = 0
    for k, g in enumerate(f.gates):
        idx = sum(((x >> i) & 1) << j for j, i in enumerate(g.inputs))
        if g.table[idx] == "1":
            y |= 1 << k
    return y


def output_pmf(f) -> dict:
    counts: dict[int, int] = {}
    for x in range(1 << f.m):
        y = eval_gates(f, x)
        counts[y] = counts.get(y, 0) + 1
    return {y: Fraction(c, 1 << f.m) for y, c in counts.items()}


def best_psi_brute(p: dict, n: int) -> tuple[frozenset, Fraction]:
    """Minimum tv to D_Psi over every nonempty Psi; ties broken by the smallest mask."""
    best = None
    for mask in range(1, 1 << (n + 1)):
        psi = [w for w in range(n + 1) if mask >> w & 1]
        v = tv(p, d_psi(n, psi))
        if best is None or v < best[1]:
            best = (frozenset(psi), v)
    return best


def binom_row(n: int) -> list[int]:
    return [math.comb(n, k) for k in range(n + 1)]


def all_subsets(items, max_size=None):
    items = list(items)
    top = len(items) if max_size is None else max_size
    for k in range(top + 1):
        yield from itertools.combinations(items, k)
