"""Dependency hypergraphs of local functions and independent neighborhoods.

Vertices are output bits; each input bit contributes the edge of outputs it
feeds.  ``I(v)`` is the union of edges through ``v`` (always containing
``v``) and ``N(v)`` the set of vertices whose ``I`` meets ``I(v)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .distributions import Dist, marginal, product
from .engine import output_distribution
from .localfn import LocalFn, compact, restrict, subfunction


@dataclass(frozen=True)
class DepHypergraph:
    n: int
    edges: dict  # input index -> frozenset of outputs

    @classmethod
    def from_localfn(cls, f: LocalFn) -> "DepHypergraph":
        edges: dict[int, set] = {}
        for k, g in enumerate(f.gates):
            for i in g.inputs:
                edges.setdefault(i, set()).add(k)
        return cls(f.n, {i: frozenset(e) for i, e in sorted(edges.items()) if e})

    def without(self, removed) -> "DepHypergraph":
        removed = set(removed)
        return DepHypergraph(self.n, {i: e for i, e in self.edges.items() if i not in removed})

    def incident(self, v: int) -> list[int]:
        return [i for i, e in self.edges.items() if v in e]

    def degree(self, v: int) -> int:
        return len(self.incident(v))

    def max_degree(self) -> int:
        return max((self.degree(v) for v in range(self.n)), default=0)

    def I(self, v: int) -> frozenset:
        self._check(v)
        out = {v}
        for e in self.edges.values():
            if v in e:
                out |= e
        return frozenset(out)

    def N(self, v: int) -> frozenset:
        iv = self.I(v)
        out = set()
        for u in iv:
            out |= self.I(u)
        return frozenset(out)

    def neighborhoods(self, v: int) -> tuple[frozenset, frozenset]:
        return self.I(v), self.N(v)

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range for n={self.n}")


def neighborhoods(g: DepHypergraph, v: int) -> tuple[frozenset, frozenset]:
    return g.neighborhoods(v)


@dataclass
class NeighborhoodSelection:
    t: int
    removed_inputs: list[int]
    centers: list[int]
    blocks: dict = field(default_factory=dict)  # center -> sorted I(center) in G \ S
    verified: bool = False
    failure: str | None = None

    @property
    def r(self) -> int:
        return len(self.centers)

    def to_json(self) -> dict:
        out = {
            "t": self.t,
            "removed_inputs": list(self.removed_inputs),
            "centers": list(self.centers),
            "r": self.r,
            "verified": self.verified,
            "neighborhoods": {str(c): list(b) for c, b in self.blocks.items()},
        }
        if self.failure:
            out["failure"] = self.failure
        return out


def verify_selection(g: DepHypergraph, sel: NeighborhoodSelection) -> list[str]:
    """Recompute every selection invariant from scratch; returns the violations."""
    problems = []
    h = g.without(sel.removed_inputs)
    if len(set(sel.centers)) != len(sel.centers):
        problems.append("centers not distinct")
    blocks = {c: h.I(c) for c in sel.centers}
    for c, b in blocks.items():
        if len(b) > sel.t:
            problems.append(f"|I({c})| = {len(b)} > t = {sel.t}")
    for a, b in itertools.combinations(sel.centers, 2):
        if blocks[a] & blocks[b]:
            problems.append(f"I({a}) and I({b}) overlap")
            continue
        for i, e in h.edges.items():
            if e & blocks[a] and e & blocks[b]:
                problems.append(f"edge {i} touches I({a}) and I({b})")
                break
    return problems


def find_independent_neighborhoods(g: DepHypergraph, t: int,
                                   edge_budget: int) -> NeighborhoodSelection:
    """Greedy selection of centers with small, pairwise non-adjacent neighborhoods.

    Repeatedly take the candidate with the smallest ``|N(v)|`` (ties: lowest
    index).  Accept it if ``|I(v)| <= t`` and drop ``N(N(v))`` from the
    candidates; otherwise delete its largest incident edge if the budget
    allows, else discard it.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    removed: list[int] = []
    h = g
    candidates = set(range(g.n))
    centers: list[int] = []
    while candidates:
        v = min(candidates, key=lambda u: (len(h.N(u)), u))
        iv = h.I(v)
        if len(iv) <= t:
            centers.append(v)
            blocked = set()
            for u in h.N(v):
                blocked |= h.N(u)
            candidates -= blocked
            continue
        if len(removed) < edge_budget:
            inc = h.incident(v)
            biggest = max(inc, key=lambda i: (len(h.edges[i]), -i))
            removed.append(biggest)
            h = h.without([biggest])
        else:
            candidates.discard(v)
    sel = NeighborhoodSelection(t, removed, sorted(centers),
                                {c: sorted(h.I(c)) for c in sorted(centers)})
    if not centers:
        sel.failure = "no center fits within the edge budget"
        return sel
    problems = verify_selection(g, sel)
    if problems:
        raise AssertionError(f"greedy selection violated its invariants: {problems}")
    sel.verified = True
    return sel


@dataclass
class IndependenceReport:
    subcubes: int
    checked_groups: int
    full_joint: bool
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "subcubes": self.subcubes,
            "checked_groups": self.checked_groups,
            "full_joint": self.full_joint,
            "passed": self.passed,
            "violations": self.violations,
        }


def conditional_independence_check(f: LocalFn, sel: NeighborhoodSelection,
                                   subcube_samples: int, seed: int,
                                   max_joint_bits: int = 16,
                                   group_size: int = 3) -> IndependenceReport:
    """Check exact factorization across selected neighborhoods on sampled subcubes.

    For each sampled assignment of the removed inputs the joint distribution of
    the selected blocks is compared with the product of the block marginals.
    When all blocks together exceed ``max_joint_bits`` the check runs on every
    pair of blocks and on seeded random groups of ``group_size`` blocks.
    """
    g = DepHypergraph.from_localfn(f)
    problems = verify_selection(g, sel)
    if problems:
        raise ValueError(f"selection rejected: {problems}")
    blocks = [list(sel.blocks[c]) for c in sel.centers]
    rng = np.random.default_rng(seed)
    removed = sorted(sel.removed_inputs)
    if len(removed) <= 16 and (1 << len(removed)) <= subcube_samples:
        assignments = [{i: (a >> j) & 1 for j, i in enumerate(removed)}
                       for a in range(1 << len(removed))]
    else:
        assignments = [{i: int(rng.integers(0, 2)) for i in removed}
                       for _ in range(subcube_samples)]
    total_bits = sum(len(b) for b in blocks)
    full = total_bits <= max_joint_bits
    if full:
        groups = [list(range(len(blocks)))]
    else:
        groups = [list(p) for p in itertools.combinations(range(len(blocks)), 2)]
        k = min(group_size, len(blocks))
        if k > 2:
            for _ in range(len(blocks)):
                groups.append(sorted(int(j) for j in rng.choice(len(blocks), size=k, replace=False)))
    report = IndependenceReport(len(assignments), 0, full)
    for assign in assignments:
        fr = restrict(f, assign)
        for grp in groups:
            if len(grp) < 2:
                continue
            outs = [v for j in grp for v in blocks[j]]
            joint = _exact_joint(fr, outs)
            parts, offset = [], 0
            for j in grp:
                parts.append(marginal(joint, range(offset, offset + len(blocks[j]))))
                offset += len(blocks[j])
            report.checked_groups += 1
            if joint != product(parts):
                report.violations.append({"assignment": {str(k): v for k, v in assign.items()},
                                          "blocks": [sel.centers[j] for j in grp]})
    return report


def _exact_joint(f: LocalFn, outputs: list[int]) -> Dist:
    sub = compact(subfunction(f, outputs))
    return output_distribution(sub, engine="naive" if sub.m <= 20 else "auto")
