"""Exact output distributions of local functions.

Two independent engines:

* ``naive``: enumerate all ``2^m`` inputs (vectorized, chunked).
* ``dp``: split inputs into connected components (inputs sharing a gate are
  joined), then run a frontier elimination inside each component.  The DP
  state is ``(assignment of live inputs, accumulated weight or output bits)``;
  an input stays live while some unevaluated gate still reads it.  Component
  results are combined by product (string level) or convolution (weight
  level).

Both return integer counts over ``2^m`` inputs, so results are exact.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .distributions import Dist, WDist
from .localfn import LocalFn, ResourceLimit

NAIVE_MAX_M = 26
DP_MAX_FRONTIER = 20
DP_MAX_STATES = 4_000_000
_CHUNK = 1 << 20


def naive_counts(f: LocalFn, max_m: int = NAIVE_MAX_M) -> dict[int, int]:
    """Output string -> number of inputs producing it."""
    if f.m > max_m:
        raise ResourceLimit(f"naive engine needs m <= {max_m}, got m={f.m}")
    from .localfn import evaluate_batch

    total = 1 << f.m
    counts: dict[int, int] = {}
    for start in range(0, total, _CHUNK):
        xs = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        ys = evaluate_batch(f, xs)
        vals, cnt = np.unique(ys, return_counts=True)
        for v, c in zip(vals.tolist(), cnt.tolist()):
            counts[v] = counts.get(v, 0) + c
    return counts


# ---------------------------------------------------------------------------
# frontier DP


def input_components(f: LocalFn) -> list[tuple[list[int], list[int]]]:
    """Connected components as ``(inputs, gate indices)``; unread inputs are skipped.

    Constant gates (no inputs) are returned as a final component with no inputs.
    """
    parent = list(range(f.m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for g in f.gates:
        for i in g.inputs[1:]:
            ra, rb = find(g.inputs[0]), find(i)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    comps: dict[int, tuple[set, list]] = {}
    consts = []
    for k, g in enumerate(f.gates):
        if not g.inputs:
            consts.append(k)
            continue
        root = find(g.inputs[0])
        ins, gs = comps.setdefault(root, (set(), []))
        ins.update(g.inputs)
        gs.append(k)
    out = [(sorted(ins), gs) for _, (ins, gs) in sorted(comps.items())]
    if consts:
        out.append(([], consts))
    return out


def min_fill_order(inputs: list[int], gates: list[tuple[int, ...]]) -> list[int]:
    """Elimination order on the input interaction graph (min fill-in, ties by index)."""
    adj = {i: set() for i in inputs}
    for g in gates:
        for a in g:
            adj[a].update(b for b in g if b != a)
    order = []
    remaining = set(inputs)
    while remaining:
        best = None
        for v in sorted(remaining):
            nb = list(adj[v] & remaining)
            fill = 0
            for x in range(len(nb)):
                for y in range(x + 1, len(nb)):
                    if nb[y] not in adj[nb[x]]:
                        fill += 1
            key = (fill, len(nb), v)
            if best is None or key < best[0]:
                best = (key, v)
        v = best[1]
        nb = list(adj[v] & remaining)
        for a in nb:
            adj[a].update(b for b in nb if b != a)
        order.append(v)
        remaining.discard(v)
    return order


def _component_dp(f: LocalFn, inputs: list[int], gate_ids: list[int], weight: bool,
                  max_frontier: int, max_states: int) -> dict[int, int]:
    gates = [f.gates[k] for k in gate_ids]
    order = min_fill_order(inputs, [g.inputs for g in gates])
    pos_in_order = {v: t for t, v in enumerate(order)}
    # a gate fires once its last input (in elimination order) is assigned
    fire_at: dict[int, list[int]] = {}
    last_use: dict[int, int] = {v: -1 for v in inputs}
    for gi, g in enumerate(gates):
        t = max(pos_in_order[i] for i in g.inputs)
        fire_at.setdefault(t, []).append(gi)
        for i in g.inputs:
            last_use[i] = max(last_use[i], t)

    live: list[int] = []
    states: dict[tuple[int, int], int] = {(0, 0): 1}
    for t, v in enumerate(order):
        live.append(v)
        if len(live) > max_frontier:
            raise ResourceLimit(f"DP frontier {len(live)} exceeds {max_frontier}")
        bit = len(live) - 1
        nxt: dict[tuple[int, int], int] = {}
        firing = fire_at.get(t, [])
        slot = {u: s for s, u in enumerate(live)}
        for (assign, acc), cnt in states.items():
            for val in (0, 1):
                a2 = assign | (val << bit)
                acc2 = acc
                for gi in firing:
                    g = gates[gi]
                    b = 0
                    for j, i in enumerate(g.inputs):
                        b |= ((a2 >> slot[i]) & 1) << j
                    if g.table[b] == "1":
                        acc2 = acc2 + 1 if weight else acc2 | (1 << gate_ids[gi])
                key = (a2, acc2)
                nxt[key] = nxt.get(key, 0) + cnt
        # drop inputs no pending gate reads any more
        keep = [s for s, u in enumerate(live) if last_use[u] > t]
        if len(keep) < len(live):
            projected: dict[tuple[int, int], int] = {}
            for (assign, acc), cnt in nxt.items():
                a2 = 0
                for new, old in enumerate(keep):
                    a2 |= ((assign >> old) & 1) << new
                key = (a2, acc)
                projected[key] = projected.get(key, 0) + cnt
            nxt = projected
            live = [live[s] for s in keep]
        if len(nxt) > max_states:
            raise ResourceLimit(f"DP state count {len(nxt)} exceeds {max_states}")
        states = nxt
    out: dict[int, int] = {}
    for (_, acc), cnt in states.items():
        out[acc] = out.get(acc, 0) + cnt
    return out


def dp_counts(f: LocalFn, weight: bool = False, max_frontier: int = DP_MAX_FRONTIER,
              max_states: int = DP_MAX_STATES) -> tuple[dict[int, int] | list[int], int]:
    """Counts over the inputs actually read, and the number of such inputs.

    Returns ``(counts, m_read)``: a dict output-string -> count, or a list of
    per-weight counts when ``weight`` is set.
    """
    comps = input_components(f)
    m_read = 0
    if weight:
        acc = [1]
    else:
        acc = {0: 1}
    for inputs, gids in comps:
        if not inputs:
            ones = [k for k in gids if f.gates[k].table == "1"]
            part = {len(ones): 1} if weight else {sum(1 << k for k in ones): 1}
        else:
            part = _component_dp(f, inputs, gids, weight, max_frontier, max_states)
            m_read += len(inputs)
        if weight:
            vec = [0] * (max(part) + 1)
            for w, c in part.items():
                vec[w] += c
            acc = _int_convolve(acc, vec)
        else:
            if len(acc) * len(part) > max_states:
                raise ResourceLimit("string-level support too large")
            acc = {x | y: a * b for x, a in acc.items() for y, b in part.items()}
    if weight:
        acc = acc + [0] * (f.n + 1 - len(acc))
    return acc, m_read


def _int_convolve(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# public API


def _dist_from_counts(n: int, counts: dict[int, int], m: int) -> Dist:
    den = 1 << m
    return Dist(n, {x: Fraction(c, den) for x, c in counts.items()}, check=False)


def output_distribution(f: LocalFn, engine: str = "auto") -> Dist:
    """Exact distribution of ``f(U^m)``."""
    if engine == "naive":
        return _dist_from_counts(f.n, naive_counts(f), f.m)
    if engine == "dp":
        counts, m_read = dp_counts(f)
        return _dist_from_counts(f.n, counts, m_read)
    if engine != "auto":
        raise ValueError(f"unknown engine {engine!r}")
    try:
        counts, m_read = dp_counts(f)
        return _dist_from_counts(f.n, counts, m_read)
    except ResourceLimit as dp_err:
        if f.m <= NAIVE_MAX_M:
            return _dist_from_counts(f.n, naive_counts(f), f.m)
        raise ResourceLimit(f"both engines exceed budget ({dp_err})") from None


def weight_distribution(f: LocalFn, engine: str = "auto") -> WDist:
    """Exact distribution of ``|f(U^m)|``."""
    if engine in ("dp", "auto"):
        try:
            vec, m_read = dp_counts(f, weight=True)
            den = 1 << m_read
            return WDist(f.n, [Fraction(c, den) for c in vec], check=False)
        except ResourceLimit as dp_err:
            if engine == "dp" or f.m > NAIVE_MAX_M:
                raise ResourceLimit(f"both engines exceed budget ({dp_err})") from None
    elif engine != "naive":
        raise ValueError(f"unknown engine {engine!r}")
    counts = naive_counts(f)
    vec = [0] * (f.n + 1)
    for x, c in counts.items():
        vec[bin(x).count("1")] += c
    den = 1 << f.m
    return WDist(f.n, [Fraction(c, den) for c in vec], check=False)
