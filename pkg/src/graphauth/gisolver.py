"""Colour refinement, individualization-refinement isomorphism search, and bounded
subgraph-embedding search.

This is deliberately a small engine: 1-dimensional Weisfeiler-Leman refinement to
prune, and backtracking over cell-respecting candidates to stay complete.  Random
graphs almost always refine to a discrete partition in a handful of rounds, which
is exactly why hiding a secret behind a graph isomorphism is weak.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .graphs import Graph, VertexMap, is_embedding, is_isomorphism

__all__ = [
    "RefinementPartition",
    "EmbeddingResult",
    "wl_refine",
    "find_isomorphism",
    "brute_force_isomorphism",
    "find_embedding",
    "BRUTE_FORCE_MAX_ORDER",
]

BRUTE_FORCE_MAX_ORDER = 8


@dataclass(frozen=True)
class RefinementPartition:
    """Equitable partition of a graph's vertices.

    ``cells[v]`` is the cell id of vertex ``v``.  Cell ids are canonical: they come from
    lexicographically sorting (previous cell, neighbour counts per cell) profiles, so
    they do not depend on vertex labels.  ``signature`` lists ``(cell, size, profile)``
    per cell and is identical for any relabelling of the graph.
    """

    cells: tuple[int, ...]
    signature: tuple[tuple[int, int, tuple[int, ...]], ...]

    @property
    def num_cells(self) -> int:
        return len(self.signature)

    def is_discrete(self) -> bool:
        return self.num_cells == len(self.cells)


def _dense(colors: np.ndarray) -> np.ndarray:
    _, inv = np.unique(colors, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


def _refine_jointly(adjs: Sequence[np.ndarray], colors: Sequence[np.ndarray]):
    """Refine several graphs with a shared colour namespace.

    Returns ``(colors, counts)`` per graph once stable, or ``None`` as soon as the
    graphs disagree on how many vertices carry some colour (no colour-respecting
    isomorphism can exist then).
    """
    colors = [np.asarray(c, dtype=np.int64) for c in colors]
    sizes = [len(c) for c in colors]
    splits = np.cumsum(sizes)[:-1]
    while True:
        ncol = int(max((c.max() for c in colors if len(c)), default=-1)) + 1
        rows = []
        counts = []
        for adj, col in zip(adjs, colors):
            onehot = np.zeros((len(col), ncol), dtype=np.int64)
            onehot[np.arange(len(col)), col] = 1
            cnt = adj @ onehot
            counts.append(cnt)
            rows.append(np.concatenate([col[:, None], cnt], axis=1))
        stacked = np.concatenate(rows, axis=0)
        if len(stacked) == 0:
            return colors, counts
        uniq, inv = np.unique(stacked, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        parts = np.split(inv, splits)
        if len(parts) > 1:
            ref = np.bincount(parts[0], minlength=len(uniq))
            for part in parts[1:]:
                if not np.array_equal(np.bincount(part, minlength=len(uniq)), ref):
                    return None
        if len(uniq) == ncol:
            # partition unchanged; ids are stable because the old colour leads each row
            return colors, counts
        colors = [p.astype(np.int64) for p in parts]


def wl_refine(g: Graph, initial: Optional[Sequence[int]] = None) -> RefinementPartition:
    """Coarsest equitable refinement of ``initial`` (all vertices in one cell if absent,
    which refines to the degree partition and beyond)."""
    if initial is None:
        start = np.zeros(g.order, dtype=np.int64)
    else:
        if len(initial) != g.order:
            raise ValueError("initial partition must cover every vertex")
        start = _dense(np.asarray(initial, dtype=np.int64)) if g.order else np.zeros(0, dtype=np.int64)
    adj = g.adjacency.astype(np.int64)
    (colors,), (counts,) = _refine_jointly([adj], [start])
    sig = []
    for cell in range(int(colors.max()) + 1 if g.order else 0):
        members = np.flatnonzero(colors == cell)
        sig.append((cell, len(members), tuple(int(x) for x in counts[members[0]])))
    return RefinementPartition(tuple(int(c) for c in colors), tuple(sig))


def find_isomorphism(g: Graph, h: Graph) -> Optional[VertexMap]:
    """Isomorphism ``g -> h`` or ``None`` when none exists (the search is complete).

    Branches on the smallest non-singleton cell (lowest id on ties), individualizing
    the lowest vertex of that cell in ``g`` against each vertex of the matching cell
    in ``h`` in increasing order.
    """
    if g.order != h.order or g.size != h.size:
        return None
    if not np.array_equal(np.sort(g.degrees), np.sort(h.degrees)):
        return None
    n = g.order
    if n == 0:
        return VertexMap([], 0)
    adjs = [g.adjacency.astype(np.int64), h.adjacency.astype(np.int64)]
    start = _refine_jointly(adjs, [np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64)])
    if start is None:
        return None
    return _search(g, h, adjs, start[0][0], start[0][1])


def _search(g: Graph, h: Graph, adjs, cg: np.ndarray, ch: np.ndarray) -> Optional[VertexMap]:
    sizes = np.bincount(cg)
    if len(sizes) == len(cg):
        images = np.empty(len(cg), dtype=np.int64)
        images[np.argsort(cg)] = np.argsort(ch)
        f = VertexMap(images, h.order)
        return f if is_isomorphism(f, g, h) else None
    big = np.flatnonzero(sizes > 1)
    target = int(big[np.argmin(sizes[big])])
    v = int(np.flatnonzero(cg == target)[0])
    fresh = len(sizes)
    for w in np.flatnonzero(ch == target).tolist():
        cg2 = cg.copy()
        ch2 = ch.copy()
        cg2[v] = fresh
        ch2[w] = fresh
        refined = _refine_jointly(adjs, [cg2, ch2])
        if refined is None:
            continue
        found = _search(g, h, adjs, refined[0][0], refined[0][1])
        if found is not None:
            return found
    return None


def brute_force_isomorphism(g: Graph, h: Graph) -> Optional[VertexMap]:
    """First bijection in lexicographic order that is an isomorphism (test oracle)."""
    if g.order > BRUTE_FORCE_MAX_ORDER or h.order > BRUTE_FORCE_MAX_ORDER:
        raise ValueError(f"brute force is capped at order {BRUTE_FORCE_MAX_ORDER}")
    if g.order != h.order or g.size != h.size:
        return None
    target = {(u, v) for u, v in h.edge_list()}
    target |= {(v, u) for u, v in target}
    edges = g.edge_list()
    for perm in itertools.permutations(range(g.order)):
        if all((perm[u], perm[v]) in target for u, v in edges):
            f = VertexMap(perm, h.order)
            if is_isomorphism(f, g, h):
                return f
    return None


@dataclass(frozen=True)
class EmbeddingResult:
    """Outcome of :func:`find_embedding`: ``status`` is ``"found"``, ``"none"`` or ``"budget"``."""

    status: str
    mapping: Optional[VertexMap]
    nodes: int

    @property
    def found(self) -> bool:
        return self.status == "found"


class _BudgetExceeded(Exception):
    pass


def _pattern_order(pattern: Graph, nbrs: list[list[int]]) -> list[int]:
    deg = pattern.degrees.tolist()
    remaining = set(range(pattern.order))
    placed: set[int] = set()
    order: list[int] = []
    while remaining:
        best = max(remaining, key=lambda u: (sum(1 for w in nbrs[u] if w in placed), deg[u], -u))
        order.append(best)
        placed.add(best)
        remaining.remove(best)
    return order


def find_embedding(pattern: Graph, host: Graph, node_budget: int = 1_000_000) -> EmbeddingResult:
    """Backtracking search for an injective edge-preserving map ``pattern -> host``."""
    if node_budget <= 0:
        raise ValueError("node_budget must be positive")
    if pattern.order > host.order or pattern.size > host.size:
        return EmbeddingResult("none", None, 0)
    pn = pattern.neighbors()
    hn = [set(x) for x in host.neighbors()]
    pdeg = pattern.degrees.tolist()
    hdeg = host.degrees.tolist()
    order = _pattern_order(pattern, pn)
    pos = {u: i for i, u in enumerate(order)}
    back = [[w for w in pn[u] if pos[w] < i] for i, u in enumerate(order)]
    images = [-1] * pattern.order
    used = [False] * host.order
    nodes = 0

    def extend(i: int) -> bool:
        nonlocal nodes
        if i == len(order):
            return True
        u = order[i]
        anchors = back[i]
        pool = hn[images[anchors[0]]] if anchors else range(host.order)
        for x in sorted(pool):
            if used[x] or hdeg[x] < pdeg[u]:
                continue
            if any(x not in hn[images[w]] for w in anchors[1:]):
                continue
            nodes += 1
            if nodes > node_budget:
                raise _BudgetExceeded
            images[u] = x
            used[x] = True
            if extend(i + 1):
                return True
            used[x] = False
            images[u] = -1
        return False

    try:
        ok = extend(0)
    except _BudgetExceeded:
        return EmbeddingResult("budget", None, nodes)
    if not ok:
        return EmbeddingResult("none", None, nodes)
    f = VertexMap(images, host.order)
    assert is_embedding(f, pattern, host)
    return EmbeddingResult("found", f, nodes)
