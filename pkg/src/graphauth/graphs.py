"""Graph value types, structural predicates, the tensor product and random constructions.

Graphs are simple, undirected and loop-free.  Vertices are ``0..order-1`` and the
edge array is canonical: each edge stored once as ``(min, max)``, rows sorted
lexicographically.  All values are immutable (numpy buffers are marked read-only).

Maps compose left to right: ``compose(f, g)`` is "apply ``f``, then ``g``".

Subgraphs are not necessarily induced, and an embedding is an injective
edge-preserving map (the host may carry extra edges among the image vertices).
Whenever a subgraph is turned into a standalone graph (:func:`graph_of`) or a map
is restricted to it (:func:`restrict`), its vertices are re-indexed densely in
increasing host-vertex order.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .rng import SplitMix64

__all__ = [
    "Graph",
    "VertexMap",
    "Coloring",
    "SubgraphRef",
    "DimensionError",
    "tensor_product",
    "projection",
    "is_homomorphism",
    "image_covers",
    "is_embedding",
    "is_isomorphism",
    "is_proper_coloring",
    "is_subgraph_of",
    "compose",
    "restrict",
    "relabel",
    "graph_of",
    "subgraph_image",
    "random_graph",
    "blow_up",
    "is_connected",
    "is_bipartite",
    "complete_graph",
    "cycle_graph",
    "path_graph",
    "empty_graph",
    "disjoint_union",
]


class DimensionError(ValueError):
    """A map, coloring or subgraph does not fit the graphs it is checked against."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _as_pairs(edges) -> np.ndarray:
    if isinstance(edges, np.ndarray):
        arr = edges.astype(np.int64, copy=False)
    else:
        arr = np.array(list(edges), dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be a sequence of vertex pairs")
    return arr


def _canonical_edges(order: int, arr: np.ndarray, *, check: bool) -> np.ndarray:
    """Sort endpoints and rows; with ``check`` reject loops, out-of-range ids and duplicates."""
    if len(arr) == 0:
        return np.empty((0, 2), dtype=np.int64)
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    if check:
        if lo.min() < 0 or hi.max() >= order:
            raise ValueError(f"edge endpoint out of range for order {order}")
        if np.any(lo == hi):
            v = int(lo[lo == hi][0])
            raise ValueError(f"loop at vertex {v}")
    codes = lo * order + hi
    idx = np.argsort(codes, kind="stable")
    codes = codes[idx]
    if check and len(codes) > 1:
        dup = np.flatnonzero(codes[1:] == codes[:-1])
        if len(dup):
            c = int(codes[dup[0]])
            raise ValueError(f"duplicate edge ({c // order}, {c % order})")
    return np.stack([lo[idx], hi[idx]], axis=1)


class Graph:
    """Simple undirected graph on vertices ``0..order-1``."""

    __slots__ = ("order", "edges", "_adj", "_codes", "_deg", "_ends")

    def __init__(self, order: int, edges: Iterable[Sequence[int]] | np.ndarray = ()):
        order = int(order)
        if order < 0:
            raise ValueError("order must be non-negative")
        self.order = order
        self.edges = _frozen(_canonical_edges(order, _as_pairs(edges), check=True))
        self._adj = None
        self._codes = None
        self._deg = None
        self._ends = None

    @classmethod
    def _trusted(cls, order: int, edges: np.ndarray, *, presorted: bool = False) -> "Graph":
        # internal fast path: caller guarantees no loops, duplicates or bad ids
        g = cls.__new__(cls)
        g.order = order
        if not presorted:
            edges = _canonical_edges(order, edges, check=False)
        g.edges = _frozen(np.ascontiguousarray(edges, dtype=np.int64))
        g._adj = None
        g._codes = None
        g._deg = None
        g._ends = None
        return g

    @property
    def size(self) -> int:
        """Number of edges."""
        return len(self.edges)

    def edge_list(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edges]

    @property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Contiguous copies of the two edge-endpoint columns."""
        if self._ends is None:
            self._ends = (_frozen(np.ascontiguousarray(self.edges[:, 0])),
                          _frozen(np.ascontiguousarray(self.edges[:, 1])))
        return self._ends

    @property
    def edge_codes(self) -> np.ndarray:
        """Sorted ``u * order + v`` codes, one per edge."""
        if self._codes is None:
            self._codes = _frozen(self.edges[:, 0] * self.order + self.edges[:, 1])
        return self._codes

    @property
    def adjacency(self) -> np.ndarray:
        if self._adj is None:
            adj = np.zeros((self.order, self.order), dtype=bool)
            if self.size:
                adj[self.edges[:, 0], self.edges[:, 1]] = True
                adj[self.edges[:, 1], self.edges[:, 0]] = True
            self._adj = _frozen(adj)
        return self._adj

    @property
    def degrees(self) -> np.ndarray:
        if self._deg is None:
            self._deg = _frozen(np.bincount(self.edges.ravel(), minlength=self.order))
        return self._deg

    def neighbors(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.order)]
        for u, v in self.edges.tolist():
            out[u].append(v)
            out[v].append(u)
        return out

    def has_edge(self, u: int, v: int) -> bool:
        if not (0 <= u < self.order and 0 <= v < self.order):
            return False
        return bool(self.adjacency[u, v])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.order == other.order and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.order, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(order={self.order}, size={self.size})"


class VertexMap:
    """Total map from ``range(domain_order)`` into ``range(codomain_order)``."""

    __slots__ = ("images", "codomain_order")

    def __init__(self, images: Sequence[int] | np.ndarray, codomain_order: int):
        arr = np.array(images, dtype=np.int64).reshape(-1)
        codomain_order = int(codomain_order)
        if codomain_order < 0:
            raise ValueError("codomain order must be non-negative")
        if len(arr) and (arr.min() < 0 or arr.max() >= codomain_order):
            raise ValueError(f"image out of range for codomain order {codomain_order}")
        self.images = _frozen(arr)
        self.codomain_order = codomain_order

    @classmethod
    def identity(cls, n: int) -> "VertexMap":
        return cls(np.arange(n), n)

    @property
    def domain_order(self) -> int:
        return len(self.images)

    def __len__(self) -> int:
        return len(self.images)

    def __getitem__(self, v):
        return self.images[v]

    def is_injective(self) -> bool:
        return len(np.unique(self.images)) == len(self.images)

    def is_bijective(self) -> bool:
        return self.domain_order == self.codomain_order and self.is_injective()

    def inverse(self) -> "VertexMap":
        if not self.is_bijective():
            raise ValueError("only a bijection has an inverse")
        inv = np.empty(self.domain_order, dtype=np.int64)
        inv[self.images] = np.arange(self.domain_order)
        return VertexMap(inv, self.domain_order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VertexMap):
            return NotImplemented
        return self.codomain_order == other.codomain_order and np.array_equal(self.images, other.images)

    def __hash__(self) -> int:
        return hash((self.codomain_order, self.images.tobytes()))

    def __repr__(self) -> str:
        return f"VertexMap({self.images.tolist()}, codomain_order={self.codomain_order})"


class Coloring:
    """Per-vertex colors drawn from ``1..k``."""

    __slots__ = ("colors", "k")

    def __init__(self, colors: Sequence[int] | np.ndarray, k: int):
        arr = np.array(colors, dtype=np.int64).reshape(-1)
        k = int(k)
        if k < 1:
            raise ValueError("color bound k must be >= 1")
        if len(arr) and (arr.min() < 1 or arr.max() > k):
            raise ValueError(f"colors must lie in [1, {k}]")
        self.colors = _frozen(arr)
        self.k = k

    def __len__(self) -> int:
        return len(self.colors)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Coloring):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.colors, other.colors)

    def __hash__(self) -> int:
        return hash((self.k, self.colors.tobytes()))

    def __repr__(self) -> str:
        return f"Coloring({self.colors.tolist()}, k={self.k})"


class SubgraphRef:
    """A vertex subset plus an edge subset of some host graph, in host vertex ids.

    The constructor only canonicalizes (sorted unique vertices, canonical edges) and
    range-checks against ``host_order``; containment in an actual host is the job of
    :func:`is_subgraph_of`.
    """

    __slots__ = ("host_order", "vertices", "edges")

    def __init__(self, host_order: int, vertices: Iterable[int] | np.ndarray,
                 edges: Iterable[Sequence[int]] | np.ndarray = ()):
        host_order = int(host_order)
        if not isinstance(vertices, np.ndarray):
            vertices = list(vertices)
        verts = np.unique(np.asarray(vertices, dtype=np.int64).reshape(-1))
        if len(verts) and (verts[0] < 0 or verts[-1] >= host_order):
            raise ValueError(f"subgraph vertex out of range for host order {host_order}")
        self.host_order = host_order
        self.vertices = _frozen(verts)
        self.edges = _frozen(_canonical_edges(host_order, _as_pairs(edges), check=True))

    @classmethod
    def whole(cls, g: Graph) -> "SubgraphRef":
        return cls(g.order, np.arange(g.order), g.edges)

    @property
    def order(self) -> int:
        return len(self.vertices)

    def local_index(self, host_vertices: np.ndarray) -> np.ndarray:
        """Dense index (sorted-vertex order) of each given host vertex; -1 when absent."""
        host_vertices = np.asarray(host_vertices, dtype=np.int64)
        if len(self.vertices) == 0:
            return np.full(host_vertices.shape, -1, dtype=np.int64)
        if host_vertices.size > len(self.vertices):
            # one table lookup per query beats a binary search on large edge arrays
            table = np.full(self.host_order, -1, dtype=np.int64)
            table[self.vertices] = np.arange(len(self.vertices))
            inside = (host_vertices >= 0) & (host_vertices < self.host_order)
            return np.where(inside, table[np.where(inside, host_vertices, 0)], -1)
        pos = np.searchsorted(self.vertices, host_vertices)
        pos = np.clip(pos, 0, len(self.vertices) - 1)
        return np.where(self.vertices[pos] == host_vertices, pos, -1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubgraphRef):
            return NotImplemented
        return (self.host_order == other.host_order
                and np.array_equal(self.vertices, other.vertices)
                and np.array_equal(self.edges, other.edges))

    def __hash__(self) -> int:
        return hash((self.host_order, self.vertices.tobytes(), self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"SubgraphRef(host_order={self.host_order}, order={self.order}, size={len(self.edges)})"


# --------------------------------------------------------------------------- predicates


def _check_dims(f: VertexMap, g: Graph, h: Graph) -> None:
    if f.domain_order != g.order or f.codomain_order != h.order:
        raise DimensionError(
            f"map {f.domain_order}->{f.codomain_order} does not fit graphs {g.order}->{h.order}")


def _mapped_endpoints(f: VertexMap, g: Graph) -> tuple[np.ndarray, np.ndarray]:
    u, v = g.endpoints
    return np.take(f.images, u), np.take(f.images, v)


def is_homomorphism(f: VertexMap, g: Graph, h: Graph) -> bool:
    """Every edge of ``g`` lands on an edge of ``h``."""
    _check_dims(f, g, h)
    if g.size == 0:
        return True
    fu, fv = _mapped_endpoints(f, g)
    # h has no loops, so a collapsed edge fails the adjacency lookup
    return bool(np.take(h.adjacency.ravel(), fu * h.order + fv).all())


def image_covers(f: VertexMap, g: Graph, h: Graph) -> bool:
    """Vertex image is all of ``V(h)`` and edge image is exactly ``E(h)``."""
    _check_dims(f, g, h)
    n = h.order
    hit = np.zeros(n, dtype=bool)
    hit[f.images] = True
    if not hit.all():
        return False
    if g.size == 0:
        return h.size == 0
    fu, fv = _mapped_endpoints(f, g)
    seen = np.zeros(n * n, dtype=bool)
    seen[fu * n + fv] = True
    seen = seen.reshape(n, n)
    seen |= seen.T
    if seen.diagonal().any():
        return False
    u, v = h.endpoints
    return bool(seen[u, v].all()) and int(seen.sum()) == 2 * h.size


def is_embedding(f: VertexMap, g: Graph, host: Graph) -> bool:
    """Injective homomorphism (non-induced)."""
    _check_dims(f, g, host)
    return f.is_injective() and is_homomorphism(f, g, host)


def is_isomorphism(f: VertexMap, g: Graph, h: Graph) -> bool:
    """Bijection preserving adjacency and non-adjacency."""
    _check_dims(f, g, h)
    if g.order != h.order or g.size != h.size or not f.is_injective():
        return False
    # bijective + equal edge counts: edge preservation forces non-edge preservation
    return is_homomorphism(f, g, h)


def is_proper_coloring(c: Coloring, g: Graph) -> bool:
    if len(c) != g.order:
        raise DimensionError(f"coloring has {len(c)} entries for a graph of order {g.order}")
    if len(c) and (c.colors.min() < 1 or c.colors.max() > c.k):
        return False
    if g.size == 0:
        return True
    return bool(np.all(c.colors[g.edges[:, 0]] != c.colors[g.edges[:, 1]]))


def is_subgraph_of(s: SubgraphRef, host: Graph) -> bool:
    if s.host_order != host.order:
        return False
    if len(s.vertices) and (s.vertices[0] < 0 or s.vertices[-1] >= host.order):
        return False
    if len(s.edges) == 0:
        return True
    if np.any(s.local_index(s.edges.ravel()) < 0):
        return False
    return bool(host.adjacency[s.edges[:, 0], s.edges[:, 1]].all())


# --------------------------------------------------------------------------- map algebra


def compose(f: VertexMap, g: VertexMap) -> VertexMap:
    """``f`` then ``g``: the result sends ``v`` to ``g(f(v))``."""
    if f.codomain_order != g.domain_order:
        raise DimensionError(f"cannot compose {f.domain_order}->{f.codomain_order} "
                             f"with {g.domain_order}->{g.codomain_order}")
    return VertexMap(g.images[f.images], g.codomain_order)


def restrict(f: VertexMap, s: SubgraphRef) -> VertexMap:
    """Restriction of ``f`` to the vertices of ``s``, re-indexed densely in sorted order."""
    if len(s.vertices) and s.vertices[-1] >= f.domain_order:
        raise DimensionError(f"subgraph vertex {int(s.vertices[-1])} outside map domain {f.domain_order}")
    return VertexMap(f.images[s.vertices], f.codomain_order)


def relabel(g: Graph, perm: VertexMap) -> Graph:
    """Image of ``g`` under the bijection ``perm``."""
    if perm.domain_order != g.order or not perm.is_bijective():
        raise ValueError("relabel needs a bijection on the graph's vertices")
    return Graph._trusted(g.order, perm.images[g.edges])


def graph_of(s: SubgraphRef) -> Graph:
    """The subgraph as a standalone graph on ``0..|V(s)|-1``."""
    local = s.local_index(s.edges.ravel()).reshape(-1, 2)
    if np.any(local < 0):
        raise ValueError("subgraph edge has an endpoint outside its vertex set")
    return Graph._trusted(len(s.vertices), local)


def subgraph_image(f: VertexMap, s: SubgraphRef) -> SubgraphRef:
    """``f(s)`` as a subgraph of ``f``'s codomain (``f`` should be injective on ``s``)."""
    if s.host_order != f.domain_order:
        raise DimensionError("subgraph host does not match map domain")
    return SubgraphRef(f.codomain_order, f.images[s.vertices], f.images[s.edges] if len(s.edges) else ())


# --------------------------------------------------------------------------- constructions


def tensor_product(g1: Graph, g2: Graph) -> Graph:
    """Categorical product; vertex ``(u, v)`` is encoded as ``u * g2.order + v``."""
    n2 = g2.order
    order = g1.order * n2
    if g1.size == 0 or g2.size == 0:
        return Graph._trusted(order, np.empty((0, 2), dtype=np.int64), presorted=True)
    u1 = g1.edges[:, 0][:, None]
    u2 = g1.edges[:, 1][:, None]
    v1 = g2.edges[:, 0][None, :]
    v2 = g2.edges[:, 1][None, :]
    # each pair of edges yields (u1,v1)-(u2,v2) and (u1,v2)-(u2,v1)
    a = np.concatenate([(u1 * n2 + v1).ravel(), (u1 * n2 + v2).ravel()])
    b = np.concatenate([(u2 * n2 + v2).ravel(), (u2 * n2 + v1).ravel()])
    return Graph._trusted(order, np.stack([a, b], axis=1))


def projection(n1: int, n2: int, coordinate: int) -> VertexMap:
    """Coordinate projection of the row-major encoded product of orders ``n1`` and ``n2``."""
    ids = np.arange(n1 * n2)
    if coordinate == 0:
        return VertexMap(ids // n2 if n2 else ids, n1)
    return VertexMap(ids % n2 if n2 else ids, n2)


def random_graph(n: int, p: float, rng: SplitMix64) -> Graph:
    """G(n, p): one uniform draw per pair ``(i, j)``, ``i < j``, in lexicographic order."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph._trusted(n, np.stack([iu[keep], ju[keep]], axis=1), presorted=True)


def blow_up(base: Graph, class_sizes: Sequence[int], p_edge: float,
            rng: SplitMix64) -> tuple[Graph, VertexMap]:
    """Replace each base vertex by an independent class and return ``(big, projection)``.

    Classes occupy contiguous id blocks in base-vertex order.  For every base edge
    ``(a, b)`` (canonical order) the ``|A| * |B|`` cross pairs are enumerated row-major
    and each draws one uniform; afterwards, each base edge that received no pair gets
    one forced pair chosen by ``randbelow(|A| * |B|)``, in base-edge order.
    """
    sizes = np.array(class_sizes, dtype=np.int64)
    if len(sizes) != base.order:
        raise ValueError("need one class size per base vertex")
    if len(sizes) and sizes.min() < 1:
        raise ValueError("every class must be non-empty")
    if not 0.0 < p_edge <= 1.0:
        raise ValueError("p_edge must lie in (0, 1]")
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    proj = VertexMap(np.repeat(np.arange(base.order), sizes), base.order)
    if base.size == 0:
        return Graph._trusted(total, np.empty((0, 2), dtype=np.int64), presorted=True), proj

    a = base.edges[:, 0]
    b = base.edges[:, 1]
    counts = sizes[a] * sizes[b]
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    edge_idx = np.repeat(np.arange(base.size), counts)
    t = np.arange(int(counts.sum())) - np.repeat(starts, counts)
    sb = sizes[b][edge_idx]
    left = offsets[a][edge_idx] + t // sb
    right = offsets[b][edge_idx] + t % sb

    keep = rng.random(len(t)) < p_edge
    hits = np.bincount(edge_idx[keep], minlength=base.size)
    for e in np.flatnonzero(hits == 0).tolist():
        keep[starts[e] + rng.randbelow(int(counts[e]))] = True
    return Graph._trusted(total, np.stack([left[keep], right[keep]], axis=1)), proj


def is_connected(g: Graph) -> bool:
    if g.order <= 1:
        return True
    nbrs = g.neighbors()
    seen = [False] * g.order
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for w in nbrs[u]:
            if not seen[w]:
                seen[w] = True
                count += 1
                queue.append(w)
    return count == g.order


def is_bipartite(g: Graph) -> bool:
    nbrs = g.neighbors()
    side = [-1] * g.order
    for root in range(g.order):
        if side[root] >= 0:
            continue
        side[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in nbrs[u]:
                if side[w] < 0:
                    side[w] = 1 - side[u]
                    queue.append(w)
                elif side[w] == side[u]:
                    return False
    return True


# small named graphs, mostly for tests and demos

def empty_graph(n: int) -> Graph:
    return Graph(n)


def complete_graph(n: int) -> Graph:
    iu, ju = np.triu_indices(n, k=1)
    return Graph._trusted(n, np.stack([iu, ju], axis=1), presorted=True)


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a simple cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def disjoint_union(g: Graph, h: Graph) -> Graph:
    return Graph._trusted(g.order + h.order, np.concatenate([g.edges, h.edges + g.order]), presorted=True)
