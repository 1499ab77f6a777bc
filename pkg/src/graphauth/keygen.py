"""Planted key pairs for the four identification schemes.

Each generator builds the public instance around a secret it plants itself:
a projection (GH), an embedded copy of a graph (SGIP), a colouring (GC), or a
coloured subgraph (GC+SGIP).

Default parameters are artifact defaults, not security recommendations:

====== ===============================================================
GH     base_order 40, base_p 0.3, class sizes 2-4, p_edge 0.5
SGIP   m 30, p 0.5, big_order 100, decoy_p 0.5
GC     n 100, k 5, cross_p 0.5
GCSGIP total_order 150, n 60, k 5, cross_p 0.5, ambient_p 0.5
====== ===============================================================
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from .graphs import (
    Coloring,
    Graph,
    SubgraphRef,
    VertexMap,
    blow_up,
    compose,
    graph_of,
    image_covers,
    is_bipartite,
    is_connected,
    is_homomorphism,
    is_isomorphism,
    is_proper_coloring,
    is_subgraph_of,
    random_graph,
    relabel,
)
from .rng import SplitMix64

GH_RESAMPLE_BUDGET = 1000


class ProtocolKind(str, enum.Enum):
    GH = "gh"
    SGIP = "sgip"
    GC = "gc"
    GCSGIP = "gcsgip"


DEFAULT_PARAMS: dict[ProtocolKind, dict] = {
    ProtocolKind.GH: {"base_order": 40, "base_p": 0.3, "class_size_range": (2, 4), "p_edge": 0.5},
    ProtocolKind.SGIP: {"m": 30, "p": 0.5, "big_order": 100, "decoy_p": 0.5},
    ProtocolKind.GC: {"n": 100, "k": 5, "cross_p": 0.5},
    ProtocolKind.GCSGIP: {"total_order": 150, "n": 60, "k": 5, "cross_p": 0.5, "ambient_p": 0.5},
}


class KeyGenerationError(RuntimeError):
    pass


# --------------------------------------------------------------------------- public halves


@dataclass(frozen=True)
class GhPublic:
    g1: Graph
    g2: Graph
    kind = ProtocolKind.GH


@dataclass(frozen=True)
class SgipPublic:
    omega: Graph
    g2: Graph
    kind = ProtocolKind.SGIP


@dataclass(frozen=True)
class GcPublic:
    gamma: Graph
    k: int
    kind = ProtocolKind.GC


@dataclass(frozen=True)
class GcSgipPublic:
    gamma: Graph
    n: int
    k: int
    kind = ProtocolKind.GCSGIP


PublicKey = Union[GhPublic, SgipPublic, GcPublic, GcSgipPublic]


# --------------------------------------------------------------------------- key pairs


@dataclass(frozen=True)
class GhKeyPair:
    """``alpha`` is a surjective homomorphism ``g1 -> g2``."""

    public: GhPublic
    alpha: VertexMap
    params: dict = field(default_factory=dict, compare=False)
    seed: int | None = field(default=None, compare=False)
    kind = ProtocolKind.GH

    def is_valid(self) -> bool:
        g1, g2 = self.public.g1, self.public.g2
        return is_homomorphism(self.alpha, g1, g2) and image_covers(self.alpha, g1, g2)


@dataclass(frozen=True)
class SgipKeyPair:
    """``g1_ref`` is a subgraph of ``omega``; ``alpha`` an isomorphism from it onto ``g2``."""

    public: SgipPublic
    g1_ref: SubgraphRef
    alpha: VertexMap
    params: dict = field(default_factory=dict, compare=False)
    seed: int | None = field(default=None, compare=False)
    kind = ProtocolKind.SGIP

    def is_valid(self) -> bool:
        if not is_subgraph_of(self.g1_ref, self.public.omega):
            return False
        g1 = graph_of(self.g1_ref)
        return (self.alpha.domain_order == g1.order
                and self.alpha.codomain_order == self.public.g2.order
                and is_isomorphism(self.alpha, g1, self.public.g2))


@dataclass(frozen=True)
class GcKeyPair:
    public: GcPublic
    coloring: Coloring
    params: dict = field(default_factory=dict, compare=False)
    seed: int | None = field(default=None, compare=False)
    kind = ProtocolKind.GC

    def is_valid(self) -> bool:
        c = self.coloring
        return (len(c) == self.public.gamma.order and c.k <= self.public.k
                and is_proper_coloring(c, self.public.gamma))


@dataclass(frozen=True)
class GcSgipKeyPair:
    """``coloring`` is indexed by the dense (sorted) vertex order of ``g1_ref``."""

    public: GcSgipPublic
    g1_ref: SubgraphRef
    coloring: Coloring
    params: dict = field(default_factory=dict, compare=False)
    seed: int | None = field(default=None, compare=False)
    kind = ProtocolKind.GCSGIP

    def is_valid(self) -> bool:
        pub = self.public
        if not is_subgraph_of(self.g1_ref, pub.gamma) or self.g1_ref.order != pub.n:
            return False
        c = self.coloring
        return len(c) == pub.n and c.k <= pub.k and is_proper_coloring(c, graph_of(self.g1_ref))


KeyPair = Union[GhKeyPair, SgipKeyPair, GcKeyPair, GcSgipKeyPair]


# --------------------------------------------------------------------------- generators


def gen_gh_key(base_order: int = 40, base_p: float = 0.3, class_size_range: tuple[int, int] = (2, 4),
               p_edge: float = 0.5, rng: SplitMix64 | None = None, *, shuffle: bool = True,
               max_attempts: int = GH_RESAMPLE_BUDGET) -> GhKeyPair:
    """Blow up a random connected non-bipartite graph ``g2`` into ``g1``.

    ``g2`` is resampled until it is connected and non-bipartite (homomorphisms onto a
    bipartite target are easy to find).  With ``shuffle`` the blown-up graph is
    relabelled by a random permutation so that class membership is not visible in the
    vertex ids.
    """
    if rng is None:
        raise TypeError("gen_gh_key needs an explicit generator")
    if base_order < 3:
        raise ValueError("base_order must be at least 3")
    if not 0.0 < base_p <= 1.0:
        raise ValueError("base_p must lie in (0, 1]")
    lo, hi = class_size_range
    if lo < 1 or hi < lo:
        raise ValueError("class_size_range must satisfy 1 <= low <= high")
    for _ in range(max_attempts):
        g2 = random_graph(base_order, base_p, rng)
        if is_connected(g2) and not is_bipartite(g2):
            break
    else:
        raise KeyGenerationError(
            f"no connected non-bipartite base graph in {max_attempts} attempts "
            f"(base_order={base_order}, base_p={base_p})")
    sizes = [rng.integers(lo, hi) for _ in range(base_order)]
    big, proj = blow_up(g2, sizes, p_edge, rng)
    if shuffle:
        perm = VertexMap(rng.permutation(big.order), big.order)
        g1 = relabel(big, perm)
        alpha = compose(perm.inverse(), proj)
    else:
        g1, alpha = big, proj
    params = {"base_order": base_order, "base_p": base_p,
              "class_size_range": [lo, hi], "p_edge": p_edge, "shuffle": shuffle}
    return GhKeyPair(GhPublic(g1, g2), alpha, params)


def gen_sgip_key(m: int = 30, p: float = 0.5, big_order: int = 100, decoy_p: float = 0.5,
                 rng: SplitMix64 | None = None) -> SgipKeyPair:
    """Plant a copy of ``g2 = G(m, p)`` in ``omega`` and cover it with decoy edges.

    Every vertex pair of ``omega`` outside the planted copy (pairs among planted
    vertices included) is added with probability ``decoy_p``; one draw per pair in
    lexicographic order, drawn for all pairs.
    """
    if rng is None:
        raise TypeError("gen_sgip_key needs an explicit generator")
    if not 3 <= m <= big_order:
        raise ValueError("need 3 <= m <= big_order")
    g2 = random_graph(m, p, rng)
    inj = rng.permutation(big_order)[:m]
    planted = inj[g2.edges] if g2.size else np.empty((0, 2), dtype=np.int64)
    planted_mask = np.zeros((big_order, big_order), dtype=bool)
    if len(planted):
        planted_mask[planted[:, 0], planted[:, 1]] = True
        planted_mask[planted[:, 1], planted[:, 0]] = True
    iu, ju = np.triu_indices(big_order, k=1)
    decoy = (rng.random(len(iu)) < decoy_p) & ~planted_mask[iu, ju]
    keep = decoy | planted_mask[iu, ju]
    omega = Graph._trusted(big_order, np.stack([iu[keep], ju[keep]], axis=1), presorted=True)
    g1_ref = SubgraphRef(big_order, inj, planted)
    # dense vertex j of g1_ref is host vertex sorted(inj)[j], i.e. g2 vertex argsort(inj)[j]
    alpha = VertexMap(np.argsort(inj, kind="stable"), m)
    params = {"m": m, "p": p, "big_order": big_order, "decoy_p": decoy_p}
    return SgipKeyPair(SgipPublic(omega, g2), g1_ref, alpha, params)


def _planted_colored_edges(n: int, colors: np.ndarray, cross_p: float, rng: SplitMix64) -> np.ndarray:
    iu, ju = np.triu_indices(n, k=1)
    keep = (rng.random(len(iu)) < cross_p) & (colors[iu] != colors[ju])
    return np.stack([iu[keep], ju[keep]], axis=1)


def gen_gc_key(n: int = 100, k: int = 5, cross_p: float = 0.5,
               rng: SplitMix64 | None = None) -> GcKeyPair:
    """Uniform random colours, then each bichromatic pair kept with probability ``cross_p``."""
    if rng is None:
        raise TypeError("gen_gc_key needs an explicit generator")
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    colors = np.array([rng.integers(1, k) for _ in range(n)], dtype=np.int64)
    gamma = Graph._trusted(n, _planted_colored_edges(n, colors, cross_p, rng), presorted=True)
    params = {"n": n, "k": k, "cross_p": cross_p}
    return GcKeyPair(GcPublic(gamma, k), Coloring(colors, k), params)


def gen_gcsgip_key(total_order: int = 150, n: int = 60, k: int = 5, cross_p: float = 0.5,
                   ambient_p: float = 0.5, rng: SplitMix64 | None = None) -> GcSgipKeyPair:
    """Plant a ``k``-coloured graph on a random ``n``-subset, then add ambient edges.

    Ambient edges go anywhere outside the planted edge set, including monochromatic
    pairs inside the subset: only the planted subgraph's own edges must be properly
    coloured.
    """
    if rng is None:
        raise TypeError("gen_gcsgip_key needs an explicit generator")
    if not 1 <= n <= total_order:
        raise ValueError("need 1 <= n <= total_order")
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    subset = rng.sample(total_order, n)
    colors = np.array([rng.integers(1, k) for _ in range(n)], dtype=np.int64)
    local = _planted_colored_edges(n, colors, cross_p, rng)
    planted = subset[local] if len(local) else np.empty((0, 2), dtype=np.int64)
    planted_mask = np.zeros((total_order, total_order), dtype=bool)
    if len(planted):
        planted_mask[planted[:, 0], planted[:, 1]] = True
    iu, ju = np.triu_indices(total_order, k=1)
    keep = (rng.random(len(iu)) < ambient_p) | planted_mask[iu, ju]
    gamma = Graph._trusted(total_order, np.stack([iu[keep], ju[keep]], axis=1), presorted=True)
    g1_ref = SubgraphRef(total_order, subset, planted)
    params = {"total_order": total_order, "n": n, "k": k, "cross_p": cross_p, "ambient_p": ambient_p}
    return GcSgipKeyPair(GcSgipPublic(gamma, n, k), g1_ref, Coloring(colors, k), params)


_GENERATORS = {
    ProtocolKind.GH: gen_gh_key,
    ProtocolKind.SGIP: gen_sgip_key,
    ProtocolKind.GC: gen_gc_key,
    ProtocolKind.GCSGIP: gen_gcsgip_key,
}


def generate_key(kind: ProtocolKind | str, seed: int, **overrides) -> KeyPair:
    """Key of the given kind from default parameters plus ``overrides``, seeded by ``seed``."""
    kind = ProtocolKind(kind)
    params = dict(DEFAULT_PARAMS[kind])
    unknown = set(overrides) - set(params) - {"shuffle"}
    if unknown:
        raise ValueError(f"unknown {kind.value} parameters: {sorted(unknown)}")
    params.update(overrides)
    rng = SplitMix64.derived(seed, "keygen", kind.value)
    return replace(_GENERATORS[kind](rng=rng, **params), seed=seed)
