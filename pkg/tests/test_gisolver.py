import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphauth.gisolver import (
    BRUTE_FORCE_MAX_ORDER,
    brute_force_isomorphism,
    find_embedding,
    find_isomorphism,
    wl_refine,
)
from graphauth.graphs import (
    Graph,
    VertexMap,
    complete_graph,
    cycle_graph,
    disjoint_union,
    graph_of,
    is_embedding,
    is_isomorphism,
    path_graph,
    random_graph,
    relabel,
)
from graphauth.keygen import gen_sgip_key
from graphauth.rng import SplitMix64

from conftest import graphs, permutations

C6 = cycle_graph(6)
TWO_TRIANGLES = disjoint_union(complete_graph(3), complete_graph(3))


def from_nx(h):
    mapping = {v: i for i, v in enumerate(sorted(h.nodes()))}
    return Graph(len(mapping), [(mapping[u], mapping[v]) for u, v in h.edges()])


def is_equitable(g, cells):
    cells = np.asarray(cells)
    adj = g.adjacency.astype(np.int64)
    k = cells.max() + 1 if len(cells) else 0
    counts = np.stack([adj[:, cells == c].sum(axis=1) for c in range(k)], axis=1) if k else adj
    for c in range(k):
        rows = counts[cells == c]
        if len(rows) and not (rows == rows[0]).all():
            return False
    return True


# --------------------------------------------------------------------------- refinement

def test_complete_graph_is_one_cell():
    assert wl_refine(complete_graph(5)).num_cells == 1


def test_path_splits_ends_from_middle():
    p = wl_refine(path_graph(3))
    assert p.num_cells == 2
    assert p.cells[0] == p.cells[2] != p.cells[1]


def test_wl_cannot_tell_c6_from_two_triangles():
    assert wl_refine(C6).signature == wl_refine(TWO_TRIANGLES).signature
    assert brute_force_isomorphism(C6, TWO_TRIANGLES) is None
    assert find_isomorphism(C6, TWO_TRIANGLES) is None


def test_initial_partition_is_respected():
    p = wl_refine(cycle_graph(4), initial=[0, 1, 1, 1])
    assert p.cells[0] not in p.cells[1:]
    assert p.cells[1] == p.cells[3] != p.cells[2]


@given(graphs(max_order=12), st.data())
def test_refinement_is_equitable_and_relabel_invariant(g, data):
    p = wl_refine(g)
    assert is_equitable(g, p.cells)
    perm = data.draw(permutations(g.order))
    q = wl_refine(relabel(g, perm))
    assert p.signature == q.signature
    # canonical cell ids travel with the vertices
    assert [q.cells[perm[v]] for v in range(g.order)] == list(p.cells)


# --------------------------------------------------------------------------- isomorphism

def test_k3_vs_p3_has_no_isomorphism():
    assert find_isomorphism(complete_graph(3), path_graph(3)) is None


def test_brute_force_examples():
    g = cycle_graph(5)
    assert brute_force_isomorphism(g, g) == VertexMap.identity(5)
    assert brute_force_isomorphism(cycle_graph(4), complete_graph(4)) is None
    with pytest.raises(ValueError):
        brute_force_isomorphism(Graph(BRUTE_FORCE_MAX_ORDER + 1), Graph(BRUTE_FORCE_MAX_ORDER + 1))


def test_isomorphism_on_200_random_relabelings():
    rng = SplitMix64(2024)
    for _ in range(200):
        n = rng.integers(1, 40)
        g = random_graph(n, rng.random(), rng)
        perm = VertexMap(rng.permutation(n), n)
        h = relabel(g, perm)
        f = find_isomorphism(g, h)
        assert f is not None and is_isomorphism(f, g, h)


@given(graphs(max_order=7), graphs(max_order=7))
def test_solver_agrees_with_brute_force(g, h):
    fast, slow = find_isomorphism(g, h), brute_force_isomorphism(g, h)
    assert (fast is None) == (slow is None)
    if fast is not None:
        assert is_isomorphism(fast, g, h)


def test_atlas_pairs_with_five_vertices():
    # every pair of 5-vertex atlas graphs plus shuffled copies, both directions
    rng = SplitMix64(5)
    base = [from_nx(a) for a in nx.graph_atlas_g() if a.number_of_nodes() == 5]
    catalog = base + [relabel(g, VertexMap(rng.permutation(5), 5)) for g in base]
    for i, g in enumerate(catalog):
        for h in catalog:
            fast, slow = find_isomorphism(g, h), brute_force_isomorphism(g, h)
            assert (fast is None) == (slow is None)
            assert (fast is not None) == (i % len(base) == catalog.index(h) % len(base))


def test_regular_graphs_need_backtracking():
    # strongly regular-ish inputs where refinement stays coarse
    petersen = from_nx(nx.petersen_graph())
    rng = SplitMix64(8)
    shuffled = relabel(petersen, VertexMap(rng.permutation(10), 10))
    f = find_isomorphism(petersen, shuffled)
    assert f is not None and is_isomorphism(f, petersen, shuffled)
    # 3-regular on 10 vertices but not Petersen: the 5-prism
    prism = from_nx(nx.circular_ladder_graph(5))
    assert find_isomorphism(petersen, prism) is None


def test_none_is_consistent_with_invariants():
    assert find_isomorphism(path_graph(4), path_graph(5)) is None
    assert find_isomorphism(path_graph(4), cycle_graph(4)) is None


# --------------------------------------------------------------------------- embedding

def test_embedding_examples():
    r = find_embedding(path_graph(3), cycle_graph(4))
    assert r.found and is_embedding(r.mapping, path_graph(3), cycle_graph(4))
    assert find_embedding(complete_graph(4), cycle_graph(5)).status == "none"


def test_embedding_finds_planted_copy():
    for seed in range(10):
        key = gen_sgip_key(8, 0.5, 16, 0.5, SplitMix64(seed))
        r = find_embedding(key.public.g2, key.public.omega)
        assert r.found and is_embedding(r.mapping, key.public.g2, key.public.omega)
        g1 = graph_of(key.g1_ref)
        assert find_embedding(g1, key.public.omega).found


def test_embedding_budget_is_a_third_outcome():
    # odd cycles never fit in a bipartite host; a tiny budget gives up before proving it
    k44 = from_nx(nx.complete_bipartite_graph(4, 4))
    assert find_embedding(complete_graph(3), k44).status == "none"
    r = find_embedding(cycle_graph(7), k44, node_budget=5)
    assert r.status == "budget" and r.mapping is None and r.nodes > 5
    with pytest.raises(ValueError):
        find_embedding(path_graph(2), k44, node_budget=0)


@given(graphs(max_order=6), graphs(max_order=7))
def test_embedding_soundness_and_completeness_small(pattern, host):
    r = find_embedding(pattern, host)
    assert r.status in ("found", "none")
    if r.found:
        assert is_embedding(r.mapping, pattern, host)
    elif pattern.order <= host.order:
        hn, pn = nx.Graph(), nx.Graph()
        hn.add_nodes_from(range(host.order))
        hn.add_edges_from(host.edge_list())
        pn.add_nodes_from(range(pattern.order))
        pn.add_edges_from(pattern.edge_list())
        assert not nx.algorithms.isomorphism.GraphMatcher(hn, pn).subgraph_is_monomorphic()
