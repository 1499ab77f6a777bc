import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphauth import messages as M
from graphauth.attacks import (
    AttackInapplicable,
    AttackReport,
    ExtractionError,
    GenericCheater,
    GiRecoveryAdversary,
    TensorForgery,
    attempt_recovery,
    evaluate_adversary,
    evaluate_gi_impersonation,
    evaluate_key_recovery,
    extract_gcsgip_witness,
    extract_sgip_witness,
    generic_cheater,
    gi_key_recovery,
    observe_rounds,
    tensor_forgery,
)
from graphauth.gisolver import brute_force_isomorphism, find_embedding
from graphauth.graphs import (
    Coloring,
    Graph,
    VertexMap,
    complete_graph,
    graph_of,
    image_covers,
    is_homomorphism,
    is_isomorphism,
    is_proper_coloring,
    is_subgraph_of,
    projection,
)
from graphauth.keygen import (
    GcPublic,
    GhPublic,
    ProtocolKind,
    gen_gc_key,
    gen_gcsgip_key,
    gen_sgip_key,
    generate_key,
)
from graphauth.messages import ColoredSubgraph, MapResponse, SubgraphAndMap
from graphauth.protocols import CommitOptions, HonestProver, commit, respond, run_session, verify
from graphauth.rng import SplitMix64

from conftest import ALL_KINDS, small_key

K3 = complete_graph(3)


# --------------------------------------------------------------------------- tensor forgery

def test_tensor_forgery_on_k3_k3():
    forger = tensor_forgery(GhPublic(K3, K3))
    c = forger.commit(SplitMix64(0))
    assert (c.graph.order, c.graph.size) == (9, 18)
    for b in (0, 1):
        f = forger.respond(b).map
        assert is_homomorphism(f, c.graph, K3) and image_covers(f, c.graph, K3)


def test_tensor_forgery_inapplicable_without_edges():
    with pytest.raises(AttackInapplicable):
        tensor_forgery(GhPublic(K3, Graph(3)))
    with pytest.raises(AttackInapplicable):
        tensor_forgery(small_key("gc").public)


@given(st.integers(0, 2**32))
def test_tensor_forgery_passes_both_bits_every_round(seed):
    key = small_key("gh", seed % 97)
    forger = TensorForgery(key.public)
    c = forger.commit(SplitMix64(seed))
    for b in (0, 1):
        assert verify(key.public, c, b, forger.respond(b)).accepted


def test_tensor_forgery_wins_gh_sessions():
    key = small_key("gh", 1)
    report = evaluate_adversary(tensor_forgery(key.public), key.public, 20, 10, 5, attack="tensor")
    assert report.success_rate == 1.0 and report.rounds_accepted == 200


def test_tensor_forgery_fails_sgip_at_b0():
    key = small_key("sgip", 1)
    forger = tensor_forgery(key.public)
    c = forger.commit(SplitMix64(0))
    r0 = forger.respond(0)
    assert not r0.map.is_injective()
    assert verify(key.public, c, 0, r0).reason == M.NOT_EMBEDDING
    assert not verify(key.public, c, 1, forger.respond(1)).accepted


# --------------------------------------------------------------------------- generic cheater

@pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.value)
def test_cheater_wins_exactly_when_the_guess_is_right(kind):
    key = small_key(kind, 2)
    cheater = generic_cheater(key.public, kind)
    rng = SplitMix64(17)
    for i in range(60):
        c = cheater.commit(rng)
        b = i % 2
        verdict = verify(key.public, c, b, cheater.respond(b))
        assert verdict.accepted == (b == cheater.guess), (kind, i)
        if not verdict.accepted:
            assert verdict.reason not in (M.MALFORMED, M.BAD_COMMITMENT)


@pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.value)
def test_cheater_at_default_parameters(kind):
    key = generate_key(kind, 3)
    cheater = GenericCheater(key.public)
    rng = SplitMix64(3)
    for b in (0, 1, 0, 1):
        c = cheater.commit(rng)
        assert verify(key.public, c, b, cheater.respond(b)).accepted == (b == cheater.guess)


def test_cheater_kind_must_match():
    with pytest.raises(ValueError):
        generic_cheater(small_key("gc").public, "gh")


def test_adversaries_refuse_key_pairs():
    key = small_key("gc")
    for build in (GenericCheater, lambda k: GiRecoveryAdversary(k, [])):
        with pytest.raises(TypeError):
            build(key)
    with pytest.raises(TypeError):
        TensorForgery(small_key("gh"))


def test_cheater_round_rate_is_about_half():
    key = small_key("gc", 4)
    report = evaluate_adversary(lambda: generic_cheater(key.public), key.public, 100, 10, 8,
                                stop_on_reject=False)
    assert report.rounds_played == 1000
    assert 0.42 < report.round_success_rate < 0.58
    assert report.successes <= 2


# --------------------------------------------------------------------------- colouring recovery

def test_recovery_with_pinned_commitment_returns_observed_colouring():
    key = small_key("gc", 3)
    c, secret = commit(key, SplitMix64(0), CommitOptions(pin_identity=True))
    r = respond(key, secret, 1)
    recovered = gi_key_recovery(key.public, c.graph, r.coloring)
    assert recovered == r.coloring == key.coloring


def test_recovery_on_random_keys():
    for seed in range(10):
        key = gen_gc_key(50, 5, 0.5, SplitMix64(seed))
        (c, r), = observe_rounds(HonestProver(key), 1, seed)
        recovered = gi_key_recovery(key.public, c.graph, r.coloring)
        assert recovered is not None and is_proper_coloring(recovered, key.public.gamma)


@given(st.integers(0, 2**32))
def test_recovery_transport_matches_brute_force(seed):
    rng = SplitMix64(seed)
    key = gen_gc_key(rng.integers(3, 6), 3, 0.7, rng)
    c, secret = commit(key, rng)
    r = respond(key, secret, 1)
    psi = brute_force_isomorphism(c.graph, key.public.gamma)
    expected = np.empty(key.public.gamma.order, dtype=np.int64)
    expected[psi.images] = r.coloring.colors
    got = gi_key_recovery(key.public, c.graph, r.coloring, solver=brute_force_isomorphism)
    assert got is not None and got.colors.tolist() == expected.tolist()
    assert is_proper_coloring(gi_key_recovery(key.public, c.graph, r.coloring), key.public.gamma)


def test_recovery_returns_none_without_isomorphism():
    public = GcPublic(complete_graph(3), 3)
    path = Graph(3, [(0, 1), (1, 2)])
    assert gi_key_recovery(public, path, Coloring([1, 2, 1], 3)) is None
    assert gi_key_recovery(public, Graph(4), Coloring([1] * 4, 3)) is None


def test_recovery_never_applies_to_gcsgip():
    key = small_key("gcsgip", 5)
    for c, r in observe_rounds(HonestProver(key), 100, 5):
        assert attempt_recovery(key.public, c, r).status == "inapplicable"
    gc_key = small_key("gc", 5)
    (c, r0), = observe_rounds(HonestProver(gc_key), 1, 5, bit=0)
    assert attempt_recovery(gc_key.public, c, r0).status == "inapplicable"


def test_recovery_adversary_impersonates_gc_but_not_gcsgip():
    gc = gen_gc_key(40, 4, 0.5, SplitMix64(1))
    report = evaluate_gi_impersonation(HonestProver(gc), gc.public, 5, 10, 2)
    assert report.success_rate == 1.0
    assert all(o["recovery"] == ["recovered"] for o in report.outcomes)

    gcsgip = small_key("gcsgip", 1)
    adversary = GiRecoveryAdversary(gcsgip.public, observe_rounds(HonestProver(gcsgip), 3, 1))
    assert adversary.recovered is None
    assert [a.status for a in adversary.attempts] == ["inapplicable"] * 3
    assert isinstance(adversary._inner, GenericCheater)


def test_key_recovery_report():
    key = gen_gc_key(30, 3, 0.5, SplitMix64(4))
    report = evaluate_key_recovery(HonestProver(key), key.public, 4, 2, 9)
    assert report.successes == 4
    key2 = small_key("gcsgip", 2)
    report2 = evaluate_key_recovery(HonestProver(key2), key2.public, 4, 2, 9)
    assert report2.successes == 0
    assert all(o["statuses"] == ["inapplicable", "inapplicable"] for o in report2.outcomes)


# --------------------------------------------------------------------------- extractors

def _both(key, rng, options=CommitOptions()):
    c, secret = commit(key, rng, options)
    return c, respond(key, secret, 0), respond(key, secret, 1)


def test_sgip_extractor_with_pinned_randomness_returns_planted_witness():
    key = small_key("sgip", 6)
    c, r0, r1 = _both(key, SplitMix64(0), CommitOptions(pin_identity=True, breadth=0.0))
    sub, iso = extract_sgip_witness(key.public, c, r0, r1)
    assert sub == key.g1_ref and iso == key.alpha


def test_gcsgip_extractor_with_pinned_randomness_returns_planted_witness():
    key = small_key("gcsgip", 6)
    c, r0, r1 = _both(key, SplitMix64(0), CommitOptions(pin_identity=True, breadth=0.0))
    sub, col = extract_gcsgip_witness(key.public, c, r0, r1)
    assert sub == key.g1_ref and col == key.coloring


def test_extractors_on_100_seeds():
    for seed in range(100):
        key = small_key("sgip", seed)
        sub, iso = extract_sgip_witness(key.public, *_both(key, SplitMix64(seed)))
        assert is_subgraph_of(sub, key.public.omega)
        assert is_isomorphism(iso, graph_of(sub), key.public.g2)

        key = small_key("gcsgip", seed)
        sub, col = extract_gcsgip_witness(key.public, *_both(key, SplitMix64(seed)))
        assert is_subgraph_of(sub, key.public.gamma) and sub.order == key.public.n
        assert is_proper_coloring(col, graph_of(sub))


def test_extractors_on_perturbed_valid_responses():
    rng = SplitMix64(12)
    for seed in range(15):
        # SGIP: replace the honest embedding by whatever the search finds
        key = gen_sgip_key(6, 0.5, 10, 0.5, SplitMix64(seed))
        c, r0, r1 = _both(key, rng)
        other = find_embedding(c.graph, key.public.omega)
        assert other.found
        sub, iso = extract_sgip_witness(key.public, c, MapResponse(other.mapping), r1)
        assert is_subgraph_of(sub, key.public.omega)
        assert is_isomorphism(iso, graph_of(sub), key.public.g2)

        # GCSGIP: rename the colour classes of the revealed colouring
        key = gen_gcsgip_key(12, 6, 3, 0.6, 0.5, SplitMix64(seed))
        c, r0, r1 = _both(key, rng)
        rename = np.array([0, 3, 1, 2])
        recoloured = ColoredSubgraph(r1.subgraph, Coloring(rename[r1.coloring.colors], 3))
        assert verify(key.public, c, 1, recoloured).accepted
        sub, col = extract_gcsgip_witness(key.public, c, r0, recoloured)
        assert sub.order == key.public.n and is_proper_coloring(col, graph_of(sub))


def test_extractor_reports_which_response_failed():
    key = small_key("sgip", 3)
    c, r0, r1 = _both(key, SplitMix64(3))
    images = r1.map.images.copy()
    images[0] = images[1]
    tampered = SubgraphAndMap(r1.subgraph, VertexMap(images, r1.map.codomain_order))
    with pytest.raises(ExtractionError) as err:
        extract_sgip_witness(key.public, c, r0, tampered)
    assert err.value.bit == 1 and err.value.verdict.reason == M.NOT_ISOMORPHISM

    collapsed = MapResponse(VertexMap(np.zeros(c.graph.order, dtype=np.int64), r0.map.codomain_order))
    with pytest.raises(ExtractionError) as err:
        extract_sgip_witness(key.public, c, collapsed, r1)
    assert err.value.bit == 0

    key = small_key("gcsgip", 3)
    c, r0, r1 = _both(key, SplitMix64(3))
    with pytest.raises(ExtractionError) as err:
        extract_gcsgip_witness(key.public, c, r1, r1)
    assert err.value.bit == 0 and err.value.verdict.reason == M.WRONG_VARIANT


# --------------------------------------------------------------------------- reports

def test_report_fields_and_determinism():
    key = small_key("gh", 2)
    a = evaluate_adversary(HonestProver(key), key.public, 6, 5, 77, attack="honest")
    b = evaluate_adversary(HonestProver(key), key.public, 6, 5, 77, attack="honest")
    assert a.to_json() == b.to_json()
    assert a.success_rate == 1.0 and a.successes == a.trials == 6
    doc = json.loads(a.to_json())
    assert "timing" not in doc and doc["format_version"] == 1
    assert set(json.loads(a.to_json(include_timing=True))["timing"]) == {"mean", "median", "max", "total"}
    assert "6/6" in a.summary()


def test_report_seeds_are_derived_per_session():
    key = small_key("gc", 2)
    report = evaluate_adversary(lambda: generic_cheater(key.public), key.public, 5, 3, 1)
    seeds = [o["seed"] for o in report.outcomes]
    assert len(set(seeds)) == 5
    # replaying one session by its recorded seed reproduces its outcome
    t = run_session(generic_cheater(key.public), key.public, 3, seeds[2])
    assert t.accepted == report.outcomes[2]["success"]


def test_empty_report():
    r = AttackReport("x", ProtocolKind.GC, 0, 1, note="inapplicable: test")
    assert r.success_rate == 0.0 and r.round_success_rate == 0.0
    assert "inapplicable" in r.summary()
    assert json.loads(r.to_json())["note"] == "inapplicable: test"
    with pytest.raises(ValueError):
        evaluate_adversary(HonestProver(small_key("gc")), small_key("gc").public, 0, 1, 0)


def test_projection_helper_matches_forgery_maps():
    key = small_key("gh", 0)
    forger = tensor_forgery(key.public)
    g1, g2 = key.public.g1, key.public.g2
    assert forger.respond(0).map == projection(g1.order, g2.order, 0)
    assert forger.respond(1).map == projection(g1.order, g2.order, 1)
