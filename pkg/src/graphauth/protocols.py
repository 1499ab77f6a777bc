"""Commit / challenge / respond / verify for the four schemes, and the session driver.

Per round the prover commits to a graph, the verifier draws one bit from its own
seeded stream, the prover answers, and the verifier checks the answer against the
public key only:

====== ============================== ==========================================
kind   b = 0                          b = 1
====== ============================== ==========================================
GH     hom. commitment -> g1, onto    hom. commitment -> g2, onto
SGIP   embedding commitment -> omega  subgraph of commitment + iso onto g2
GC     iso gamma -> commitment        proper k-colouring of commitment
GCSGIP embedding commitment -> gamma  order-n subgraph of commitment + colouring
====== ============================== ==========================================
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Protocol, Union

import numpy as np

from .formats import public_key_digest
from .graphs import (
    Coloring,
    DimensionError,
    Graph,
    SubgraphRef,
    VertexMap,
    blow_up,
    compose,
    graph_of,
    image_covers,
    is_embedding,
    is_homomorphism,
    is_isomorphism,
    is_proper_coloring,
    is_subgraph_of,
    relabel,
    restrict,
)
from .keygen import (
    GcKeyPair,
    GcPublic,
    GcSgipKeyPair,
    GcSgipPublic,
    GhKeyPair,
    GhPublic,
    KeyPair,
    ProtocolKind,
    PublicKey,
    SgipKeyPair,
    SgipPublic,
)
from . import messages as M
from .messages import (
    ACCEPT,
    ColoredSubgraph,
    ColoringOnly,
    Commitment,
    MapResponse,
    ProverAbort,
    Response,
    RoundRecord,
    SubgraphAndMap,
    Transcript,
    Verdict,
)
from .rng import SplitMix64, derive_seed

__all__ = [
    "CommitOptions",
    "GhSecret",
    "SgipSecret",
    "GcSecret",
    "GcSgipSecret",
    "commit",
    "respond",
    "verify",
    "sample_intermediate",
    "hidden_copy",
    "ProverStrategy",
    "HonestProver",
    "VerifierSession",
    "run_session",
    "verify_transcript",
    "session_seeds",
]


@dataclass(frozen=True)
class CommitOptions:
    """Knobs for honest commitments.

    ``breadth`` is the fraction of the available extra vertices (and then extra edges)
    an SGIP / GCSGIP commitment takes beyond the secret subgraph; ``None`` draws the
    count uniformly instead.  ``pin_identity`` removes all relabelling (and, for GH,
    blows up with singleton classes), which makes commitments predictable; it exists
    for tests only.
    """

    class_size_range: tuple[int, int] = (2, 4)
    p_edge: float = 0.5
    breadth: Optional[float] = 0.5
    pin_identity: bool = False


# --------------------------------------------------------------------------- round secrets


@dataclass(frozen=True)
class GhSecret:
    beta: VertexMap            # commitment -> g1, surjective homomorphism


@dataclass(frozen=True)
class SgipSecret:
    beta: VertexMap            # commitment -> omega, embedding
    gamma_ref: SubgraphRef     # inside the commitment, beta(gamma_ref) = g1


@dataclass(frozen=True)
class GcSecret:
    phi: VertexMap             # gamma -> commitment, isomorphism


@dataclass(frozen=True)
class GcSgipSecret:
    alpha: VertexMap           # commitment -> gamma, embedding
    gamma2_ref: SubgraphRef    # inside the commitment, alpha(gamma2_ref) = g1


RoundSecret = Union[GhSecret, SgipSecret, GcSecret, GcSgipSecret]


# --------------------------------------------------------------------------- commit


def _count(available: int, breadth: Optional[float], rng: SplitMix64) -> int:
    if available <= 0:
        return 0
    if breadth is None:
        return rng.integers(0, available)
    return int(np.floor(min(max(breadth, 0.0), 1.0) * available + 0.5))


def sample_intermediate(host: Graph, core: SubgraphRef, rng: SplitMix64, breadth: Optional[float] = 0.5,
                        *, proper: bool = False) -> SubgraphRef:
    """A subgraph of ``host`` containing ``core``: extra vertices first, then extra edges
    among the chosen vertices.  With ``proper`` at least one host vertex is left out
    whenever the core does not already cover the host."""
    inside = np.zeros(host.order, dtype=bool)
    inside[core.vertices] = True
    others = np.flatnonzero(~inside)
    cap = len(others) - 1 if proper and len(others) else len(others)
    extra = others[rng.sample(len(others), _count(cap, breadth, rng))]
    inside[extra] = True
    chosen = np.flatnonzero(inside)

    e = host.edges
    among = inside[e[:, 0]] & inside[e[:, 1]]
    candidates = e[among]
    if len(core.edges):
        core_codes = core.edges[:, 0] * host.order + core.edges[:, 1]
        candidates = candidates[~np.isin(candidates[:, 0] * host.order + candidates[:, 1], core_codes)]
    picked = candidates[rng.sample(len(candidates), _count(len(candidates), breadth, rng))]
    edges = np.concatenate([core.edges, picked]) if len(core.edges) else picked
    return SubgraphRef(host.order, chosen, edges)


def hidden_copy(host: Graph, core: SubgraphRef, rng: SplitMix64, opts: CommitOptions, *, proper: bool):
    """Relabelled copy of an intermediate subgraph: ``(commitment, embedding into host, core inside commitment)``."""
    lam_ref = sample_intermediate(host, core, rng, opts.breadth, proper=proper)
    local = graph_of(lam_ref)
    size = local.order
    rho = VertexMap.identity(size) if opts.pin_identity else VertexMap(rng.permutation(size), size)
    lam = relabel(local, rho)
    beta = VertexMap(lam_ref.vertices[rho.inverse().images], host.order)
    core_vertices = rho.images[lam_ref.local_index(core.vertices)]
    core_edges = rho.images[lam_ref.local_index(core.edges.ravel()).reshape(-1, 2)] if len(core.edges) else ()
    return lam, beta, SubgraphRef(size, core_vertices, core_edges)


def commit(key: KeyPair, rng: SplitMix64, options: CommitOptions = CommitOptions()) -> tuple[Commitment, RoundSecret]:
    """Fresh commitment plus the prover-side secret needed to answer either bit."""
    if isinstance(key, GhKeyPair):
        g1 = key.public.g1
        if options.pin_identity:
            return Commitment(key.kind, g1), GhSecret(VertexMap.identity(g1.order))
        lo, hi = options.class_size_range
        sizes = [rng.integers(lo, hi) for _ in range(g1.order)]
        big, proj = blow_up(g1, sizes, options.p_edge, rng)
        perm = VertexMap(rng.permutation(big.order), big.order)
        return Commitment(key.kind, relabel(big, perm)), GhSecret(compose(perm.inverse(), proj))
    if isinstance(key, SgipKeyPair):
        lam, beta, gamma_ref = hidden_copy(key.public.omega, key.g1_ref, rng, options, proper=False)
        return Commitment(key.kind, lam), SgipSecret(beta, gamma_ref)
    if isinstance(key, GcKeyPair):
        n = key.public.gamma.order
        phi = VertexMap.identity(n) if options.pin_identity else VertexMap(rng.permutation(n), n)
        return Commitment(key.kind, relabel(key.public.gamma, phi)), GcSecret(phi)
    if isinstance(key, GcSgipKeyPair):
        lam, alpha, gamma2_ref = hidden_copy(key.public.gamma, key.g1_ref, rng, options, proper=True)
        return Commitment(key.kind, lam), GcSgipSecret(alpha, gamma2_ref)
    raise TypeError(f"not a key pair: {type(key).__name__}")


# --------------------------------------------------------------------------- respond


def _into_subgraph(f: VertexMap, s: SubgraphRef) -> VertexMap:
    """Re-express a map whose images lie in ``s``'s host as a map into ``graph_of(s)``."""
    local = s.local_index(f.images)
    if np.any(local < 0):
        raise ValueError("map leaves the subgraph")
    return VertexMap(local, s.order)


def respond(key: KeyPair, secret: RoundSecret, b: int) -> Response:
    if b not in (0, 1):
        raise ValueError(f"challenge must be 0 or 1, got {b!r}")
    if isinstance(key, GhKeyPair):
        return MapResponse(secret.beta if b == 0 else compose(secret.beta, key.alpha))
    if isinstance(key, SgipKeyPair):
        if b == 0:
            return MapResponse(secret.beta)
        onto_g1 = _into_subgraph(restrict(secret.beta, secret.gamma_ref), key.g1_ref)
        return SubgraphAndMap(secret.gamma_ref, compose(onto_g1, key.alpha))
    if isinstance(key, GcKeyPair):
        if b == 0:
            return MapResponse(secret.phi)
        # vertex phi(v) of the commitment gets v's colour
        return ColoringOnly(Coloring(key.coloring.colors[secret.phi.inverse().images], key.coloring.k))
    if isinstance(key, GcSgipKeyPair):
        if b == 0:
            return MapResponse(secret.alpha)
        onto_g1 = _into_subgraph(restrict(secret.alpha, secret.gamma2_ref), key.g1_ref)
        return ColoredSubgraph(secret.gamma2_ref, Coloring(key.coloring.colors[onto_g1.images], key.coloring.k))
    raise TypeError(f"not a key pair: {type(key).__name__}")


# --------------------------------------------------------------------------- verify


def _dims_ok(f: VertexMap, domain: int, codomain: int) -> bool:
    return f.domain_order == domain and f.codomain_order == codomain


def _check_onto(f: Response, lam: Graph, target: Graph) -> Verdict:
    if not isinstance(f, MapResponse):
        return Verdict.reject(M.WRONG_VARIANT)
    if not _dims_ok(f.map, lam.order, target.order):
        return Verdict.reject(M.DIMENSION_MISMATCH)
    if not is_homomorphism(f.map, lam, target):
        return Verdict.reject(M.NOT_HOMOMORPHISM)
    if not image_covers(f.map, lam, target):
        return Verdict.reject(M.NOT_SURJECTIVE)
    return ACCEPT


def _check_embedding(r: Response, lam: Graph, host: Graph) -> Verdict:
    if not isinstance(r, MapResponse):
        return Verdict.reject(M.WRONG_VARIANT)
    if not _dims_ok(r.map, lam.order, host.order):
        return Verdict.reject(M.DIMENSION_MISMATCH)
    if not is_embedding(r.map, lam, host):
        return Verdict.reject(M.NOT_EMBEDDING)
    return ACCEPT


def _check_coloring(c: Coloring, g: Graph, k: int) -> Verdict:
    if len(c) != g.order:
        return Verdict.reject(M.DIMENSION_MISMATCH)
    if len(c) and int(c.colors.max()) > k:
        return Verdict.reject(M.COLOR_BOUND)
    if not is_proper_coloring(c, g):
        return Verdict.reject(M.IMPROPER_COLORING)
    return ACCEPT


def _verify(public: PublicKey, lam: Graph, b: int, r: Response) -> Verdict:
    if isinstance(public, GhPublic):
        return _check_onto(r, lam, public.g1 if b == 0 else public.g2)
    if isinstance(public, SgipPublic):
        if b == 0:
            return _check_embedding(r, lam, public.omega)
        if not isinstance(r, SubgraphAndMap):
            return Verdict.reject(M.WRONG_VARIANT)
        if r.subgraph.host_order != lam.order or not _dims_ok(r.map, r.subgraph.order, public.g2.order):
            return Verdict.reject(M.DIMENSION_MISMATCH)
        if not is_subgraph_of(r.subgraph, lam):
            return Verdict.reject(M.NOT_SUBGRAPH)
        sub = graph_of(r.subgraph)
        if not is_isomorphism(r.map, sub, public.g2):
            return Verdict.reject(M.NOT_ISOMORPHISM)
        return ACCEPT
    if isinstance(public, GcPublic):
        if b == 0:
            if not isinstance(r, MapResponse):
                return Verdict.reject(M.WRONG_VARIANT)
            if not _dims_ok(r.map, public.gamma.order, lam.order):
                return Verdict.reject(M.DIMENSION_MISMATCH)
            if not is_isomorphism(r.map, public.gamma, lam):
                return Verdict.reject(M.NOT_ISOMORPHISM)
            return ACCEPT
        if not isinstance(r, ColoringOnly):
            return Verdict.reject(M.WRONG_VARIANT)
        return _check_coloring(r.coloring, lam, public.k)
    if isinstance(public, GcSgipPublic):
        if b == 0:
            return _check_embedding(r, lam, public.gamma)
        if not isinstance(r, ColoredSubgraph):
            return Verdict.reject(M.WRONG_VARIANT)
        if r.subgraph.host_order != lam.order:
            return Verdict.reject(M.DIMENSION_MISMATCH)
        if not is_subgraph_of(r.subgraph, lam):
            return Verdict.reject(M.NOT_SUBGRAPH)
        if r.subgraph.order != public.n:
            return Verdict.reject(M.ORDER_MISMATCH)
        return _check_coloring(r.coloring, graph_of(r.subgraph), public.k)
    return Verdict.reject(M.MALFORMED)


def verify(public: PublicKey, c: Commitment, b: int, r: Response) -> Verdict:
    """Check one round against the public key.  Never raises: bad input is a reject."""
    if isinstance(b, bool) or b not in (0, 1):
        return Verdict.reject(M.BAD_CHALLENGE)
    if not isinstance(c, Commitment) or not isinstance(c.graph, Graph) or c.kind is not public.kind:
        return Verdict.reject(M.BAD_COMMITMENT)
    try:
        return _verify(public, c.graph, b, r)
    except (DimensionError, ValueError, TypeError, IndexError, AttributeError):
        return Verdict.reject(M.MALFORMED)


# --------------------------------------------------------------------------- sessions


class ProverStrategy(Protocol):
    """Anything that can play the prover: the honest prover or an adversary."""

    kind: ProtocolKind

    def commit(self, rng: SplitMix64) -> Commitment: ...

    def respond(self, b: int) -> Response: ...


class HonestProver:
    """Holds the key pair and answers with the real secret."""

    def __init__(self, key: KeyPair, options: CommitOptions = CommitOptions()):
        self.key = key
        self.options = options
        self._secret: RoundSecret | None = None

    @property
    def kind(self) -> ProtocolKind:
        return self.key.kind

    def commit(self, rng: SplitMix64) -> Commitment:
        c, self._secret = commit(self.key, rng, self.options)
        return c

    def respond(self, b: int) -> Response:
        if self._secret is None:
            raise ProverAbort("respond called before commit")
        secret, self._secret = self._secret, None
        return respond(self.key, secret, b)


def session_seeds(master_seed: int) -> tuple[int, int]:
    """``(prover_seed, verifier_seed)``: independent streams derived from the master seed."""
    return derive_seed(master_seed, "prover"), derive_seed(master_seed, "verifier")


class VerifierSession:
    """Verifier side of one session; builds the transcript as rounds are played.

    Drive it with :meth:`challenge` (after receiving a commitment) and :meth:`receive`
    (after receiving the response).  ``stop_on_reject`` ends the session at the first
    rejected round.
    """

    def __init__(self, public: PublicKey, rounds: int, master_seed: int, *,
                 stop_on_reject: bool = True, params: dict | None = None):
        if rounds < 1:
            raise ValueError("a session needs at least one round")
        prover_seed, verifier_seed = session_seeds(master_seed)
        self.public = public
        self.stop_on_reject = stop_on_reject
        self._rng = SplitMix64(verifier_seed)
        self._pending: tuple[Commitment, int] | None = None
        self.transcript = Transcript(
            kind=public.kind,
            digest=public_key_digest(public),
            master_seed=master_seed,
            prover_seed=prover_seed,
            verifier_seed=verifier_seed,
            requested_rounds=rounds,
            params={"stop_on_reject": stop_on_reject, **(params or {})},
        )

    @property
    def finished(self) -> bool:
        recs = self.transcript.records
        if len(recs) >= self.transcript.requested_rounds:
            return True
        return self.stop_on_reject and bool(recs) and not recs[-1].verdict.accepted

    @property
    def accepted(self) -> bool:
        return self.transcript.accepted

    def challenge(self, commitment: Commitment) -> int:
        if self.finished or self._pending is not None:
            raise RuntimeError("challenge requested out of order")
        b = self._rng.bit()
        self._pending = (commitment, b)
        return b

    def receive(self, response: Optional[Response]) -> Verdict:
        if self._pending is None:
            raise RuntimeError("response received before a commitment")
        commitment, b = self._pending
        self._pending = None
        verdict = Verdict.reject(M.ABORT) if response is None else verify(self.public, commitment, b, response)
        self._record(commitment, b, response, verdict)
        return verdict

    def abort(self, commitment: Optional[Commitment] = None) -> Verdict:
        """The prover gave up; if a challenge is pending it is recorded with the abort."""
        bit = None
        if self._pending is not None:
            commitment, bit = self._pending
            self._pending = None
        verdict = Verdict.reject(M.ABORT)
        self._record(commitment, bit, None, verdict)
        return verdict

    def _record(self, commitment, bit, response, verdict) -> None:
        recs = self.transcript.records
        recs.append(RoundRecord(len(recs), commitment, bit, response, verdict))


def run_session(prover: ProverStrategy, public: PublicKey, rounds: int, master_seed: int, *,
                stop_on_reject: bool = True) -> Transcript:
    """Play ``rounds`` rounds in-process; the prover stream and the verifier's challenge
    stream are both derived from ``master_seed`` (see :func:`session_seeds`)."""
    verifier = VerifierSession(public, rounds, master_seed, stop_on_reject=stop_on_reject)
    prover_rng = SplitMix64(verifier.transcript.prover_seed)
    while not verifier.finished:
        try:
            c = prover.commit(prover_rng)
        except ProverAbort:
            verifier.abort()
            continue
        b = verifier.challenge(c)
        try:
            r = prover.respond(b)
        except ProverAbort:
            verifier.abort()
            continue
        verifier.receive(r)
    return verifier.transcript


def verify_transcript(public: PublicKey, transcript: Transcript | str) -> Verdict:
    """Replay every round against the public key.

    Accepts only if the digest matches, rounds are contiguous and complete, the
    challenge bits are the ones the recorded verifier seed produces, every recorded
    verdict is reproduced, and all rounds accept.
    """
    if isinstance(transcript, str):
        from .formats import FormatError, read_transcript
        try:
            transcript = read_transcript(transcript)
        except FormatError as exc:
            return Verdict(False, M.MALFORMED, str(exc))
    t = transcript
    if t.kind is not public.kind or t.digest != public_key_digest(public):
        return Verdict(False, M.KEY_MISMATCH)
    if session_seeds(t.master_seed) != (t.prover_seed, t.verifier_seed):
        return Verdict(False, M.CHALLENGE_MISMATCH, "seed header inconsistent")
    stop_on_reject = bool(t.params.get("stop_on_reject", True))
    rng = SplitMix64(t.verifier_seed)
    for i, rec in enumerate(t.records):
        if rec.index != i:
            return Verdict(False, M.ROUND_INDEX_MISMATCH, f"record {i} has index {rec.index}")
        if rec.bit is not None and rec.bit != rng.bit():
            return Verdict(False, M.CHALLENGE_MISMATCH, f"round {i}")
        if rec.commitment is None or rec.bit is None or rec.response is None:
            replay = Verdict.reject(M.ABORT)
        else:
            replay = verify(public, rec.commitment, rec.bit, rec.response)
        if replay != rec.verdict:
            return Verdict(False, M.VERDICT_MISMATCH, f"round {i}")
        if not replay.accepted:
            if stop_on_reject and i != len(t.records) - 1:
                return Verdict(False, M.ROUND_COUNT_MISMATCH, "rounds recorded after a reject")
            return Verdict(False, rec.verdict.reason, f"round {i} rejected")
    if len(t.records) != t.requested_rounds:
        return Verdict(False, M.ROUND_COUNT_MISMATCH,
                       f"{len(t.records)} of {t.requested_rounds} rounds recorded")
    return ACCEPT
