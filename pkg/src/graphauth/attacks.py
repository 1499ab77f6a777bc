"""Cryptanalysis: the tensor-product forgery, colouring recovery through graph
isomorphism, a bit-guessing cheater, witness extractors, and an evaluation harness.

Every adversary here is built from public key material (plus, for the recovery
attack, transcripts it observed as a verifier).  None of them accepts a key pair.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .formats import canonical_json
from .gisolver import find_isomorphism
from .graphs import (
    Coloring,
    Graph,
    SubgraphRef,
    VertexMap,
    blow_up,
    compose,
    is_proper_coloring,
    projection,
    relabel,
    subgraph_image,
    tensor_product,
)
from .keygen import (
    GcKeyPair,
    GcPublic,
    GcSgipPublic,
    GhPublic,
    ProtocolKind,
    PublicKey,
    SgipPublic,
    gen_gc_key,
    gen_gcsgip_key,
)
from .messages import (
    ColoredSubgraph,
    ColoringOnly,
    Commitment,
    MapResponse,
    Response,
    SubgraphAndMap,
    Verdict,
)
from .protocols import (
    CommitOptions,
    HonestProver,
    ProverStrategy,
    hidden_copy,
    run_session,
    verify,
)
from .rng import SplitMix64, derive_seed

__all__ = [
    "AttackInapplicable",
    "ExtractionError",
    "TensorForgery",
    "tensor_forgery",
    "GenericCheater",
    "generic_cheater",
    "gi_key_recovery",
    "RecoveryAttempt",
    "attempt_recovery",
    "observe_rounds",
    "GiRecoveryAdversary",
    "extract_sgip_witness",
    "extract_gcsgip_witness",
    "AttackReport",
    "evaluate_adversary",
    "evaluate_key_recovery",
    "evaluate_gi_impersonation",
]


class AttackInapplicable(ValueError):
    """The attack's precondition does not hold for this public key."""


class ExtractionError(ValueError):
    """One of the two responses fed to an extractor does not verify."""

    def __init__(self, bit: int, verdict: Verdict):
        super().__init__(f"response to b={bit} rejected: {verdict.reason}")
        self.bit = bit
        self.verdict = verdict


def _public_only(public):
    if hasattr(public, "public"):
        raise TypeError("adversaries are built from public keys only, not key pairs")
    return public


# --------------------------------------------------------------------------- tensor forgery


class TensorForgery:
    """Commits ``g1 x g2`` every round and answers with a coordinate projection.

    Both projections of the categorical product are surjective homomorphisms as
    soon as each factor has an edge, so against GH this passes every round.  Against
    SGIP the same commitment is useless: the projection onto ``omega`` is never
    injective, and the projection onto ``g2`` is not a bijection.
    """

    def __init__(self, public: GhPublic | SgipPublic):
        _public_only(public)
        if isinstance(public, GhPublic):
            g1, g2 = public.g1, public.g2
        elif isinstance(public, SgipPublic):
            g1, g2 = public.omega, public.g2
        else:
            raise AttackInapplicable(f"tensor forgery needs a two-graph public key, got {type(public).__name__}")
        if g1.size == 0 or g2.size == 0:
            raise AttackInapplicable("both public graphs need at least one edge")
        self.kind = public.kind
        self.public = public
        self.product = tensor_product(g1, g2)
        self._onto_first = projection(g1.order, g2.order, 0)
        self._onto_second = projection(g1.order, g2.order, 1)
        self._whole = SubgraphRef.whole(self.product) if self.kind is ProtocolKind.SGIP else None

    def commit(self, rng: SplitMix64) -> Commitment:
        return Commitment(self.kind, self.product)

    def respond(self, b: int) -> Response:
        if b == 0:
            return MapResponse(self._onto_first)
        if self.kind is ProtocolKind.SGIP:
            return SubgraphAndMap(self._whole, self._onto_second)
        return MapResponse(self._onto_second)


def tensor_forgery(public: GhPublic | SgipPublic) -> TensorForgery:
    return TensorForgery(public)


# --------------------------------------------------------------------------- bit-guessing cheater


def _density(g: Graph) -> float:
    pairs = g.order * (g.order - 1) // 2
    return g.size / pairs if pairs else 0.0


class GenericCheater:
    """Guesses the challenge before committing and prepares an answer for that bit only.

    The guess is drawn from the prover stream handed to :meth:`commit`.  Whatever the
    actual challenge, the prepared answer is sent, so a wrong guess is rejected by the
    verifier's predicates.
    """

    def __init__(self, public: PublicKey, options: CommitOptions = CommitOptions()):
        self.public = _public_only(public)
        self.kind = public.kind
        self.options = options
        self._prepared: Response | None = None
        self.guess: int | None = None

    def commit(self, rng: SplitMix64) -> Commitment:
        g = rng.bit()
        self.guess = g
        graph, self._prepared = getattr(self, f"_prepare_{self.kind.value}")(g, rng)
        return Commitment(self.kind, graph)

    def respond(self, b: int) -> Response:
        return self._prepared

    def _blow_up(self, base: Graph, rng: SplitMix64):
        lo, hi = self.options.class_size_range
        big, proj = blow_up(base, [rng.integers(lo, hi) for _ in range(base.order)], self.options.p_edge, rng)
        perm = VertexMap(rng.permutation(big.order), big.order)
        return relabel(big, perm), compose(perm.inverse(), proj)

    def _prepare_gh(self, g, rng):
        graph, beta = self._blow_up(self.public.g1 if g == 0 else self.public.g2, rng)
        return graph, MapResponse(beta)

    def _prepare_sgip(self, g, rng):
        omega, g2 = self.public.omega, self.public.g2
        if g == 0:
            lam, beta, _ = hidden_copy(omega, SubgraphRef(omega.order, []), rng, self.options, proper=False)
            return lam, MapResponse(beta)
        rho = VertexMap(rng.permutation(g2.order), g2.order)
        lam = relabel(g2, rho)
        return lam, SubgraphAndMap(SubgraphRef.whole(lam), rho.inverse())

    def _prepare_gc(self, g, rng):
        gamma, k = self.public.gamma, self.public.k
        if g == 0:
            phi = VertexMap(rng.permutation(gamma.order), gamma.order)
            return relabel(gamma, phi), MapResponse(phi)
        # bichromatic pairs are about (k-1)/k of all pairs, so match gamma's density
        cross_p = min(1.0, _density(gamma) * k / max(k - 1, 1))
        fresh = gen_gc_key(gamma.order, k, cross_p, rng)
        return fresh.public.gamma, ColoringOnly(fresh.coloring)

    def _prepare_gcsgip(self, g, rng):
        gamma, n, k = self.public.gamma, self.public.n, self.public.k
        if g == 0:
            core = SubgraphRef(gamma.order, rng.sample(gamma.order, n))
            lam, alpha, _ = hidden_copy(gamma, core, rng, self.options, proper=True)
            return lam, MapResponse(alpha)
        spare = max(gamma.order - n - 1, 0)
        breadth = 0.5 if self.options.breadth is None else self.options.breadth
        order = n + int(np.floor(breadth * spare + 0.5))
        fresh = gen_gcsgip_key(order, n, k, 0.5, _density(gamma), rng)
        return fresh.public.gamma, ColoredSubgraph(fresh.g1_ref, fresh.coloring)


def generic_cheater(public: PublicKey, kind: ProtocolKind | None = None) -> GenericCheater:
    if kind is not None and ProtocolKind(kind) is not public.kind:
        raise ValueError(f"public key is {public.kind.value}, not {ProtocolKind(kind).value}")
    return GenericCheater(public)


# --------------------------------------------------------------------------- colouring recovery


def gi_key_recovery(public: GcPublic, commitment_graph: Graph, coloring: Coloring,
                    solver: Callable[[Graph, Graph], Optional[VertexMap]] = find_isomorphism) -> Optional[Coloring]:
    """Turn one observed ``b = 1`` round of the GC scheme into a colouring of ``gamma``.

    Finds ``psi: commitment -> gamma`` and gives vertex ``psi(v)`` the observed colour of
    ``v``.  Returns ``None`` when the solver finds no isomorphism or the result is not a
    proper colouring within the public bound.
    """
    gamma = public.gamma
    if commitment_graph.order != gamma.order or len(coloring) != commitment_graph.order:
        return None
    psi = solver(commitment_graph, gamma)
    if psi is None:
        return None
    colors = np.empty(gamma.order, dtype=np.int64)
    colors[psi.images] = coloring.colors
    recovered = Coloring(colors, public.k) if coloring.k <= public.k else None
    if recovered is None or not is_proper_coloring(recovered, gamma):
        return None
    return recovered


@dataclass(frozen=True)
class RecoveryAttempt:
    """``status`` is ``"recovered"``, ``"failed"`` (solver found nothing) or
    ``"inapplicable"`` (commitment and public graph differ in order, so there is no
    isomorphism to look for)."""

    status: str
    coloring: Optional[Coloring] = None
    seconds: float = 0.0


def attempt_recovery(public: GcPublic | GcSgipPublic, commitment: Commitment, response: Response) -> RecoveryAttempt:
    """Apply the isomorphism attack to one observed ``b = 1`` round of GC or GC+SGIP.

    For GC+SGIP the observed commitment is a proper subgraph of ``gamma``; the attack
    would need an isomorphism between graphs of different orders and never runs.
    """
    graph = commitment.graph
    if isinstance(response, ColoringOnly):
        coloring = response.coloring
    elif isinstance(response, ColoredSubgraph):
        coloring = response.coloring
    else:
        return RecoveryAttempt("inapplicable")
    target = public.gamma
    if graph.order != target.order or len(coloring) != graph.order:
        return RecoveryAttempt("inapplicable")
    start = time.perf_counter()
    gc_public = public if isinstance(public, GcPublic) else GcPublic(public.gamma, public.k)
    recovered = gi_key_recovery(gc_public, graph, coloring)
    elapsed = time.perf_counter() - start
    if recovered is None:
        return RecoveryAttempt("failed", None, elapsed)
    return RecoveryAttempt("recovered", recovered, elapsed)


def observe_rounds(prover: ProverStrategy, rounds: int, seed: int, bit: int = 1) -> list[tuple[Commitment, Response]]:
    """Play a malicious verifier that always sends ``bit`` and keep what the prover reveals."""
    rng = SplitMix64.derived(seed, "prover")
    seen = []
    for _ in range(rounds):
        c = prover.commit(rng)
        seen.append((c, prover.respond(bit)))
    return seen


class GiRecoveryAdversary:
    """Impersonator that first tries colouring recovery on observed ``b = 1`` rounds.

    If a colouring of ``gamma`` comes out (GC), it proves like the honest prover.
    Otherwise (GC+SGIP, where the attack never applies) it falls back to guessing the
    challenge bit.
    """

    def __init__(self, public: GcPublic | GcSgipPublic, observed: Iterable[tuple[Commitment, Response]]):
        self.public = _public_only(public)
        self.kind = public.kind
        self.attempts: list[RecoveryAttempt] = []
        recovered = None
        for c, r in observed:
            attempt = attempt_recovery(public, c, r)
            self.attempts.append(attempt)
            if attempt.status == "recovered":
                recovered = attempt.coloring
                break
        self.recovered = recovered
        if recovered is not None and isinstance(public, GcPublic):
            self._inner: ProverStrategy = HonestProver(GcKeyPair(public, recovered))
        else:
            self._inner = GenericCheater(public)

    def commit(self, rng: SplitMix64) -> Commitment:
        return self._inner.commit(rng)

    def respond(self, b: int) -> Response:
        return self._inner.respond(b)


# --------------------------------------------------------------------------- extractors


def _both_verify(public: PublicKey, c: Commitment, r0: Response, r1: Response) -> None:
    for bit, r in ((0, r0), (1, r1)):
        verdict = verify(public, c, bit, r)
        if not verdict.accepted:
            raise ExtractionError(bit, verdict)


def extract_sgip_witness(public: SgipPublic, c: Commitment, r0: Response,
                         r1: Response) -> tuple[SubgraphRef, VertexMap]:
    """From answers to both bits for one commitment, a subgraph of ``omega`` isomorphic to ``g2``.

    With ``r0 = beta`` and ``r1 = (sub, mu)``: the subgraph is ``beta(sub)`` and the
    isomorphism is ``mu`` composed with the inverse of ``beta`` on ``sub``.
    """
    _both_verify(public, c, r0, r1)
    beta, sub, mu = r0.map, r1.subgraph, r1.map
    witness = subgraph_image(beta, sub)
    image = beta.images[sub.vertices]
    order = np.argsort(image, kind="stable")
    return witness, VertexMap(mu.images[order], mu.codomain_order)


def extract_gcsgip_witness(public: GcSgipPublic, c: Commitment, r0: Response,
                           r1: Response) -> tuple[SubgraphRef, Coloring]:
    """From answers to both bits, an order-``n`` subgraph of ``gamma`` with a ``k``-colouring."""
    _both_verify(public, c, r0, r1)
    beta, sub, col = r0.map, r1.subgraph, r1.coloring
    witness = subgraph_image(beta, sub)
    order = np.argsort(beta.images[sub.vertices], kind="stable")
    return witness, Coloring(col.colors[order], col.k)


# --------------------------------------------------------------------------- evaluation


@dataclass
class AttackReport:
    """Aggregate of an attack experiment.

    Wall-clock timings are kept but left out of :meth:`to_doc` unless asked for, so
    that reports from identical seeds serialize to identical bytes.
    """

    attack: str
    kind: ProtocolKind
    seed: int
    rounds: int
    trials: int = 0
    successes: int = 0
    rounds_played: int = 0
    rounds_accepted: int = 0
    outcomes: list[dict] = field(default_factory=list)
    timings: list[float] = field(default_factory=list)
    note: Optional[str] = None

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def round_success_rate(self) -> float:
        return self.rounds_accepted / self.rounds_played if self.rounds_played else 0.0

    def timing_stats(self) -> dict:
        if not self.timings:
            return {"mean": 0.0, "median": 0.0, "max": 0.0, "total": 0.0}
        return {"mean": statistics.fmean(self.timings), "median": statistics.median(self.timings),
                "max": max(self.timings), "total": sum(self.timings)}

    def add(self, success: bool, seconds: float, **detail) -> None:
        self.outcomes.append({"trial": self.trials, "success": bool(success), **detail})
        self.trials += 1
        self.successes += int(bool(success))
        self.timings.append(seconds)

    def to_doc(self, *, include_timing: bool = False) -> dict:
        doc = {
            "format_version": 1,
            "attack": self.attack,
            "kind": self.kind.value,
            "seed": self.seed,
            "rounds": self.rounds,
            "trials": self.trials,
            "successes": self.successes,
            "success_rate": self.success_rate,
            "rounds_played": self.rounds_played,
            "rounds_accepted": self.rounds_accepted,
            "outcomes": self.outcomes,
        }
        if self.note is not None:
            doc["note"] = self.note
        if include_timing:
            doc["timing"] = self.timing_stats()
        return doc

    def to_json(self, *, include_timing: bool = False) -> str:
        return canonical_json(self.to_doc(include_timing=include_timing)) + "\n"

    def summary(self) -> str:
        if self.note is not None and not self.trials:
            return f"{self.attack} vs {self.kind.value}: {self.note}"
        return (f"{self.attack} vs {self.kind.value}: {self.successes}/{self.trials} "
                f"(rate {self.success_rate:.4f}, rounds {self.rounds_accepted}/{self.rounds_played})")


def evaluate_adversary(strategy: ProverStrategy | Callable[[], ProverStrategy], public: PublicKey,
                       sessions: int, rounds: int, master_seed: int, *, attack: str | None = None,
                       stop_on_reject: bool = True) -> AttackReport:
    """Run ``sessions`` sessions with the strategy as prover; session ``i`` uses the
    master seed ``derive_seed(master_seed, "session", i)``.

    ``strategy`` may be a zero-argument factory, called once per session.
    """
    if sessions < 1:
        raise ValueError("need at least one session")
    name = attack or type(strategy).__name__
    report = AttackReport(name, public.kind, master_seed, rounds)
    for i in range(sessions):
        prover = strategy() if callable(strategy) and not hasattr(strategy, "commit") else strategy
        seed = derive_seed(master_seed, "session", i)
        start = time.perf_counter()
        t = run_session(prover, public, rounds, seed, stop_on_reject=stop_on_reject)
        elapsed = time.perf_counter() - start
        rejected = next((r for r in t.records if not r.verdict.accepted), None)
        report.rounds_played += len(t.records)
        report.rounds_accepted += sum(r.verdict.accepted for r in t.records)
        report.add(t.accepted, elapsed, seed=seed, rounds_played=len(t.records),
                   reason=None if rejected is None else rejected.verdict.reason)
    return report


def evaluate_key_recovery(victim: ProverStrategy, public: GcPublic | GcSgipPublic, sessions: int,
                          rounds: int, master_seed: int) -> AttackReport:
    """Malicious-verifier experiment: each trial observes ``rounds`` rounds answered to
    ``b = 1`` and succeeds if some observation yields a proper colouring of ``gamma``."""
    report = AttackReport("gi-recovery", public.kind, master_seed, rounds)
    for i in range(sessions):
        seed = derive_seed(master_seed, "session", i)
        start = time.perf_counter()
        observed = observe_rounds(victim, rounds, seed)
        statuses = []
        recovered = False
        for c, r in observed:
            attempt = attempt_recovery(public, c, r)
            statuses.append(attempt.status)
            if attempt.status == "recovered":
                recovered = True
                break
        report.rounds_played += len(statuses)
        report.add(recovered, time.perf_counter() - start, seed=seed, statuses=statuses)
    return report


def evaluate_gi_impersonation(victim: ProverStrategy, public: GcPublic | GcSgipPublic, sessions: int,
                              rounds: int, master_seed: int, *, observed_rounds: int = 1) -> AttackReport:
    """Observe ``observed_rounds`` challenge-1 rounds of the victim, then impersonate it
    with a :class:`GiRecoveryAdversary` for a full ``rounds``-round session."""
    report = AttackReport("gi-recovery", public.kind, master_seed, rounds)
    for i in range(sessions):
        seed = derive_seed(master_seed, "session", i)
        start = time.perf_counter()
        adversary = GiRecoveryAdversary(public, observe_rounds(victim, observed_rounds,
                                                               derive_seed(seed, "observe")))
        t = run_session(adversary, public, rounds, seed)
        report.rounds_played += len(t.records)
        report.rounds_accepted += sum(r.verdict.accepted for r in t.records)
        report.add(t.accepted, time.perf_counter() - start, seed=seed,
                   recovery=[a.status for a in adversary.attempts])
    return report
