"""Values exchanged between prover and verifier, and the transcript that records them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .graphs import Coloring, Graph, SubgraphRef, VertexMap
from .keygen import ProtocolKind

# Stable reject reasons.  Attack experiments and transcript replay key on these.
BAD_CHALLENGE = "bad-challenge"
BAD_COMMITMENT = "bad-commitment"
WRONG_VARIANT = "wrong-variant"
DIMENSION_MISMATCH = "dimension-mismatch"
NOT_HOMOMORPHISM = "not-homomorphism"
NOT_SURJECTIVE = "not-surjective"
NOT_EMBEDDING = "not-embedding"
NOT_SUBGRAPH = "not-subgraph"
NOT_ISOMORPHISM = "not-isomorphism"
ORDER_MISMATCH = "order-mismatch"
COLOR_BOUND = "color-bound"
IMPROPER_COLORING = "improper-coloring"
MALFORMED = "malformed"
ABORT = "abort"
# transcript-level reasons
KEY_MISMATCH = "key-mismatch"
ROUND_COUNT_MISMATCH = "round-count-mismatch"
ROUND_INDEX_MISMATCH = "round-index-mismatch"
CHALLENGE_MISMATCH = "challenge-mismatch"
VERDICT_MISMATCH = "verdict-mismatch"
INCOMPLETE = "incomplete"


@dataclass(frozen=True)
class Commitment:
    kind: ProtocolKind
    graph: Graph


@dataclass(frozen=True)
class MapResponse:
    map: VertexMap


@dataclass(frozen=True)
class SubgraphAndMap:
    subgraph: SubgraphRef
    map: VertexMap


@dataclass(frozen=True)
class ColoredSubgraph:
    subgraph: SubgraphRef
    coloring: Coloring


@dataclass(frozen=True)
class ColoringOnly:
    coloring: Coloring


Response = Union[MapResponse, SubgraphAndMap, ColoredSubgraph, ColoringOnly]


@dataclass(frozen=True)
class Verdict:
    """Accept, or reject with a stable machine-readable ``reason``.

    ``detail`` is free text for humans and does not take part in equality.
    """

    accepted: bool
    reason: Optional[str] = None
    detail: Optional[str] = field(default=None, compare=False)

    def __bool__(self) -> bool:
        return self.accepted

    @classmethod
    def reject(cls, reason: str) -> "Verdict":
        return cls(False, reason)


ACCEPT = Verdict(True)


class ProverAbort(Exception):
    """Raised by a prover strategy that gives up on the current round."""


@dataclass(frozen=True)
class RoundRecord:
    index: int
    commitment: Optional[Commitment]
    bit: Optional[int]
    response: Optional[Response]
    verdict: Verdict


@dataclass
class Transcript:
    """Header fields plus one record per played round.

    ``requested_rounds`` is what the verifier asked for; a session that stops at the
    first reject records fewer rounds.  The prover and verifier seeds are recorded
    separately so that the challenge bits can be re-derived from the verifier's own
    stream.
    """

    kind: ProtocolKind
    digest: str
    master_seed: int
    prover_seed: int
    verifier_seed: int
    requested_rounds: int
    params: dict = field(default_factory=dict)
    records: list[RoundRecord] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return (len(self.records) == self.requested_rounds
                and all(r.verdict.accepted for r in self.records))
