"""Graph-based zero-knowledge identification: four schemes, attacks on them, and a CLI."""

from .attacks import (
    AttackReport,
    GenericCheater,
    GiRecoveryAdversary,
    TensorForgery,
    evaluate_adversary,
    extract_gcsgip_witness,
    extract_sgip_witness,
    generic_cheater,
    gi_key_recovery,
    tensor_forgery,
)
from .gisolver import brute_force_isomorphism, find_embedding, find_isomorphism, wl_refine
from .graphs import Coloring, Graph, SubgraphRef, VertexMap, tensor_product
from .keygen import DEFAULT_PARAMS, ProtocolKind, generate_key
from .protocols import HonestProver, VerifierSession, commit, respond, run_session, verify, verify_transcript
from .rng import SplitMix64

__version__ = "0.1.0"

__all__ = [
    "AttackReport",
    "Coloring",
    "DEFAULT_PARAMS",
    "GenericCheater",
    "GiRecoveryAdversary",
    "Graph",
    "HonestProver",
    "ProtocolKind",
    "SplitMix64",
    "SubgraphRef",
    "TensorForgery",
    "VerifierSession",
    "VertexMap",
    "brute_force_isomorphism",
    "commit",
    "evaluate_adversary",
    "extract_gcsgip_witness",
    "extract_sgip_witness",
    "find_embedding",
    "find_isomorphism",
    "generate_key",
    "generic_cheater",
    "gi_key_recovery",
    "respond",
    "run_session",
    "tensor_forgery",
    "tensor_product",
    "verify",
    "verify_transcript",
    "wl_refine",
]
