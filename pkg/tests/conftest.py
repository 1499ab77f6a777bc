from __future__ import annotations

import itertools
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from graphauth.graphs import Graph, VertexMap
from graphauth.keygen import ProtocolKind, generate_key

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# small parameters so key-heavy tests stay fast
SMALL_PARAMS = {
    ProtocolKind.GH: {"base_order": 8, "base_p": 0.5},
    ProtocolKind.SGIP: {"m": 6, "big_order": 14},
    ProtocolKind.GC: {"n": 14, "k": 3},
    ProtocolKind.GCSGIP: {"total_order": 16, "n": 8, "k": 3},
}

ALL_KINDS = list(ProtocolKind)


def small_key(kind, seed=0):
    return generate_key(kind, seed, **SMALL_PARAMS[ProtocolKind(kind)])


@st.composite
def graphs(draw, min_order=0, max_order=9, min_size=0):
    n = draw(st.integers(min_order, max_order))
    pairs = list(itertools.combinations(range(n), 2))
    if min_size > len(pairs):
        n = max_order
        pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=min_size)) if pairs else []
    return Graph(n, chosen)


@st.composite
def permutations(draw, n):
    perm = draw(st.permutations(list(range(n))))
    return VertexMap(np.array(perm, dtype=np.int64), n)


@pytest.fixture(params=ALL_KINDS, ids=lambda k: k.value)
def kind(request):
    return request.param


def run_split(key_file: Path, pub_file: Path, rounds: int, seed: int, transcript: Path):
    """Run the prover and verifier commands as two processes wired together; returns both exit codes."""
    prover_to_verifier = os.pipe()
    verifier_to_prover = os.pipe()
    cmd = [sys.executable, "-m", "graphauth"]
    verifier = subprocess.Popen(cmd + ["verifier", "--public", str(pub_file), "--rounds", str(rounds),
                                       "--seed", str(seed), "--transcript", str(transcript)],
                                stdin=prover_to_verifier[0], stdout=verifier_to_prover[1])
    prover = subprocess.Popen(cmd + ["prover", "--key", str(key_file), "--seed", str(seed)],
                              stdin=verifier_to_prover[0], stdout=prover_to_verifier[1])
    for fd in (*prover_to_verifier, *verifier_to_prover):
        os.close(fd)
    return verifier.wait(timeout=120), prover.wait(timeout=120)
