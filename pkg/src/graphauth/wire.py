"""Prover and verifier as separate endpoints exchanging one JSON object per line.

Message order is strict::

    verifier: hello {kind, digest, rounds}
    repeat:   prover: commit {graph} | abort
              verifier: challenge {bit}
              prover: respond {response} | abort
              verifier: verdict {accept, reason, continue}
    verifier: done {accept, reason}

Any message out of this order raises :class:`ProtocolViolation` on the receiving
side.  The verifier endpoint builds the same :class:`~graphauth.messages.Transcript`
as an in-process :func:`~graphauth.protocols.run_session` with the same seed.
"""

from __future__ import annotations

import json
from typing import IO

from .formats import (
    FORMAT_VERSION,
    FormatError,
    canonical_json,
    parse_graph,
    public_key_digest,
    response_from_doc,
    response_to_doc,
    write_graph,
)
from .keygen import PublicKey
from .messages import Commitment, ProverAbort, Transcript
from .protocols import ProverStrategy, VerifierSession, session_seeds
from .rng import SplitMix64


class ProtocolViolation(RuntimeError):
    """The peer sent something other than the next expected message."""


def send(out: IO[str], msg: dict) -> None:
    out.write(canonical_json(msg) + "\n")
    out.flush()


def recv(inp: IO[str], *expected: str) -> dict:
    line = inp.readline()
    if not line:
        raise ProtocolViolation(f"connection closed while waiting for {'/'.join(expected)}")
    try:
        msg = json.loads(line)
    except json.JSONDecodeError:
        raise ProtocolViolation("message is not JSON") from None
    kind = msg.get("msg") if isinstance(msg, dict) else None
    if kind not in expected:
        raise ProtocolViolation(f"expected {'/'.join(expected)}, got {kind!r}")
    return msg


def run_verifier(public: PublicKey, rounds: int, master_seed: int, inp: IO[str], out: IO[str], *,
                 stop_on_reject: bool = True) -> Transcript:
    session = VerifierSession(public, rounds, master_seed, stop_on_reject=stop_on_reject)
    send(out, {"msg": "hello", "format_version": FORMAT_VERSION, "kind": public.kind.value,
               "digest": session.transcript.digest, "rounds": rounds})
    while not session.finished:
        msg = recv(inp, "commit", "abort")
        if msg["msg"] == "abort":
            verdict = session.abort()
        else:
            try:
                graph = parse_graph(msg.get("graph") if isinstance(msg.get("graph"), str) else "")
            except FormatError as exc:
                raise ProtocolViolation(f"bad commitment: {exc}") from None
            b = session.challenge(Commitment(public.kind, graph))
            send(out, {"msg": "challenge", "bit": b})
            msg = recv(inp, "respond", "abort")
            if msg["msg"] == "abort":
                verdict = session.abort()
            else:
                try:
                    response = response_from_doc(msg.get("response"))
                except FormatError:
                    # an unreadable response counts as giving up on the round
                    verdict = session.abort()
                else:
                    verdict = session.receive(response)
        send(out, {"msg": "verdict", "accept": verdict.accepted, "reason": verdict.reason,
                   "continue": not session.finished})
    final = session.transcript
    send(out, {"msg": "done", "accept": final.accepted,
               "reason": next((r.verdict.reason for r in final.records if not r.verdict.accepted), None)})
    return final


def run_prover(prover: ProverStrategy, public: PublicKey, master_seed: int, inp: IO[str], out: IO[str]) -> bool:
    """Answer a verifier until it sends ``done``; returns the session verdict."""
    hello = recv(inp, "hello")
    if hello.get("kind") != public.kind.value or hello.get("digest") != public_key_digest(public):
        raise ProtocolViolation("verifier holds a different public key")
    rng = SplitMix64(session_seeds(master_seed)[0])
    while True:
        try:
            c = prover.commit(rng)
        except ProverAbort:
            send(out, {"msg": "abort"})
        else:
            send(out, {"msg": "commit", "graph": write_graph(c.graph)})
            b = recv(inp, "challenge")["bit"]
            try:
                r = prover.respond(b)
            except ProverAbort:
                send(out, {"msg": "abort"})
            else:
                send(out, {"msg": "respond", "response": response_to_doc(r)})
        verdict = recv(inp, "verdict")
        if not verdict.get("continue"):
            break
    return bool(recv(inp, "done").get("accept"))
