"""Command-line entry point: ``graphauth <command> ...`` or ``python -m graphauth``.

Exit codes: 0 accept or success, 1 reject or attack report written, 2 usage or
format error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .attacks import (
    AttackInapplicable,
    AttackReport,
    GiRecoveryAdversary,
    evaluate_adversary,
    evaluate_gi_impersonation,
    generic_cheater,
    tensor_forgery,
)
from .formats import FormatError, read_key, read_transcript, write_key, write_transcript
from .keygen import KeyGenerationError, ProtocolKind, generate_key
from .messages import KEY_MISMATCH
from .protocols import HonestProver, run_session, verify_transcript
from .wire import ProtocolViolation, run_prover, run_verifier

EXIT_OK, EXIT_REJECT, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _param_value(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if "," in text:
        try:
            return tuple(int(part) for part in text.split(","))
        except ValueError:
            pass
    raise UsageError(f"cannot parse parameter value {text!r}")


def _params(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        for piece in item.split():
            name, sep, value = piece.partition("=")
            if not sep or not name:
                raise UsageError(f"parameter {piece!r} is not NAME=VALUE")
            out[name] = _param_value(value)
    return out


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_key(path: str):
    key = read_key(_read(path))
    if not hasattr(key, "public"):
        raise UsageError(f"{path} holds only a public key; a key pair is needed")
    return key


def _load_public(path: str):
    key = read_key(_read(path))
    return key.public if hasattr(key, "public") else key


def _write(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


# --------------------------------------------------------------------------- commands


def cmd_keygen(args) -> int:
    try:
        key = generate_key(args.kind, args.seed, **_params(args.params))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    except KeyGenerationError as exc:
        print(f"key generation failed: {exc}", file=sys.stderr)
        return EXIT_REJECT
    private_path, public_path = f"{args.out}.key.json", f"{args.out}.pub.json"
    _write(private_path, write_key(key))
    _write(public_path, write_key(key, public_only=True))
    print(f"{key.kind.value} key written: {private_path} (private), {public_path} (public)")
    return EXIT_OK


def cmd_session(args) -> int:
    key = _load_key(args.key)
    t = run_session(HonestProver(key), key.public, args.rounds, args.seed,
                    stop_on_reject=not args.keep_going)
    _write(args.transcript, write_transcript(t))
    print(f"session {'accepted' if t.accepted else 'rejected'}: {len(t.records)} rounds -> {args.transcript}")
    return EXIT_OK if t.accepted else EXIT_REJECT


def cmd_verify(args) -> int:
    public = _load_public(args.public)
    transcript = read_transcript(_read(args.transcript))
    verdict = verify_transcript(public, transcript)
    if verdict.reason == KEY_MISMATCH:
        raise UsageError(f"transcript was made for a different {transcript.kind.value} key, "
                         f"not this {public.kind.value} key")
    if verdict.accepted:
        print("accept")
        return EXIT_OK
    print(f"reject: {verdict.reason}" + (f" ({verdict.detail})" if verdict.detail else ""))
    return EXIT_REJECT


def _inapplicable(name: str, public, args, reason: str) -> AttackReport:
    return AttackReport(name, public.kind, args.seed, args.rounds, note=f"inapplicable: {reason}")


def cmd_attack(args) -> int:
    public = _load_public(args.public)
    name = args.attack
    if name == "tensor":
        try:
            forger = tensor_forgery(public)
        except AttackInapplicable as exc:
            report = _inapplicable(name, public, args, str(exc))
        else:
            report = evaluate_adversary(forger, public, args.sessions, args.rounds, args.seed, attack=name)
    elif name == "cheat":
        report = evaluate_adversary(lambda: generic_cheater(public), public, args.sessions, args.rounds,
                                    args.seed, attack=name)
    elif public.kind not in (ProtocolKind.GC, ProtocolKind.GCSGIP):
        report = _inapplicable(name, public, args, "needs a colouring-based public key")
    elif args.key:
        victim = _load_key(args.key)
        if victim.public != public:
            raise UsageError("--key does not belong to --public")
        report = evaluate_gi_impersonation(HonestProver(victim), public, args.sessions, args.rounds,
                                           args.seed, observed_rounds=args.observe)
    elif args.transcript:
        observed_t = read_transcript(_read(args.transcript))
        observed = [(r.commitment, r.response) for r in observed_t.records
                    if r.bit == 1 and r.commitment is not None and r.response is not None]
        report = evaluate_adversary(lambda: GiRecoveryAdversary(public, observed), public, args.sessions,
                                    args.rounds, args.seed, attack=name)
    else:
        raise UsageError("gi-recovery needs --key (victim to observe) or --transcript (observed session)")
    path = args.report or f"{name}-{public.kind.value}-{args.seed}.report.json"
    _write(path, report.to_json(include_timing=args.timings))
    print(f"{report.summary()} -> {path}")
    return EXIT_REJECT


def cmd_prover(args) -> int:
    key = _load_key(args.key)
    accepted = run_prover(HonestProver(key), key.public, args.seed, sys.stdin, sys.stdout)
    return EXIT_OK if accepted else EXIT_REJECT


def cmd_verifier(args) -> int:
    public = _load_public(args.public)
    t = run_verifier(public, args.rounds, args.seed, sys.stdin, sys.stdout, stop_on_reject=not args.keep_going)
    if args.transcript:
        _write(args.transcript, write_transcript(t))
    return EXIT_OK if t.accepted else EXIT_REJECT


# --------------------------------------------------------------------------- parser


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if value < 0:
        raise argparse.ArgumentTypeError("seeds are non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphauth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key pair")
    p.add_argument("--kind", required=True, choices=[k.value for k in ProtocolKind])
    p.add_argument("--params", "--param", nargs="*", action="extend", default=[], metavar="NAME=VALUE",
                   help="override default generator parameters, e.g. n=50 k=5 or class_size_range=2,4")
    p.add_argument("--seed", required=True, type=_seed)
    p.add_argument("--out", required=True, metavar="PREFIX")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("session", help="run an honest session in-process and write its transcript")
    p.add_argument("--key", required=True)
    p.add_argument("--rounds", required=True, type=_positive)
    p.add_argument("--seed", required=True, type=_seed)
    p.add_argument("--transcript", required=True)
    p.add_argument("--keep-going", action="store_true", help="play all rounds even after a reject")
    p.set_defaults(func=cmd_session)

    p = sub.add_parser("verify", help="replay a transcript against a public key")
    p.add_argument("--public", required=True)
    p.add_argument("--transcript", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("attack", help="run an attack experiment and write a report")
    p.add_argument("--attack", required=True, choices=["tensor", "gi-recovery", "cheat"])
    p.add_argument("--public", required=True)
    p.add_argument("--sessions", required=True, type=_positive)
    p.add_argument("--rounds", required=True, type=_positive)
    p.add_argument("--seed", required=True, type=_seed)
    p.add_argument("--report")
    p.add_argument("--key", help="gi-recovery: victim key pair whose challenge-1 rounds are observed")
    p.add_argument("--transcript", help="gi-recovery: transcript of an observed session")
    p.add_argument("--observe", type=_positive, default=1, help="gi-recovery: rounds observed per trial")
    p.add_argument("--timings", action="store_true", help="include wall-clock timing in the report")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("prover", help="honest prover over stdin/stdout")
    p.add_argument("--key", required=True)
    p.add_argument("--seed", required=True, type=_seed)
    p.set_defaults(func=cmd_prover)

    p = sub.add_parser("verifier", help="verifier over stdin/stdout")
    p.add_argument("--public", required=True)
    p.add_argument("--rounds", required=True, type=_positive)
    p.add_argument("--seed", required=True, type=_seed)
    p.add_argument("--transcript")
    p.add_argument("--keep-going", action="store_true")
    p.set_defaults(func=cmd_verifier)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, FormatError) as exc:
        print(f"graphauth {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProtocolViolation as exc:
        print(f"graphauth {args.command}: session aborted: {exc}", file=sys.stderr)
        return EXIT_USAGE
