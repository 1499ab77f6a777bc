import io
import json
import os
import subprocess
import sys
import threading

import pytest

from graphauth.attacks import generic_cheater
from graphauth.cli import main
from graphauth import messages as M
from graphauth.formats import read_transcript, write_key, write_transcript
from graphauth.protocols import HonestProver, run_session
from graphauth.wire import ProtocolViolation, recv, run_prover, run_verifier, send

from conftest import ALL_KINDS, SMALL_PARAMS, run_split, small_key


class Pipe:
    """A one-directional text channel between two threads."""

    def __init__(self):
        r, w = os.pipe()
        self.reader = os.fdopen(r, "r")
        self.writer = os.fdopen(w, "w")


def play_over_pipes(prover, public, rounds, seed, stop_on_reject=True):
    to_verifier, to_prover = Pipe(), Pipe()
    result = {}

    def prover_side():
        try:
            result["prover"] = run_prover(prover, public, seed, to_prover.reader, to_verifier.writer)
        finally:
            to_verifier.writer.close()

    thread = threading.Thread(target=prover_side)
    thread.start()
    try:
        t = run_verifier(public, rounds, seed, to_verifier.reader, to_prover.writer,
                         stop_on_reject=stop_on_reject)
    finally:
        to_prover.writer.close()
        thread.join()
    for p in (to_verifier, to_prover):
        p.reader.close()
    return t, result.get("prover")


# --------------------------------------------------------------------------- wire, in-process

@pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.value)
def test_threaded_wire_matches_run_session(kind):
    key = small_key(kind, 2)
    t, prover_verdict = play_over_pipes(HonestProver(key), key.public, 8, 99)
    assert t.accepted and prover_verdict is True
    assert write_transcript(t) == write_transcript(run_session(HonestProver(key), key.public, 8, 99))


def test_threaded_wire_with_rejecting_prover():
    key = small_key("gc", 1)
    for keep_going in (False, True):
        t, verdict = play_over_pipes(generic_cheater(key.public), key.public, 12, 5,
                                     stop_on_reject=not keep_going)
        ref = run_session(generic_cheater(key.public), key.public, 12, 5, stop_on_reject=not keep_going)
        assert write_transcript(t) == write_transcript(ref)
        assert verdict is False and not t.accepted


def test_respond_before_commit_is_a_violation():
    key = small_key("gh")
    out = io.StringIO()
    inp = io.StringIO(json.dumps({"msg": "respond", "response": {}}) + "\n")
    with pytest.raises(ProtocolViolation, match="expected commit/abort"):
        run_verifier(key.public, 3, 0, inp, out)
    assert json.loads(out.getvalue().splitlines()[0])["msg"] == "hello"


def test_prover_refuses_foreign_key():
    key, other = small_key("gc", 1), small_key("gc", 2)
    hello = io.StringIO()
    try:
        run_verifier(other.public, 1, 0, io.StringIO(""), hello)
    except ProtocolViolation:
        pass
    with pytest.raises(ProtocolViolation, match="different public key"):
        run_prover(HonestProver(key), key.public, 0, io.StringIO(hello.getvalue()), io.StringIO())


def test_recv_rejects_garbage_and_eof():
    with pytest.raises(ProtocolViolation, match="not JSON"):
        recv(io.StringIO("hello\n"), "hello")
    with pytest.raises(ProtocolViolation, match="closed"):
        recv(io.StringIO(""), "hello")
    buf = io.StringIO()
    send(buf, {"msg": "x", "b": 1, "a": 2})
    assert buf.getvalue() == '{"a":2,"b":1,"msg":"x"}\n'


def test_unreadable_response_counts_as_abort():
    key = small_key("gc")
    inp = io.StringIO(
        json.dumps({"msg": "commit", "graph": "2 0\n"}) + "\n"
        + json.dumps({"msg": "respond", "response": {"type": "bogus"}}) + "\n")
    t = run_verifier(key.public, 1, 0, inp, io.StringIO())
    assert t.records[0].verdict.reason == M.ABORT and not t.accepted


# --------------------------------------------------------------------------- CLI

@pytest.fixture
def keydir(tmp_path):
    for kind in ALL_KINDS:
        args = ["keygen", "--kind", kind.value, "--seed", "7", "--out", str(tmp_path / kind.value)]
        for name, value in SMALL_PARAMS[kind].items():
            args += ["--param", f"{name}={value}"]
        assert main(args) == 0
    return tmp_path


@pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.value)
def test_keygen_session_verify(keydir, kind, capsys):
    k = kind.value
    tr = keydir / f"{k}.jsonl"
    assert main(["session", "--key", str(keydir / f"{k}.key.json"), "--rounds", "6",
                 "--seed", "11", "--transcript", str(tr)]) == 0
    assert main(["verify", "--public", str(keydir / f"{k}.pub.json"), "--transcript", str(tr)]) == 0
    assert capsys.readouterr().out.strip().endswith("accept")


def test_verify_tampered_transcript_rejects(keydir):
    tr = keydir / "t.jsonl"
    main(["session", "--key", str(keydir / "gh.key.json"), "--rounds", "4", "--seed", "1", "--transcript", str(tr)])
    lines = tr.read_text().splitlines()
    rec = json.loads(lines[2])
    rec["bit"] = 1 - rec["bit"]
    lines[2] = json.dumps(rec)
    tr.write_text("\n".join(lines) + "\n")
    assert main(["verify", "--public", str(keydir / "gh.pub.json"), "--transcript", str(tr)]) == 1


def test_verify_with_wrong_key_is_a_usage_error(keydir):
    tr = keydir / "t.jsonl"
    main(["session", "--key", str(keydir / "gc.key.json"), "--rounds", "2", "--seed", "1", "--transcript", str(tr)])
    assert main(["verify", "--public", str(keydir / "gh.pub.json"), "--transcript", str(tr)]) == 2


def test_keygen_params_are_recorded(keydir):
    doc = json.loads((keydir / "gh.key.json").read_text())
    assert doc["params"]["base_order"] == 8 and doc["seed"] == 7


def test_tensor_attack_report(keydir, capsys):
    report = keydir / "r.json"
    code = main(["attack", "--attack", "tensor", "--public", str(keydir / "gh.pub.json"),
                 "--sessions", "5", "--rounds", "4", "--seed", "3", "--report", str(report)])
    assert code == 1
    doc = json.loads(report.read_text())
    assert doc["success_rate"] == 1.0 and doc["successes"] == doc["trials"] == 5
    assert str(report) in capsys.readouterr().out


def test_inapplicable_attack_still_writes_a_report(keydir):
    report = keydir / "r.json"
    assert main(["attack", "--attack", "tensor", "--public", str(keydir / "gc.pub.json"),
                 "--sessions", "2", "--rounds", "2", "--seed", "0", "--report", str(report)]) == 1
    doc = json.loads(report.read_text())
    assert doc["trials"] == 0 and "inapplicable" in doc["note"]


def test_gi_recovery_against_gc(keydir):
    report = keydir / "r.json"
    assert main(["attack", "--attack", "gi-recovery", "--public", str(keydir / "gc.pub.json"),
                 "--key", str(keydir / "gc.key.json"), "--sessions", "3", "--rounds", "5",
                 "--seed", "0", "--report", str(report)]) == 1
    assert json.loads(report.read_text())["success_rate"] == 1.0


def test_attack_reports_are_deterministic(keydir):
    a, b = keydir / "a.json", keydir / "b.json"
    for path in (a, b):
        main(["attack", "--attack", "cheat", "--public", str(keydir / "sgip.pub.json"),
              "--sessions", "10", "--rounds", "3", "--seed", "4", "--report", str(path)])
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["keygen", "--kind", "rsa", "--seed", "1", "--out", "x"],
    ["keygen", "--kind", "gc", "--seed", "1", "--out", "x", "--param", "colours=3"],
    ["keygen", "--kind", "gc", "--seed", "-1", "--out", "x"],
    ["session", "--key", "/nonexistent.key.json", "--rounds", "2", "--seed", "1", "--transcript", "t"],
    ["session", "--key", "k", "--rounds", "0", "--seed", "1", "--transcript", "t"],
    ["verify", "--public", "/nonexistent.pub.json", "--transcript", "t"],
    ["attack", "--attack", "melt", "--public", "p", "--sessions", "1", "--rounds", "1", "--seed", "0"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_malformed_key_file_exit_2(tmp_path):
    bad = tmp_path / "bad.key.json"
    bad.write_text("{}")
    assert main(["session", "--key", str(bad), "--rounds", "1", "--seed", "0",
                 "--transcript", str(tmp_path / "t")]) == 2


def test_session_needs_a_private_key(keydir):
    assert main(["session", "--key", str(keydir / "gc.pub.json"), "--rounds", "1", "--seed", "0",
                 "--transcript", str(keydir / "t")]) == 2


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0


def test_no_private_material_outside_key_file(keydir):
    key = small_key("gcsgip", 7)
    private_doc = json.loads(write_key(key))["private"]
    secret_strings = [json.dumps(v, sort_keys=True) for v in private_doc.values()]
    tr, rep = keydir / "t.jsonl", keydir / "r.json"
    main(["session", "--key", str(keydir / "gcsgip.key.json"), "--rounds", "5", "--seed", "2", "--transcript", str(tr)])
    main(["attack", "--attack", "cheat", "--public", str(keydir / "gcsgip.pub.json"),
          "--sessions", "2", "--rounds", "2", "--seed", "0", "--report", str(rep)])
    for path in keydir.iterdir():
        if path.name.endswith(".key.json"):
            continue
        text = path.read_text()
        assert '"private"' not in text and '"g1_ref"' not in text, path.name
        for s in secret_strings:
            assert s not in text


# --------------------------------------------------------------------------- split mode across processes

@pytest.mark.parametrize("kind", ["gh", "gcsgip"])
def test_split_mode_is_byte_identical(keydir, kind):
    split, local = keydir / "split.jsonl", keydir / "local.jsonl"
    codes = run_split(keydir / f"{kind}.key.json", keydir / f"{kind}.pub.json", 6, 21, split)
    assert codes == (0, 0)
    assert main(["session", "--key", str(keydir / f"{kind}.key.json"), "--rounds", "6", "--seed", "21",
                 "--transcript", str(local)]) == 0
    assert split.read_bytes() == local.read_bytes()
    assert read_transcript(split.read_text()).accepted


def test_verifier_process_out_of_order_exits_2(keydir):
    msg = json.dumps({"msg": "respond", "response": {"type": "map"}}) + "\n"
    proc = subprocess.run([sys.executable, "-m", "graphauth", "verifier", "--public", str(keydir / "gc.pub.json"),
                           "--rounds", "2", "--seed", "0"], input=msg, capture_output=True, text=True, timeout=60)
    assert proc.returncode == 2
    assert "expected commit" in proc.stderr
