"""Text and JSON formats: graphs, keys, responses, transcripts.

Graph text format::

    # optional comment lines
    <n> <m>
    <u> <v>        (m lines, 0 <= u < v < n, sorted on write, any order on read)

Keys are JSON documents with ``format_version``, ``kind``, ``params``, ``seed``,
``public`` and (full keys only) ``private``.  Transcripts are JSON lines: one header
object, then one object per round.  Everything is written canonically (sorted keys,
fixed separators) so that identical values give identical bytes.

The public-key digest is FNV-1a 64 over the canonical JSON of
``{"kind": ..., "public": ...}``, rendered as 16 hex digits.
"""

from __future__ import annotations

import json
from typing import Any

from .graphs import Coloring, Graph, SubgraphRef, VertexMap
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
from .messages import (
    ColoredSubgraph,
    ColoringOnly,
    Commitment,
    MapResponse,
    Response,
    RoundRecord,
    SubgraphAndMap,
    Transcript,
    Verdict,
)
from .rng import fnv1a64

FORMAT_VERSION = 1


class FormatError(ValueError):
    """Malformed graph text or JSON document; the message names the line or field path."""


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# --------------------------------------------------------------------------- graph text


def write_graph(g: Graph) -> str:
    lines = [f"{g.order} {g.size}"]
    lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int, what: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise FormatError(f"line {lineno}: expected two integers for {what}, got {line.strip()!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError(f"line {lineno}: non-integer {what} {line.strip()!r}") from None


def parse_graph(text: str) -> Graph:
    header = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if header is None:
            n, m = _ints(stripped, lineno, "header")
            if n < 0 or m < 0:
                raise FormatError(f"line {lineno}: negative header value")
            header = (n, m)
            continue
        u, v = _ints(stripped, lineno, "edge")
        n = header[0]
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"line {lineno}: vertex out of range for order {n}")
        if u == v:
            raise FormatError(f"line {lineno}: loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise FormatError(f"line {lineno}: duplicate edge {key}")
        seen.add(key)
        edges.append(key)
    if header is None:
        raise FormatError("missing header line '<n> <m>'")
    if len(edges) != header[1]:
        raise FormatError(f"header declares {header[1]} edges but {len(edges)} edge lines follow")
    return Graph(header[0], edges)


# --------------------------------------------------------------------------- field helpers


def _field(doc: Any, path: str, key: str, kind: type | tuple[type, ...]):
    if not isinstance(doc, dict):
        raise FormatError(f"{path or '<root>'}: expected an object")
    if key not in doc:
        raise FormatError(f"{path + '.' if path else ''}{key}: missing")
    value = doc[key]
    if kind is int and isinstance(value, bool):
        raise FormatError(f"{path + '.' if path else ''}{key}: expected int")
    if not isinstance(value, kind):
        name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise FormatError(f"{path + '.' if path else ''}{key}: expected {name}")
    return value


def _int_list(value: Any, path: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise FormatError(f"{path}: expected a list of integers")
    return value


def _wrap(path: str, build):
    try:
        return build()
    except FormatError:
        raise
    except (ValueError, TypeError) as exc:
        raise FormatError(f"{path}: {exc}") from None


# --------------------------------------------------------------------------- small docs


def map_to_doc(f: VertexMap) -> dict:
    return {"domain_order": f.domain_order, "codomain_order": f.codomain_order, "images": f.images.tolist()}


def map_from_doc(doc: Any, path: str = "map") -> VertexMap:
    images = _int_list(_field(doc, path, "images", list), f"{path}.images")
    domain = _field(doc, path, "domain_order", int)
    codomain = _field(doc, path, "codomain_order", int)
    if domain != len(images):
        raise FormatError(f"{path}.domain_order: {domain} does not match {len(images)} images")
    return _wrap(path, lambda: VertexMap(images, codomain))


def coloring_to_doc(c: Coloring) -> dict:
    return {"k": c.k, "colors": c.colors.tolist()}


def coloring_from_doc(doc: Any, path: str = "coloring") -> Coloring:
    colors = _int_list(_field(doc, path, "colors", list), f"{path}.colors")
    k = _field(doc, path, "k", int)
    return _wrap(path, lambda: Coloring(colors, k))


def subgraph_to_doc(s: SubgraphRef) -> dict:
    return {"host_order": s.host_order, "vertices": s.vertices.tolist(), "edges": s.edges.tolist()}


def subgraph_from_doc(doc: Any, path: str = "subgraph") -> SubgraphRef:
    host = _field(doc, path, "host_order", int)
    verts = _int_list(_field(doc, path, "vertices", list), f"{path}.vertices")
    edges = _field(doc, path, "edges", list)
    for i, e in enumerate(edges):
        if len(_int_list(e, f"{path}.edges[{i}]")) != 2:
            raise FormatError(f"{path}.edges[{i}]: expected a vertex pair")
    return _wrap(path, lambda: SubgraphRef(host, verts, edges))


def graph_from_field(doc: Any, path: str, key: str) -> Graph:
    text = _field(doc, path, key, str)
    try:
        return parse_graph(text)
    except FormatError as exc:
        raise FormatError(f"{path}.{key}: {exc}") from None


# --------------------------------------------------------------------------- responses


def response_to_doc(r: Response) -> dict:
    if isinstance(r, MapResponse):
        return {"type": "map", "map": map_to_doc(r.map)}
    if isinstance(r, SubgraphAndMap):
        return {"type": "subgraph_and_map", "subgraph": subgraph_to_doc(r.subgraph), "map": map_to_doc(r.map)}
    if isinstance(r, ColoredSubgraph):
        return {"type": "colored_subgraph", "subgraph": subgraph_to_doc(r.subgraph),
                "coloring": coloring_to_doc(r.coloring)}
    if isinstance(r, ColoringOnly):
        return {"type": "coloring", "coloring": coloring_to_doc(r.coloring)}
    raise TypeError(f"not a response: {type(r).__name__}")


def response_from_doc(doc: Any, path: str = "response") -> Response:
    kind = _field(doc, path, "type", str)
    if kind == "map":
        return MapResponse(map_from_doc(_field(doc, path, "map", dict), f"{path}.map"))
    if kind == "subgraph_and_map":
        return SubgraphAndMap(subgraph_from_doc(_field(doc, path, "subgraph", dict), f"{path}.subgraph"),
                              map_from_doc(_field(doc, path, "map", dict), f"{path}.map"))
    if kind == "colored_subgraph":
        return ColoredSubgraph(subgraph_from_doc(_field(doc, path, "subgraph", dict), f"{path}.subgraph"),
                               coloring_from_doc(_field(doc, path, "coloring", dict), f"{path}.coloring"))
    if kind == "coloring":
        return ColoringOnly(coloring_from_doc(_field(doc, path, "coloring", dict), f"{path}.coloring"))
    raise FormatError(f"{path}.type: unknown response type {kind!r}")


def verdict_to_doc(v: Verdict) -> dict:
    return {"accept": v.accepted, "reason": v.reason}


def verdict_from_doc(doc: Any, path: str = "verdict") -> Verdict:
    accept = _field(doc, path, "accept", bool)
    reason = doc.get("reason")
    if reason is not None and not isinstance(reason, str):
        raise FormatError(f"{path}.reason: expected string or null")
    return Verdict(accept, reason)


# --------------------------------------------------------------------------- keys


def public_to_doc(pub: PublicKey) -> dict:
    if isinstance(pub, GhPublic):
        return {"graphs": {"g1": write_graph(pub.g1), "g2": write_graph(pub.g2)}}
    if isinstance(pub, SgipPublic):
        return {"graphs": {"omega": write_graph(pub.omega), "g2": write_graph(pub.g2)}}
    if isinstance(pub, GcPublic):
        return {"graphs": {"gamma": write_graph(pub.gamma)}, "k": pub.k}
    if isinstance(pub, GcSgipPublic):
        return {"graphs": {"gamma": write_graph(pub.gamma)}, "n": pub.n, "k": pub.k}
    raise TypeError(f"not a public key: {type(pub).__name__}")


def public_from_doc(kind: ProtocolKind, doc: Any, path: str = "public") -> PublicKey:
    graphs = _field(doc, path, "graphs", dict)
    gpath = f"{path}.graphs"
    if kind is ProtocolKind.GH:
        return GhPublic(graph_from_field(graphs, gpath, "g1"), graph_from_field(graphs, gpath, "g2"))
    if kind is ProtocolKind.SGIP:
        return SgipPublic(graph_from_field(graphs, gpath, "omega"), graph_from_field(graphs, gpath, "g2"))
    if kind is ProtocolKind.GC:
        return GcPublic(graph_from_field(graphs, gpath, "gamma"), _field(doc, path, "k", int))
    return GcSgipPublic(graph_from_field(graphs, gpath, "gamma"),
                        _field(doc, path, "n", int), _field(doc, path, "k", int))


def public_key_digest(pub: PublicKey) -> str:
    return f"{fnv1a64(canonical_json({'kind': pub.kind.value, 'public': public_to_doc(pub)})):016x}"


def _private_to_doc(key: KeyPair) -> dict:
    if isinstance(key, GhKeyPair):
        return {"maps": {"alpha": map_to_doc(key.alpha)}}
    if isinstance(key, SgipKeyPair):
        return {"maps": {"alpha": map_to_doc(key.alpha)}, "subgraphs": {"g1_ref": subgraph_to_doc(key.g1_ref)}}
    if isinstance(key, GcKeyPair):
        return {"coloring": coloring_to_doc(key.coloring)}
    return {"subgraphs": {"g1_ref": subgraph_to_doc(key.g1_ref)}, "coloring": coloring_to_doc(key.coloring)}


def key_to_doc(key: KeyPair | PublicKey, *, public_only: bool = False) -> dict:
    is_pair = hasattr(key, "public")
    pub = key.public if is_pair else key
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": pub.kind.value,
        "params": dict(key.params) if is_pair else {},
        "seed": key.seed if is_pair else None,
        "public": public_to_doc(pub),
    }
    if is_pair and not public_only:
        doc["private"] = _private_to_doc(key)
    return doc


def write_key(key: KeyPair | PublicKey, *, public_only: bool = False) -> str:
    return json.dumps(key_to_doc(key, public_only=public_only), sort_keys=True, indent=2) + "\n"


def key_from_doc(doc: Any) -> KeyPair | PublicKey:
    """Full key pair when a ``private`` object is present, else the public key alone."""
    version = _field(doc, "", "format_version", int)
    if version != FORMAT_VERSION:
        raise FormatError(f"format_version: unsupported version {version}")
    name = _field(doc, "", "kind", str)
    try:
        kind = ProtocolKind(name)
    except ValueError:
        raise FormatError(f"kind: unknown protocol kind {name!r}") from None
    pub = public_from_doc(kind, _field(doc, "", "public", dict))
    if "private" not in doc:
        return pub
    params = _field(doc, "", "params", dict)
    seed = doc.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise FormatError("seed: expected int or null")
    priv = _field(doc, "", "private", dict)
    p = "private"
    if kind is ProtocolKind.GH:
        alpha = map_from_doc(_field(_field(priv, p, "maps", dict), f"{p}.maps", "alpha", dict), f"{p}.maps.alpha")
        return GhKeyPair(pub, alpha, params, seed)
    if kind is ProtocolKind.SGIP:
        alpha = map_from_doc(_field(_field(priv, p, "maps", dict), f"{p}.maps", "alpha", dict), f"{p}.maps.alpha")
        ref = subgraph_from_doc(_field(_field(priv, p, "subgraphs", dict), f"{p}.subgraphs", "g1_ref", dict),
                                f"{p}.subgraphs.g1_ref")
        return SgipKeyPair(pub, ref, alpha, params, seed)
    coloring = coloring_from_doc(_field(priv, p, "coloring", dict), f"{p}.coloring")
    if kind is ProtocolKind.GC:
        return GcKeyPair(pub, coloring, params, seed)
    ref = subgraph_from_doc(_field(_field(priv, p, "subgraphs", dict), f"{p}.subgraphs", "g1_ref", dict),
                            f"{p}.subgraphs.g1_ref")
    return GcSgipKeyPair(pub, ref, coloring, params, seed)


def read_key(text: str) -> KeyPair | PublicKey:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not JSON: {exc}") from None
    return key_from_doc(doc)


# --------------------------------------------------------------------------- transcripts


def header_doc(t: Transcript) -> dict:
    return {
        "type": "header",
        "format_version": FORMAT_VERSION,
        "kind": t.kind.value,
        "digest": t.digest,
        "master_seed": t.master_seed,
        "prover_seed": t.prover_seed,
        "verifier_seed": t.verifier_seed,
        "requested_rounds": t.requested_rounds,
        "rounds": len(t.records),
        "params": t.params,
    }


def record_doc(r: RoundRecord) -> dict:
    return {
        "type": "round",
        "round": r.index,
        "commitment": write_graph(r.commitment.graph) if r.commitment is not None else None,
        "bit": r.bit,
        "response": response_to_doc(r.response) if r.response is not None else None,
        "verdict": verdict_to_doc(r.verdict),
    }


def write_transcript(t: Transcript) -> str:
    lines = [canonical_json(header_doc(t))]
    lines.extend(canonical_json(record_doc(r)) for r in t.records)
    return "\n".join(lines) + "\n"


def _record_from_doc(doc: Any, kind: ProtocolKind, lineno: int) -> RoundRecord:
    path = f"line {lineno}"
    if _field(doc, path, "type", str) != "round":
        raise FormatError(f"{path}.type: expected 'round'")
    index = _field(doc, path, "round", int)
    text = doc.get("commitment")
    commitment = None
    if text is not None:
        commitment = Commitment(kind, graph_from_field(doc, path, "commitment"))
    bit = doc.get("bit")
    if bit is not None and (not isinstance(bit, int) or isinstance(bit, bool)):
        raise FormatError(f"{path}.bit: expected int or null")
    rdoc = doc.get("response")
    response = response_from_doc(rdoc, f"{path}.response") if rdoc is not None else None
    verdict = verdict_from_doc(_field(doc, path, "verdict", dict), f"{path}.verdict")
    return RoundRecord(index, commitment, bit, response, verdict)


def read_transcript(text: str) -> Transcript:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty transcript")
    try:
        docs = [json.loads(ln) for ln in lines]
    except json.JSONDecodeError as exc:
        raise FormatError(f"not JSON lines: {exc}") from None
    head = docs[0]
    if _field(head, "header", "type", str) != "header":
        raise FormatError("header.type: first line must be the header")
    version = _field(head, "header", "format_version", int)
    if version != FORMAT_VERSION:
        raise FormatError(f"header.format_version: unsupported version {version}")
    name = _field(head, "header", "kind", str)
    try:
        kind = ProtocolKind(name)
    except ValueError:
        raise FormatError("header.kind: unknown protocol kind") from None
    rounds = _field(head, "header", "rounds", int)
    if rounds != len(docs) - 1:
        raise FormatError(f"header.rounds: header declares {rounds} rounds but {len(docs) - 1} records follow")
    t = Transcript(
        kind=kind,
        digest=_field(head, "header", "digest", str),
        master_seed=_field(head, "header", "master_seed", int),
        prover_seed=_field(head, "header", "prover_seed", int),
        verifier_seed=_field(head, "header", "verifier_seed", int),
        requested_rounds=_field(head, "header", "requested_rounds", int),
        params=_field(head, "header", "params", dict),
    )
    t.records = [_record_from_doc(d, kind, i + 2) for i, d in enumerate(docs[1:])]
    return t

