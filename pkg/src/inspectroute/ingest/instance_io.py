"""Instance document format.

A JSON document with a fixed key order::

    {
     "format": "inspectroute.instance",
     "version": 1,
     "name": "Car-Door",
     "n": 106,
     "edge_count": 184,
     "metadata": {...},
     "points": [[x, y, z], ...],
     "edges": [[i, j, cost], ...]
    }

Edges are listed once with ``i < j`` in row-major order. Floats use Python's
shortest round-trip repr, so ``read_instance(write_instance(x)) == x`` bit for
bit and equal instances always serialize to identical bytes.
"""
from __future__ import annotations

import json
import math

import numpy as np

from ..core import Instance
from ..errors import SchemaError

FORMAT = "inspectroute.instance"
VERSION = 1
_KEYS = ("format", "version", "name", "n", "edge_count", "metadata", "points", "edges")


def _num(x: float) -> str:
    return json.dumps(float(x))


def write_instance(instance: Instance) -> bytes:
    lines = [
        "{",
        f' "format": {json.dumps(FORMAT)},',
        f' "version": {VERSION},',
        f' "name": {json.dumps(instance.name)},',
        f' "n": {instance.n},',
        f' "edge_count": {instance.edge_count},',
        f' "metadata": {json.dumps(instance.metadata, sort_keys=True, allow_nan=False)},',
        ' "points": [',
    ]
    pts = instance.points.tolist()
    lines += [f"  [{_num(x)}, {_num(y)}, {_num(z)}]" + ("," if k < len(pts) - 1 else "") for k, (x, y, z) in enumerate(pts)]
    lines.append(" ],")
    lines.append(' "edges": [')
    edges = instance.edges()
    lines += [f"  [{i}, {j}, {_num(c)}]" + ("," if k < len(edges) - 1 else "") for k, (i, j, c) in enumerate(edges)]
    lines.append(" ]")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _reject_constant(token):
    raise SchemaError("$", f"non-finite number {token}")


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return (isinstance(x, (int, float)) and not isinstance(x, bool)) and math.isfinite(x)


def read_instance(data: bytes | str) -> Instance:
    """Parse and validate an instance document; any deviation raises :class:`SchemaError`."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError:
            raise SchemaError("$", "document is not UTF-8") from None
    try:
        doc = json.loads(data, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise SchemaError("$", f"invalid JSON at line {e.lineno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError("$", "top level must be an object")
    for key in doc:
        if key not in _KEYS:
            raise SchemaError(key, "unknown field")
    for key in _KEYS:
        if key not in doc:
            raise SchemaError(key, "missing field")
    if doc["format"] != FORMAT:
        raise SchemaError("format", f"expected {FORMAT!r}")
    if doc["version"] != VERSION or not _is_int(doc["version"]):
        raise SchemaError("version", f"unsupported version {doc['version']!r}")
    name = doc["name"]
    if not isinstance(name, str):
        raise SchemaError("name", "must be a string")
    n = doc["n"]
    if not _is_int(n) or n < 1:
        raise SchemaError("n", "must be a positive integer")
    if not isinstance(doc["metadata"], dict):
        raise SchemaError("metadata", "must be an object")

    points = doc["points"]
    if not isinstance(points, list) or len(points) != n:
        raise SchemaError("points", f"must be a list of {n} points")
    for k, p in enumerate(points):
        if not isinstance(p, list) or len(p) != 3:
            raise SchemaError(f"points[{k}]", "must be [x, y, z]")
        for c, v in enumerate(p):
            if not _is_num(v):
                raise SchemaError(f"points[{k}][{c}]", "must be a finite number")

    edges = doc["edges"]
    if not isinstance(edges, list):
        raise SchemaError("edges", "must be a list")
    C = np.full((n, n), np.inf)
    np.fill_diagonal(C, 0.0)
    for k, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 3:
            raise SchemaError(f"edges[{k}]", "must be [i, j, cost]")
        i, j, c = e
        for pos, v in ((0, i), (1, j)):
            if not _is_int(v) or not 0 <= v < n:
                raise SchemaError(f"edges[{k}][{pos}]", f"node index must be an integer in [0, {n})")
        if i == j:
            raise SchemaError(f"edges[{k}]", "self loop")
        if not _is_num(c) or c < 0:
            raise SchemaError(f"edges[{k}][2]", "cost must be a finite non-negative number")
        if np.isfinite(C[i, j]):
            raise SchemaError(f"edges[{k}]", f"duplicate edge {i}-{j}")
        C[i, j] = C[j, i] = float(c)
    if not _is_int(doc["edge_count"]) or doc["edge_count"] != len(edges):
        raise SchemaError("edge_count", f"declares {doc['edge_count']!r} but {len(edges)} edges listed")
    return Instance(name, np.array(points, dtype=np.float64), C, doc["metadata"])


def read_header(data: bytes | str) -> dict:
    """Name and size fields of a document, without building the instance."""
    inst = read_instance(data)
    return {"name": inst.name, "n": inst.n, "edge_count": inst.edge_count}
