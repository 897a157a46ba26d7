"""JSON forms of matrices and map specifications.

A matrix is ``{"rows": R, "cols": C, "data": [[re, im], ...]}`` in row-major
order. A map specification is an object with a ``kind``:

    {"kind": "ad", "s": <matrix>}                  x -> s^* x s
    {"kind": "ad_transpose", "s": <matrix>}        Ad_s o t
    {"kind": "identity", "r": 3}
    {"kind": "transpose", "r": 2}
    {"kind": "embed_S", "r": 2, "n": 3}
    {"kind": "compress_T", "m": 3, "r": 2}
    {"kind": "choi", "m": 2, "n": 2, "choi": <matrix>}
    {"kind": "compose", "maps": [f, g]}            f o g, so g acts first

Errors carry the JSON path of the offending value (or line and column for
text that is not JSON at all).
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .maps import MapRep, ad, compose, identity_map, map_of_choi, st_maps, transpose_map


class ParseError(ValueError):
    pass


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"malformed JSON at line {err.lineno}, column {err.colno}: {err.msg}") from None


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def vector_to_json(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


def _field(obj, key, path):
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected an object")
    if key not in obj:
        raise ParseError(f"{path}: missing field {key!r}")
    return obj[key]


def _int(obj, key, path, low=1) -> int:
    value = _field(obj, key, path)
    if isinstance(value, bool) or not isinstance(value, int) or value < low:
        raise ParseError(f"{path}.{key}: expected an integer >= {low}, got {value!r}")
    return value


def matrix_from_json(obj, path: str = "$") -> np.ndarray:
    rows = _int(obj, "rows", path)
    cols = _int(obj, "cols", path)
    data = _field(obj, "data", path)
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ParseError(f"{path}.data: expected {rows * cols} entries for a {rows}x{cols} matrix")
    out = np.empty(rows * cols, dtype=complex)
    for k, entry in enumerate(data):
        ok = (isinstance(entry, list) and len(entry) == 2
              and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry))
        if not ok:
            raise ParseError(f"{path}.data[{k}]: expected [re, im], got {entry!r}")
        out[k] = complex(entry[0], entry[1])
    return out.reshape(rows, cols)


def map_from_json(obj, path: str = "$") -> MapRep:
    kind = _field(obj, "kind", path)
    if kind == "ad":
        return ad(matrix_from_json(_field(obj, "s", path), path + ".s"))
    if kind == "ad_transpose":
        s = matrix_from_json(_field(obj, "s", path), path + ".s")
        return compose(ad(s), transpose_map(s.shape[0]))
    if kind == "identity":
        return identity_map(_int(obj, "r", path))
    if kind == "transpose":
        return transpose_map(_int(obj, "r", path))
    if kind == "embed_S":
        r, n = _int(obj, "r", path), _int(obj, "n", path)
        if r > n:
            raise ParseError(f"{path}: embed_S needs r <= n, got r={r}, n={n}")
        return st_maps(r, n)[0]
    if kind == "compress_T":
        m, r = _int(obj, "m", path), _int(obj, "r", path)
        if r > m:
            raise ParseError(f"{path}: compress_T needs r <= m, got m={m}, r={r}")
        return st_maps(r, m)[1]
    if kind == "choi":
        m, n = _int(obj, "m", path), _int(obj, "n", path)
        return map_of_choi(matrix_from_json(_field(obj, "choi", path), path + ".choi"), m, n)
    if kind == "compose":
        maps = _field(obj, "maps", path)
        if not isinstance(maps, list) or len(maps) < 1:
            raise ParseError(f"{path}.maps: expected a nonempty list of maps")
        reps = [map_from_json(sub, f"{path}.maps[{k}]") for k, sub in enumerate(maps)]
        result = reps[-1]
        for rep in reversed(reps[:-1]):
            result = compose(rep, result)
        return result
    raise ParseError(f"{path}.kind: unknown map kind {kind!r}")
