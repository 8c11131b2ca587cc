"""Byte-exact text and JSON serialisation of a hermitian unital.

Text layout::

    unital q=<q> p=<p> n=<n> v=<v> b=<b> modulus=<c0,...,c2n>
    <sorted point indices of block 0>
    ...
    point <i> <X> <Y> <Z>
    ...

Field elements are written as their integer codes; newline is LF.
"""

from __future__ import annotations

import json

from .unital import HermitianUnital, quad_ext_for_order


def header(u: HermitianUnital) -> str:
    p = u.params()
    mod = ",".join(map(str, p["modulus"]))
    return f"unital q={p['q']} p={p['p']} n={p['n']} v={p['v']} b={p['b']} modulus={mod}"


def to_text(u: HermitianUnital) -> str:
    lines = [header(u)]
    lines.extend(" ".join(map(str, b)) for b in sorted(u.blocks))
    lines.extend(f"point {i} {x} {y} {z}" for i, (x, y, z) in enumerate(u.points))
    return "\n".join(lines) + "\n"


def to_json_obj(u: HermitianUnital) -> dict:
    return {
        "params": u.params(),
        "blocks": [list(b) for b in sorted(u.blocks)],
        "points": [list(p) for p in u.points],
        "tangents": [list(t) for t in u.tangent],
    }


def to_json(u: HermitianUnital) -> str:
    return json.dumps(to_json_obj(u), sort_keys=True, separators=(",", ":")) + "\n"


def export(u: HermitianUnital, format: str = "text") -> bytes:
    if format == "text":
        return to_text(u).encode("utf-8")
    if format == "json":
        return to_json(u).encode("utf-8")
    raise ValueError(f"unknown export format {format!r}")


def parse_text(data: bytes | str) -> dict:
    """Parse a text export into ``{params, blocks, points}``."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    rows = data.split("\n")
    if rows[-1] != "":
        raise ValueError("export must end with a newline")
    rows = rows[:-1]
    head = rows[0].split()
    if head[0] != "unital":
        raise ValueError("missing unital header")
    params = {}
    for item in head[1:]:
        key, val = item.split("=", 1)
        params[key] = [int(c) for c in val.split(",")] if key == "modulus" else int(val)
    nb = params["b"]
    blocks = [[int(x) for x in r.split()] for r in rows[1:1 + nb]]
    points = []
    for i, r in enumerate(rows[1 + nb:]):
        tag, idx, *coords = r.split()
        if tag != "point" or int(idx) != i:
            raise ValueError(f"bad point line {r!r}")
        points.append([int(c) for c in coords])
    if len(points) != params["v"]:
        raise ValueError("point count does not match header")
    return {"params": params, "blocks": blocks, "points": points}


def parse_json(data: bytes | str) -> dict:
    return json.loads(data)


def unital_from_export(data: bytes | str, format: str = "text") -> HermitianUnital:
    """Rebuild a unital from an export and check the stored blocks agree."""
    obj = parse_text(data) if format == "text" else parse_json(data)
    params = obj["params"]
    ext = quad_ext_for_order(params["q"], params["modulus"])
    u = HermitianUnital(ext, [tuple(p) for p in obj["points"]])
    if [list(b) for b in sorted(u.blocks)] != obj["blocks"]:
        raise ValueError("stored blocks do not match the point set")
    return u
