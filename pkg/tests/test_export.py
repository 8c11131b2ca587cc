import json

import pytest

from unitals.export import export, parse_text, to_json_obj, unital_from_export
from unitals.unital import build_unital, quad_ext_for_order


def test_text_layout_q2(unital):
    data = export(unital(2), "text")
    assert data.endswith(b"\n") and b"\r" not in data
    rows = data.decode().split("\n")[:-1]
    assert rows[0] == "unital q=2 p=2 n=1 v=9 b=12 modulus=1,1,1"
    blocks = rows[1:13]
    assert len(blocks) == 12 and all(not r.startswith("point") for r in blocks)
    assert [list(map(int, r.split())) for r in blocks] == sorted(
        sorted(map(int, r.split())) for r in blocks)
    assert rows[13] == "point 0 0 1 0"
    assert len(rows) == 1 + 12 + 9


@pytest.mark.parametrize("q", [2, 3, 4])
def test_round_trip(unital, q):
    u = unital(q)
    for fmt in ("text", "json"):
        v = unital_from_export(export(u, fmt), fmt)
        assert v.points == u.points and v.blocks == u.blocks and v.tangent == u.tangent
    parsed = parse_text(export(u, "text"))
    assert parsed["params"]["v"] == u.v and len(parsed["blocks"]) == u.b


def test_json_keys(unital):
    obj = json.loads(export(unital(2), "json"))
    assert set(obj) == {"params", "blocks", "points", "tangents"}
    assert len(obj["points"]) == 9
    assert obj == to_json_obj(unital(2)) | {"params": obj["params"]}


def test_exports_are_byte_identical_across_builds():
    a = build_unital(quad_ext_for_order(3))
    b = build_unital(quad_ext_for_order(3))
    for fmt in ("text", "json"):
        assert export(a, fmt) == export(b, fmt)


def test_modulus_override_in_header():
    ext = quad_ext_for_order(4, (1, 0, 0, 1, 1))  # X^4 + X^3 + 1, not the default
    u = build_unital(ext)
    assert export(u).split(b"\n")[0].endswith(b"modulus=1,0,0,1,1")
    assert (u.v, u.b) == (65, 208)
    assert unital_from_export(export(u)).points == u.points


def test_tampered_export_rejected(unital):
    data = export(unital(2)).decode().split("\n")
    data[1] = "0 1 2"
    with pytest.raises(ValueError):
        unital_from_export("\n".join(data))
    with pytest.raises(ValueError):
        export(unital(2), "xml")
