from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layercodes.css import CssCode, builtin, random_css_code
from layercodes.layout import (
    BOUNDARY_POINT_KINDS,
    BULK_POINT_KINDS,
    LINE_KINDS,
    POINT_KINDS,
    classify_junctions,
    compute_pairing,
    plan_layout,
)


def registry(name_or_code, c=2):
    code = builtin(name_or_code) if isinstance(name_or_code, str) else name_or_code
    layout = plan_layout(code, c)
    return layout, classify_junctions(layout, compute_pairing(code))


def test_kind_catalogs():
    assert len(BULK_POINT_KINDS) == 10 and len(BOUNDARY_POINT_KINDS) == 12
    assert len(set(POINT_KINDS)) == 22
    assert {"trivialY", "nontrivialY", "firstZ", "middleZ", "lastZ", "firstX", "middleX", "lastX"} <= set(LINE_KINDS)


# ---------------------------------------------------------------- plan_layout


def test_rep3_layout():
    layout = plan_layout(builtin("rep(3)"), 2)
    c = 2
    assert layout.layer_count == 5
    # half-edge units: consecutive qubit layers are 2c apart
    assert [l.y for l in layout.qubit_layers] == [0, 2 * c, 4 * c]
    assert [l.span for l in layout.zcheck_layers] == [(0, 2 * c), (2 * c, 4 * c)]
    assert layout.xcheck_layers == ()


@pytest.mark.parametrize("name,split", [("c422", (4, 1, 1)), ("shor", (9, 2, 6)), ("steane", (7, 3, 3))])
def test_layer_split(name, split):
    layout = plan_layout(builtin(name), 2)
    got = (len(layout.qubit_layers), len(layout.xcheck_layers), len(layout.zcheck_layers))
    assert got == split
    assert layout.layer_count == sum(split)


def test_small_spacing_rejected():
    with pytest.raises(ValueError):
        plan_layout(builtin("rep(3)"), 1)


def test_invalid_code_rejected():
    with pytest.raises(ValueError):
        plan_layout(CssCode.from_supports("bad", 1, [[0]], [[0]]), 2)


def test_degenerate_extent_floor():
    layout = plan_layout(builtin("rep(3)"), 3)
    lx, ly, lz = layout.bbox
    assert lz == 2 * 3  # no X checks: one superlattice step
    assert lx == 2 * 3 * 3
    assert ly == 2 * 3 * 2


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 4))
def test_layout_invariants(seed, c):
    code = random_css_code(seed)
    layout = plan_layout(code, c)
    ys = [layout.y_of(q) for q in range(code.n)]
    assert ys == sorted(ys) and len(set(ys)) == len(ys)
    assert [l.coord for l in layout.zcheck_layers] == sorted({l.coord for l in layout.zcheck_layers})
    assert [l.coord for l in layout.xcheck_layers] == sorted({l.coord for l in layout.xcheck_layers})
    for layers, rows in ((layout.zcheck_layers, code.hz.supports()), (layout.xcheck_layers, code.hx.supports())):
        for layer, row in zip(layers, rows):
            if row:
                assert layer.span == (min(ys[q] for q in row), max(ys[q] for q in row))
            else:
                assert layer.span is None
    assert layout.layer_count == code.n + code.n_x + code.n_z


# ---------------------------------------------------------------- pairing


def test_pairing_examples():
    assert compute_pairing(builtin("c422")).get(0, 0) == ((0, 1), (2, 3))
    assert compute_pairing(builtin("shor")).get(0, 0) == ((0, 1),)
    # shor X check 0 covers qubits 0-5, Z check 5 covers 7, 8
    assert compute_pairing(builtin("shor")).get(0, 5) == ()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_pairing_is_consecutive_perfect_matching(seed):
    code = random_css_code(seed)
    pairing = compute_pairing(code)
    xs, zs = code.hx.supports(), code.hz.supports()
    for k, sx in enumerate(xs):
        for j, sz in enumerate(zs):
            shared = sorted(set(sx) & set(sz))
            pairs = pairing.get(k, j)
            flat = [q for p in pairs for q in p]
            assert flat == shared


# ---------------------------------------------------------------- registry


def test_rep3_registry():
    _, reg = registry("rep(3)")
    counts = Counter(l.kind for l in reg.lines)
    assert counts == {"firstZ": 2, "lastZ": 2}
    z_lines = [l for l in reg.lines if l.kind.endswith("Z")]
    assert len(z_lines) == 4
    assert not [l for l in reg.lines if l.kind.endswith("X") or l.kind.endswith("Y")]


def test_c422_y_pattern():
    layout, reg = registry("c422")
    ys = sorted((l.start[1], l.kind) for l in reg.lines if l.kind.endswith("Y"))
    step = layout.step
    assert ys == [(0, "nontrivialY"), (step, "trivialY"), (2 * step, "nontrivialY")]


@pytest.mark.parametrize("name", ["rep(3)", "c422", "shor", "steane", "surface(2)"])
def test_points_classified(name):
    _, reg = registry(name)
    assert reg.points
    sites = Counter((p.site, p.kind in BULK_POINT_KINDS) for p in reg.points)
    assert all(v == 1 for v in sites.values())
    assert all(p.kind in POINT_KINDS for p in reg.points)


def test_steane_has_bulk_points():
    _, reg = registry("steane")
    kinds = {p.kind for p in reg.points}
    assert kinds & set(BULK_POINT_KINDS)
    assert kinds & set(BOUNDARY_POINT_KINDS)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_registry_invariants(seed):
    code = random_css_code(seed)
    layout, reg = registry(code)
    pairing = compute_pairing(code)
    # one record per (layer, layer) intersection segment
    keys = Counter((l.layers, l.start, l.end) for l in reg.lines)
    assert all(v == 1 for v in keys.values())
    # z junction roles read first, middle*, last along each Z-check layer
    for zl in layout.zcheck_layers:
        roles = [
            l.kind for l in sorted(reg.lines, key=lambda l: l.start[1])
            if zl.layer_id in l.layers and l.kind in ("firstZ", "middleZ", "lastZ")
        ]
        if len(zl.support) == 1:
            assert roles == ["firstZ"]
        elif roles:
            assert roles[0] == "firstZ" and roles[-1] == "lastZ"
            assert set(roles[1:-1]) <= {"middleZ"}
    for xl in layout.xcheck_layers:
        roles = [
            l.kind for l in sorted(reg.lines, key=lambda l: l.start[1])
            if xl.layer_id in l.layers and l.kind in ("firstX", "middleX", "lastX")
        ]
        if len(xl.support) >= 2:
            assert roles[0] == "firstX" and roles[-1] == "lastX"
    # nontrivial y segments are exactly those between paired layers
    step = layout.step
    for l in reg.lines:
        if not l.kind.endswith("Y"):
            continue
        j, k = int(l.layers[0].split(":")[1]), int(l.layers[1].split(":")[1])
        slot = l.start[1] // step
        inside = any(
            layout.position[a] <= slot < layout.position[b] for a, b in pairing.get(k, j)
        )
        assert (l.kind == "nontrivialY") == inside
