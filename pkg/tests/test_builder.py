import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BUILTINS, layer
from layercodes.builder import (
    MAX_WEIGHT,
    LayerCode,
    build_layer_code,
    commutation_violations,
    dumps,
    load_layer_code,
    locality_violations,
    template_catalog,
    tile_blocks,
    weight_violations,
)
from layercodes.css import CssCode, builtin, distance, logical_qubit_count, random_css_code
from layercodes.layout import LINE_KINDS, POINT_KINDS

# check modifications exist for exactly these kinds on the inputs used below
MODIFYING_KINDS = {
    "nontrivialY", "firstZ", "middleZ", "lastZ", "firstX", "middleX", "lastX",
    "first-first", "last-last", "middle-middle-above", "middle-middle-below",
    "zfirst-xmiddle", "zlast-xmiddle", "xfirst-zmiddle", "zmiddle-xcross", "xmiddle-zcross",
    "zfirst-front", "zfirst-back", "zlast-front", "zlast-back", "zmiddle-front", "zmiddle-back",
    "xfirst-left", "xfirst-right", "xlast-left", "xlast-right", "xmiddle-left", "xmiddle-right",
}
MINIMALITY_INPUTS = BUILTINS + ["surface(2)"]

# frozen counting constants for N <= beta * n * max(n_X, 1) * max(n_Z, 1) at c = 2
ALPHA, BETA = 8, 48
REP_QUBITS = {2: 58, 3: 123, 4: 208, 5: 313, 6: 438}


def check_invariants(lc: LayerCode) -> None:
    assert not lc.hx.matmul_t(lc.hz).any()
    assert commutation_violations(lc) == []
    assert weight_violations(lc) == []
    assert locality_violations(lc) == []
    assert lc.logical_qubit_count() == logical_qubit_count(lc.code)


def test_rep3_builds():
    lc = layer("rep(3)")
    check_invariants(lc)
    assert lc.logical_qubit_count() == 1


def test_steane_builds():
    lc = layer("steane")
    assert lc.layer_count == 13
    assert max(lc.hx.row_weights().max(), lc.hz.row_weights().max()) <= MAX_WEIGHT
    assert lc.logical_qubit_count() == 1


def test_single_qubit_is_surface_patch():
    lc = build_layer_code(CssCode.from_supports("one", 1, [], []), 2)
    check_invariants(lc)
    res = distance(lc.as_css())
    # one patch at the floor size: a distance-3 planar code on L^2 + (L-1)^2 qubits
    assert (lc.n, res.d, lc.logical_qubit_count()) == (13, 3, 1)


def test_empty_code():
    lc = build_layer_code(CssCode.from_supports("empty", 0, [], []), 2)
    assert lc.n == 0 and lc.layer_count == 0
    assert lc.geometry_json()["layers"] == []


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_invariants(name):
    check_invariants(layer(name))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_random_invariants(seed):
    check_invariants(build_layer_code(random_css_code(seed), 2))


@pytest.mark.parametrize("c", [2, 3])
def test_invariants_other_spacing(c):
    check_invariants(build_layer_code(builtin("c422"), c))


def test_bulk_and_boundary_weights():
    lc = layer("steane")
    for pauli in ("X", "Z"):
        weights = lc.checks(pauli).row_weights()
        for w, info in zip(weights, lc.info(pauli)):
            if info.kind == "bulk":
                assert w == 4
            elif info.kind in ("smooth", "rough"):
                assert w == 3


def test_provenance_covers_every_row():
    lc = layer("shor")
    assert len(lc.x_info) == lc.hx.rows and len(lc.z_info) == lc.hz.rows
    kinds = {i.kind for i in lc.x_info + lc.z_info}
    assert kinds <= set(LINE_KINDS) | set(POINT_KINDS) | {"bulk", "smooth", "rough"}


@pytest.mark.parametrize("m", sorted(REP_QUBITS))
def test_counting_constants(m):
    code = builtin(f"rep({m})")
    lc = layer(f"rep({m})")
    assert lc.n == REP_QUBITS[m]
    scale = code.n * max(code.n_x, 1) * max(code.n_z, 1)
    assert ALPHA * scale <= lc.n <= BETA * scale


def test_deterministic_build(tmp_path):
    a = build_layer_code(builtin("steane"), 2)
    b = build_layer_code(builtin("steane"), 2)
    assert dumps(a.to_json()) == dumps(b.to_json())
    assert a.write(tmp_path / "a") == b.write(tmp_path / "b")


def test_json_round_trip(tmp_path):
    lc = layer("c422")
    lc.write(tmp_path)
    back = load_layer_code(tmp_path / "layer_code.json")
    assert back.hx == lc.hx and back.hz == lc.hz
    assert back.qubits == lc.qubits


def test_output_schema():
    data = layer("rep(3)").to_json()
    assert {"input", "c", "qubits", "x_checks", "z_checks", "defects"} <= set(data)
    assert set(data["qubits"][0]) >= {"id", "x", "y", "z"}
    assert set(data["defects"]) == {"lines", "points"}
    json.dumps(data)


def test_geometry_schema():
    geo = layer("shor").geometry_json()
    assert len(geo["layers"]) == 17
    assert {l["plane"] for l in geo["layers"]} == {"xz", "xy", "yz"}
    for line in geo["defect_lines"]:
        assert set(line) >= {"kind", "from", "to"}


def test_rep3_geometry_counts():
    geo = layer("rep(3)").geometry_json()
    kinds = [l["kind"] for l in geo["defect_lines"]]
    assert len(geo["layers"]) == 5
    assert sum(k.endswith("Z") for k in kinds) == 4
    assert not any(k.endswith("X") or k.endswith("Y") for k in kinds)


# ------------------------------------------------------------------ tiling


def test_tile_single_block_identical():
    assert dumps(tile_blocks(builtin("rep(3)"), 2, 1).to_json()) == dumps(layer("rep(3)").to_json())


def test_tile_three_blocks():
    lc = tile_blocks(builtin("rep(3)"), 2, 3)
    assert lc.n == 3 * layer("rep(3)").n
    assert lc.logical_qubit_count() == 3
    assert not commutation_violations(lc)
    assert len(set(lc.qubits)) == lc.n


def test_tile_steane_two_blocks():
    assert tile_blocks(builtin("steane"), 2, 2).logical_qubit_count() == 2


def test_tile_rejects_zero():
    with pytest.raises(ValueError):
        tile_blocks(builtin("rep(3)"), 2, 0)


# --------------------------------------------------------------- templates


def test_template_catalog():
    catalog = template_catalog(layer("c422"))
    assert catalog
    assert all(t.weight <= MAX_WEIGHT for t in catalog)
    kinds = {t.kind for t in catalog}
    assert "nontrivialY" in kinds and "bulk" in kinds
    plain = [t for t in catalog if t.kind == "bulk"]
    assert all(t.offsets == t.replaces for t in plain)


def test_catalog_minimality():
    """Dropping any modifying kind breaks commutation or k on some input."""
    full = {n: layer(n) for n in MINIMALITY_INPUTS}
    modifying = set()
    for kind in LINE_KINDS + POINT_KINDS + ("bulk", "smooth", "rough"):
        broken = False
        for name in MINIMALITY_INPUTS:
            lc = build_layer_code(builtin(name), 2, omit=[kind])
            if lc.hx == full[name].hx and lc.hz == full[name].hz:
                continue
            modifying.add(kind)
            if commutation_violations(lc) or lc.logical_qubit_count() != logical_qubit_count(lc.code):
                broken = True
                break
        if kind in modifying:
            assert broken, kind
    assert modifying == MODIFYING_KINDS
