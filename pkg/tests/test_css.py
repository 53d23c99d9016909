import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layercodes.css import (
    CodeFormatError,
    CssCode,
    builtin,
    builtin_names,
    code_from_json,
    distance,
    load_code,
    logical_basis,
    logical_qubit_count,
    pairing_matrix,
    random_css_code,
    save_code,
    validate,
)
from layercodes.gf2 import BudgetExceeded, in_row_space, rank, write_matrix_market


def brute_distance(code: CssCode, pauli: str) -> int:
    """Minimum weight over all 2^n vectors that are logical of the given type."""
    stab = code.hx if pauli == "X" else code.hz
    other = code.hz if pauli == "X" else code.hx
    h = other.to_dense()
    best = None
    for mask in range(1, 1 << code.n):
        bits = np.array([(mask >> q) & 1 for q in range(code.n)], dtype=np.uint8)
        if h.size and (h @ bits % 2).any():
            continue
        from layercodes.gf2 import BinaryVector

        if in_row_space(stab, BinaryVector.from_dense(bits)):
            continue
        w = int(bits.sum())
        best = w if best is None else min(best, w)
    return best


# ---------------------------------------------------------------- examples


def test_validate_examples():
    assert validate(builtin("steane")).ok
    bad = CssCode.from_supports("bad", 1, [[0]], [[0]])
    report = validate(bad)
    assert not report.ok and report.violations == [(0, 0)]
    assert validate(CssCode.from_supports("z", 3, [], [[0, 1]])).ok


def test_validate_shape_mismatch():
    with pytest.raises(ValueError):
        CssCode.from_supports("x", 2, [[3]], [])


def test_logical_qubit_count_examples():
    assert logical_qubit_count(builtin("steane")) == 1
    assert rank(builtin("steane").hx) == 3 and rank(builtin("steane").hz) == 3
    assert logical_qubit_count(builtin("c422")) == 2
    assert logical_qubit_count(builtin("rep(3)")) == 1


def test_logical_basis_rep3():
    b = logical_basis(builtin("rep(3)"))
    assert b.x_logicals.supports() == [[0, 1, 2]]
    assert b.z_logicals.supports() == [[0]]


def test_logical_basis_steane_weights():
    b = logical_basis(builtin("steane"))
    assert b.k == 1
    assert b.x_logicals.row(0).weight == 3 and b.z_logicals.row(0).weight == 3


def test_logical_basis_c422_identity_pairing():
    b = logical_basis(builtin("c422"))
    assert b.k == 2
    assert np.array_equal(b.pairing, np.eye(2, dtype=b.pairing.dtype))


def test_logical_basis_empty_for_k0():
    code = CssCode.from_supports("k0", 2, [[0, 1]], [[0, 1]])
    assert logical_basis(code).k == 0


def test_distance_examples():
    assert distance(builtin("c422")).d == 2
    assert distance(builtin("surface(2)")).d == 2
    assert distance(builtin("steane")).d == 3


def test_distance_budget_refusal():
    with pytest.raises(BudgetExceeded):
        distance(builtin("shor"), "exact", budget=2)


def test_builtin_shor_parameters():
    shor = builtin("shor")
    assert (shor.n, shor.n_x, shor.n_z, shor.max_weight) == (9, 2, 6, 6)


def test_builtin_rep3_matrices():
    rep = builtin("rep(3)")
    assert rep.hz.supports() == [[0, 1], [1, 2]]
    assert rep.hx.rows == 0


def test_builtin_surface3():
    # planar layout with L^2 + (L-1)^2 qubits; see README
    s = builtin("surface(3)")
    assert s.n == 2 * 3 * 2 + 1
    assert logical_qubit_count(s) == 1
    assert distance(s).d == 3


def test_builtin_aliases_and_unknown():
    assert builtin("rep3").hz == builtin("rep(3)").hz
    assert set(builtin_names()) >= {"c422", "shor", "steane"}
    with pytest.raises(KeyError):
        builtin("golay")


def test_pairing_matrix_overlap_parity():
    from layercodes.gf2 import BinaryMatrix

    xs = BinaryMatrix.from_supports(3, [[0, 1], [2]])
    zs = BinaryMatrix.from_supports(3, [[0], [1, 2]])
    assert pairing_matrix(xs, zs).tolist() == [[1, 1], [0, 1]]


# -------------------------------------------------------------------- I/O


def test_json_round_trip(tmp_path):
    path = tmp_path / "code.json"
    save_code(builtin("steane"), path)
    loaded = load_code(path)
    assert loaded.hx == builtin("steane").hx and loaded.hz == builtin("steane").hz


def test_matrix_market_sidecar(tmp_path):
    code = builtin("shor")
    write_matrix_market(tmp_path / "hx.mtx", code.hx)
    write_matrix_market(tmp_path / "hz.mtx", code.hz)
    (tmp_path / "shor.json").write_text(json.dumps({"name": "shor", "n": 9, "hx": "hx.mtx", "hz": "hz.mtx"}))
    loaded = load_code(tmp_path / "shor.json")
    assert loaded.hx == code.hx and loaded.hz == code.hz


@pytest.mark.parametrize(
    "payload",
    [[], {"name": "a"}, {"name": "a", "n": -1, "hx": [], "hz": []}, {"name": "a", "n": 2, "hx": [[5]], "hz": []},
     {"name": "a", "n": 2, "hx": "nope", "hz": []}, {"name": "a", "n": 2, "hx": [[True]], "hz": []}],
)
def test_schema_errors(payload):
    with pytest.raises(CodeFormatError):
        code_from_json(payload)


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{bad")
    with pytest.raises(CodeFormatError):
        load_code(path)


def test_content_hash_ignores_name():
    a = builtin("steane")
    b = CssCode("other", a.n, a.hx, a.hz)
    assert a.content_hash() == b.content_hash()


# -------------------------------------------------------------- properties


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_random_codes_are_valid_and_counted(seed):
    code = random_css_code(seed)
    assert validate(code).ok
    assert not code.hx.matmul_t(code.hz).any()
    for xr in code.hx.supports():
        for zr in code.hz.supports():
            assert len(set(xr) & set(zr)) % 2 == 0
    basis = logical_basis(code)
    assert basis.k == logical_qubit_count(code)
    if basis.k:
        assert np.array_equal(basis.pairing, np.eye(basis.k, dtype=basis.pairing.dtype))
        for i in range(basis.k):
            x, z = basis.x_logicals.row(i), basis.z_logicals.row(i)
            assert not code.hz.syndrome(x).any() and not in_row_space(code.hx, x)
            assert not code.hx.syndrome(z).any() and not in_row_space(code.hz, z)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_exact_distance_matches_enumeration(seed):
    code = random_css_code(seed, n_max=9)
    if logical_qubit_count(code) == 0:
        return
    res = distance(code)
    assert res.d_x == brute_distance(code, "X")
    assert res.d_z == brute_distance(code, "Z")
    approx = distance(code, "randomized", budget=20, seed=seed)
    assert approx.d_x >= res.d_x and approx.d_z >= res.d_z


@pytest.mark.parametrize("name", ["rep(3)", "c422", "shor", "steane"])
def test_builtin_distances_match_enumeration(name):
    code = builtin(name)
    res = distance(code)
    assert (res.d_x, res.d_z) == (brute_distance(code, "X"), brute_distance(code, "Z"))


def test_logical_basis_deterministic():
    a, b = logical_basis(builtin("shor")), logical_basis(builtin("shor"))
    assert a.x_logicals == b.x_logicals and a.z_logicals == b.z_logicals
