import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BUILTINS, layer
from layercodes.css import logical_basis, pairing_matrix
from layercodes.gf2 import BinaryMatrix, BinaryVector, in_row_space, min_weight_in_coset, nullspace_basis
from layercodes.logicals import (
    MConfiguration,
    PauliOperator,
    config_to_input_pauli,
    configs_equivalent,
    equivalence_class,
    half_space_config,
    map_layer_logical_to_input,
    quasiconcatenated_logical,
    quasiconcatenated_stabilizer,
    reduce_to_xz,
    reference_cut,
    slab_boundary_config,
    slab_count,
)


def qc_pair(name):
    lc = layer(name)
    basis = logical_basis(lc.code)
    xs = [quasiconcatenated_logical(lc, basis.x_logicals.row(i), "X") for i in range(basis.k)]
    zs = [quasiconcatenated_logical(lc, basis.z_logicals.row(i), "Z") for i in range(basis.k)]
    return lc, basis, xs, zs


def identity(lc, pauli):
    return PauliOperator(pauli, BinaryVector.zeros(lc.n))


# ------------------------------------------------------ quasiconcatenation


def test_rep3_logical_x():
    lc = layer("rep(3)")
    op = quasiconcatenated_logical(lc, BinaryVector.from_dense([1, 1, 1]), "X")
    assert not op.syndrome(lc).any()
    layers = {lc.qubit_layers[q] for q in op.support.support()}
    assert {"xz:0", "xz:1", "xz:2"} <= layers
    assert any(l.startswith("yz:") for l in layers)
    extent = lc.layout.bbox[0] // 2 + 1
    assert op.weight() >= 3 * extent


def test_c422_weight_two_logical():
    lc = layer("c422")
    v = logical_basis(lc.code).x_logicals.row(0)
    assert v.weight == 2
    op = quasiconcatenated_logical(lc, v, "X")
    assert not op.syndrome(lc).any()
    layers = {lc.qubit_layers[q] for q in op.support.support()}
    assert {l for l in layers if l.startswith("xz:")} == {f"xz:{q}" for q in v.support()}
    assert {l for l in layers if not l.startswith("xz:")} <= {"yz:0"}


def test_identity_logical():
    lc = layer("c422")
    assert quasiconcatenated_logical(lc, BinaryVector.zeros(4), "Z").weight() == 0


def test_non_normalizer_rejected():
    lc = layer("rep(3)")
    with pytest.raises(ValueError):
        quasiconcatenated_logical(lc, BinaryVector.from_dense([1, 0, 0]), "X")


def test_steane_stabilizer_in_rowspace():
    lc = layer("steane")
    for k in range(lc.code.n_x):
        op = quasiconcatenated_stabilizer(lc, k, "X")
        assert in_row_space(lc.hx, op.support)
        assert not op.syndrome(lc).any()


def test_rep3_stabilizer_is_layer_sum():
    lc = layer("rep(3)")
    op = quasiconcatenated_stabilizer(lc, 0, "Z")
    rows = lc.rows_on_layer("Z", "yz:0")
    total = BinaryVector.zeros(lc.n)
    for r in rows:
        total = total ^ lc.hz.row(r)
    assert op.support == total
    assert not op.syndrome(lc).any()
    assert (op.support ^ op.support).is_zero()


@pytest.mark.parametrize("name", BUILTINS)
def test_pairing_preserved(name):
    lc, basis, xs, zs = qc_pair(name)
    for op in xs + zs:
        assert not op.syndrome(lc).any()
    got = pairing_matrix(
        BinaryMatrix.from_vectors(lc.n, [o.support for o in xs]),
        BinaryMatrix.from_vectors(lc.n, [o.support for o in zs]),
    )
    assert np.array_equal(got, basis.pairing)


# --------------------------------------------------------- configurations


def test_rep3_slab_config():
    lc, basis, xs, _ = qc_pair("rep(3)")
    assert slab_count(lc, "X") == 2
    cfg = slab_boundary_config(lc, xs[0], 1, "left")
    assert cfg.xz == (1, 1, 1) and cfg.segments == ()


def test_identity_and_stabilizer_configs():
    lc = layer("c422")
    for s in range(slab_count(lc, "X")):
        assert slab_boundary_config(lc, identity(lc, "X"), s).weight == 0
    stab = PauliOperator("X", lc.hx.row(len(lc.x_info) // 2))
    for s in range(slab_count(lc, "X")):
        assert slab_boundary_config(lc, stab, s).weight == 0


def test_slab_out_of_range():
    lc = layer("rep(3)")
    with pytest.raises(IndexError):
        slab_boundary_config(lc, identity(lc, "X"), 5)


def test_reduce_to_xz_examples():
    lc = layer("c422")
    xz_only = MConfiguration("X", 0, (1, 1, 0, 0), ((0, 0, 0),))
    assert reduce_to_xz(xz_only, lc) == xz_only
    zero = MConfiguration("X", 0, (0, 0, 0, 0), ((0, 0, 0),))
    assert reduce_to_xz(zero, lc) == zero
    one = MConfiguration("X", 0, (0, 0, 0, 0), ((1, 0, 0),))
    out = reduce_to_xz(one, lc)
    assert out.is_xz_only() and out.weight <= 2
    assert configs_equivalent(one, out, lc)
    # the two clearing choices differ by the X check, so both map to partial stabilizers
    assert out.xz in ((1, 0, 0, 0), (0, 1, 1, 1))


def test_config_to_input_pauli_examples():
    assert config_to_input_pauli(MConfiguration("X", 0, (1, 1, 1), ())).support() == [0, 1, 2]
    assert config_to_input_pauli(MConfiguration("X", 0, (0, 0, 0), ())).is_zero()
    assert config_to_input_pauli(MConfiguration("X", 0, (1, 1, 0, 0), ((0, 0, 0),))).support() == [0, 1]
    with pytest.raises(ValueError):
        config_to_input_pauli(MConfiguration("X", 0, (0, 0, 0, 0), ((1, 0, 0),)))


# ------------------------------------------------------------- round trip


@pytest.mark.parametrize("name", BUILTINS)
def test_round_trip(name):
    lc, basis, xs, zs = qc_pair(name)
    for i in range(basis.k):
        back = map_layer_logical_to_input(lc, xs[i])
        assert in_row_space(lc.code.hx, back ^ basis.x_logicals.row(i))
        back = map_layer_logical_to_input(lc, zs[i])
        assert in_row_space(lc.code.hz, back ^ basis.z_logicals.row(i))


@pytest.mark.parametrize("name", BUILTINS)
def test_layer_stabilizers_map_to_input_stabilizers(name):
    lc = layer(name)
    for pauli, m, stab in (("X", lc.hx, lc.code.hx), ("Z", lc.hz, lc.code.hz)):
        for r in range(0, m.rows, max(1, m.rows // 60)):
            assert in_row_space(stab, map_layer_logical_to_input(lc, PauliOperator(pauli, m.row(r))))


def test_identity_maps_to_zero():
    lc = layer("steane")
    assert map_layer_logical_to_input(lc, identity(lc, "Z")).is_zero()


def test_map_rejects_excited_operator():
    lc = layer("rep(3)")
    with pytest.raises(ValueError):
        map_layer_logical_to_input(lc, PauliOperator("X", BinaryVector.from_support(lc.n, [0])))


# -------------------------------------------------------------- properties


@pytest.mark.parametrize("name", ["rep(3)", "c422"])
@pytest.mark.parametrize("pauli", ["X", "Z"])
def test_slab_confined_operators_are_stabilizers(name, pauli):
    lc = layer(name)
    from layercodes.logicals import _frame

    fr = _frame(lc, pauli)
    coords = lc.coords[:, fr.axis]
    checks = lc.checks("Z" if pauli == "X" else "X")
    stab = lc.checks(pauli)
    for s in range(len(fr.cuts) - 1):
        cols = np.flatnonzero((coords >= 2 * fr.cuts[s]) & (coords < 2 * fr.cuts[s + 1]))
        kernel = nullspace_basis(checks.select_columns(cols))
        for r in range(kernel.rows):
            full = BinaryVector.from_support(lc.n, [int(cols[q]) for q in kernel.row(r).support()])
            assert in_row_space(stab, full)


@pytest.mark.parametrize("name", BUILTINS)
def test_boundary_consistency(name):
    lc, basis, xs, zs = qc_pair(name)
    rng = np.random.default_rng(0)
    for pauli, ops, stab_in in (("X", xs, lc.code.hx), ("Z", zs, lc.code.hz)):
        m = lc.checks(pauli)
        for op in ops:
            noisy = op.support
            for r in rng.choice(m.rows, size=min(6, m.rows), replace=False):
                noisy = noisy ^ m.row(int(r))
            noisy_op = PauliOperator(pauli, noisy)
            for s in range(slab_count(lc, pauli)):
                left = reduce_to_xz(slab_boundary_config(lc, noisy_op, s, "left"), lc)
                right = reduce_to_xz(slab_boundary_config(lc, noisy_op, s, "right"), lc)
                diff = config_to_input_pauli(left) ^ config_to_input_pauli(right)
                assert in_row_space(stab_in, diff)


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_random_stabilizer_products_keep_class(data):
    name = data.draw(st.sampled_from(["rep(3)", "c422", "steane"]))
    lc, basis, xs, _ = qc_pair(name)
    rows = data.draw(st.lists(st.integers(0, lc.hx.rows - 1), max_size=8)) if lc.hx.rows else []
    v = xs[0].support
    for r in rows:
        v = v ^ lc.hx.row(r)
    back = map_layer_logical_to_input(lc, PauliOperator("X", v))
    assert in_row_space(lc.code.hx, back ^ basis.x_logicals.row(0))


@pytest.mark.parametrize("name", ["rep(3)", "c422"])
def test_weight_floor(name):
    lc, basis, xs, zs = qc_pair(name)
    w = lc.code.max_weight
    for pauli, ops, stab in (("X", xs, lc.code.hx), ("Z", zs, lc.code.hz)):
        for op in ops:
            cfg = half_space_config(lc, op, reference_cut(lc, pauli))
            p = min_weight_in_coset(config_to_input_pauli(reduce_to_xz(cfg, lc)), stab).weight
            for member in equivalence_class(cfg, lc):
                assert configs_equivalent(member, cfg, lc)
                assert member.weight * w >= 2 * p
