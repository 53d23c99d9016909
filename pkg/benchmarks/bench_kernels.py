"""Time the numba kernels against their pure-numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``. Each kernel is
called once per backend to warm up (numba compiles on first use), then timed
over ``--repeat`` calls; results from both backends are asserted equal.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from layercodes import _kernels
from layercodes._accel import HAVE_NUMBA
from layercodes.analysis import _column_syndromes, _csr, _logical_masks
from layercodes.builder import build_layer_code
from layercodes.css import builtin, logical_basis
from layercodes.gf2 import pack_rows
from layercodes.logicals import quasiconcatenated_logical


def _echelon_case(rng):
    dense = rng.integers(0, 2, size=(600, 900), dtype=np.uint8)
    packed = pack_rows(dense)
    return lambda nb: _kernels.echelon(packed.copy(), 900, True, use_numba=nb)[0]


def _coset_case(rng):
    gens = pack_rows(rng.integers(0, 2, size=(18, 200), dtype=np.uint8))
    v = pack_rows(rng.integers(0, 2, size=(1, 200), dtype=np.uint8))[0]
    return lambda nb: _kernels.gray_coset_min(gens, v, use_numba=nb)[0]


def _dfs_case(_rng):
    lc = build_layer_code(builtin("rep(3)"), 2)
    basis = logical_basis(lc.code)
    dual = [quasiconcatenated_logical(lc, basis.x_logicals.row(0), "X").support.to_dense()]
    checks = lc.checks("X")
    col_ptr, col_idx, row_ptr, row_idx = _csr(checks)
    qlog = pack_rows(np.array(dual, dtype=np.uint8).T.copy())
    return lambda nb: _kernels.logical_dfs(
        lc.n, col_ptr, col_idx, row_ptr, row_idx, qlog, checks.rows, 6, use_numba=nb
    )[0]


def _barrier_case(_rng):
    code = builtin("surface(3)")
    basis = logical_basis(code)
    colsyn = _column_syndromes(code.hz)
    qlog = _logical_masks(basis.z_logicals, code.n)
    return lambda nb: _kernels.barrier_search(code.n, colsyn, qlog, use_numba=nb)[0]


CASES = {
    "echelon 600x900": _echelon_case,
    "gray_coset_min 2^18": _coset_case,
    "logical_dfs rep(3) layer w<=6": _dfs_case,
    "barrier_search surface(3)": _barrier_case,
}


def _time(fn, repeat: int) -> float:
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)
    if not HAVE_NUMBA:
        print("numba disabled or missing: the 'numba' column runs the uncompiled loops")
    print(f"{'kernel':28s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s}")
    for name, make in CASES.items():
        fn = make(rng)
        a, b = fn(True), fn(False)
        assert a == b, f"{name}: backends disagree ({a} != {b})"
        t_nb = _time(lambda: fn(True), args.repeat)
        t_np = _time(lambda: fn(False), args.repeat)
        print(f"{name:28s} {t_nb:11.4f} {t_np:11.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
