"""Distance bounds, energy barriers, defect correctability and relation inheritance.

Every number leaving this module is paired with a mode tag: ``"exact"`` for
certified values, ``"upper-bound"``/``"lower-bound"`` for one-sided ones, and
``"unknown"`` when a budget refused the computation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import _kernels
from .builder import LayerCode
from .css import CssCode, _pauli, logical_basis
from .gf2 import (
    BinaryMatrix,
    BinaryVector,
    BudgetExceeded,
    min_weight_in_coset,
    pack_rows,
    rank,
    solve_combination,
)
from .logicals import PauliOperator, quasiconcatenated_logical, quasiconcatenated_stabilizer

BARRIER_LIMIT = 20
DEFAULT_CUTOFF = 8


def tagged(value: Any, mode: str) -> dict[str, Any]:
    return {"value": value, "mode": mode}


# ----------------------------------------------------------- energy barrier


@dataclass(frozen=True)
class BarrierResult:
    value: int
    mode: str  # "exact" or "upper-bound"
    witness: tuple[int, ...]  # qubits flipped in order

    def to_json(self) -> dict[str, Any]:
        return {"barrier": tagged(self.value, self.mode), "witness": list(self.witness)}


def replay_barrier(checks: BinaryMatrix, witness: Sequence[int]) -> int:
    """Largest syndrome weight seen while applying ``witness`` one flip at a time."""
    cols = [np.flatnonzero(c) for c in checks.to_dense().T] if checks.rows else []
    synd = np.zeros(checks.rows, dtype=np.uint8)
    best = 0
    weight = 0
    for q in witness:
        if checks.rows:
            idx = cols[q]
            before = int(synd[idx].sum())
            synd[idx] ^= 1
            weight += len(idx) - 2 * before
        best = max(best, weight)
    return best


def _column_syndromes(checks: BinaryMatrix) -> np.ndarray:
    dense = checks.to_dense().T.copy()
    if dense.shape[1] == 0:
        dense = np.zeros((checks.cols, 1), dtype=np.uint8)
    return pack_rows(dense)


def _logical_masks(dual: BinaryMatrix, n: int) -> np.ndarray:
    """Per qubit, a bit mask of the dual logicals that contain it."""
    masks = np.zeros(n, dtype=np.int64)
    for t, s in enumerate(dual.supports()):
        for q in s:
            masks[q] |= 1 << t
    return masks


def energy_barrier_exact(
    code: CssCode,
    pauli: str,
    logical: BinaryVector | None = None,
    limit: int = BARRIER_LIMIT,
    use_numba: bool | None = None,
) -> BarrierResult:
    """Minimum over logical operators and single-flip paths of the peak syndrome weight.

    ``pauli="X"`` builds X errors, penalized by the Z checks. With ``logical``
    given, only operators in that logical class count as targets.
    """
    pauli = _pauli(pauli)
    n = code.n
    if n > limit:
        raise BudgetExceeded(f"n = {n} exceeds the exhaustive limit {limit}; use the sweep bound")
    basis = logical_basis(code)
    if basis.k == 0:
        raise ValueError("code has no logical qubits")
    if basis.k > 62:
        raise BudgetExceeded("too many logical qubits for the parity mask")
    penalty = code.hz if pauli == "X" else code.hx
    dual = basis.z_logicals if pauli == "X" else basis.x_logicals
    qlog = _logical_masks(dual, n)
    target = 0
    if logical is not None:
        for q in logical.support():
            target ^= int(qlog[q])
        if target == 0:
            return BarrierResult(0, "exact", ())
    b, end, parent = _kernels.barrier_search(
        n, _column_syndromes(penalty), qlog, target, logical is not None, use_numba=use_numba
    )
    if b < 0:
        raise RuntimeError("no logical reachable")  # unreachable for k >= 1
    path = []
    y = end
    while y != 0:
        p = int(parent[y])
        path.append((y ^ p).bit_length() - 1)
        y = p
    witness = tuple(reversed(path))
    return BarrierResult(b, "exact", witness)


def _sweep_frame(lc: LayerCode, pauli: str):
    lay = lc.layout
    lx, _, lz = lay.bbox
    if pauli == "X":
        line = [(x, 0) for x in range(0, lx + 1, 2)]  # (axis coordinate, other coordinate)
        layers = sorted(lay.zcheck_layers, key=lambda l: l.coord)

        def dkey(a: int, y: int) -> tuple:
            return ("D", a, y, 0)

        def wkey(coord: int, y: int) -> tuple:
            return ("Y", coord, y, 0)
    else:
        line = [(z, 0) for z in range(0, lz + 1, 2)]
        layers = sorted(lay.xcheck_layers, key=lambda l: l.coord)

        def dkey(a: int, y: int) -> tuple:
            return ("D", 0, y, a)

        def wkey(coord: int, y: int) -> tuple:
            return ("X", 0, y, coord)

    return [a for a, _ in line], layers, dkey, wkey


def _sweep_step(lc, positions, layers, dkey, wkey, pending, q, reverse):
    """Flips growing the string of qubit layer ``q``; updates ``pending`` in place."""
    lay = lc.layout
    y = lay.y_of(q)
    at = {l.coord: l for l in layers if q in l.support}
    flips = []
    order = list(reversed(positions)) if reverse else positions
    for a in order:
        layer = at.get(a)
        if layer is not None:
            p = pending.get(layer.check)
            if p is not None:
                step = 2 if y > p else -2
                for wy in range(p + step // 2, y, step):
                    flips.append(lc.index[wkey(layer.coord, wy)])
                pending[layer.check] = None
            else:
                pending[layer.check] = y
        flips.append(lc.index[dkey(a, y)])
    return flips


def energy_barrier_sweep(
    lc: LayerCode, input_logical: BinaryVector, pauli: str, limit: int = BARRIER_LIMIT
) -> BarrierResult:
    """Upper bound from building the quasiconcatenated logical along an input path.

    The input path is the exact barrier witness for the logical's class when
    the input is small enough, otherwise its support in order. Each input
    flip grows a full string across one qubit layer from whichever end gives
    the lower peak; a junction excitation left behind on a check layer is
    walked along that layer to the next crossing string and annihilated, so
    each check layer holds at most one excitation at a time.
    """
    pauli = _pauli(pauli)
    code = lc.code
    other = code.hz if pauli == "X" else code.hx
    if other.syndrome(input_logical).any():
        raise ValueError("input vector is not in the normalizer")
    if input_logical.is_zero():
        return BarrierResult(0, "upper-bound", ())
    try:
        path = list(energy_barrier_exact(code, pauli, logical=input_logical, limit=limit).witness)
    except BudgetExceeded:
        path = input_logical.support()
    positions, layers, dkey, wkey = _sweep_frame(lc, pauli)
    penalty = lc.checks("Z" if pauli == "X" else "X")
    pending: dict[int, int | None] = {}
    witness: list[int] = []
    for q in path:
        options = []
        for reverse in (False, True):
            trial_pending = dict(pending)
            flips = _sweep_step(lc, positions, layers, dkey, wkey, trial_pending, q, reverse)
            peak = replay_barrier(penalty, witness + flips)
            options.append((peak, reverse, flips, trial_pending))
        peak, _, flips, pending = min(options, key=lambda t: (t[0], t[1]))
        witness += flips
    value = replay_barrier(penalty, witness)
    return BarrierResult(value, "upper-bound", tuple(witness))


# ------------------------------------------------------------- distance


@dataclass(frozen=True)
class DistanceBounds:
    lower: int
    upper: int
    lower_mode: str
    upper_mode: str
    lower_x: int
    lower_z: int
    upper_x: int
    upper_z: int
    cutoff: int
    witnesses: dict[str, list[int]] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "d": {"lower": tagged(self.lower, self.lower_mode), "upper": tagged(self.upper, self.upper_mode)},
            "d_x": {
                "lower": tagged(self.lower_x, "lower-bound"),
                "upper": tagged(self.upper_x, "upper-bound"),
            },
            "d_z": {
                "lower": tagged(self.lower_z, "lower-bound"),
                "upper": tagged(self.upper_z, "upper-bound"),
            },
            "cutoff": tagged(self.cutoff, "parameter"),
            "witnesses": {k: v for k, v in sorted(self.witnesses.items())},
        }


def _csr(m: BinaryMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    rows = m.supports()
    row_ptr = np.zeros(len(rows) + 1, dtype=np.int64)
    for r, s in enumerate(rows):
        row_ptr[r + 1] = row_ptr[r] + len(s)
    row_idx = np.array([q for s in rows for q in s], dtype=np.int64)
    cols: list[list[int]] = [[] for _ in range(m.cols)]
    for r, s in enumerate(rows):
        for q in s:
            cols[q].append(r)
    col_ptr = np.zeros(m.cols + 1, dtype=np.int64)
    for q, cl in enumerate(cols):
        col_ptr[q + 1] = col_ptr[q] + len(cl)
    col_idx = np.array([r for cl in cols for r in cl], dtype=np.int64)
    return col_ptr, col_idx, row_ptr, row_idx


def min_logical_search(
    checks: BinaryMatrix, dual: BinaryMatrix, cutoff: int, use_numba: bool | None = None
) -> tuple[int, list[int]]:
    """Smallest zero-syndrome support anticommuting with some row of ``dual``.

    Returns ``(-1, [])`` when nothing of weight ``<= cutoff`` exists.
    """
    n = checks.cols
    col_ptr, col_idx, row_ptr, row_idx = _csr(checks)
    qlog = pack_rows(dual.to_dense().T.copy()) if dual.rows else np.zeros((n, 1), dtype=np.uint64)
    w, sup = _kernels.logical_dfs(n, col_ptr, col_idx, row_ptr, row_idx, qlog, checks.rows, cutoff, use_numba=use_numba)
    return w, [int(q) for q in sup]


def layer_distance_bounds(
    lc: LayerCode, budget: int | None = None, seed: int = 0, cutoff: int = DEFAULT_CUTOFF
) -> DistanceBounds:
    """Certified lower and randomized upper bounds on the layer-code distance.

    The upper bound minimizes information-set restarts over cosets of the
    quasiconcatenated basis logicals. The lower bound is an exhaustive search
    up to ``cutoff``; when it finds nothing the lower bound is ``cutoff + 1``.
    """
    basis = logical_basis(lc.code)
    if basis.k == 0:
        raise ValueError("no logicals: the code encodes k = 0 qubits")
    result: dict[str, tuple[int, int]] = {}
    witnesses: dict[str, list[int]] = {}
    qc = {
        "X": [quasiconcatenated_logical(lc, basis.x_logicals.row(i), "X") for i in range(basis.k)],
        "Z": [quasiconcatenated_logical(lc, basis.z_logicals.row(i), "Z") for i in range(basis.k)],
    }
    for pauli, opposite in (("X", "Z"), ("Z", "X")):
        stab = lc.checks(pauli)
        upper = None
        for t, op in enumerate(qc[pauli]):
            res = min_weight_in_coset(op.support, stab, "randomized", budget=budget, seed=seed + t)
            if upper is None or res.weight < upper[0]:
                upper = (res.weight, res.witness.support())
        assert upper is not None
        dual = BinaryMatrix.from_vectors(lc.n, [op.support for op in qc[opposite]])
        w, sup = min_logical_search(lc.checks(opposite), dual, min(cutoff, upper[0]))
        if w >= 0:
            lower = w
            witnesses[f"{pauli}_lower"] = sup
            if w < upper[0]:
                upper = (w, sup)
        else:
            lower = min(cutoff, upper[0]) + 1
        witnesses[f"{pauli}_upper"] = upper[1]
        result[pauli] = (lower, upper[0])
    lower = min(result["X"][0], result["Z"][0])
    upper = min(result["X"][1], result["Z"][1])
    exact = lower == upper
    return DistanceBounds(
        lower,
        upper,
        "exact" if exact else "lower-bound",
        "exact" if exact else "upper-bound",
        result["X"][0],
        result["Z"][0],
        result["X"][1],
        result["Z"][1],
        cutoff,
        witnesses,
    )


# ------------------------------------------------------- correctability


@dataclass(frozen=True)
class BallCheck:
    site: tuple[int, int, int]
    kind: str
    size: int
    rank_h: int
    rank_a: int
    rank_complement: int
    x_ok: bool
    z_ok: bool

    @property
    def lhs(self) -> int:
        return 2 * self.size

    @property
    def rhs(self) -> int:
        return self.rank_h + self.rank_a - self.rank_complement

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict[str, Any]:
        return {
            "site": list(self.site),
            "kind": self.kind,
            "size": tagged(self.size, "exact"),
            "lhs": tagged(self.lhs, "exact"),
            "rhs": tagged(self.rhs, "exact"),
            "rank_H": tagged(self.rank_h, "exact"),
            "rank_H_A": tagged(self.rank_a, "exact"),
            "rank_H_complement": tagged(self.rank_complement, "exact"),
            "pass": self.passed,
        }


@dataclass(frozen=True)
class CorrectabilityReport:
    radius: int
    balls: tuple[BallCheck, ...]

    @property
    def passed(self) -> bool:
        return all(b.passed for b in self.balls)

    def failures(self) -> list[BallCheck]:
        return [b for b in self.balls if not b.passed]

    def to_json(self) -> dict[str, Any]:
        return {"radius": tagged(self.radius, "parameter"), "pass": self.passed, "balls": [b.to_json() for b in self.balls]}


def region_correctable(hx: BinaryMatrix, hz: BinaryMatrix, region: Sequence[int]) -> BallCheck:
    """Evaluate ``2|A| = rank H + rank H|_A - rank H|_(not A)`` for the symplectic check matrix.

    The left side counts the Pauli operators on ``A`` that commute with every
    check, the right side the stabilizers supported on ``A`` plus ``|A|``
    correction; equality means no logical operator fits inside ``A``.
    """
    n = hx.cols
    inside = sorted(set(int(q) for q in region))
    outside = sorted(set(range(n)) - set(inside))
    rx, rz = rank(hx), rank(hz)
    rx_a, rz_a = rank(hx.select_columns(inside)), rank(hz.select_columns(inside))
    rx_c, rz_c = rank(hx.select_columns(outside)), rank(hz.select_columns(outside))
    size = len(inside)
    # X logicals on A: |A| - rank hz|A ; X stabilizers on A: rank hx - rank hx|not A
    x_ok = size - rz_a == rx - rx_c
    z_ok = size - rx_a == rz - rz_c
    return BallCheck((0, 0, 0), "", size, rx + rz, rx_a + rz_a, rx_c + rz_c, x_ok, z_ok)


def ball(lc: LayerCode, site: tuple[int, int, int], radius: int) -> list[int]:
    """Qubits within Chebyshev distance ``radius`` (half-edge units) of ``site``."""
    d = np.abs(lc.coords - np.asarray(site, dtype=np.int64)).max(axis=1)
    return np.flatnonzero(d <= radius).tolist()


def point_defect_correctability(
    lc: LayerCode,
    radius: int | None = None,
    hx: BinaryMatrix | None = None,
    hz: BinaryMatrix | None = None,
    extra_sites: Sequence[tuple[int, int, int]] = (),
) -> CorrectabilityReport:
    """Correctability of the ball around every registered point defect.

    ``radius`` is in half-edge units and defaults to ``c`` (half a
    superlattice step). ``hx``/``hz`` override the code's checks, which is how
    mutated check sets are evaluated.
    """
    radius = lc.c if radius is None else int(radius)
    hx = lc.hx if hx is None else hx
    hz = lc.hz if hz is None else hz
    sites = [(p.site, p.kind) for p in lc.registry.points] + [(tuple(s), "probe") for s in extra_sites]
    out = []
    for site, kind in sites:
        res = region_correctable(hx, hz, ball(lc, site, radius))
        out.append(
            BallCheck(site, kind, res.size, res.rank_h, res.rank_a, res.rank_complement, res.x_ok, res.z_ok)
        )
    return CorrectabilityReport(radius, tuple(out))


# ------------------------------------------------------ relation inheritance


@dataclass(frozen=True)
class RelationCertificate:
    pauli: str
    relation: tuple[int, ...]
    product_weight: int
    combination: tuple[int, ...]  # layer check rows summing to the product
    certified: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "pauli": self.pauli,
            "relation": list(self.relation),
            "product_weight": tagged(self.product_weight, "exact"),
            "combination": list(self.combination),
            "certified": self.certified,
        }


def relation_inheritance(
    code: CssCode, relation: Sequence[int], lc: LayerCode, pauli: str = "Z"
) -> RelationCertificate:
    """Certify that a relation among input checks survives in the layer code.

    The product of the quasiconcatenated stabilizers of the relation's checks
    is expressed through layer checks lying on other layers; the row indices
    used form the certificate.
    """
    pauli = _pauli(pauli)
    checks = code.checks(pauli)
    rel = tuple(sorted(set(int(r) for r in relation)))
    for r in rel:
        if not 0 <= r < checks.rows:
            raise IndexError(f"check {r} out of range")
    total = np.zeros(checks.words.shape[1], dtype=np.uint64)
    for r in rel:
        total ^= checks.words[r]
    if total.any():
        raise ValueError("the given checks do not sum to zero; not a relation")
    if lc.code.content_hash() != code.content_hash():
        raise ValueError("layer code was built from a different input code")
    if not rel:
        return RelationCertificate(pauli, rel, 0, (), True)
    product = np.zeros(lc.checks(pauli).words.shape[1], dtype=np.uint64)
    for r in rel:
        product ^= quasiconcatenated_stabilizer(lc, r, pauli).support.words
    prod = BinaryVector(lc.n, product)
    prefix = "xy" if pauli == "X" else "yz"
    own = {f"{prefix}:{r}" for r in rel}
    info = lc.info(pauli)
    others = [t for t, inf in enumerate(info) if inf.layer not in own]
    m = lc.checks(pauli)
    combo = solve_combination(m.select_rows(others), prod)
    if combo is None:
        return RelationCertificate(pauli, rel, prod.weight, (), False)
    rows = tuple(sorted(others[t] for t in combo))
    return RelationCertificate(pauli, rel, prod.weight, rows, True)


def quasiconcatenated_product(lc: LayerCode, relation: Sequence[int], pauli: str) -> PauliOperator:
    words = np.zeros(lc.checks(pauli).words.shape[1], dtype=np.uint64)
    for r in relation:
        words ^= quasiconcatenated_stabilizer(lc, r, pauli).support.words
    return PauliOperator(_pauli(pauli), BinaryVector(lc.n, words))
