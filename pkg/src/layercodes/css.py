"""Input CSS codes: validation, logical counting, logical bases, distance, built-ins."""

from __future__ import annotations

import hashlib
import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import _kernels
from .gf2 import (
    EXACT_LIMIT,
    BinaryMatrix,
    BinaryVector,
    BudgetExceeded,
    echelon,
    min_weight_in_coset,
    nullspace_basis,
    rank,
    read_matrix_market,
    row_basis,
)

# canonical logical bases enumerate the whole of ker(H) up to this many vectors
CANONICAL_LIMIT = 1 << 16


class IntegrityError(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""


class CodeFormatError(ValueError):
    """A code file could not be parsed."""


@dataclass(frozen=True)
class CssCode:
    """A CSS code given by its X and Z parity-check matrices.

    ``qubit_order`` lists the qubits in the linear arrangement used by the
    layer construction. It defaults to the input order.
    """

    name: str
    n: int
    hx: BinaryMatrix
    hz: BinaryMatrix
    qubit_order: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.hx.cols != self.n or self.hz.cols != self.n:
            raise ValueError(
                f"shape mismatch: n={self.n}, hx has {self.hx.cols} cols, hz has {self.hz.cols} cols"
            )
        if not self.qubit_order:
            object.__setattr__(self, "qubit_order", tuple(range(self.n)))
        elif sorted(self.qubit_order) != list(range(self.n)):
            raise ValueError("qubit_order must be a permutation of range(n)")

    @classmethod
    def from_supports(
        cls, name: str, n: int, hx: Sequence[Sequence[int]], hz: Sequence[Sequence[int]]
    ) -> "CssCode":
        for rows in (hx, hz):
            for s in rows:
                for q in s:
                    if not 0 <= int(q) < n:
                        raise ValueError(f"qubit index {q} out of range for n={n}")
        return cls(name, n, BinaryMatrix.from_supports(n, hx), BinaryMatrix.from_supports(n, hz))

    @property
    def n_x(self) -> int:
        return self.hx.rows

    @property
    def n_z(self) -> int:
        return self.hz.rows

    @property
    def max_weight(self) -> int:
        w = [int(self.hx.row_weights().max(initial=0)), int(self.hz.row_weights().max(initial=0))]
        return max(w)

    def checks(self, pauli: str) -> BinaryMatrix:
        """Checks of the given type (``"X"`` or ``"Z"``)."""
        return self.hx if _pauli(pauli) == "X" else self.hz

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "n": self.n, "hx": self.hx.supports(), "hz": self.hz.supports()}

    def content_hash(self) -> str:
        """SHA-256 over the matrices (name excluded), stable across packing changes."""
        payload = json.dumps(
            {"n": self.n, "hx": self.hx.supports(), "hz": self.hz.supports()},
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()


def _pauli(p: str) -> str:
    p = str(p).upper()
    if p not in ("X", "Z"):
        raise ValueError(f"pauli type must be 'X' or 'Z', got {p!r}")
    return p


# ------------------------------------------------------------- validation


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: list[tuple[int, int]]
    max_weight: int

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "violations": [list(v) for v in self.violations],
            "max_weight": self.max_weight,
        }


def validate(code: CssCode) -> ValidationReport:
    """Check that every X check meets every Z check on an even number of qubits."""
    if code.hx.cols != code.n or code.hz.cols != code.n:
        raise ValueError("shape mismatch")
    overlap = code.hx.matmul_t(code.hz)
    bad = [(int(a), int(b)) for a, b in zip(*np.nonzero(overlap))]
    return ValidationReport(not bad, bad, code.max_weight)


def logical_qubit_count(code: CssCode) -> int:
    k = code.n - rank(code.hx) - rank(code.hz)
    if k < 0:
        raise IntegrityError(f"negative logical count {k}: checks do not commute")
    return k


# --------------------------------------------------------- logical bases


@dataclass(frozen=True)
class LogicalBasis:
    x_logicals: BinaryMatrix
    z_logicals: BinaryMatrix
    pairing: np.ndarray
    canonical: bool

    @property
    def k(self) -> int:
        return self.x_logicals.rows


def pairing_matrix(xs: BinaryMatrix, zs: BinaryMatrix) -> np.ndarray:
    """Overlap parities ``xs[i] . zs[j]``."""
    return xs.matmul_t(zs)


def quotient_basis(kernel_of: BinaryMatrix, modulo: BinaryMatrix) -> BinaryMatrix:
    """Basis of ker(``kernel_of``) modulo rowspace(``modulo``)."""
    cols = kernel_of.cols
    kern = nullspace_basis(kernel_of)
    ech = echelon(modulo)
    resid = _kernels.reduce_rows(kern.words, ech.basis, ech.pivots)
    return row_basis(BinaryMatrix(kern.rows, cols, resid))


def _gf2_inverse(a: np.ndarray) -> np.ndarray:
    k = a.shape[0]
    aug = np.concatenate([a.astype(np.uint8) & 1, np.eye(k, dtype=np.uint8)], axis=1)
    for c in range(k):
        piv = np.flatnonzero(aug[c:, c])
        if piv.size == 0:
            raise IntegrityError("logical pairing matrix is singular")
        p = c + int(piv[0])
        aug[[c, p]] = aug[[p, c]]
        rows = np.flatnonzero(aug[:, c])
        rows = rows[rows != c]
        aug[rows] ^= aug[c]
    return aug[:, k:]


def _dual_partners(xs: BinaryMatrix, zraw: BinaryMatrix) -> BinaryMatrix:
    """Combinations of ``zraw`` rows with ``xs[i] . z[j] = delta_ij``."""
    p = pairing_matrix(xs, zraw)
    inv = _gf2_inverse(p)
    dense = (inv.T.astype(np.int64) @ zraw.to_dense().astype(np.int64)) % 2
    return BinaryMatrix.from_dense(dense.astype(np.uint8), cols=xs.cols)


def _enumerate_sorted(basis: BinaryMatrix) -> np.ndarray:
    """All members of span(basis) as dense rows, sorted by weight then support."""
    m, n = basis.rows, basis.cols
    dense = basis.to_dense()
    table = np.zeros((1 << m, n), dtype=np.uint8)
    for j in range(m):
        table[1 << j : 2 << j] = table[: 1 << j] ^ dense[j]
    weights = table.sum(axis=1)
    keys = [1 - table[:, c] for c in range(n - 1, -1, -1)] + [weights]
    return table[np.lexsort(keys)]


def _greedy_independent(candidates: np.ndarray, modulo: BinaryMatrix, k: int) -> list[np.ndarray]:
    """First ``k`` candidates independent modulo rowspace(``modulo``) and earlier picks."""
    pivots: dict[int, int] = {}

    def reduce(v: int) -> int:
        while v:
            low = v & -v
            row = pivots.get(low)
            if row is None:
                return v
            v ^= row
        return 0

    def as_int(row: np.ndarray) -> int:
        return int.from_bytes(np.packbits(row[::-1]).tobytes(), "big") >> ((-len(row)) % 8)

    for s in modulo.supports():
        v = reduce(sum(1 << q for q in s))
        if v:
            pivots[v & -v] = v
    picked = []
    for row in candidates:
        v = reduce(as_int(row))
        if v:
            pivots[v & -v] = v
            picked.append(row.copy())
            if len(picked) == k:
                break
    return picked


def logical_basis(code: CssCode, canonical_limit: int = CANONICAL_LIMIT) -> LogicalBasis:
    """Symplectically paired logical representatives.

    When ker(hz) is small enough to enumerate, X representatives are the
    greedy minimum-weight (then lexicographically smallest support) choice and
    each Z partner is the minimum-weight member of the unique dual coset.
    Larger codes fall back to a deterministic echelon basis.
    """
    n = code.n
    k = logical_qubit_count(code)
    if k == 0:
        empty = BinaryMatrix.zeros(0, n)
        return LogicalBasis(empty, empty, np.zeros((0, 0), dtype=np.uint8), True)
    kern = nullspace_basis(code.hz)
    canonical = (1 << kern.rows) <= canonical_limit
    if canonical:
        picked = _greedy_independent(_enumerate_sorted(kern), code.hx, k)
        xs = BinaryMatrix.from_dense(np.array(picked), cols=n)
    else:
        xs = quotient_basis(code.hz, code.hx)
    zs = _dual_partners(xs, quotient_basis(code.hx, code.hz))
    if canonical:
        stab = row_basis(code.hz)
        if (1 << stab.rows) <= EXACT_LIMIT:
            mins = [min_weight_in_coset(zs.row(j), stab, "exact").witness for j in range(k)]
            zs = BinaryMatrix.from_vectors(n, mins)
        else:
            canonical = False
    pairing = pairing_matrix(xs, zs)
    if not np.array_equal(pairing, np.eye(k, dtype=np.uint8)):
        raise IntegrityError("logical basis is not symplectic")
    return LogicalBasis(xs, zs, pairing, canonical)


# --------------------------------------------------------------- distance


@dataclass(frozen=True)
class DistanceResult:
    d_x: int
    d_z: int
    mode: str  # "exact" or "upper-bound"
    x_witness: BinaryVector
    z_witness: BinaryVector

    @property
    def d(self) -> int:
        return min(self.d_x, self.d_z)

    def to_json(self) -> dict[str, Any]:
        return {
            "d_x": {"value": self.d_x, "mode": self.mode},
            "d_z": {"value": self.d_z, "mode": self.mode},
            "d": {"value": self.d, "mode": self.mode},
            "x_witness": self.x_witness.support(),
            "z_witness": self.z_witness.support(),
        }


def _class_reps(logicals: BinaryMatrix, all_classes: bool) -> list[BinaryVector]:
    k = logicals.rows
    if not all_classes:
        return [logicals.row(i) for i in range(k)]
    reps = []
    for mask in range(1, 1 << k):
        words = np.zeros_like(logicals.words[0])
        for i in range(k):
            if (mask >> i) & 1:
                words = words ^ logicals.words[i]
        reps.append(BinaryVector(logicals.cols, words))
    return reps


def _side_distance(
    logicals: BinaryMatrix, stab: BinaryMatrix, mode: str, budget: int | None, seed: int
) -> tuple[int, BinaryVector]:
    k = logicals.rows
    best: tuple[int, BinaryVector] | None = None
    if mode == "exact":
        limit = EXACT_LIMIT if budget is None else int(budget)
        r = rank(stab)
        if k >= 40 or r >= 63 or ((1 << k) - 1) * (1 << r) > limit:
            raise BudgetExceeded(f"(2^{k} - 1) * 2^{r} members exceed exhaustion limit {limit}")
        reps = _class_reps(logicals, True)
        for v in reps:
            res = min_weight_in_coset(v, stab, "exact", budget=limit)
            if best is None or res.weight < best[0]:
                best = (res.weight, res.witness)
    else:
        reps = _class_reps(logicals, k <= 8)
        for t, v in enumerate(reps):
            res = min_weight_in_coset(v, stab, "randomized", budget=budget, seed=seed + t)
            if best is None or res.weight < best[0]:
                best = (res.weight, res.witness)
    assert best is not None
    return best


def distance(
    code: CssCode, mode: str = "exact", budget: int | None = None, seed: int = 0
) -> DistanceResult:
    """X and Z distances of ``code``.

    ``mode="exact"`` minimizes over every nontrivial logical class and raises
    :class:`BudgetExceeded` past the exhaustion limit. ``mode="randomized"``
    runs information-set restarts per class and gives upper bounds.
    """
    if mode not in ("exact", "randomized"):
        raise ValueError(f"unknown mode {mode!r}")
    basis = logical_basis(code)
    if basis.k == 0:
        raise ValueError("code has no logical qubits")
    dx, wx = _side_distance(basis.x_logicals, code.hx, mode, budget, seed)
    dz, wz = _side_distance(basis.z_logicals, code.hz, mode, budget, seed)
    return DistanceResult(dx, dz, "exact" if mode == "exact" else "upper-bound", wx, wz)


# --------------------------------------------------------------- built-ins


def repetition(m: int) -> CssCode:
    if m < 1:
        raise ValueError("repetition length must be >= 1")
    return CssCode.from_supports(f"rep({m})", m, [], [[i, i + 1] for i in range(m - 1)])


def c422() -> CssCode:
    return CssCode.from_supports("c422", 4, [[0, 1, 2, 3]], [[0, 1, 2, 3]])


def shor() -> CssCode:
    hx = [[0, 1, 2, 3, 4, 5], [3, 4, 5, 6, 7, 8]]
    hz = [[0, 1], [1, 2], [3, 4], [4, 5], [6, 7], [7, 8]]
    return CssCode.from_supports("shor", 9, hx, hz)


def steane() -> CssCode:
    rows = [[0, 2, 4, 6], [1, 2, 5, 6], [3, 4, 5, 6]]
    return CssCode.from_supports("steane", 7, rows, rows)


def surface(L: int) -> CssCode:
    """Planar surface code [[L^2 + (L-1)^2, 1, L]] as the product of two length-L chains.

    Qubits ``0 .. L*L-1`` are the vertical edges ``(row, col)`` in row-major
    order; the remaining ``(L-1)^2`` are the horizontal edges.
    """
    if L < 2:
        raise ValueError("surface code needs L >= 2")
    h = np.zeros((L - 1, L), dtype=np.uint8)
    for i in range(L - 1):
        h[i, i] = h[i, i + 1] = 1
    eye_l = np.eye(L, dtype=np.uint8)
    eye_m = np.eye(L - 1, dtype=np.uint8)
    hx = np.concatenate([np.kron(h, eye_l), np.kron(eye_m, h.T)], axis=1)
    hz = np.concatenate([np.kron(eye_l, h), np.kron(h.T, eye_m)], axis=1)
    n = L * L + (L - 1) ** 2
    return CssCode(f"surface({L})", n, BinaryMatrix.from_dense(hx, cols=n), BinaryMatrix.from_dense(hz, cols=n))


_BUILTIN_RE = re.compile(r"^(rep|surface)\(?(\d+)\)?$")


def builtin_names() -> list[str]:
    return ["rep(m)", "c422", "shor", "steane", "surface(L)"]


def builtin(name: str) -> CssCode:
    """Look up a built-in code: ``rep(m)``/``repM``, ``c422``, ``shor``, ``steane``, ``surface(L)``."""
    key = name.strip().lower()
    fixed = {"c422": c422, "shor": shor, "steane": steane}
    if key in fixed:
        return fixed[key]()
    m = _BUILTIN_RE.match(key)
    if m:
        size = int(m.group(2))
        return repetition(size) if m.group(1) == "rep" else surface(size)
    raise KeyError(f"unknown built-in code {name!r}; known: {', '.join(builtin_names())}")


# ------------------------------------------------------- random generator


def random_css_code(seed: int, n_max: int = 8, n_min: int = 1) -> CssCode:
    """Seeded random valid CSS code with ``n_min <= n <= n_max``.

    Z checks are random members of the orthogonal complement of the X checks,
    so duplicate, dependent and empty-sided check sets all occur.
    """
    rng = random.Random(seed)
    n = rng.randint(n_min, n_max)
    n_x = rng.randint(0, max(0, n // 2))
    hx_dense = np.array(
        [[rng.random() < 0.5 for _ in range(n)] for _ in range(n_x)], dtype=np.uint8
    ).reshape(n_x, n)
    hx_dense = hx_dense[hx_dense.any(axis=1)] if n_x else hx_dense
    hx = BinaryMatrix.from_dense(hx_dense, cols=n)
    dual = nullspace_basis(hx).to_dense()
    n_z = rng.randint(0, max(0, dual.shape[0]))
    rows = []
    for _ in range(n_z):
        mask = [rng.random() < 0.5 for _ in range(dual.shape[0])]
        row = np.zeros(n, dtype=np.uint8)
        for b, use in zip(dual, mask):
            if use:
                row ^= b
        if row.any():
            rows.append(row)
    hz = BinaryMatrix.from_dense(np.array(rows, dtype=np.uint8).reshape(len(rows), n), cols=n)
    return CssCode(f"random-{seed}", n, hx, hz)


# -------------------------------------------------------------------- I/O


def code_from_json(data: Any) -> CssCode:
    if not isinstance(data, dict):
        raise CodeFormatError("code JSON must be an object")
    missing = [k for k in ("name", "n", "hx", "hz") if k not in data]
    if missing:
        raise CodeFormatError(f"code JSON missing keys: {', '.join(missing)}")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise CodeFormatError("'n' must be a non-negative integer")
    for key in ("hx", "hz"):
        rows = data[key]
        if not isinstance(rows, list) or not all(
            isinstance(r, list) and all(isinstance(q, int) and not isinstance(q, bool) for q in r)
            for r in rows
        ):
            raise CodeFormatError(f"'{key}' must be a list of integer support lists")
    try:
        return CssCode.from_supports(str(data["name"]), n, data["hx"], data["hz"])
    except ValueError as exc:
        raise CodeFormatError(str(exc)) from exc


def load_code(path: str | Path) -> CssCode:
    """Read a code from JSON, or from a sidecar JSON naming two Matrix Market files.

    The sidecar form is ``{"name": str, "n": int, "hx": "hx.mtx", "hz": "hz.mtx"}``
    with paths relative to the sidecar.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CodeFormatError(f"cannot read {path}: {exc}") from exc
    if isinstance(data, dict) and isinstance(data.get("hx"), str) and isinstance(data.get("hz"), str):
        try:
            hx = read_matrix_market(path.parent / data["hx"])
            hz = read_matrix_market(path.parent / data["hz"])
        except (OSError, ValueError) as exc:
            raise CodeFormatError(f"cannot read Matrix Market pair: {exc}") from exc
        n = int(data.get("n", hx.cols))
        try:
            return CssCode(str(data.get("name", path.stem)), n, hx, hz)
        except ValueError as exc:
            raise CodeFormatError(str(exc)) from exc
    return code_from_json(data)


def save_code(code: CssCode, path: str | Path) -> None:
    Path(path).write_text(json.dumps(code.to_json(), sort_keys=True, separators=(",", ":")) + "\n")


__all__ = [
    "BudgetExceeded",
    "CodeFormatError",
    "CssCode",
    "DistanceResult",
    "IntegrityError",
    "LogicalBasis",
    "ValidationReport",
    "builtin",
    "c422",
    "code_from_json",
    "distance",
    "load_code",
    "logical_basis",
    "logical_qubit_count",
    "random_css_code",
    "repetition",
    "save_code",
    "shor",
    "steane",
    "surface",
    "validate",
]
