"""Bit-packed GF(2) vectors and matrices.

Bits are packed little-endian into ``uint64`` words. The packing never leaks
through the public interface: everything external is expressed as dense 0/1
arrays or as sorted index lists.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

EXACT_LIMIT = 1 << 24


class BudgetExceeded(RuntimeError):
    """Raised when an exact search would exceed its exhaustion limit."""


def n_words(bits: int) -> int:
    return max(1, (bits + 63) // 64)


def pack_rows(dense: np.ndarray) -> np.ndarray:
    """Pack a dense ``(rows, cols)`` 0/1 array into ``uint64`` words."""
    dense = np.asarray(dense, dtype=np.uint8) & 1
    rows, cols = dense.shape
    nw = n_words(cols)
    padded = np.zeros((rows, nw * 64), dtype=np.uint8)
    padded[:, :cols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed.view("<u8").astype(np.uint64, copy=False))


def unpack_rows(words: np.ndarray, cols: int) -> np.ndarray:
    if words.shape[0] == 0:
        return np.zeros((0, cols), dtype=np.uint8)
    raw = np.ascontiguousarray(words.astype("<u8", copy=False)).view(np.uint8)
    bits = np.unpackbits(raw, axis=1, bitorder="little")
    return bits[:, :cols].copy()


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


# ------------------------------------------------------------------ vectors


@dataclass(frozen=True, eq=False)
class BinaryVector:
    """Immutable bit vector of fixed length."""

    length: int
    words: np.ndarray

    def __post_init__(self) -> None:
        if self.words.shape != (n_words(self.length),):
            raise ValueError("payload does not match length")
        object.__setattr__(self, "words", _frozen(self.words.astype(np.uint64, copy=False)))

    @classmethod
    def zeros(cls, length: int) -> "BinaryVector":
        return cls(length, np.zeros(n_words(length), dtype=np.uint64))

    @classmethod
    def from_dense(cls, bits: Sequence[int] | np.ndarray) -> "BinaryVector":
        dense = np.asarray(bits, dtype=np.uint8).reshape(1, -1)
        return cls(dense.shape[1], pack_rows(dense)[0])

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> "BinaryVector":
        dense = np.zeros(length, dtype=np.uint8)
        for i in support:
            if not 0 <= i < length:
                raise IndexError(f"index {i} out of range for length {length}")
            dense[i] ^= 1
        return cls.from_dense(dense)

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.words.reshape(1, -1), self.length)[0]

    def support(self) -> list[int]:
        return np.flatnonzero(self.to_dense()).tolist()

    @property
    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def __xor__(self, other: "BinaryVector") -> "BinaryVector":
        if other.length != self.length:
            raise ValueError("length mismatch")
        return BinaryVector(self.length, self.words ^ other.words)

    def dot(self, other: "BinaryVector") -> int:
        if other.length != self.length:
            raise ValueError("length mismatch")
        return int(np.bitwise_count(self.words & other.words).sum()) & 1

    def is_zero(self) -> bool:
        return not self.words.any()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BinaryVector)
            and other.length == self.length
            and bool(np.array_equal(other.words, self.words))
        )

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryVector({self.length}, support={self.support()})"


# ----------------------------------------------------------------- matrices


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """Immutable ``rows x cols`` matrix over GF(2)."""

    rows: int
    cols: int
    words: np.ndarray

    def __post_init__(self) -> None:
        if self.words.shape != (self.rows, n_words(self.cols)):
            raise ValueError("payload does not match shape")
        object.__setattr__(self, "words", _frozen(self.words.astype(np.uint64, copy=False)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinaryMatrix":
        return cls(rows, cols, np.zeros((rows, n_words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, dense: np.ndarray, cols: int | None = None) -> "BinaryMatrix":
        dense = np.asarray(dense, dtype=np.uint8)
        if dense.ndim != 2:
            if dense.size == 0 and cols is not None:
                dense = dense.reshape(0, cols)
            else:
                raise ValueError("expected a 2-D array")
        return cls(dense.shape[0], dense.shape[1], pack_rows(dense))

    @classmethod
    def from_supports(cls, cols: int, supports: Iterable[Iterable[int]]) -> "BinaryMatrix":
        supports = [list(s) for s in supports]
        dense = np.zeros((len(supports), cols), dtype=np.uint8)
        for r, s in enumerate(supports):
            for i in s:
                if not 0 <= i < cols:
                    raise IndexError(f"index {i} out of range for {cols} columns")
                dense[r, i] ^= 1
        return cls.from_dense(dense)

    @classmethod
    def from_vectors(cls, cols: int, vectors: Sequence[BinaryVector]) -> "BinaryMatrix":
        if not vectors:
            return cls.zeros(0, cols)
        return cls(len(vectors), cols, np.stack([v.words for v in vectors]))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.words, self.cols)

    def supports(self) -> list[list[int]]:
        dense = self.to_dense()
        return [np.flatnonzero(r).tolist() for r in dense]

    def row(self, i: int) -> BinaryVector:
        return BinaryVector(self.cols, self.words[i].copy())

    def row_weights(self) -> np.ndarray:
        return _kernels.popcount_rows(self.words)

    def column_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0, dtype=np.int64)

    def select_rows(self, idx: Sequence[int] | np.ndarray) -> "BinaryMatrix":
        idx = np.asarray(idx, dtype=np.int64)
        return BinaryMatrix(len(idx), self.cols, self.words[idx].copy())

    def delete_rows(self, idx: Sequence[int]) -> "BinaryMatrix":
        keep = np.setdiff1d(np.arange(self.rows), np.asarray(idx, dtype=np.int64))
        return self.select_rows(keep)

    def select_columns(self, idx: Sequence[int] | np.ndarray) -> "BinaryMatrix":
        idx = np.asarray(idx, dtype=np.int64)
        return BinaryMatrix.from_dense(self.to_dense()[:, idx], cols=len(idx))

    def vstack(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if other.cols != self.cols:
            raise ValueError("column mismatch")
        return BinaryMatrix(self.rows + other.rows, self.cols, np.vstack([self.words, other.words]))

    def transpose(self) -> "BinaryMatrix":
        return BinaryMatrix.from_dense(self.to_dense().T.copy(), cols=self.rows)

    def matmul_t(self, other: "BinaryMatrix") -> np.ndarray:
        """Dense 0/1 array of ``self @ other.T`` over GF(2)."""
        if other.cols != self.cols:
            raise ValueError("column mismatch")
        out = np.zeros((self.rows, other.rows), dtype=np.uint8)
        for i in range(self.rows):
            out[i] = (np.bitwise_count(other.words & self.words[i]).sum(axis=1) & 1).astype(np.uint8)
        return out

    def syndrome(self, v: BinaryVector) -> np.ndarray:
        """Dense 0/1 array ``M v``."""
        if v.length != self.cols:
            raise ValueError("length mismatch")
        if self.rows == 0:
            return np.zeros(0, dtype=np.uint8)
        return (np.bitwise_count(self.words & v.words).sum(axis=1) & 1).astype(np.uint8)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BinaryMatrix)
            and other.shape == self.shape
            and bool(np.array_equal(other.words, self.words))
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.rows}x{self.cols})"


# ------------------------------------------------------------ linear algebra


@dataclass(frozen=True)
class Echelon:
    """Reduced row echelon form of a matrix: basis rows plus pivot columns."""

    basis: np.ndarray
    pivots: np.ndarray
    cols: int

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Clear the pivot columns of packed ``v``; returns (residual, used-rows mask)."""
        v = v.copy()
        used = np.zeros(self.rank, dtype=bool)
        for r, c in enumerate(self.pivots):
            w, b = divmod(int(c), 64)
            if (int(v[w]) >> b) & 1:
                v ^= self.basis[r]
                used[r] = True
        return v, used


def echelon(m: BinaryMatrix, use_numba: bool | None = None) -> Echelon:
    work = np.array(m.words, dtype=np.uint64, copy=True)
    r, piv = _kernels.echelon(work, m.cols, full=True, use_numba=use_numba)
    return Echelon(work[:r].copy(), np.asarray(piv, dtype=np.int64), m.cols)


def rank(m: BinaryMatrix, use_numba: bool | None = None) -> int:
    """Dimension of the row space of ``m``."""
    work = np.array(m.words, dtype=np.uint64, copy=True)
    r, _ = _kernels.echelon(work, m.cols, full=False, use_numba=use_numba)
    return r


def in_row_space(m: BinaryMatrix, v: BinaryVector) -> bool:
    """True iff ``v`` is a GF(2) combination of rows of ``m``."""
    if v.length != m.cols:
        raise ValueError(f"vector length {v.length} does not match {m.cols} columns")
    residual, _ = echelon(m).reduce(v.words)
    return not residual.any()


def solve_combination(m: BinaryMatrix, v: BinaryVector) -> list[int] | None:
    """Row indices of ``m`` summing to ``v``, or ``None`` when ``v`` is not in the row space."""
    if v.length != m.cols:
        raise ValueError("length mismatch")
    if m.rows == 0:
        return [] if v.is_zero() else None
    # augment with an identity block to track row combinations
    aug_cols = m.cols + m.rows
    dense = np.concatenate([m.to_dense(), np.eye(m.rows, dtype=np.uint8)], axis=1)
    ech = echelon(BinaryMatrix.from_dense(dense))
    target = np.concatenate([v.to_dense(), np.zeros(m.rows, dtype=np.uint8)])
    tv = pack_rows(target.reshape(1, -1))[0]
    residual, _ = ech.reduce(tv)
    bits = unpack_rows(residual.reshape(1, -1), aug_cols)[0]
    if bits[: m.cols].any():
        return None
    return np.flatnonzero(bits[m.cols :]).tolist()


def nullspace_basis(m: BinaryMatrix) -> BinaryMatrix:
    """Basis of ``{v : m v = 0}``; has ``cols - rank`` rows."""
    ech = echelon(m)
    dense = unpack_rows(ech.basis, m.cols)
    pivots = ech.pivots.tolist()
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    out = np.zeros((len(free), m.cols), dtype=np.uint8)
    for t, f in enumerate(free):
        out[t, f] = 1
        if pivots:
            out[t, pivots] = dense[:, f]
    return BinaryMatrix.from_dense(out, cols=m.cols)


def row_basis(m: BinaryMatrix) -> BinaryMatrix:
    ech = echelon(m)
    return BinaryMatrix(ech.rank, m.cols, ech.basis)


# ------------------------------------------------------- coset min weight


@dataclass(frozen=True)
class CosetMinimum:
    weight: int
    witness: BinaryVector
    mode: str  # "exact" or "randomized"


def min_weight_in_coset(
    v: BinaryVector,
    m: BinaryMatrix,
    mode: str = "exact",
    budget: int | None = None,
    seed: int = 0,
) -> CosetMinimum:
    """Minimum weight over ``v + rowspace(m)``.

    ``mode="exact"`` enumerates the whole coset and refuses with
    :class:`BudgetExceeded` when it has more than ``budget`` (default
    ``2**24``) members. ``mode="randomized"`` runs ``budget`` (default 200)
    information-set restarts and returns an upper bound.
    """
    if v.length != m.cols:
        raise ValueError(f"vector length {v.length} does not match {m.cols} columns")
    if mode == "exact":
        limit = EXACT_LIMIT if budget is None else int(budget)
        basis = row_basis(m)
        if basis.rows >= 63 or (1 << basis.rows) > limit:
            raise BudgetExceeded(
                f"coset has 2^{basis.rows} members, exhaustion limit is {limit}"
            )
        w, best = _kernels.gray_coset_min(basis.words, v.words)
        return CosetMinimum(w, BinaryVector(v.length, best), "exact")
    if mode == "randomized":
        restarts = 200 if budget is None else int(budget)
        return _isd_coset(v, m, restarts, seed)
    raise ValueError(f"unknown mode {mode!r}")


def _isd_coset(v: BinaryVector, m: BinaryMatrix, restarts: int, seed: int) -> CosetMinimum:
    rng = random.Random(seed)
    dense = m.to_dense()
    vd = v.to_dense()
    best = vd.copy()
    best_w = int(best.sum())
    cols = m.cols
    for _ in range(max(1, restarts)):
        if best_w == 0:
            break
        perm = list(range(cols))
        rng.shuffle(perm)
        ech = echelon(BinaryMatrix.from_dense(dense[:, perm], cols=cols))
        packed = pack_rows(vd[perm].reshape(1, -1))[0]
        residual, _ = ech.reduce(packed)
        cand_p = unpack_rows(residual.reshape(1, -1), cols)[0]
        cand = np.zeros(cols, dtype=np.uint8)
        cand[perm] = cand_p
        w = int(cand.sum())
        if w < best_w or (w == best_w and _support_less(cand, best)):
            best, best_w = cand, w
    return CosetMinimum(best_w, BinaryVector.from_dense(best), "randomized")


def _support_less(a: np.ndarray, b: np.ndarray) -> bool:
    d = np.flatnonzero(a != b)
    return bool(d.size) and bool(a[d[0]])


# ----------------------------------------------------------- Matrix Market

MM_HEADER = "%%MatrixMarket matrix coordinate pattern general"


def to_matrix_market(m: BinaryMatrix) -> str:
    entries = [(r + 1, c + 1) for r, s in enumerate(m.supports()) for c in s]
    lines = [MM_HEADER, f"{m.rows} {m.cols} {len(entries)}"]
    lines += [f"{r} {c}" for r, c in entries]
    return "\n".join(lines) + "\n"


def from_matrix_market(text: str) -> BinaryMatrix:
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or lines[0].lower() != MM_HEADER.lower():
        raise ValueError("not a coordinate pattern Matrix Market file")
    body = [ln for ln in lines[1:] if ln and not ln.startswith("%")]
    if not body:
        raise ValueError("missing size line")
    rows, cols, nnz = (int(x) for x in body[0].split())
    if len(body) - 1 != nnz:
        raise ValueError(f"expected {nnz} entries, found {len(body) - 1}")
    dense = np.zeros((rows, cols), dtype=np.uint8)
    for ln in body[1:]:
        r, c = (int(x) for x in ln.split()[:2])
        if not (1 <= r <= rows and 1 <= c <= cols):
            raise ValueError(f"entry ({r}, {c}) out of range")
        dense[r - 1, c - 1] = 1
    return BinaryMatrix.from_dense(dense, cols=cols)


def write_matrix_market(path: str | Path, m: BinaryMatrix) -> None:
    Path(path).write_text(to_matrix_market(m), encoding="utf-8")


def read_matrix_market(path: str | Path) -> BinaryMatrix:
    return from_matrix_market(Path(path).read_text(encoding="utf-8"))
