"""Logical operators of a layer code and their correspondence with the input code.

X-type operators are analysed by cutting the cuboid perpendicular to x; the
cuts fall between consecutive yz-layers so each slab holds one yz-layer. Z-type
operators mirror this along z with one xy-layer per slab.

An operator restricted to one side of a cut leaves excitations only on the
checks that straddle the cut. Those excitations are summarized by one parity
per qubit layer and one parity per segment of each crossing check layer,
a segment being the stretch between two consecutive supported qubit layers.
At each junction an excitation may hop between the qubit layer and the two
adjacent segments, which generates the equivalence used below.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .builder import LayerCode
from .css import IntegrityError, _pauli
from .gf2 import BinaryMatrix, BinaryVector, echelon, pack_rows


@dataclass(frozen=True)
class PauliOperator:
    pauli: str
    support: BinaryVector

    def weight(self) -> int:
        return self.support.weight

    def syndrome(self, lc: LayerCode) -> np.ndarray:
        return lc.checks("Z" if self.pauli == "X" else "X").syndrome(self.support)

    def to_json(self) -> dict[str, Any]:
        return {"pauli": self.pauli, "support": self.support.support()}


@dataclass(frozen=True)
class MConfiguration:
    """Excitation pattern on one cut: qubit-layer bits plus segment bits per check layer."""

    pauli: str
    slab: int
    xz: tuple[int, ...]
    segments: tuple[tuple[int, ...], ...]

    @property
    def weight(self) -> int:
        return sum(self.xz) + sum(sum(s) for s in self.segments)

    def is_xz_only(self) -> bool:
        return not any(any(s) for s in self.segments)

    def to_json(self) -> dict[str, Any]:
        return {
            "pauli": self.pauli,
            "slab": self.slab,
            "xz": list(self.xz),
            "segments": [list(s) for s in self.segments],
        }


# ----------------------------------------------------------- geometry


@dataclass(frozen=True)
class _Frame:
    """Per-type geometry: cut axis, slab layers and segment layers."""

    pauli: str
    axis: int
    cuts: tuple[int, ...]  # lattice cut positions; half-edge coordinate is 2 * cut
    seg_prefix: str
    seg_supports: tuple[tuple[int, ...], ...]  # support of each segment layer, y-ordered


def _frame(lc: LayerCode, pauli: str) -> _Frame:
    if lc.blocks != 1:
        raise ValueError("logical mapping works on single-block layer codes")
    pauli = _pauli(pauli)
    lay = lc.layout
    h = lay.c // 2
    if pauli == "X":
        axis, slab_layers, seg_layers, prefix = 0, lay.zcheck_layers, lay.xcheck_layers, "xy"
    else:
        axis, slab_layers, seg_layers, prefix = 2, lay.xcheck_layers, lay.zcheck_layers, "yz"
    coords = [l.coord // 2 for l in slab_layers]
    if coords:
        cuts = [coords[0] - h] + [x + h for x in coords]
    else:
        cuts = [h]
    return _Frame(pauli, axis, tuple(cuts), prefix, tuple(l.support for l in seg_layers))


def slab_count(lc: LayerCode, pauli: str) -> int:
    """Number of slabs; slab ``s`` lies between cuts ``s`` and ``s + 1``."""
    return max(len(_frame(lc, pauli).cuts) - 1, 0)


def _segment_index(lc: LayerCode, support: tuple[int, ...], y: int) -> int:
    ys = [lc.layout.y_of(q) for q in support]
    for s in range(len(ys) - 1):
        if ys[s] < y < ys[s + 1]:
            return s
    raise IntegrityError(f"y={y} lies outside every segment")


def _config_from_syndrome(
    lc: LayerCode, fr: _Frame, syndrome: np.ndarray, cut_coord: int, slab: int
) -> MConfiguration:
    xz = [0] * lc.code.n
    segs = [[0] * max(len(s) - 1, 0) for s in fr.seg_supports]
    info = lc.info("Z" if fr.pauli == "X" else "X")
    for r in np.flatnonzero(syndrome):
        inf = info[int(r)]
        if inf.site[fr.axis] != cut_coord:
            raise IntegrityError(f"excitation at {inf.site} away from the cut at {cut_coord}")
        kind, _, idx = inf.layer.partition(":")
        if kind == "xz":
            xz[int(idx)] ^= 1
        elif kind == fr.seg_prefix:
            k = int(idx)
            segs[k][_segment_index(lc, fr.seg_supports[k], inf.site[1])] ^= 1
        else:
            raise IntegrityError(f"unexpected excitation on layer {inf.layer}")
    return MConfiguration(fr.pauli, slab, tuple(xz), tuple(tuple(s) for s in segs))


def _restrict(lc: LayerCode, op: PauliOperator, axis: int, lo: int | None, hi: int | None) -> BinaryVector:
    coords = lc.coords[:, axis]
    keep = np.ones(lc.n, dtype=bool)
    if lo is not None:
        keep &= coords >= lo
    if hi is not None:
        keep &= coords < hi
    dense = op.support.to_dense() & keep.astype(np.uint8)
    return BinaryVector.from_dense(dense)


def _check_op(lc: LayerCode, op: PauliOperator) -> None:
    if op.support.length != lc.n:
        raise ValueError(f"operator has length {op.support.length}, code has {lc.n} qubits")


# ------------------------------------------------------------ operations


def quasiconcatenated_logical(lc: LayerCode, input_logical: BinaryVector, pauli: str) -> PauliOperator:
    """Image of an input logical: one string per supported qubit layer plus pairing strings.

    X type: X strings along x on the z = 0 row of each qubit layer, with
    strings on the z = 0 row of each yz-layer joining consecutive junction
    excitations. Z type mirrors this on the x = 0 column with xy-layers.
    """
    pauli = _pauli(pauli)
    code = lc.code
    if lc.blocks != 1:
        raise ValueError("quasiconcatenated logicals need a single-block layer code")
    if input_logical.length != code.n:
        raise ValueError("input logical has the wrong length")
    stab_other = code.hz if pauli == "X" else code.hx
    if stab_other.syndrome(input_logical).any():
        raise ValueError("input vector is not in the normalizer")
    lay = lc.layout
    lx, _, lz = lay.bbox
    sup = set(input_logical.support())
    keys = []
    for q in sup:
        y = lay.y_of(q)
        if pauli == "X":
            keys += [("D", x, y, 0) for x in range(0, lx + 1, 2)]
        else:
            keys += [("D", 0, y, z) for z in range(0, lz + 1, 2)]
    layers = lay.zcheck_layers if pauli == "X" else lay.xcheck_layers
    for layer in layers:
        hit = [lay.y_of(q) for q in layer.support if q in sup]
        for a, b in zip(hit[::2], hit[1::2]):
            for y in range(a + 1, b, 2):
                keys.append(("Y", layer.coord, y, 0) if pauli == "X" else ("X", 0, y, layer.coord))
    dense = np.zeros(lc.n, dtype=np.uint8)
    for k in keys:
        dense[lc.index[k]] ^= 1
    op = PauliOperator(pauli, BinaryVector.from_dense(dense))
    if op.syndrome(lc).any():
        raise IntegrityError("quasiconcatenated logical has a residual syndrome")
    return op


def quasiconcatenated_stabilizer(lc: LayerCode, check_index: int, pauli: str) -> PauliOperator:
    """Sum of every same-type check on the layer of input check ``check_index``."""
    pauli = _pauli(pauli)
    n_checks = lc.code.n_x if pauli == "X" else lc.code.n_z
    if not 0 <= check_index < n_checks:
        raise IndexError(f"{pauli} check index {check_index} out of range")
    layer = f"{'xy' if pauli == 'X' else 'yz'}:{check_index}"
    m = lc.checks(pauli)
    words = np.zeros(m.words.shape[1], dtype=np.uint64)
    for r in lc.rows_on_layer(pauli, layer):
        words ^= m.words[r]
    return PauliOperator(pauli, BinaryVector(lc.n, words))


def slab_boundary_config(lc: LayerCode, op: PauliOperator, slab: int, side: str = "left") -> MConfiguration:
    """Excitation pattern left on one boundary of ``slab`` by ``op`` restricted to the slab.

    Segment excitations are pushed into the qubit layers by :func:`push_segments`.
    """
    _check_op(lc, op)
    fr = _frame(lc, op.pauli)
    if not 0 <= slab < len(fr.cuts) - 1:
        raise IndexError(f"slab {slab} out of range (0..{len(fr.cuts) - 2})")
    lo, hi = 2 * fr.cuts[slab], 2 * fr.cuts[slab + 1]
    part = PauliOperator(op.pauli, _restrict(lc, op, fr.axis, lo, hi))
    syn = part.syndrome(lc)
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    cut = lo - 1 if side == "left" else hi - 1
    info = lc.info("Z" if op.pauli == "X" else "X")
    mask = np.array([inf.site[fr.axis] == cut for inf in info], dtype=bool)
    cfg = _config_from_syndrome(lc, fr, syn & mask.astype(np.uint8), cut, slab)
    return push_segments(cfg, lc)


def half_space_config(lc: LayerCode, op: PauliOperator, cut: int) -> MConfiguration:
    """Configuration on cut number ``cut`` of ``op`` restricted to the low side of it."""
    _check_op(lc, op)
    fr = _frame(lc, op.pauli)
    b = 2 * fr.cuts[cut]
    part = PauliOperator(op.pauli, _restrict(lc, op, fr.axis, None, b))
    return _config_from_syndrome(lc, fr, part.syndrome(lc), b - 1, cut)


def _junction_moves(segs: tuple[int, ...], first: int) -> list[int]:
    """Junction toggles clearing ``segs`` given the first junction's toggle."""
    moves = [first]
    for s in segs:
        moves.append(moves[-1] ^ s)
    return moves


def push_segments(cfg: MConfiguration, lc: LayerCode) -> MConfiguration:
    """Clear segment bits with the convention that the first junction never fires."""
    fr = _frame(lc, cfg.pauli)
    xz = list(cfg.xz)
    for support, segs in zip(fr.seg_supports, cfg.segments):
        if not segs:
            continue
        for q, m in zip(support, _junction_moves(segs, 0)):
            xz[q] ^= m
    return MConfiguration(cfg.pauli, cfg.slab, tuple(xz), tuple(tuple(0 for _ in s) for s in cfg.segments))


def _lex_key(bits: list[int]) -> tuple[int, tuple[int, ...]]:
    return (sum(bits), tuple(i for i, b in enumerate(bits) if b))


def reduce_to_xz(cfg: MConfiguration, lc: LayerCode) -> MConfiguration:
    """Equivalent configuration with every segment bit cleared.

    Each check layer offers two clearing choices that differ by that check's
    support; the lighter one is kept, ties going to the lexicographically
    smaller support.
    """
    fr = _frame(lc, cfg.pauli)
    xz = list(cfg.xz)
    for support, segs in zip(fr.seg_supports, cfg.segments):
        if not any(segs):
            continue
        options = []
        for first in (0, 1):
            trial = list(xz)
            for q, m in zip(support, _junction_moves(segs, first)):
                trial[q] ^= m
            options.append(trial)
        xz = min(options, key=_lex_key)
    return MConfiguration(cfg.pauli, cfg.slab, tuple(xz), tuple(tuple(0 for _ in s) for s in cfg.segments))


def config_to_input_pauli(cfg: MConfiguration) -> BinaryVector:
    if not cfg.is_xz_only():
        raise ValueError("configuration still has segment bits; reduce it first")
    return BinaryVector.from_dense(np.array(cfg.xz, dtype=np.uint8))


def reference_cut(lc: LayerCode, pauli: str) -> int:
    fr = _frame(lc, pauli)
    layers = len(fr.cuts) - 1
    return (layers - 1) // 2 if layers else 0


def map_layer_logical_to_input(lc: LayerCode, op: PauliOperator) -> BinaryVector:
    """Input-code operator obtained by truncating ``op`` at the reference cut."""
    _check_op(lc, op)
    if op.syndrome(lc).any():
        raise ValueError("operator has a nonzero syndrome")
    cfg = half_space_config(lc, op, reference_cut(lc, op.pauli))
    v = config_to_input_pauli(reduce_to_xz(cfg, lc))
    other = lc.code.hz if op.pauli == "X" else lc.code.hx
    if other.syndrome(v).any():
        raise IntegrityError("mapped operator is outside the input normalizer")
    return v


def configs_equivalent(a: MConfiguration, b: MConfiguration, lc: LayerCode) -> bool:
    """Whether two configurations differ by junction moves."""
    if a.pauli != b.pauli:
        return False
    fr = _frame(lc, a.pauli)
    va = np.array(push_segments(a, lc).xz, dtype=np.uint8)
    vb = np.array(push_segments(b, lc).xz, dtype=np.uint8)
    diff = va ^ vb
    gens = BinaryMatrix.from_supports(lc.code.n, [list(s) for s in fr.seg_supports])
    residual, _ = echelon(gens).reduce(pack_rows(diff.reshape(1, -1))[0])
    return not residual.any()


def equivalence_class(cfg: MConfiguration, lc: LayerCode) -> list[MConfiguration]:
    """Every configuration reachable from ``cfg`` by junction moves (exhaustive)."""
    fr = _frame(lc, cfg.pauli)
    junctions = [(k, t, q) for k, sup in enumerate(fr.seg_supports) for t, q in enumerate(sup)]
    if len(junctions) > 20:
        raise ValueError("too many junctions for exhaustive enumeration")
    out = set()
    for mask in range(1 << len(junctions)):
        xz = list(cfg.xz)
        segs = [list(s) for s in cfg.segments]
        for bit, (k, t, q) in enumerate(junctions):
            if (mask >> bit) & 1:
                xz[q] ^= 1
                if t >= 1:
                    segs[k][t - 1] ^= 1
                if t < len(segs[k]):
                    segs[k][t] ^= 1
        out.add((tuple(xz), tuple(tuple(s) for s in segs)))
    return [MConfiguration(cfg.pauli, cfg.slab, xz, segs) for xz, segs in sorted(out)]
