"""Layer-code synthesis: qubits, checks with provenance, templates and exports.

Each yz-layer together with the qubit layers it touches is the hypergraph
product of a classical "wire" code in the xy-plane with a repetition chain
along z; each xy-layer is the mirrored product along x. The two products share
the qubit layers. Coupling a wire check to a qubit layer's row is what creates
the x-hat and z-hat junctions; paired overlap segments additionally receive one
extra qubit per check on the neighbouring crossing layer (the y-hat defect).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .css import CssCode, IntegrityError, code_from_json, logical_qubit_count
from .gf2 import BinaryMatrix, to_matrix_market
from .layout import (
    BOUNDARY_POINT_KINDS,
    BULK_POINT_KINDS,
    Coord,
    DefectRegistry,
    LayerLayout,
    LineDefect,
    OverlapPairing,
    PointDefect,
    classify_junctions,
    compute_pairing,
    plan_layout,
)

# qubit key: (tag, x, y, z); tag "D" for qubit layers, "Y" for yz-layers, "X" for xy-layers
QubitKey = tuple[str, int, int, int]

# later entries win when several defects cover one site
_SITE_PRIORITY = (
    "trivialY",
    "trivialZ",
    "trivialX",
    "firstX",
    "middleX",
    "lastX",
    "firstZ",
    "middleZ",
    "lastZ",
    "nontrivialY",
) + BOUNDARY_POINT_KINDS + BULK_POINT_KINDS

MAX_WEIGHT = 6


class TemplateValidationError(IntegrityError):
    """Two synthesized checks anticommute."""


@dataclass(frozen=True)
class CheckInfo:
    site: Coord
    layer: str
    kind: str

    @property
    def origin(self) -> str:
        return f"{self.layer}/{self.kind}"


@dataclass(frozen=True, eq=False)
class LayerCode:
    code: CssCode
    c: int
    layout: LayerLayout
    pairing: OverlapPairing
    registry: DefectRegistry
    qubits: tuple[QubitKey, ...]
    qubit_layers: tuple[str, ...]
    hx: BinaryMatrix
    hz: BinaryMatrix
    x_info: tuple[CheckInfo, ...]
    z_info: tuple[CheckInfo, ...]
    blocks: int = 1
    index: dict[QubitKey, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self.index:
            object.__setattr__(self, "index", {q: i for i, q in enumerate(self.qubits)})

    @property
    def n(self) -> int:
        return len(self.qubits)

    @property
    def coords(self) -> np.ndarray:
        return np.array([q[1:] for q in self.qubits], dtype=np.int64).reshape(-1, 3)

    @property
    def layer_count(self) -> int:
        return self.layout.layer_count * self.blocks

    def checks(self, pauli: str) -> BinaryMatrix:
        return self.hx if pauli.upper() == "X" else self.hz

    def info(self, pauli: str) -> tuple[CheckInfo, ...]:
        return self.x_info if pauli.upper() == "X" else self.z_info

    def rows_on_layer(self, pauli: str, layer: str) -> list[int]:
        return [r for r, inf in enumerate(self.info(pauli)) if inf.layer == layer]

    def as_css(self) -> CssCode:
        return CssCode(f"layer[{self.code.name},c={self.c}]", self.n, self.hx, self.hz)

    def logical_qubit_count(self) -> int:
        return logical_qubit_count(self.as_css())

    # ------------------------------------------------------------ exports

    def to_json(self) -> dict[str, Any]:
        def checks(m: BinaryMatrix, info: tuple[CheckInfo, ...]) -> list[dict[str, Any]]:
            return [
                {"support": s, "origin": inf.origin, "site": list(inf.site)}
                for s, inf in zip(m.supports(), info)
            ]

        return {
            "input": {
                "name": self.code.name,
                "hash": self.code.content_hash(),
                "n": self.code.n,
                "hx": self.code.hx.supports(),
                "hz": self.code.hz.supports(),
            },
            "c": self.c,
            "blocks": self.blocks,
            "qubits": [
                {"id": i, "x": q[1], "y": q[2], "z": q[3], "layer": self.qubit_layers[i]}
                for i, q in enumerate(self.qubits)
            ],
            "x_checks": checks(self.hx, self.x_info),
            "z_checks": checks(self.hz, self.z_info),
            "defects": self.registry.to_json(),
        }

    def geometry_json(self) -> dict[str, Any]:
        return geometry_json(self)

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "LayerCode":
        """Rebuild from exported JSON, keeping the file's check supports verbatim.

        The geometry is regenerated from the embedded input code, so edited
        supports survive and can be caught by verification.
        """
        try:
            inp = data["input"]
            code = code_from_json({k: inp[k] for k in ("name", "n", "hx", "hz")})
            c = int(data["c"])
            blocks = int(data.get("blocks", 1))
            x_rows = [list(map(int, ch["support"])) for ch in data["x_checks"]]
            z_rows = [list(map(int, ch["support"])) for ch in data["z_checks"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed layer-code JSON: {exc}") from exc
        if inp.get("hash") not in (None, code.content_hash()):
            raise ValueError("input hash does not match the embedded input code")
        base = tile_blocks(code, c, blocks) if blocks > 1 else build_layer_code(code, c)
        n = base.n
        if len(data.get("qubits", [])) != n:
            raise ValueError(f"expected {n} qubits, file lists {len(data.get('qubits', []))}")
        for rows in (x_rows, z_rows):
            for s in rows:
                if any(not 0 <= q < n for q in s):
                    raise ValueError("check support index out of range")

        def info_for(rows: list[list[int]], checks: list[dict[str, Any]], fallback) -> tuple[CheckInfo, ...]:
            out = []
            for t, ch in enumerate(checks):
                if t < len(fallback):
                    out.append(fallback[t])
                else:
                    layer, _, kind = str(ch.get("origin", "extra/extra")).partition("/")
                    out.append(CheckInfo(tuple(ch.get("site", (0, 0, 0))), layer, kind or "extra"))
            return tuple(out)

        return cls(
            base.code,
            base.c,
            base.layout,
            base.pairing,
            base.registry,
            base.qubits,
            base.qubit_layers,
            BinaryMatrix.from_supports(n, x_rows),
            BinaryMatrix.from_supports(n, z_rows),
            info_for(x_rows, data["x_checks"], base.x_info),
            info_for(z_rows, data["z_checks"], base.z_info),
            base.blocks,
        )

    def write(self, outdir: str | Path) -> dict[str, str]:
        """Write JSON, Matrix Market and geometry files; returns name -> sha256."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        files = {
            "layer_code.json": dumps(self.to_json()),
            "hx.mtx": to_matrix_market(self.hx),
            "hz.mtx": to_matrix_market(self.hz),
            "geometry.json": dumps(self.geometry_json()),
        }
        digests = {}
        for name, text in files.items():
            (outdir / name).write_text(text, encoding="utf-8")
            digests[name] = hashlib.sha256(text.encode()).hexdigest()
        return digests


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def load_layer_code(path: str | Path) -> LayerCode:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError("layer-code JSON must be an object")
    return LayerCode.from_json(data)


# ------------------------------------------------------------- synthesis


def site_kinds(registry: DefectRegistry) -> dict[Coord, str]:
    """Defect kind owning each lattice site, by fixed priority."""
    rank = {k: i for i, k in enumerate(_SITE_PRIORITY)}
    best: dict[Coord, str] = {}
    for line in registry.lines:
        for s in line.sites():
            if s not in best or rank[line.kind] > rank[best[s]]:
                best[s] = line.kind
    for p in registry.points:
        if p.site not in best or rank[p.kind] > rank[best[p.site]]:
            best[p.site] = p.kind
    return best


class _Synth:
    """Accumulates checks keyed by (site, layer) while the products are expanded."""

    def __init__(self, layout: LayerLayout, kinds: dict[Coord, str], omit: frozenset[str]):
        self.layout = layout
        self.kinds = kinds
        self.omit = omit
        self.lx, self.ly, self.lz = layout.bbox
        self.checks: dict[str, dict[tuple[Coord, str], set[QubitKey]]] = {"X": {}, "Z": {}}

    def kind(self, pauli: str, site: Coord) -> str:
        k = self.kinds.get(site)
        if k is not None:
            return k
        if pauli == "X" and site[0] in (0, self.lx):
            return "smooth"
        if pauli == "Z" and site[2] in (0, self.lz):
            return "rough"
        return "bulk"

    def allowed(self, pauli: str, site: Coord) -> bool:
        """Whether defect modifications may be applied to the check at ``site``."""
        return self.kind(pauli, site) not in self.omit

    def add(self, pauli: str, site: Coord, layer: str, qubits: Iterable[QubitKey]) -> None:
        self.checks[pauli].setdefault((site, layer), set()).update(qubits)


def _synthesize(code: CssCode, layout: LayerLayout, pairing: OverlapPairing, registry: DefectRegistry, omit: frozenset[str]):
    lx, _, lz = layout.bbox
    syn = _Synth(layout, site_kinds(registry), omit)
    rows = [layout.y_of(q) for q in range(code.n)]

    # yz-layers: product of the xy wire code with the z chain
    zwire_bits: dict[int, list[int]] = {}
    zwire_checks: dict[int, dict[int, list[tuple]]] = {}
    for zl in layout.zcheck_layers:
        if zl.span is None:
            continue
        lo, hi = zl.span
        zwire_bits[zl.check] = list(range(lo + 1, hi, 2))
        members = {layout.y_of(q) for q in zl.support}
        cks = {}
        for y in range(lo, hi + 1, 2):
            bits: list[tuple] = []
            if y > lo:
                bits.append(("W", y - 1))
            if y < hi:
                bits.append(("W", y + 1))
            if y in members:
                bits.append(("D", y))
            cks[y] = bits
        zwire_checks[zl.check] = cks
    xwire_checks: dict[int, dict[int, list[tuple]]] = {}
    for xl in layout.xcheck_layers:
        if xl.span is None:
            continue
        lo, hi = xl.span
        members = {layout.y_of(q) for q in xl.support}
        cks = {}
        for y in range(lo, hi + 1, 2):
            bits = []
            if y > lo:
                bits.append(("W", y - 1))
            if y < hi:
                bits.append(("W", y + 1))
            if y in members:
                bits.append(("D", y))
            cks[y] = bits
        xwire_checks[xl.check] = cks

    xpos = {zl.check: zl.coord for zl in layout.zcheck_layers}
    zpos = {xl.check: xl.coord for xl in layout.xcheck_layers}
    zlayer_at_x = {zl.coord: zl for zl in layout.zcheck_layers if zl.span is not None}
    xlayer_at_z = {xl.coord: xl for xl in layout.xcheck_layers if xl.span is not None}

    # qubit-layer X checks (stars), coupled to the yz wire check on the same row
    for q in range(code.n):
        y = rows[q]
        for x in range(0, lx + 1, 2):
            zl = zlayer_at_x.get(x)
            coupled = zl is not None and ("D", y) in zwire_checks[zl.check].get(y, [])
            for cz in range(1, lz, 2):
                site = (x, y, cz)
                s = {("D", x, y, cz - 1), ("D", x, y, cz + 1)}
                if x > 0:
                    s.add(("D", x - 1, y, cz))
                if x < lx:
                    s.add(("D", x + 1, y, cz))
                if coupled and syn.allowed("X", site):
                    s.add(("Y", x, y, cz))
                syn.add("X", site, f"xz:{q}", s)
    # qubit-layer Z checks (plaquettes), coupled to the xy wire check on the same row
    for q in range(code.n):
        y = rows[q]
        for z in range(0, lz + 1, 2):
            xl = xlayer_at_z.get(z)
            coupled = xl is not None and ("D", y) in xwire_checks[xl.check].get(y, [])
            for cx in range(1, lx, 2):
                site = (cx, y, z)
                s = {("D", cx - 1, y, z), ("D", cx + 1, y, z)}
                if z > 0:
                    s.add(("D", cx, y, z - 1))
                if z < lz:
                    s.add(("D", cx, y, z + 1))
                if coupled and syn.allowed("Z", site):
                    s.add(("X", cx, y, z))
                syn.add("Z", site, f"xz:{q}", s)

    # yz-layer checks
    for j, cks in zwire_checks.items():
        x = xpos[j]
        layer = f"yz:{j}"
        for y in zwire_bits[j]:
            # X check on a wire bit: stars of the yz-layer
            for cz in range(1, lz, 2):
                s = {("Y", x, y, cz - 1), ("Y", x, y, cz + 1), ("Y", x, y - 1, cz), ("Y", x, y + 1, cz)}
                syn.add("X", (x, y, cz), layer, s)
        for y, bits in cks.items():
            for z in range(0, lz + 1, 2):
                site = (x, y, z)
                s = set()
                for b in bits:
                    if b[0] == "W":
                        s.add(("Y", x, b[1], z))
                    elif syn.allowed("Z", site):
                        s.add(("D", x, b[1], z))
                if z > 0:
                    s.add(("Y", x, y, z - 1))
                if z < lz:
                    s.add(("Y", x, y, z + 1))
                syn.add("Z", site, layer, s)
    # xy-layer checks
    for k, cks in xwire_checks.items():
        z = zpos[k]
        layer = f"xy:{k}"
        lo, hi = next(l.span for l in layout.xcheck_layers if l.check == k)
        for y in range(lo + 1, hi, 2):
            for cx in range(1, lx, 2):
                s = {("X", cx - 1, y, z), ("X", cx + 1, y, z), ("X", cx, y - 1, z), ("X", cx, y + 1, z)}
                syn.add("Z", (cx, y, z), layer, s)
        for y, bits in cks.items():
            for x in range(0, lx + 1, 2):
                site = (x, y, z)
                s = set()
                for b in bits:
                    if b[0] == "W":
                        s.add(("X", x, b[1], z))
                    elif syn.allowed("X", site):
                        s.add(("D", x, b[1], z))
                if x > 0:
                    s.add(("X", x - 1, y, z))
                if x < lx:
                    s.add(("X", x + 1, y, z))
                syn.add("X", site, layer, s)

    # y-hat defects along paired overlap segments
    for (k, j), pairs in sorted(pairing.pairs.items()):
        x, z = xpos[j], zpos[k]
        for a, b in pairs:
            ya, yb = layout.y_of(a), layout.y_of(b)
            for y in range(ya, yb, 2):
                site = (x, y, z)
                if syn.allowed("Z", site):
                    syn.add("Z", site, f"yz:{j}", [("X", x, y + 1, z)])
            for y in range(ya + 2, yb + 1, 2):
                site = (x, y, z)
                if syn.allowed("X", site):
                    syn.add("X", site, f"xy:{k}", [("Y", x, y - 1, z)])
    return syn


def _layer_of(key: QubitKey, layout: LayerLayout) -> str:
    tag, x, y, z = key
    if tag == "D":
        return f"xz:{layout.qubit_at_y(y)}"
    if tag == "Y":
        return f"yz:{x // layout.step - 1}"
    return f"xy:{z // layout.step - 1}"


def build_layer_code(
    code: CssCode, c: int = 2, omit: Iterable[str] = (), validate: bool = True
) -> LayerCode:
    """Construct the layer code of ``code`` with superlattice spacing ``c``.

    ``omit`` names defect kinds whose check modifications are skipped; it
    exists to test that every kind is needed and implies ``validate=False``
    when non-empty.
    """
    omit = frozenset(omit)
    layout = plan_layout(code, c)
    pairing = compute_pairing(code)
    registry = classify_junctions(layout, pairing)
    syn = _synthesize(code, layout, pairing, registry, omit)

    keys: set[QubitKey] = set()
    for pauli in ("X", "Z"):
        for s in syn.checks[pauli].values():
            keys.update(s)
    # isolated qubits can only come from a degenerate layer; keep every D vertex
    lx, _, lz = layout.bbox
    for q in range(code.n):
        y = layout.y_of(q)
        for x in range(0, lx + 1, 2):
            for z in range(0, lz + 1, 2):
                keys.add(("D", x, y, z))
    qubits = tuple(sorted(keys, key=lambda k: (k[1], k[2], k[3], k[0])))
    index = {k: i for i, k in enumerate(qubits)}

    mats = {}
    infos = {}
    for pauli in ("X", "Z"):
        items = sorted(syn.checks[pauli].items(), key=lambda kv: (kv[0][0], kv[0][1]))
        mats[pauli] = BinaryMatrix.from_supports(len(qubits), [sorted(index[q] for q in s) for _, s in items])
        infos[pauli] = tuple(CheckInfo(site, layer, syn.kind(pauli, site)) for (site, layer), _ in items)
    lc = LayerCode(
        code,
        c,
        layout,
        pairing,
        registry,
        qubits,
        tuple(_layer_of(k, layout) for k in qubits),
        mats["X"],
        mats["Z"],
        infos["X"],
        infos["Z"],
        1,
        index,
    )
    if validate and not omit:
        _validate_templates(lc)
    return lc


def _validate_templates(lc: LayerCode) -> None:
    overlap = lc.hx.matmul_t(lc.hz)
    bad = np.argwhere(overlap)
    if bad.size:
        a, b = (int(t) for t in bad[0])
        raise TemplateValidationError(
            f"X check {a} ({lc.x_info[a].origin} at {lc.x_info[a].site}) anticommutes with "
            f"Z check {b} ({lc.z_info[b].origin} at {lc.z_info[b].site})"
        )
    weights = np.concatenate([lc.hx.row_weights(), lc.hz.row_weights()])
    if weights.size and int(weights.max()) > MAX_WEIGHT:
        raise TemplateValidationError(f"check weight {int(weights.max())} exceeds {MAX_WEIGHT}")


# ---------------------------------------------------------------- tiling


def tile_blocks(code: CssCode, c: int, block_count: int) -> LayerCode:
    """Disjoint union of ``block_count`` copies, translated along y."""
    if block_count < 1:
        raise ValueError("block_count must be >= 1")
    base = build_layer_code(code, c)
    if block_count == 1:
        return base
    shift = base.layout.bbox[1] + 2 * base.layout.step
    n = base.n

    def tr(site: Coord, t: int) -> Coord:
        return (site[0], site[1] + t * shift, site[2])

    qubits, layers, x_info, z_info = [], [], [], []
    x_rows, z_rows = [], []
    lines: list[LineDefect] = []
    points: list[PointDefect] = []
    for t in range(block_count):
        pre = f"b{t}."
        qubits += [(k[0], k[1], k[2] + t * shift, k[3]) for k in base.qubits]
        layers += [pre + l for l in base.qubit_layers]
        x_rows += [[q + t * n for q in s] for s in base.hx.supports()]
        z_rows += [[q + t * n for q in s] for s in base.hz.supports()]
        x_info += [CheckInfo(tr(i.site, t), pre + i.layer, i.kind) for i in base.x_info]
        z_info += [CheckInfo(tr(i.site, t), pre + i.layer, i.kind) for i in base.z_info]
        off_l, off_p = len(lines), len(points)
        lines += [
            LineDefect(l.id + off_l, l.kind, tr(l.start, t), tr(l.end, t), tuple(pre + x for x in l.layers))
            for l in base.registry.lines
        ]
        points += [
            PointDefect(p.id + off_p, p.kind, tr(p.site, t), tuple(i + off_l for i in p.lines))
            for p in base.registry.points
        ]
    total = n * block_count
    return LayerCode(
        base.code,
        c,
        base.layout,
        base.pairing,
        DefectRegistry(tuple(lines), tuple(points)),
        tuple(qubits),
        tuple(layers),
        BinaryMatrix.from_supports(total, x_rows),
        BinaryMatrix.from_supports(total, z_rows),
        tuple(x_info),
        tuple(z_info),
        block_count,
    )


# ------------------------------------------------------------- templates


@dataclass(frozen=True)
class CheckTemplate:
    """One local check shape: support offsets relative to its site."""

    kind: str
    pauli: str
    offsets: tuple[Coord, ...]
    replaces: tuple[Coord, ...]  # offsets of the plain layer check at the same site
    count: int

    @property
    def weight(self) -> int:
        return len(self.offsets)


def _offsets(lc: LayerCode, support: list[int], site: Coord) -> tuple[Coord, ...]:
    return tuple(
        sorted((lc.qubits[q][1] - site[0], lc.qubits[q][2] - site[1], lc.qubits[q][3] - site[2]) for q in support)
    )


def template_catalog(lc: LayerCode) -> list[CheckTemplate]:
    """Distinct check shapes of ``lc`` grouped by defect kind.

    The plain shape each one replaces comes from a rebuild with every defect
    modification switched off.
    """
    kinds = {i.kind for i in lc.x_info + lc.z_info}
    plain = build_layer_code(lc.code, lc.c, omit=kinds, validate=False)
    plain_rows = {}
    for pauli in ("X", "Z"):
        for s, inf in zip(plain.checks(pauli).supports(), plain.info(pauli)):
            plain_rows[(pauli, inf.site, inf.layer)] = _offsets(plain, s, inf.site)
    counts: dict[tuple[str, str, tuple, tuple], int] = {}
    for pauli in ("X", "Z"):
        for s, inf in zip(lc.checks(pauli).supports(), lc.info(pauli)):
            key = (inf.kind, pauli, _offsets(lc, s, inf.site), plain_rows.get((pauli, inf.site, inf.layer), ()))
            counts[key] = counts.get(key, 0) + 1
    return [CheckTemplate(k, p, o, r, n) for (k, p, o, r), n in sorted(counts.items())]


# ------------------------------------------------------------- invariants


def commutation_violations(lc: LayerCode) -> list[tuple[int, int]]:
    return [(int(a), int(b)) for a, b in np.argwhere(lc.hx.matmul_t(lc.hz))]


def weight_violations(lc: LayerCode, bound: int = MAX_WEIGHT) -> list[tuple[str, int, int]]:
    out = []
    for pauli in ("X", "Z"):
        for r, w in enumerate(lc.checks(pauli).row_weights()):
            if int(w) > bound:
                out.append((pauli, r, int(w)))
    return out


def locality_violations(lc: LayerCode) -> list[tuple[str, int, int]]:
    """Checks whose support bounding box has a side longer than ``2c + 1`` units."""
    coords = lc.coords
    limit = 2 * lc.c + 1
    out = []
    for pauli in ("X", "Z"):
        for r, s in enumerate(lc.checks(pauli).supports()):
            if not s:
                continue
            pts = coords[s]
            side = int((pts.max(axis=0) - pts.min(axis=0)).max())
            if side > limit:
                out.append((pauli, r, side))
    return out


def geometry_json(lc: LayerCode) -> dict[str, Any]:
    """Plane and defect-line listing for plotting."""
    lay = lc.layout
    shift = lay.bbox[1] + 2 * lay.step
    layers = []
    for t in range(lc.blocks):
        pre = f"b{t}." if lc.blocks > 1 else ""
        dy = t * shift
        for q in lay.qubit_layers:
            layers.append(
                {"id": pre + q.layer_id, "plane": "xz", "coord": q.y + dy, "span": [list(q.x_extent), list(q.z_extent)]}
            )
        for l in lay.xcheck_layers:
            span = [l.span[0] + dy, l.span[1] + dy] if l.span else []
            layers.append({"id": pre + l.layer_id, "plane": "xy", "coord": l.coord, "span": span})
        for l in lay.zcheck_layers:
            span = [l.span[0] + dy, l.span[1] + dy] if l.span else []
            layers.append({"id": pre + l.layer_id, "plane": "yz", "coord": l.coord, "span": span})
    lines = [
        {"kind": l.kind, "from": list(l.start), "to": list(l.end)} for l in lc.registry.lines
    ]
    return {"layers": layers, "defect_lines": lines, "bbox": list(lay.bbox)}
