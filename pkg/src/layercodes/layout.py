"""Geometric plan of a layer code and classification of its junctions.

All coordinates are integers in half-edge units: one lattice edge spans two
units, so lattice vertices sit at even coordinates and edge midpoints at odd
ones. With spacing ``c`` consecutive layers of the same orientation are
``2c`` units apart.

* qubit layer ``i`` (an xz-plane) sits at ``y = 2c * pos(i)``
* Z-check layer ``j`` (a yz-plane) sits at ``x = 2c * (j + 1)``
* X-check layer ``k`` (an xy-plane) sits at ``z = 2c * (k + 1)``
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .css import CssCode, IntegrityError, validate

LINE_KINDS = (
    "trivialY",
    "nontrivialY",
    "firstZ",
    "middleZ",
    "lastZ",
    "firstX",
    "middleX",
    "lastX",
    "trivialZ",
    "trivialX",
)

BULK_POINT_KINDS = (
    "first-first",
    "last-last",
    "middle-middle-above",
    "middle-middle-below",
    "zfirst-xmiddle",
    "zlast-xmiddle",
    "xfirst-zmiddle",
    "xlast-zmiddle",
    "zmiddle-xcross",
    "xmiddle-zcross",
)

BOUNDARY_POINT_KINDS = (
    "zfirst-front",
    "zfirst-back",
    "zlast-front",
    "zlast-back",
    "zmiddle-front",
    "zmiddle-back",
    "xfirst-left",
    "xfirst-right",
    "xlast-left",
    "xlast-right",
    "xmiddle-left",
    "xmiddle-right",
)

POINT_KINDS = BULK_POINT_KINDS + BOUNDARY_POINT_KINDS

Coord = tuple[int, int, int]


@dataclass(frozen=True)
class QubitLayer:
    qubit: int
    y: int
    x_extent: tuple[int, int]
    z_extent: tuple[int, int]

    @property
    def layer_id(self) -> str:
        return f"xz:{self.qubit}"


@dataclass(frozen=True)
class CheckLayer:
    """A yz-layer (Z check, ``coord`` is x) or xy-layer (X check, ``coord`` is z)."""

    check: int
    pauli: str
    coord: int
    support: tuple[int, ...]  # input qubits ordered by position
    span: tuple[int, int] | None  # y-range, None for an empty check

    @property
    def layer_id(self) -> str:
        return f"{'yz' if self.pauli == 'Z' else 'xy'}:{self.check}"


@dataclass(frozen=True)
class LayerLayout:
    c: int
    n: int
    position: tuple[int, ...]  # position[q] = slot of qubit q along y
    qubit_layers: tuple[QubitLayer, ...]
    zcheck_layers: tuple[CheckLayer, ...]
    xcheck_layers: tuple[CheckLayer, ...]
    bbox: Coord  # (Lx, Ly, Lz); the cuboid is [0, Lx] x [0, Ly] x [0, Lz]

    @property
    def step(self) -> int:
        return 2 * self.c

    @property
    def layer_count(self) -> int:
        return len(self.qubit_layers) + len(self.zcheck_layers) + len(self.xcheck_layers)

    def y_of(self, q: int) -> int:
        return self.step * self.position[q]

    def qubit_at_y(self, y: int) -> int | None:
        if y % self.step or not 0 <= y // self.step < self.n:
            return None
        return self.order[y // self.step]

    @property
    def order(self) -> tuple[int, ...]:
        out = [0] * self.n
        for q, p in enumerate(self.position):
            out[p] = q
        return tuple(out)

    def to_json(self) -> dict[str, Any]:
        return {
            "c": self.c,
            "bbox": list(self.bbox),
            "qubit_layers": [
                {"qubit": q.qubit, "y": q.y, "x_extent": list(q.x_extent), "z_extent": list(q.z_extent)}
                for q in self.qubit_layers
            ],
            "zcheck_layers": [
                {"check": l.check, "x": l.coord, "span": list(l.span) if l.span else None}
                for l in self.zcheck_layers
            ],
            "xcheck_layers": [
                {"check": l.check, "z": l.coord, "span": list(l.span) if l.span else None}
                for l in self.xcheck_layers
            ],
        }


def plan_layout(code: CssCode, c: int = 2) -> LayerLayout:
    """Place one layer per qubit, Z check and X check.

    The x-extent grows with the number of Z checks and the z-extent with the
    number of X checks; an empty side leaves an extent of ``2c`` (one
    superlattice step).
    """
    if not isinstance(c, int) or c < 2:
        raise ValueError(f"spacing c must be an integer >= 2, got {c!r}")
    report = validate(code)
    if not report.ok:
        raise ValueError(f"input code fails validation: anticommuting pairs {report.violations}")
    step = 2 * c
    position = [0] * code.n
    for p, q in enumerate(code.qubit_order):
        position[q] = p
    lx = step * (code.n_z + 1)
    lz = step * (code.n_x + 1)
    ly = step * max(code.n - 1, 0)

    def check_layers(rows: list[list[int]], pauli: str) -> tuple[CheckLayer, ...]:
        out = []
        for idx, s in enumerate(rows):
            sup = tuple(sorted(s, key=lambda q: position[q]))
            span = (step * position[sup[0]], step * position[sup[-1]]) if sup else None
            out.append(CheckLayer(idx, pauli, step * (idx + 1), sup, span))
        return tuple(out)

    qubit_layers = tuple(
        QubitLayer(q, step * position[q], (0, lx), (0, lz)) for q in range(code.n)
    )
    return LayerLayout(
        c,
        code.n,
        tuple(position),
        qubit_layers,
        check_layers(code.hz.supports(), "Z"),
        check_layers(code.hx.supports(), "X"),
        (lx, ly, lz),
    )


# ---------------------------------------------------------------- pairing


@dataclass(frozen=True)
class OverlapPairing:
    """Consecutive pairing of the shared support of each overlapping (X, Z) check pair."""

    pairs: dict[tuple[int, int], tuple[tuple[int, int], ...]]  # (x_check, z_check) -> pairs

    def get(self, x_check: int, z_check: int) -> tuple[tuple[int, int], ...]:
        return self.pairs.get((x_check, z_check), ())


def compute_pairing(code: CssCode) -> OverlapPairing:
    position = {q: p for p, q in enumerate(code.qubit_order)}
    xs = code.hx.supports()
    zs = code.hz.supports()
    out: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {}
    for k, sx in enumerate(xs):
        setx = set(sx)
        for j, sz in enumerate(zs):
            shared = sorted(setx.intersection(sz), key=position.__getitem__)
            if not shared:
                continue
            if len(shared) % 2:
                raise IntegrityError(f"X check {k} and Z check {j} overlap on an odd set {shared}")
            out[(k, j)] = tuple(zip(shared[::2], shared[1::2]))
    return OverlapPairing(out)


# --------------------------------------------------------------- registry


@dataclass(frozen=True)
class LineDefect:
    id: int
    kind: str
    start: Coord
    end: Coord
    layers: tuple[str, str]

    def sites(self) -> list[Coord]:
        """Every integer point on the segment."""
        axis = next((a for a in range(3) if self.start[a] != self.end[a]), 0)
        lo, hi = sorted((self.start[axis], self.end[axis]))
        out = []
        for t in range(lo, hi + 1):
            p = list(self.start)
            p[axis] = t
            out.append(tuple(p))
        return out

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind,
            "from": list(self.start),
            "to": list(self.end),
            "layers": list(self.layers),
        }


@dataclass(frozen=True)
class PointDefect:
    id: int
    kind: str
    site: Coord
    lines: tuple[int, ...]

    def to_json(self) -> dict[str, Any]:
        return {"id": self.id, "kind": self.kind, "site": list(self.site), "lines": list(self.lines)}


@dataclass(frozen=True)
class DefectRegistry:
    lines: tuple[LineDefect, ...]
    points: tuple[PointDefect, ...]

    def lines_of_kind(self, kind: str) -> list[LineDefect]:
        return [l for l in self.lines if l.kind == kind]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for item in self.lines + self.points:  # type: ignore[operator]
            out[item.kind] = out.get(item.kind, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> dict[str, Any]:
        return {
            "lines": [l.to_json() for l in self.lines],
            "points": [p.to_json() for p in self.points],
        }


def _role(layer: CheckLayer, q: int, y: int) -> str | None:
    """Role of qubit layer ``q`` at height ``y`` along a check layer."""
    if layer.span is None or not layer.span[0] <= y <= layer.span[1]:
        return None
    if q not in layer.support:
        return "cross"
    if q == layer.support[0]:
        return "first"
    if q == layer.support[-1]:
        return "last"
    return "middle"


def _bulk_kind(zrole: str, xrole: str, above: bool, below: bool) -> str | None:
    if zrole == "first" and xrole == "first":
        return "first-first"
    if zrole == "last" and xrole == "last":
        return "last-last"
    if zrole == "middle" and xrole == "middle":
        if above and not below:
            return "middle-middle-above"
        if below and not above:
            return "middle-middle-below"
        raise IntegrityError("shared middle qubit must end exactly one paired segment")
    if xrole == "middle" and zrole in ("first", "last"):
        return f"z{zrole}-xmiddle"
    if zrole == "middle" and xrole in ("first", "last"):
        return f"x{xrole}-zmiddle"
    if zrole == "middle" and xrole == "cross":
        return "zmiddle-xcross" if above and below else None
    if xrole == "middle" and zrole == "cross":
        return "xmiddle-zcross" if above and below else None
    if {zrole, xrole} == {"first", "last"}:
        raise IntegrityError("a first/last meeting implies an odd overlap")
    return None


def classify_junctions(layout: LayerLayout, pairing: OverlapPairing) -> DefectRegistry:
    """Enumerate every junction line and point defect of ``layout``."""
    lx, _, lz = layout.bbox
    step = layout.step
    order = layout.order
    lines: list[LineDefect] = []
    zline_at: dict[tuple[int, int], LineDefect] = {}  # (z_check, qubit)
    xline_at: dict[tuple[int, int], LineDefect] = {}  # (x_check, qubit)
    yseg_at: dict[tuple[int, int, int], LineDefect] = {}  # (z_check, x_check, lower slot)

    def add(kind: str, start: Coord, end: Coord, layers: tuple[str, str]) -> LineDefect:
        line = LineDefect(len(lines), kind, start, end, layers)
        lines.append(line)
        return line

    for zl in layout.zcheck_layers:
        if zl.span is None:
            continue
        for y in range(zl.span[0], zl.span[1] + 1, step):
            q = order[y // step]
            role = _role(zl, q, y)
            kind = "trivialZ" if role == "cross" else f"{role}Z"
            zline_at[(zl.check, q)] = add(kind, (zl.coord, y, 0), (zl.coord, y, lz), (f"xz:{q}", zl.layer_id))
    for xl in layout.xcheck_layers:
        if xl.span is None:
            continue
        for y in range(xl.span[0], xl.span[1] + 1, step):
            q = order[y // step]
            role = _role(xl, q, y)
            kind = "trivialX" if role == "cross" else f"{role}X"
            xline_at[(xl.check, q)] = add(kind, (0, y, xl.coord), (lx, y, xl.coord), (f"xz:{q}", xl.layer_id))
    for zl in layout.zcheck_layers:
        for xl in layout.xcheck_layers:
            if zl.span is None or xl.span is None:
                continue
            lo, hi = max(zl.span[0], xl.span[0]), min(zl.span[1], xl.span[1])
            if lo >= hi:
                continue
            inside = set()
            for a, b in pairing.get(xl.check, zl.check):
                inside.update(range(layout.position[a], layout.position[b]))
            for slot in range(lo // step, hi // step):
                kind = "nontrivialY" if slot in inside else "trivialY"
                y0 = slot * step
                yseg_at[(zl.check, xl.check, slot)] = add(
                    kind, (zl.coord, y0, xl.coord), (zl.coord, y0 + step, xl.coord), (zl.layer_id, xl.layer_id)
                )

    points: list[PointDefect] = []

    def point(kind: str, site: Coord, incident: list[LineDefect]) -> None:
        points.append(PointDefect(len(points), kind, site, tuple(sorted(l.id for l in incident))))

    for zl in layout.zcheck_layers:
        for xl in layout.xcheck_layers:
            if zl.span is None or xl.span is None:
                continue
            lo, hi = max(zl.span[0], xl.span[0]), min(zl.span[1], xl.span[1])
            for y in range(lo, hi + 1, step):
                q = order[y // step]
                zrole, xrole = _role(zl, q, y), _role(xl, q, y)
                assert zrole is not None and xrole is not None
                slot = y // step
                above = yseg_at.get((zl.check, xl.check, slot))
                below = yseg_at.get((zl.check, xl.check, slot - 1))
                kind = _bulk_kind(
                    zrole,
                    xrole,
                    above is not None and above.kind == "nontrivialY",
                    below is not None and below.kind == "nontrivialY",
                )
                if kind is None:
                    continue
                incident = [zline_at[(zl.check, q)], xline_at[(xl.check, q)]]
                incident += [s for s in (above, below) if s is not None]
                point(kind, (zl.coord, y, xl.coord), incident)
    for (j, q), line in sorted(zline_at.items()):
        if line.kind == "trivialZ":
            continue
        role = line.kind[:-1]
        point(f"z{role}-front", line.start, [line])
        point(f"z{role}-back", line.end, [line])
    for (k, q), line in sorted(xline_at.items()):
        if line.kind == "trivialX":
            continue
        role = line.kind[:-1]
        point(f"x{role}-left", line.start, [line])
        point(f"x{role}-right", line.end, [line])
    for p in points:
        if p.kind not in POINT_KINDS:
            raise IntegrityError(f"unclassifiable point defect {p.kind} at {p.site}")
    return DefectRegistry(tuple(lines), tuple(points))
