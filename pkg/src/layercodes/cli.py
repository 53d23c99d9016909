"""Command-line entry point: build, verify, analyze and export layer codes.

Exit codes: 0 success, 1 verification failure, 2 input or usage error,
3 internal integrity failure.
"""

from __future__ import annotations

import hashlib
import sys
from pathlib import Path
from typing import Any, Callable

import click

from . import __version__
from .analysis import (
    DEFAULT_CUTOFF,
    energy_barrier_exact,
    energy_barrier_sweep,
    layer_distance_bounds,
    point_defect_correctability,
    relation_inheritance,
    tagged,
)
from .builder import (
    MAX_WEIGHT,
    LayerCode,
    build_layer_code,
    commutation_violations,
    dumps,
    load_layer_code,
    locality_violations,
    weight_violations,
)
from .css import CodeFormatError, CssCode, IntegrityError, builtin, load_code, logical_basis, logical_qubit_count, validate
from .gf2 import BudgetExceeded, in_row_space, nullspace_basis, rank
from .logicals import map_layer_logical_to_input, quasiconcatenated_logical

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTEGRITY = 0, 1, 2, 3


def _emit(obj: Any) -> None:
    click.echo(dumps(obj), nl=False)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _manifest(subcommand: str, input_hash: str, parameters: dict[str, Any], outputs: dict[str, str]) -> dict[str, Any]:
    return {
        "subcommand": subcommand,
        "input_hash": input_hash,
        "parameters": parameters,
        "tool_version": __version__,
        "outputs": dict(sorted(outputs.items())),
    }


def _guard(fn: Callable[[], int]) -> None:
    """Run ``fn`` and map exceptions onto the exit-code contract."""
    try:
        code = fn()
    except IntegrityError as exc:
        _emit({"error": "integrity", "message": str(exc)})
        sys.exit(EXIT_INTEGRITY)
    except (CodeFormatError, ValueError, KeyError, OSError) as exc:
        _emit({"error": "input", "message": str(exc)})
        sys.exit(EXIT_INPUT)
    sys.exit(code)


def _load_input(builtin_name: str | None, input_path: str | None) -> CssCode:
    if bool(builtin_name) == bool(input_path):
        raise click.UsageError("give exactly one of --builtin or --input")
    if builtin_name:
        return builtin(builtin_name)
    return load_code(input_path)  # type: ignore[arg-type]


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Construct and check layer codes from CSS codes."""


@main.command()
@click.option("--builtin", "builtin_name", help="rep(m), c422, shor, steane or surface(L)")
@click.option("--input", "input_path", type=click.Path(), help="code JSON or Matrix Market sidecar")
@click.option("--c", "c", type=int, default=2, show_default=True, help="superlattice spacing")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", type=click.Path(), default="layer_code_out", show_default=True, help="output directory")
def build(builtin_name: str | None, input_path: str | None, c: int, seed: int, output: str) -> None:
    """Build a layer code and write its JSON, Matrix Market and geometry files."""

    def run() -> int:
        code = _load_input(builtin_name, input_path)
        report = validate(code)
        if not report.ok:
            _emit({"error": "input", "validation": report.to_json()})
            return EXIT_INPUT
        lc = build_layer_code(code, c)
        outdir = Path(output)
        digests = lc.write(outdir)
        manifest = _manifest("build", code.content_hash(), {"c": c, "seed": seed}, digests)
        (outdir / "manifest.json").write_text(dumps(manifest), encoding="utf-8")
        _emit(
            {
                "input": code.name,
                "layers": {
                    "total": tagged(lc.layer_count, "exact"),
                    "xz": tagged(len(lc.layout.qubit_layers), "exact"),
                    "xy": tagged(len(lc.layout.xcheck_layers), "exact"),
                    "yz": tagged(len(lc.layout.zcheck_layers), "exact"),
                },
                "n": tagged(lc.n, "exact"),
                "k": tagged(lc.logical_qubit_count(), "exact"),
                "output": str(outdir),
            }
        )
        return EXIT_OK

    _guard(run)


def verify_layer_code(lc: LayerCode, level: str = "fast", seed: int = 0) -> dict[str, Any]:
    """Run the invariant checks; ``full`` adds correctability, round trips and distance."""
    checks: list[dict[str, Any]] = []

    def record(name: str, ok: bool, detail: Any = None) -> None:
        checks.append({"name": name, "pass": bool(ok), "detail": detail})

    comm = commutation_violations(lc)
    record("commutation", not comm, {"violations": comm[:20], "count": tagged(len(comm), "exact")})
    wv = [{"pauli": p, "row": r, "weight": tagged(w, "exact")} for p, r, w in weight_violations(lc)]
    record("weight", not wv, {"violations": wv[:20], "bound": tagged(MAX_WEIGHT, "parameter")})
    lv = [{"pauli": p, "row": r, "side": tagged(w, "exact")} for p, r, w in locality_violations(lc)]
    record("locality", not lv, {"violations": lv[:20], "bound": tagged(2 * lc.c + 1, "parameter")})
    k_in = logical_qubit_count(lc.code) * lc.blocks
    k_out = lc.n - rank(lc.hx) - rank(lc.hz) if not comm else None
    out_mode = "exact" if k_out is not None else "unknown"
    record("k_preserved", k_out == k_in, {"input": tagged(k_in, "exact"), "output": tagged(k_out, out_mode)})
    if level == "full" and not comm:
        rep = point_defect_correctability(lc)
        failures = [f.to_json() for f in rep.failures()]
        record("correctability", rep.passed, {"balls": tagged(len(rep.balls), "exact"), "failures": failures})
        if lc.blocks == 1 and k_in:
            basis = logical_basis(lc.code)
            ok = True
            for pauli, reps, stab in (("X", basis.x_logicals, lc.code.hx), ("Z", basis.z_logicals, lc.code.hz)):
                for i in range(basis.k):
                    v = reps.row(i)
                    op = quasiconcatenated_logical(lc, v, pauli)
                    if op.syndrome(lc).any():
                        ok = False
                        continue
                    back = map_layer_logical_to_input(lc, op)
                    ok &= in_row_space(stab, back ^ v)
            record("logical_round_trip", ok, {"k": tagged(basis.k, "exact")})
            bounds = layer_distance_bounds(lc, seed=seed)
            record("distance_bounds", bounds.lower <= bounds.upper, bounds.to_json())
    return {"level": level, "pass": all(c["pass"] for c in checks), "checks": checks}


@main.command()
@click.argument("path", type=click.Path())
@click.option("--level", type=click.Choice(["fast", "full"]), default="fast", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def verify(path: str, level: str, seed: int) -> None:
    """Check commutation, weight, locality and k (plus more at --level full)."""

    def run() -> int:
        lc = load_layer_code(path)
        report = verify_layer_code(lc, level, seed)
        _emit(report)
        return EXIT_OK if report["pass"] else EXIT_FAIL

    _guard(run)


def _relations(code: CssCode) -> list[tuple[str, list[int]]]:
    """A basis of the dependencies among each type of input check."""
    out = []
    for pauli in ("X", "Z"):
        m = code.checks(pauli)
        if m.rows == 0:
            continue
        deps = nullspace_basis(m.transpose())
        out += [(pauli, s) for s in deps.supports()]
    return out


def analyze_layer_code(
    lc: LayerCode, distance: bool, barrier: bool, relations: bool, seed: int, budget: int | None, cutoff: int
) -> dict[str, Any]:
    report: dict[str, Any] = {"input": lc.code.name, "n": tagged(lc.n, "exact")}
    if distance:
        try:
            report["distance"] = layer_distance_bounds(lc, budget=budget, seed=seed, cutoff=cutoff).to_json()
        except ValueError as exc:
            report["distance"] = {"value": None, "mode": "unknown", "reason": str(exc)}
    if barrier:
        entries: dict[str, Any] = {}
        basis = logical_basis(lc.code)
        for pauli, reps in (("X", basis.x_logicals), ("Z", basis.z_logicals)):
            try:
                entries[f"input_{pauli}"] = energy_barrier_exact(lc.code, pauli).to_json()["barrier"]
            except (BudgetExceeded, ValueError) as exc:
                entries[f"input_{pauli}"] = {"value": None, "mode": "unknown", "reason": str(exc)}
            sweeps = []
            for i in range(basis.k):
                res = energy_barrier_sweep(lc, reps.row(i), pauli)
                sweeps.append({"logical": reps.row(i).support(), "barrier": tagged(res.value, res.mode)})
            entries[f"sweep_{pauli}"] = sweeps
        report["barrier"] = entries
    if relations:
        certs = []
        for pauli, rel in _relations(lc.code):
            cert = relation_inheritance(lc.code, rel, lc, pauli)
            certs.append(cert.to_json())
        report["relations"] = certs
    return report


@main.command()
@click.argument("path", type=click.Path())
@click.option("--distance", is_flag=True, help="distance lower/upper bounds")
@click.option("--barrier", is_flag=True, help="energy barrier of input and sweep bound")
@click.option("--relations", is_flag=True, help="check-relation inheritance certificates")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--budget", type=int, default=None, help="randomized restarts")
@click.option("--cutoff", type=int, default=DEFAULT_CUTOFF, show_default=True, help="exact search weight cutoff")
@click.option("--output", type=click.Path(), default=None, help="write the report here as well")
def analyze(
    path: str, distance: bool, barrier: bool, relations: bool, seed: int, budget: int | None, cutoff: int, output: str | None
) -> None:
    """Run distance, barrier and relation analyses with tagged results."""
    if not (distance or barrier or relations):
        raise click.UsageError("choose at least one of --distance, --barrier, --relations")

    def run() -> int:
        lc = load_layer_code(path)
        if commutation_violations(lc):
            _emit({"error": "verification", "message": "checks do not commute; run verify"})
            return EXIT_FAIL
        report = analyze_layer_code(lc, distance, barrier, relations, seed, budget, cutoff)
        text = dumps(report)
        if output:
            out = Path(output)
            out.write_text(text, encoding="utf-8")
            params = {"distance": distance, "barrier": barrier, "relations": relations, "seed": seed,
                      "budget": budget, "cutoff": cutoff}
            manifest = _manifest("analyze", lc.code.content_hash(), params, {out.name: _digest(text)})
            out.with_name(out.stem + ".manifest.json").write_text(dumps(manifest), encoding="utf-8")
        click.echo(text, nl=False)
        return EXIT_OK

    _guard(run)


@main.command("export-geometry")
@click.argument("path", type=click.Path())
@click.option("--output", type=click.Path(), default="geometry.json", show_default=True)
def export_geometry(path: str, output: str) -> None:
    """Write the plane and defect-line listing for plotting."""

    def run() -> int:
        lc = load_layer_code(path)
        geometry = lc.geometry_json()
        Path(output).write_text(dumps(geometry), encoding="utf-8")
        counts: dict[str, int] = {}
        for line in lc.registry.lines:
            counts[line.kind] = counts.get(line.kind, 0) + 1
        summary = {
            "layers": tagged(len(geometry["layers"]), "exact"),
            "defect_lines": {k: tagged(v, "exact") for k, v in sorted(counts.items())},
            "output": output,
        }
        _emit(summary)
        return EXIT_OK

    _guard(run)


if __name__ == "__main__":  # pragma: no cover
    main()
