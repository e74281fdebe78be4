"""Command-line entry point wiring all modules together.

Subcommands: verify, classify, trace, atoms, kovalevskaya.  Every output
is JSON with sorted keys and repr floats, so identical configurations and
seeds produce byte-identical files; the seed and tolerances used are
echoed into each report.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .atoms import (
    AtomsError,
    complexity,
    cross_check_criteria,
    exceptions_report,
    named_product,
    named_products,
    product_from_dict,
    stability_verdict,
)
from .bifurcation import ScanParams, TraceParams, export_diagram, diagram_to_dict, scan_singular_points, trace_diagram
from .canonical import CanonicalSpec, build_canonical
from .classify import DEFAULT_ATTEMPTS, DEFAULT_SEED, DEFAULT_TOL, classify_point
from .kovalevskaya import build_kovalevskaya, kovalevskaya_diagram
from .kovalevskaya import report as kovalevskaya_report
from .phasespace import IntegrableModel, check_commutation, load_model

DEFAULT_SAMPLES = 1000
COMMUTATION_TOL = 1e-9
JACOBI_TOL = 1e-10


def _emit(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def resolve_model(spec: str, g: float | None = None) -> IntegrableModel:
    """Built-in registry ('kovalevskaya', 'canonical:r,ke,kh,kf') or a file."""
    if spec == "kovalevskaya":
        return build_kovalevskaya(0.0 if g is None else g)
    if spec.startswith("canonical:"):
        parts = spec.split(":", 1)[1].split(",")
        if len(parts) != 4:
            raise SystemExit(f"bad canonical spec {spec!r}; want canonical:r,ke,kh,kf")
        r, ke, kh, kf = (int(x) for x in parts)
        return build_canonical(CanonicalSpec(r, ke, kh, kf))
    return load_model(spec)


def _parse_point(text: str, model: IntegrableModel) -> np.ndarray:
    out = np.zeros(model.dim)
    if text.strip():
        for item in text.split(","):
            name, _, valtext = item.partition("=")
            name = name.strip()
            if name not in model.coords:
                raise SystemExit(f"unknown coordinate {name!r}; model has {model.coords}")
            out[model.coords.index(name)] = float(valtext)
    return out


def _default_box(model: IntegrableModel):
    if model.name.startswith("kovalevskaya"):
        return [(-1.2, 1.2)] * 3 + [(-4.0, 4.0)] * 3
    return [(-1.0, 1.0)] * model.dim


def _parse_box(text: str | None, model: IntegrableModel):
    """'lo:hi' for all coordinates, or one comma-separated pair per coordinate."""
    if not text:
        return _default_box(model)
    pairs = []
    for part in text.split(","):
        lo, _, hi = part.partition(":")
        pairs.append((float(lo), float(hi)))
    if len(pairs) == 1:
        return pairs * model.dim
    if len(pairs) != model.dim:
        raise SystemExit(f"--box needs 1 or {model.dim} lo:hi pairs, got {len(pairs)}")
    return pairs


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    model = resolve_model(args.model, args.g)
    box = 2.0 if model.structure.casimirs else 1.0
    comm = check_commutation(model, samples=args.samples, tol=COMMUTATION_TOL, box=box, seed=args.seed)
    jacobi = model.structure.jacobi_residual(samples=min(args.samples, 1000), box=box, seed=args.seed)
    casimir = model.structure.casimir_residual(samples=min(args.samples, 200), box=box, seed=args.seed)
    passed = comm.passed and jacobi <= JACOBI_TOL and casimir <= COMMUTATION_TOL
    report = {
        "model": args.model,
        "g": args.g,
        "seed": args.seed,
        "samples": args.samples,
        "commutation": {
            "max_residual": float(comm.max_residual),
            "worst_pair": list(comm.worst_pair) if comm.worst_pair else None,
            "tol": COMMUTATION_TOL,
            "pass": bool(comm.passed),
        },
        "jacobi": {"max_residual": float(jacobi), "tol": JACOBI_TOL, "pass": bool(jacobi <= JACOBI_TOL)},
        "casimirs": {"max_residual": float(casimir), "tol": COMMUTATION_TOL, "pass": bool(casimir <= COMMUTATION_TOL)},
        "pass": bool(passed),
    }
    _emit(report, args.out)
    return 0 if passed else 1


def cmd_classify(args) -> int:
    model = resolve_model(args.model, args.g)
    point = _parse_point(args.point, model)
    try:
        result = classify_point(model, point, tol=args.tol, attempts=args.attempts, seed=args.seed)
    except Exception as exc:
        _emit({"error": str(exc), "model": args.model, "seed": args.seed}, args.out)
        return 1
    result["model"] = args.model
    if args.g is not None:
        result["g"] = args.g
    _emit(result, args.out)
    return 0


def cmd_trace(args) -> int:
    model = resolve_model(args.model, args.g)
    if args.model == "kovalevskaya":
        box = _parse_box(args.box, model) if args.box else None
        diagram = kovalevskaya_diagram(
            args.g if args.g is not None else 0.0, box=box, resolution=args.resolution, tol=args.tol
        )
    else:
        box = _parse_box(args.box, model)
        seeds = scan_singular_points(
            model, box, resolution=args.resolution, tol=args.tol, params=ScanParams(seed=args.seed)
        )
        params = TraceParams(step=args.step, value_box=(-args.value_bound, args.value_bound), seed=args.seed)
        diagram = trace_diagram(model, seeds, params, tol=args.tol)
    wrote = []
    for fmt, path in (("svg", args.out), ("csv", args.csv), ("json", args.json_out)):
        if path:
            export_diagram(diagram, fmt, path)
            wrote.append(path)
    if not wrote:
        _emit(diagram_to_dict(diagram), None)
    else:
        summary = {
            "model": args.model,
            "g": args.g,
            "seed": args.seed,
            "arcs": len(diagram.arcs),
            "labels": sorted({a.label for a in diagram.arcs}),
            "vertices": len(diagram.vertices),
            "files": wrote,
        }
        _emit(summary, None)
    return 0


def cmd_atoms_check(args) -> int:
    try:
        if args.name:
            entry = named_product(args.name)
            if isinstance(entry, dict):
                _emit({"name": args.name, "exception": entry, "seed": args.seed}, args.out)
                return 0
            product = entry
        else:
            with open(args.product) as fh:
                product = product_from_dict(json.load(fh))
        report = cross_check_criteria(product)
        out = {
            "name": product.name,
            "components": [c.name for c in product.components],
            "group": product.group.name,
            "complexity": complexity(product),
            "iv": report.iv,
            "vi": report.vi,
            "verdict": stability_verdict(product),
            "ki_components": [k.connected_components for k in report.ki_sets],
            "seed": args.seed,
        }
        _emit(out, args.out)
        return 0
    except AtomsError as exc:
        _emit({"error": str(exc), "seed": args.seed}, args.out)
        return 1


def cmd_atoms_list(args) -> int:
    reg = named_products()
    out = {
        "products": sorted(name for name, v in reg.items() if not isinstance(v, dict)),
        "exceptions": exceptions_report(),
        "seed": args.seed,
    }
    _emit(out, args.out)
    return 0


def cmd_kovalevskaya_report(args) -> int:
    rep = kovalevskaya_report(
        args.g, tol=args.tol, attempts=args.attempts, seed=args.seed, with_diagram=args.diagram or bool(args.svg)
    )
    if args.svg:
        diagram = kovalevskaya_diagram(args.g, tol=args.tol)
        export_diagram(diagram, "svg", args.svg)
        rep["svg"] = args.svg
    _emit(rep, args.out)
    if rep["expected_types"] is not None and not rep["matches_expected"]:
        return 1
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default=None, help="write JSON report here (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intsing",
        description="Singularity analysis of integrable Hamiltonian systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check commutation, Jacobi and Casimir identities")
    p.add_argument("--model", required=True)
    p.add_argument("--g", type=float, default=None)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="Williamson type of a phase-space point")
    p.add_argument("--model", required=True)
    p.add_argument("--g", type=float, default=None)
    p.add_argument("--point", required=True, help='e.g. "R1=1,S1=0.5" (missing coords are 0)')
    p.add_argument("--attempts", type=int, default=DEFAULT_ATTEMPTS)
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("trace", help="trace a bifurcation diagram")
    p.add_argument("--model", required=True)
    p.add_argument("--g", type=float, default=None)
    p.add_argument("--box", default=None, help='scan box "lo:hi" or one pair per coordinate')
    p.add_argument("--resolution", type=int, default=7)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--value-bound", type=float, default=4.0)
    p.add_argument("--csv", default=None)
    p.add_argument("--json", dest="json_out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_trace)

    atoms = sub.add_parser("atoms", help="atom-combinatorics checks")
    asub = atoms.add_subparsers(dest="atoms_command", required=True)
    p = asub.add_parser("check", help="complexity/connectedness/stability of a product")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--product", help="JSON product spec file")
    src.add_argument("--name", help='built-in name, e.g. "(B*C2)/Z2"')
    _add_common(p)
    p.set_defaults(func=cmd_atoms_check)
    p = asub.add_parser("list", help="list built-in products and documented exceptions")
    _add_common(p)
    p.set_defaults(func=cmd_atoms_list)

    kov = sub.add_parser("kovalevskaya", help="Kovalevskaya-top reports")
    ksub = kov.add_subparsers(dest="kov_command", required=True)
    p = ksub.add_parser("report", help="fixed points, types, regime, diagram")
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--attempts", type=int, default=DEFAULT_ATTEMPTS)
    p.add_argument("--diagram", action="store_true", help="include the traced diagram in the JSON")
    p.add_argument("--svg", default=None, help="also render the diagram to this SVG file")
    _add_common(p)
    p.set_defaults(func=cmd_kovalevskaya_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
