"""Command-line front end: construct, verify, optimize, serve.

Reports are written as JSON (validating against report_schema.json); wall
time goes to stdout only, so all files are byte-identical across reruns.

Exit codes: 0 success, 1 verify-check failure, 2 infeasible parameters,
3 IO error, 4 lost Moebius topology during optimization.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="devband",
        description="Developable Moebius band: exact construction, "
                    "verification, and bending-energy minimization.")
    sub = parser.add_subparsers(dest="command", required=True)

    def geometry_flags(p, with_out):
        p.add_argument("--l", type=float, default=3.0,
                       help="midline length (default 3)")
        p.add_argument("--d", type=float, default=0.3,
                       help="rod diameter of the large cylinder (default 0.3)")
        p.add_argument("--b", type=float, default=0.1,
                       help="strip half-width (default 0.1)")
        p.add_argument("--n", type=int, default=600,
                       help="midline samples, multiple of 6 (default 600)")
        p.add_argument("--convention", choices=("principal", "mean"),
                       default="principal",
                       help="surface-energy curvature convention")
        if with_out:
            p.add_argument("--out", type=Path, default=Path("."),
                           help="output directory (default: cwd)")

    pc = sub.add_parser("construct",
                        help="build the band; export OBJ/SVG/CSV/JSON")
    geometry_flags(pc, with_out=True)

    pv = sub.add_parser("verify",
                        help="assert the closed-form identities; report JSON "
                             "to stdout")
    geometry_flags(pv, with_out=False)

    po = sub.add_parser("optimize",
                        help="minimize the narrow-band energy from the "
                             "critical-diameter start")
    po.add_argument("--l", type=float, default=3.0)
    po.add_argument("--n", type=int, default=240)
    po.add_argument("--iters", type=int, default=2000)
    po.add_argument("--eps", type=float, default=None,
                    help="energy regularization (default: 1e-6*n/l)")
    po.add_argument("--seed", type=int, default=0)
    po.add_argument("--convention", choices=("principal", "mean"),
                    default="principal")
    po.add_argument("--out", type=Path, default=Path("."))

    ps = sub.add_parser("serve", help="run the HTTP service")
    ps.add_argument("--host", default="127.0.0.1")
    ps.add_argument("--port", type=int, default=8000)
    return parser


def _write_text(path: Path, text: str):
    path.write_text(text)


def _write_report(report: dict, out_dir: Path, outputs: list) -> Path:
    report["outputs"] = [str(p) for p in outputs]
    path = out_dir / "report.json"
    report["outputs"].append(str(path))
    path.write_text(json.dumps(report, indent=2) + "\n")
    return path


def cmd_construct(args) -> int:
    from . import pipeline
    from .band import BandParams
    from .strip import export_csv, export_obj, export_svg

    params = BandParams(l=args.l, d=args.d, b=args.b, n=args.n)
    report, art = pipeline.run_construct(params, convention=args.convention)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    obj_path = out / "band_mesh.obj"
    svg_path = out / "band_flat.svg"
    csv_path = out / "midline.csv"
    export_obj(art.mesh, obj_path)
    export_svg(art.layout, svg_path)
    export_csv(art.curve, csv_path)
    _write_report(report, out, [obj_path, svg_path, csv_path])
    print(json.dumps(report, indent=2))
    return 0


def cmd_verify(args) -> int:
    from . import pipeline
    from .band import BandParams

    params = BandParams(l=args.l, d=args.d, b=args.b, n=args.n)
    report, checks = pipeline.run_verify(params, convention=args.convention)
    print(json.dumps(report, indent=2))
    failed = [c for c in checks if not c["passed"]]
    if failed:
        print(f"verify failed: {failed[0]['name']} = {failed[0]['value']:g} "
              f"exceeds {failed[0]['tolerance']:g}", file=sys.stderr)
        return 1
    return 0


def cmd_optimize(args) -> int:
    from . import pipeline
    from .errors import LineSearchFailed, LostTopology
    from .strip import export_csv, export_obj

    try:
        report, art = pipeline.run_optimize(args.l, args.n, args.iters,
                                            eps=args.eps, seed=args.seed)
    except LostTopology as exc:
        print(f"lost Moebius topology: {exc}", file=sys.stderr)
        return 4
    except LineSearchFailed as exc:
        print(f"line search failed: {exc}", file=sys.stderr)
        return 0
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    outputs = []
    trace_path = out / "trace.csv"
    _write_text(trace_path, art.trace_csv)
    outputs.append(trace_path)
    if art.curve is not None:
        curve_path = out / "final_curve.csv"
        strip_path = out / "final_strip.obj"
        export_csv(art.curve, curve_path)
        export_obj(art.mesh, strip_path)
        outputs += [curve_path, strip_path]
    _write_report(report, out, outputs)
    print(json.dumps(report, indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    from .errors import (InfeasibleDiameter, InfeasibleWidth, NonPositive)
    t0 = time.monotonic()
    try:
        if args.command == "construct":
            rc = cmd_construct(args)
        elif args.command == "verify":
            rc = cmd_verify(args)
        elif args.command == "optimize":
            rc = cmd_optimize(args)
        else:
            return cmd_serve(args)
    except (InfeasibleDiameter, InfeasibleWidth, NonPositive) as exc:
        print(f"infeasible parameters: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"IO error: {exc}", file=sys.stderr)
        return 3
    print(f"wall time: {time.monotonic() - t0:.3f}s")
    return rc


if __name__ == "__main__":
    sys.exit(main())
