"""Command-line front end.

Every command writes ``report.json`` into the output directory with the
schema ``{command, params, checks: [{name, max, l2, order, tol, pass}]}``;
the exit status is 0 iff every check passes. Library errors map to their
class's exit code and a one-line JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import catalog, residuals, selfsim
from .errors import AxiMinimalError
from .grid import (
    ResidualReport,
    convergence_order,
    field_to_csv,
    field_to_json,
    make_grid,
    residual_report,
)
from .pipeline import Step, run_pipeline, verify_triple
from .transform import (
    LightconeTriple,
    ScalingParams,
    bianchi_transform,
    involution_check,
    product_identity,
    scale,
    to_physical,
)

EXIT_CHECK_FAILED = 1
THETA_SAMPLES = 64
PHYSICAL_K = 10.0  # orthonormal-gauge residual tolerance K h^2 (r, z are O(1))
FLOAT_FMT = "{:.17g}"

TRANSFORM_CHECKS = ("eq5", "product", "involution", "closure", "eq37", "eq37_repaired")
DEFAULT_TOLS = {
    "product": 5e-4,
    "involution": 5e-5,
    "closure": 1e-6,
    "eq37": 5e-4,
    "eq37_repaired": 5e-4,
    "point": 1e-9,
    "order": 1.8,
    "constraint": 1e-12,
    "ode": 1e-6,
    "eq47": 1e-9,
    "eq48": 1e-8,
}


# ---------------------------------------------------------------- helpers

def _fmt(x: float) -> str:
    return FLOAT_FMT.format(float(x))


def _short(x: float) -> str:
    """Shortest round-tripping repr, without a trailing '.0'."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _family_params(args) -> dict:
    params = json.loads(args.params) if getattr(args, "params", None) else {}
    for key in ("eps", "beta"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    return params


def _solution(args):
    spec = catalog.family_spec(args.family)
    params = {k: v for k, v in _family_params(args).items() if k in spec.params}
    return catalog.get_solution(args.family, params, eta=args.eta)


def _chart(args, sol):
    spec = catalog.family_spec(sol.family)
    (t0, t1), (m0, m1) = spec.default_chart
    if args.tau_range:
        t0, t1 = args.tau_range
    if args.mu_range:
        m0, m1 = args.mu_range
    n1, n2 = args.counts
    return make_grid(((t0, t1), (m0, m1)), (n1, n2), singular_lines=sol.singular_lines)


def _triple(args):
    sol = _solution(args)
    return LightconeTriple.from_solution(sol, _chart(args, sol))


def _params_dict(args) -> dict:
    skip = {"func", "out"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        out[k] = list(v) if isinstance(v, tuple) else v
    return out


def _write_report(args, checks: list, extra: dict | None = None) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = {
        "command": args.command,
        "params": _params_dict(args),
        "checks": [c if isinstance(c, dict) else c.to_dict() for c in checks],
    }
    if extra:
        report.update(extra)
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=False) + "\n")
    failed = [c for c in checks if (c["pass"] if isinstance(c, dict) else c.passed) is False]
    return EXIT_CHECK_FAILED if failed else 0


def _write_field(args, name: str, f) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        path = out / f"{name}.csv"
        path.write_text(field_to_csv(f))
    else:
        path = out / f"{name}.json"
        path.write_text(json.dumps(field_to_json(f)) + "\n")
    return path


def _print_table(checks: list[ResidualReport]) -> None:
    print(f"{'equation':<22}{'max':>14}{'L2':>14}{'order':>9}{'tol':>12}  pass")
    for c in checks:
        order = "-" if c.order is None else f"{c.order:.2f}"
        tol = "-" if c.tol is None else f"{c.tol:.2e}"
        print(f"{c.label:<22}{c.max:>14.4e}{c.l2:>14.4e}{order:>9}{tol:>12}  {c.passed}")


# ---------------------------------------------------------------- commands

def cmd_catalog(args) -> int:
    listing = [
        {"name": s.name, "params": s.schema(), "default_chart": [list(b) for b in s.default_chart],
         "description": s.description}
        for s in catalog.list_catalog()
    ]
    print(json.dumps(listing, indent=2))
    return _write_report(args, [], {"families": [s["name"] for s in listing]})


def cmd_eval(args) -> int:
    sol = _solution(args)
    d = sol.evaluate(float(args.tau), float(args.mu))
    print(f"R={_short(d.R)} zeta={_short(d.zeta)} kappa={_short(d.kappa)}")
    arrs = residuals.lightcone_residual_arrays(d, sol.eta)
    checks = [residual_report(k, np.atleast_1d(v), 0.0, tol=args.tol or DEFAULT_TOLS["point"])
              for k, v in arrs.items()]
    return _write_report(args, checks, {"values": {k: float(v) for k, v in d._asdict().items()}})


def _transform_checks(args, tr, out, diag) -> list[ResidualReport]:
    checks = []
    wanted = args.check or ["eq5", "product"]
    Z, K = out.domain.mesh()
    for name in wanted:
        tol = args.tol if args.tol is not None else DEFAULT_TOLS.get(name)
        if name == "eq5":
            checks += [r for r in verify_triple(out) if r.label == "eq5_R"]
        elif name == "product":
            checks.append(product_identity(tr, out, diag.inverse).with_tol(tol))
        elif name == "involution":
            checks.append(involution_check(tr).with_tol(tol))
        elif name == "closure":
            ref = np.sqrt(2.0) * np.abs(K / Z)
            checks.append(residual_report("closure", np.abs(out.R.values) - ref, out.domain.h, tol=tol))
        elif name in ("eq37", "eq37_repaired"):
            if tr.solution is None or tr.solution.family != "elliptic":
                raise AxiMinimalError(f"check {name} applies to the elliptic family only")
            fn = catalog.elliptic_rho_printed if name == "eq37" else catalog.elliptic_rho
            checks.append(residual_report(name, out.R.values - fn(Z, K), out.domain.h, tol=tol))
    return checks


def cmd_transform(args) -> int:
    tr = _triple(args)
    out, diag = bianchi_transform(tr, threshold=args.threshold)
    _write_field(args, "rho", out.R)
    checks = _transform_checks(args, tr, out, diag)
    _print_table(checks)
    return _write_report(args, checks, {"diagnostics": diag.to_dict(), "chart": out.domain.to_dict()})


def cmd_scale(args) -> int:
    tr = _triple(args)
    p = ScalingParams(args.alpha, args.gamma)
    out = scale(tr, p)
    _write_field(args, "R_scaled", out.R)
    exact = scale(tr.solution, p)
    R_ex = exact(*out.domain.mesh())[0]
    checks = verify_triple(out) + [
        residual_report("scaled_vs_closed_form", np.abs(out.R.values) - np.abs(R_ex), out.domain.h,
                        tol=args.tol if args.tol is not None else 1e-12)
    ]
    _print_table(checks)
    return _write_report(args, checks, {"chart": out.domain.to_dict(), "beta": p.beta})


def cmd_verify(args) -> int:
    tr = _triple(args)
    checks = [r.with_tol(args.tol or DEFAULT_TOLS["point"])
              for r in residuals.residual_lightcone(tr, analytic=True)]
    steps = [Step.parse(s) for s in args.steps] if args.steps else []
    info = {}
    if steps:
        res = run_pipeline(tr, steps, threshold=args.threshold)
        checks += [ResidualReport("final_" + c.label, c.max, c.l2, c.h, c.order, c.tol) for c in res.checks]
        info = {"steps": res.steps, "chart": res.triple.domain.to_dict()}
    else:
        checks += verify_triple(tr)
    _print_table(checks)
    return _write_report(args, checks, info)


def cmd_convergence(args) -> int:
    """Sampled residuals on 2^k-refined grids; a check passes if its observed
    order reaches the threshold (stored in the ``tol`` slot)."""
    sol = _solution(args)
    base = _chart(args, sol)
    per_eq: dict[str, list[ResidualReport]] = {}
    for k in range(args.levels):
        dom = base.refined(2**k) if k else base
        tr = LightconeTriple.from_solution(sol, dom)
        interior = max(2, (min(dom.counts) - 1) // 8)
        for r in residuals.residual_lightcone(tr, interior=interior):
            per_eq.setdefault(r.label, []).append(r)
    thr = args.tol if args.tol is not None else DEFAULT_TOLS["order"]
    table = []
    checks = []
    for label, reps in per_eq.items():
        last = reps[-1]
        table.append(ResidualReport(label, last.max, last.l2, last.h, convergence_order(reps)))
        order = table[-1].order
        checks.append({"name": label, "max": last.max, "l2": last.l2, "order": order,
                       "tol": thr, "pass": bool(order >= thr)})
    _print_table(table)
    return _write_report(args, checks, {"levels": [[r.to_dict() for r in reps] for reps in per_eq.values()]})


def cmd_selfsim(args) -> int:
    p = selfsim.solve_profile(args.C, (args.z_min, args.z_max), args.samples)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "profile.csv").write_text(p.to_csv())
    checks = [residual_report("eq41_constraint", p.constraint_defect(), 0.0, tol=DEFAULT_TOLS["constraint"])]
    checks += [r.with_tol(DEFAULT_TOLS["ode"]) for r in selfsim.residual_odes(p)]
    zs = np.linspace(args.z_min, args.z_max, 50)
    lhs, rhs, target = selfsim.check47(zs, args.C, "derived")
    scale47 = np.maximum(1.0, np.abs(target))
    checks.append(residual_report("eq47_lhs", (lhs - target) / scale47, 0.0, tol=DEFAULT_TOLS["eq47"]))
    checks.append(residual_report("eq47_rhs", (rhs - target) / scale47, 0.0, tol=DEFAULT_TOLS["eq47"]))
    idx = np.linspace(0, len(p) - 1, min(args.roots, len(p))).astype(int)
    branches = [selfsim.poly48_branch(float(p.xi[i]), args.C, float(p.g[i])) for i in idx]
    errs = np.array([b["error"] for b in branches])
    checks.append(residual_report("eq48_roots", errs, 0.0, tol=DEFAULT_TOLS["eq48"]))
    return _write_report(args, checks, {"eq48_branches": [{k: b[k] for k in ("xi", "g", "root", "branch")}
                                                          for b in branches]})


def _obj_mesh(r: np.ndarray, x3: np.ndarray, theta_n: int) -> tuple[list[str], list[str], int]:
    """Vertices and faces of one surface of revolution; r, x3 sampled along a curve.

    Points with r == 0 collapse to a single vertex on the axis."""
    verts: list[str] = []
    index: list[list[int]] = []
    theta = 2 * np.pi * np.arange(theta_n) / theta_n
    for ri, zi in zip(r, x3):
        if ri <= 1e-12:
            verts.append(f"v {_fmt(0.0)} {_fmt(0.0)} {_fmt(zi)}")
            index.append([len(verts)] * theta_n)
            continue
        row = []
        for th in theta:
            verts.append(f"v {_fmt(ri * np.cos(th))} {_fmt(ri * np.sin(th))} {_fmt(zi)}")
            row.append(len(verts))
        index.append(row)
    faces = []
    for a, b in zip(index[:-1], index[1:]):
        for k in range(theta_n):
            k1 = (k + 1) % theta_n
            for tri in ((a[k], b[k], b[k1]), (a[k], b[k1], a[k1])):
                if len(set(tri)) == 3:
                    faces.append("f {} {} {}".format(*tri))
    return verts, faces, len(verts)


def export_obj(pair, slices: int, theta_n: int = THETA_SAMPLES) -> str:
    """OBJ text: one surface of revolution (x, y, z) per fixed-t slice."""
    t_axis = pair.domain.axes[0]
    rows = np.unique(np.linspace(0, t_axis.size - 1, slices).round().astype(int))
    lines = [f"# axially symmetric minimal hypersurface, {rows.size} fixed-t slices, {theta_n} angles"]
    offset = 0
    for i in rows:
        lines.append(f"o t_{_fmt(t_axis[i])}")
        verts, faces, n = _obj_mesh(pair.r.values[i], pair.z.values[i], theta_n)
        lines += verts
        lines += [
            "f " + " ".join(str(int(v) + offset) for v in f.split()[1:]) for f in faces
        ]
        offset += n
    return "\n".join(lines) + "\n"


def cmd_export(args) -> int:
    tr = _triple(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    checks = []
    if args.format == "obj":
        pair = to_physical(tr, ScalingParams(args.alpha, args.gamma), E=args.E)
        (out / "mesh.obj").write_text(export_obj(pair, args.slices, args.theta))
        tol = args.tol if args.tol is not None else PHYSICAL_K * pair.domain.h**2
        checks += [r.with_tol(tol) for r in residuals.residual_physical(pair)]
    else:
        for name in ("R", "zeta", "kappa"):
            _write_field(args, name, getattr(tr, name))
    return _write_report(args, checks)


# ---------------------------------------------------------------- parser

def _add_family(p, required=True):
    p.add_argument("--family", required=required, help="catalog family name")
    p.add_argument("--eps", type=float, default=None, help="epsilon_family parameter")
    p.add_argument("--beta", type=float, default=None, help="tau_sqrt_mu parameter")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--params", default=None, help="family parameters as a JSON object")


def _add_chart(p):
    p.add_argument("--tau-range", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--mu-range", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--counts", type=int, nargs=2, default=(65, 65), metavar=("N1", "N2"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aximinimal", description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=".", help="output directory (report.json and artifacts)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list families and parameter schemas")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("eval", help="evaluate a closed form at one point")
    _add_family(p)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("transform", help="apply the involutive transform to a sampled family")
    _add_family(p)
    _add_chart(p)
    p.add_argument("--check", action="append", choices=TRANSFORM_CHECKS)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--threshold", type=float, default=1e-6)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("scale", help="apply R -> alpha R(alpha gamma tau, gamma mu)")
    _add_family(p)
    _add_chart(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("verify", help="residual table, optionally after a chain of steps")
    _add_family(p)
    _add_chart(p)
    p.add_argument("--steps", nargs="+", default=None,
                   help="chain such as: T S:2,1 T  (T = transform, S:alpha,gamma = scale)")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--threshold", type=float, default=1e-6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convergence", help="residual convergence orders under refinement")
    _add_family(p)
    _add_chart(p)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--tol", type=float, default=None, help="minimum accepted order")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("selfsim", help="self-similar profile and its checks")
    p.add_argument("--C", type=float, default=-1.0)
    p.add_argument("--z-min", type=float, default=0.6)
    p.add_argument("--z-max", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--roots", type=int, default=20, help="profile points checked against the polynomial")
    p.set_defaults(func=cmd_selfsim)

    p = sub.add_parser("export", help="write fields (json/csv) or an OBJ mesh")
    _add_family(p)
    _add_chart(p)
    p.add_argument("--format", choices=("json", "csv", "obj"), default="obj")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--E", type=float, default=1.0)
    p.add_argument("--slices", type=int, default=5)
    p.add_argument("--theta", type=int, default=THETA_SAMPLES)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AxiMinimalError as exc:
        err = {"error": type(exc).__name__, "code": exc.exit_code, "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
