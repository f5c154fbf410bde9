"""Command-line front end: domain files in, delimited reports and figures out.

Exit codes: 0 on success, 1 when a bound or invariant fails, 2 on usage
errors. Plot emission never changes the exit code. POLYA_CERT_THREADS caps
worker threads for the per-center certificate quadrature.
"""

import argparse
import os
import sys

import numpy as np

from . import bounds as bounds_mod
from . import plots
from .geometry import load_polygon
from .lattice import ShiftSearchError, packing_points
from .report import format_value, render_table, write_csv, write_json
from .special_functions import bessel_energy_gap, bessel_identity_residual, bessel_zero
from .spectrum import assemble, mesh_polygon, neumann_spectrum, solve_eigs

__all__ = ["main"]


def _parse_lambda(text):
    """Either a single value or lo:hi:n (log-spaced)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("lambda range must be lo:hi:n")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if lo <= 0 or hi < lo or n < 1:
            raise argparse.ArgumentTypeError("invalid lambda range")
        return list(np.geomspace(lo, hi, n))
    val = float(text)
    if val <= 0:
        raise argparse.ArgumentTypeError("lambda must be positive")
    return [val]


def _parse_d_range(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("d range must be a:b")
    return int(parts[0]), int(parts[1])


def _load_domain(path):
    if not os.path.exists(path):
        print(f"error: domain file not found: {path}", file=sys.stderr)
        raise SystemExit(2)
    try:
        return load_polygon(path)
    except (ValueError, KeyError) as exc:
        print(f"error: invalid domain file {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _emit_plot(fn, *args):
    try:
        fn(*args)
    except Exception as exc:  # noqa: BLE001 - plotting must never change exit codes
        print(f"warning: plot emission failed: {exc}", file=sys.stderr)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polya-cert",
        description="Certified lower bounds for the Neumann counting function "
        "on convex planar domains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, domain=False):
        sp.add_argument("--out", default="out", help="output directory (default: ./out)")
        sp.add_argument(
            "--format",
            action="append",
            choices=("csv", "json", "svg"),
            default=None,
            help="output formats; repeatable (default: csv)",
        )
        if domain:
            sp.add_argument("--domain", required=True, help="domain JSON file")

    sp = sub.add_parser("verify", help="run the full pipeline over a lambda sweep")
    add_common(sp, domain=True)
    sp.add_argument("--lambda", dest="lam", type=_parse_lambda, default=None,
                    help="single value or lo:hi:n (log-spaced); default sweep from the mesh")
    sp.add_argument("--h", type=float, default=None, help="mesh size (default: resolution-matched)")

    sp = sub.add_parser("spectrum", help="finite-element Neumann eigenvalues")
    add_common(sp, domain=True)
    sp.add_argument("--h", type=float, default=0.05, help="mesh size (default 0.05)")
    sp.add_argument("--m", type=int, default=20, help="number of eigenvalues (default 20)")
    sp.add_argument("--export-mesh", action="store_true", help="also write mesh.off")

    sp = sub.add_parser("bounds", help="print the three counting-bound coefficients")
    add_common(sp)

    sp = sub.add_parser("lemma-check", help="radial energy inequality and identity residual grids")
    add_common(sp)
    sp.add_argument("--orders", default="0,0.5,1,2", help="comma-separated Bessel orders")
    sp.add_argument("--steps", type=int, default=10, help="s grid points per order")

    sp = sub.add_parser("shift-search", help="triangular-lattice packing of a domain")
    add_common(sp, domain=True)
    sp.add_argument("--r", type=float, required=True, help="packing radius")

    sp = sub.add_parser("dim-table", help="coefficient comparison for dimensions >= 3")
    add_common(sp)
    sp.add_argument("--d-range", type=_parse_d_range, default=(3, 24), help="a:b (default 3:24)")

    return parser


def _formats(args):
    return tuple(args.format) if args.format else ("csv",)


def cmd_bounds(args):
    polya, kroger = bounds_mod.weyl_bounds(1.0, 1.0, 2)
    convex = bounds_mod.convex_bound(1.0, 1.0)
    rows = [
        ("kroger", f"{kroger:.4f}", kroger, "area*lambda/(8 pi)"),
        ("convex", f"{convex:.4f}", convex, "area*lambda/(2 sqrt(3) j0^2)"),
        ("polya", f"{polya:.4f}", polya, "area*lambda/(4 pi)"),
    ]
    columns = ("bound", "coefficient", "coefficient_full", "formula")
    print(render_table(columns, rows))
    fmts = _formats(args)
    if "csv" in fmts:
        write_csv(os.path.join(args.out, "bounds.csv"), columns, rows)
    if "json" in fmts:
        write_json(os.path.join(args.out, "bounds.json"),
                   [dict(zip(columns, r)) for r in rows])
    return 0 if kroger < convex < polya else 1


def cmd_dim_table(args):
    d_min, d_max = args.d_range
    rows_obj = bounds_mod.dimension_comparison_table(d_min, d_max)
    columns = rows_obj[0].CSV_COLUMNS
    rows = [r.to_row() for r in rows_obj]
    print(render_table(columns, rows))
    fmts = _formats(args)
    if "csv" in fmts:
        write_csv(os.path.join(args.out, "dim_table.csv"), columns, rows)
    if "json" in fmts:
        write_json(os.path.join(args.out, "dim_table.json"), [r.to_dict() for r in rows_obj])
    if "svg" in fmts:
        _emit_plot(_plot_dim_table, rows_obj, os.path.join(args.out, "dim_table.svg"))
    failures = [r.d for r in rows_obj if not r.strict]
    if failures:
        print(f"FAIL: comparison not strict for d in {failures}", file=sys.stderr)
        return 1
    return 0


def _plot_dim_table(rows, path):
    import matplotlib.pyplot as plt

    ds = [r.d for r in rows]
    ratio = [r.remark_rhs / r.kroger_coeff for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(ds, ratio, "o-", color="tab:blue")
    ax.axhline(1.0, color="k", lw=0.8, ls="--")
    ax.set_xlabel("dimension d")
    ax.set_ylabel("lattice-bound coeff / Kroger coeff")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_lemma_check(args):
    orders = [float(s) for s in args.orders.split(",") if s.strip()]
    steps = args.steps
    columns = ("nu", "s", "lhs", "rhs", "gap_ok", "identity_residual")
    rows = []
    violations = 0
    for nu in orders:
        jnu = bessel_zero(nu)
        for k in range(1, steps + 1):
            s = jnu * k / steps
            lhs, rhs = bessel_energy_gap(nu, s)
            resid = bessel_identity_residual(nu, s)
            ok = lhs <= rhs + 1e-9 and resid <= 1e-9
            violations += 0 if ok else 1
            rows.append((nu, s, lhs, rhs, ok, resid))
    print(render_table(columns, rows))
    fmts = _formats(args)
    if "csv" in fmts:
        write_csv(os.path.join(args.out, "lemma_check.csv"), columns, rows)
    if "json" in fmts:
        write_json(os.path.join(args.out, "lemma_check.json"),
                   [dict(zip(columns, r)) for r in rows])
    if violations:
        print(f"FAIL: {violations} grid points violate the inequality or identity",
              file=sys.stderr)
        return 1
    return 0


def cmd_shift_search(args):
    polygon = _load_domain(args.domain)
    if args.r <= 0:
        print("error: --r must be positive", file=sys.stderr)
        return 2
    try:
        packing = packing_points(polygon, args.r)
    except ShiftSearchError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 1
    print(
        f"count={packing.count} guaranteed_min={format_value(packing.guaranteed_min)} "
        f"b=({format_value(packing.b[0])}, {format_value(packing.b[1])})"
    )
    fmts = _formats(args)
    if "json" in fmts:
        write_json(os.path.join(args.out, "shift_search.json"), packing.to_dict())
    if "csv" in fmts:
        write_csv(os.path.join(args.out, "shift_search.csv"), ("x", "y"),
                  [tuple(pt) for pt in packing.points])
    if "svg" in fmts:
        _emit_plot(plots.plot_packing, polygon, packing,
                   os.path.join(args.out, "shift_search.svg"))
    return 0


def cmd_spectrum(args):
    polygon = _load_domain(args.domain)
    spec = neumann_spectrum(polygon, args.h, args.m)
    columns = ("k", "mu_k")
    rows = spec.to_csv_rows()
    print(render_table(columns, rows))
    fmts = _formats(args)
    if "csv" in fmts:
        write_csv(os.path.join(args.out, "spectrum.csv"), columns, rows)
    if "json" in fmts:
        write_json(os.path.join(args.out, "spectrum.json"),
                   {"mesh_h": spec.mesh_h, "domain_area": spec.domain_area,
                    "eigenvalues": list(spec.eigenvalues)})
    if "svg" in fmts:
        _emit_plot(plots.plot_spectrum_staircase, spec,
                   os.path.join(args.out, "spectrum.svg"))
    if args.export_mesh:
        mesh = mesh_polygon(polygon, args.h)
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "mesh.off"), "w") as fh:
            fh.write(mesh.to_off())
    return 0


def cmd_verify(args):
    polygon = _load_domain(args.domain)
    h = args.h
    if args.lam is not None:
        lams = args.lam
        lam_top = max(lams)
        spectrum = bounds_mod._spectrum_for(polygon, lam_top * (1 + bounds_mod.FEM_SLACK), h=h)
    else:
        # default sweep: 20 log-spaced values below the spectrum trust threshold
        h_eff = h if h is not None else 0.05
        mesh = mesh_polygon(polygon, h_eff)
        K, M = assemble(mesh)
        m = max(10, min(max(40, int(8 / h_eff)), K.shape[0] // 3))
        spectrum = solve_eigs(K, M, m, mesh_h=mesh.h, domain_area=polygon.area)
        trust = 0.8 * float(spectrum.eigenvalues[-1])
        accuracy_cap = 0.36 / spectrum.mesh_h**2  # keep FEM error near a few percent
        lam_top = min(trust, accuracy_cap) / (1 + bounds_mod.FEM_SLACK)
        lams = list(np.geomspace(1.0, lam_top, 20))

    reports = []
    failures = []
    for lam in lams:
        rep = bounds_mod.verify_counting_bound(polygon, lam, spectrum=spectrum)
        reports.append(rep)
        if not rep.passed:
            failures.append(rep)

    columns = bounds_mod.BoundReport.CSV_COLUMNS
    rows = [r.to_row() for r in reports]
    print(render_table(columns, rows))
    fmts = _formats(args)
    if "csv" in fmts:
        write_csv(os.path.join(args.out, "verify.csv"), columns, rows)
    if "json" in fmts:
        write_json(os.path.join(args.out, "verify.json"), [r.to_dict() for r in reports])
    if "svg" in fmts:
        _emit_plot(plots.plot_counting_bounds, spectrum, reports,
                   os.path.join(args.out, "verify.svg"))
    if failures:
        for rep in failures:
            print(
                f"FAIL: lambda={format_value(rep.lam)}: N={rep.n_N} "
                f"< bound {format_value(rep.convex)}",
                file=sys.stderr,
            )
        return 1
    return 0


_COMMANDS = {
    "bounds": cmd_bounds,
    "dim-table": cmd_dim_table,
    "lemma-check": cmd_lemma_check,
    "shift-search": cmd_shift_search,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SystemExit:
        raise
    except (bounds_mod.VerificationError, ShiftSearchError) as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
