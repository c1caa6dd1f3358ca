"""Batch command-line entry point.

Subcommands: solve, spectrum, scan, asymptotics, continue, reproduce.
All artifacts are CSV (meshes, tables) or JSON (metadata, summaries) with a
schema version; identical inputs and seeds produce byte-identical files.
Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 acceptance
failure.  The output directory defaults to $HENON_OUTDIR or ./out.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import asymptotics, continuation, morse_scan, reproduce, serialize
from .errors import HenonError
from .params import HenonParams
from .radial import solve_radial
from .spectral import ModeProblem, solve_mode_spectrum

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage failures exit with code 1
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _outdir(args) -> Path:
    path = Path(args.out or os.environ.get("HENON_OUTDIR", "out"))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _add_common(sub):
    sub.add_argument("--N", type=int, default=3, help="space dimension (>= 3)")
    sub.add_argument("--alpha", type=float, default=1.0, help="weight exponent (> 0)")
    sub.add_argument("--out", type=str, default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="henon", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("solve", help="radial profile at one exponent")
    _add_common(sub)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--tol", type=float, default=1e-10)
    sub.add_argument("--mesh", type=int, default=2001)

    sub = subs.add_parser("spectrum", help="mode eigenvalues at one exponent")
    _add_common(sub)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--k", type=int, default=0, help="angular mode index")
    sub.add_argument("--num", type=int, default=4, help="number of eigenvalues")
    sub.add_argument("--functions", action="store_true",
                     help="also write eigenfunctions aligned with the profile mesh")

    sub = subs.add_parser("scan", help="sweep p, locate degeneracy points")
    _add_common(sub)
    sub.add_argument("--grid", type=int, default=101, help="number of grid points")
    sub.add_argument("--refine", type=float, default=1e-8,
                     help="|Lambda_11 - 1| tolerance for root refinement")
    sub.add_argument("--kmax", type=int, default=2)

    sub = subs.add_parser("asymptotics", help="endpoint behavior reports")
    _add_common(sub)

    sub = subs.add_parser("continue", help="follow the nonradial branch")
    _add_common(sub)
    sub.add_argument("--from-degeneracy", type=str, required=True,
                     help="degeneracy.json produced by the scan command")
    sub.add_argument("--index", type=int, default=0,
                     help="which changing point to start from")
    sub.add_argument("--eps", type=float, default=1e-2)
    sub.add_argument("--steps", type=int, default=60)
    sub.add_argument("--nr", type=int, default=continuation.DEFAULT_NR)
    sub.add_argument("--ntheta", type=int, default=continuation.DEFAULT_NTHETA)
    sub.add_argument("--snapshot-every", type=int, default=10)

    sub = subs.add_parser("reproduce", help="run the full acceptance suite")
    _add_common(sub)
    sub.add_argument("--seed", type=int, default=0)
    return parser


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------


def _cmd_solve(args) -> int:
    out = _outdir(args)
    params = HenonParams(args.N, args.alpha, args.p)
    profile = solve_radial(params, tol=args.tol, mesh_size=args.mesh)
    serialize.write_profile_csv(out / "profile.csv", profile)
    serialize.write_json(out / "profile.json", serialize.profile_header(profile))
    print(f"wrote {out / 'profile.csv'} (sup_norm={profile.sup_norm:.6g}, "
          f"residual={profile.residual:.2e})")
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    out = _outdir(args)
    profile = solve_radial(HenonParams(args.N, args.alpha, args.p))
    spec = solve_mode_spectrum(ModeProblem(profile, args.k), args.num)
    serialize.write_json(
        out / f"spectrum_k{args.k}.json", serialize.spectrum_payload(spec, args.p)
    )
    if args.functions:
        serialize.write_eigenfunctions_csv(
            out / f"eigenfunctions_k{args.k}.csv", spec, profile
        )
    vals = ", ".join(f"{v:.8f}" for v in spec.eigenvalues)
    print(f"k={args.k}: Lambda = [{vals}]")
    return EXIT_OK


def _cmd_scan(args) -> int:
    out = _outdir(args)
    grid = morse_scan.default_grid(args.N, args.alpha, num=args.grid)
    result = morse_scan.scan(args.N, args.alpha, grid=grid, k_max=args.kmax)
    serialize.write_scan_csv(out / "scan.csv", result)
    points = morse_scan.find_degeneracy_points(result, tol=args.refine)
    serialize.write_json(
        out / "degeneracy.json", serialize.degeneracy_payload(points, result)
    )
    for i, pt in enumerate(points):
        serialize.write_kernel_csv(out / f"kernel_{i}.csv", pt)
    changing = [pt for pt in points if pt.changing]
    print(f"wrote {out / 'scan.csv'} ({len(result.rows)} rows); "
          f"{len(changing)} changing point(s): "
          + ", ".join(f"{pt.p_bar:.7f}" for pt in changing))
    return EXIT_OK


def _cmd_asymptotics(args) -> int:
    out = _outdir(args)
    report = asymptotics.verify_p_to_1(args.N, args.alpha)
    serialize._write_csv(
        out / "p_to_one.csv",
        "p-to-one",
        {"N": args.N, "alpha": args.alpha, "lambda_1": report.lambda_1},
        {
            "p": [r.p for r in report.rows],
            "sup_pow": [r.sup_pow for r in report.rows],
            "deviation": [r.deviation for r in report.rows],
            "sup_distance": [r.sup_distance for r in report.rows],
        },
    )
    # normalized profiles next to the weighted eigenfunction, for the
    # convergence panels
    pair = asymptotics.weighted_first_eigen(args.N, args.alpha, extrapolate=True)
    r_probe = np.linspace(0.0, 1.0, 801)
    prof_cols = {"r": r_probe, "phi_1": pair.phi_at(r_probe)}
    for row in report.rows:
        from .radial import integrate_normalized

        norm = integrate_normalized(HenonParams(args.N, args.alpha, row.p))
        ubar, _, _ = norm.evaluate(norm.first_zero * r_probe)
        ubar[0], ubar[-1] = 1.0, 0.0
        prof_cols[f"ubar_p{row.p:g}"] = ubar
    serialize._write_csv(
        out / "p_to_one_profiles.csv",
        "p-to-one-profiles",
        {"N": args.N, "alpha": args.alpha, "lambda_1": report.lambda_1},
        prof_cols,
    )
    pa = HenonParams(args.N, args.alpha, 2.0).p_alpha
    p_list = (pa - 1.0, pa - 0.5, pa - 0.1, pa - 0.02)
    table = asymptotics.blowup_table(args.N, args.alpha, p_list)
    serialize._write_csv(
        out / "blowup.csv",
        "blowup",
        {"N": args.N, "alpha": args.alpha},
        {
            "p": [r.p for r in table.rows],
            "first_zero": [r.first_zero for r in table.rows],
            "sup_norm": [r.sup_norm for r in table.rows],
        },
    )
    rows = {}
    for p in p_list[1:]:
        prof = solve_radial(HenonParams(args.N, args.alpha, p))
        resc = asymptotics.rescale_profile(prof)
        ef = asymptotics.emden_fowler(resc)
        rows[p] = (resc, ef)
    scaling = {
        f"R={R:g}": asymptotics.weighted_first_eigen(args.N, args.alpha, R).lambda_1
        * R ** (2 + args.alpha)
        for R in (0.5, 1.0, 2.0, 4.0)
    }
    serialize.write_json(
        out / "asymptotics.json",
        {
            "kind": "asymptotics-summary",
            "lambda_1": report.lambda_1,
            "p_to_one_converged": report.converged,
            "p_to_one_extrapolated": report.extrapolated,
            "morse_index_smallest_p": report.morse_index_smallest_p,
            "lambda_R_scaling": scaling,
            "blowup_tail_increasing": table.tail_increasing,
            "rescaled": {
                f"{p:g}": {
                    "mu_p": resc.mu_p,
                    "bound_margin": resc.bound_margin,
                    "sup_distance": resc.sup_distance,
                    "pullback_error": ef.pullback_error,
                    "kappa": ef.kappa,
                }
                for p, (resc, ef) in rows.items()
            },
        },
    )
    last = p_list[-1]
    resc, _ = rows[last]
    U = asymptotics.LimitProfile(args.N, args.alpha)
    serialize._write_csv(
        out / "rescaled.csv",
        "rescaled-profile",
        {"N": args.N, "alpha": args.alpha, "p": last, "mu_p": resc.mu_p},
        {"x": resc.mesh, "u_tilde": resc.u_tilde, "limit_profile": U(resc.mesh)},
    )
    print(f"wrote asymptotics reports to {out}")
    return EXIT_OK


def _cmd_continue(args) -> int:
    out = _outdir(args)
    doc = serialize.read_json(args.from_degeneracy)
    changing = [pt for pt in doc["points"] if pt["changing"]]
    if not changing:
        raise HenonError("no changing points in the degeneracy file")
    if args.index >= len(changing):
        raise HenonError(f"--index {args.index} out of range ({len(changing)} points)")
    entry = changing[args.index]
    points = _refine_single_point(args.N, args.alpha, entry)
    grid = continuation.make_grid(args.N, args.alpha, nr=args.nr, ntheta=args.ntheta)
    branch = continuation.continue_branch(
        points, grid=grid, epsilon=args.eps, max_steps=args.steps
    )
    serialize.write_json(out / "branch.json", serialize.branch_manifest(branch))
    for i in range(0, len(branch.points), max(1, args.snapshot_every)):
        serialize.write_branch_snapshot_csv(out / f"branch_point_{i:04d}.csv", branch, i)
    serialize.write_branch_snapshot_csv(
        out / f"branch_point_{len(branch.points) - 1:04d}.csv",
        branch,
        len(branch.points) - 1,
    )
    print(f"branch: {len(branch.points)} points, p in "
          f"[{min(pt.p for pt in branch.points):.5f}, "
          f"{max(pt.p for pt in branch.points):.5f}], "
          f"termination {branch.termination}")
    return EXIT_OK


def _refine_single_point(N, alpha, entry) -> morse_scan.DegeneracyPoint:
    """Re-derive a DegeneracyPoint (with kernel) from a manifest entry."""
    lo, hi = entry["bracket"]
    result = morse_scan.scan(N, alpha, grid=np.unique([lo, entry["p_bar"], hi]))
    points = morse_scan.find_degeneracy_points(result)
    for pt in points:
        if pt.changing and abs(pt.p_bar - entry["p_bar"]) < 0.5 * (hi - lo) + 1e-9:
            return pt
    raise HenonError(
        f"could not reproduce a changing point near p={entry['p_bar']:.6f}"
    )


def _cmd_reproduce(args) -> int:
    out = _outdir(args)
    results, ctx = reproduce.run_acceptance(args.N, args.alpha, seed=args.seed)
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'}  {res.name}: {res.details}")
    scan = ctx.scan(101)
    serialize.write_scan_csv(out / "scan.csv", scan)
    serialize.write_json(
        out / "degeneracy.json",
        serialize.degeneracy_payload(ctx.degeneracy_points(101), scan),
    )
    serialize.write_json(out / "branch.json", serialize.branch_manifest(ctx.branch()))
    serialize.write_json(
        out / "reproduce_summary.json",
        {
            "kind": "acceptance-summary",
            "N": args.N,
            "alpha": args.alpha,
            "seed": args.seed,
            "all_passed": all(r.passed for r in results),
            "checks": [
                {"name": r.name, "passed": r.passed, "details": r.details}
                for r in results
            ],
        },
    )
    print(f"wrote {out / 'reproduce_summary.json'}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "spectrum": _cmd_spectrum,
        "scan": _cmd_scan,
        "asymptotics": _cmd_asymptotics,
        "continue": _cmd_continue,
        "reproduce": _cmd_reproduce,
    }
    try:
        return handlers[args.command](args)
    except HenonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
