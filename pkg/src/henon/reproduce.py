"""Acceptance checks for the default desk-scale instance (N=3, alpha=1).

Each check returns a :class:`CheckResult`; the same functions back the
`henon reproduce` command and the acceptance test module, so the pass/fail
logic exists exactly once.  Expensive intermediates (profiles, scans, the
continued branch) are shared through :class:`AcceptanceContext`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics, continuation, morse_scan, spectral
from .params import HenonParams
from .radial import solve_radial
from .spectral import ModeProblem, solve_mode_spectrum

EIG_ORACLE_PS = (1.5, 2.0, 3.0, 5.0, 6.5)
P_LOW, P_HIGH = 1.05, 6.9
BLOWUP_PS = (6.0, 6.5, 6.9)
QUAD_PS = (2.0, 5.0)
RADII = (0.5, 1.0, 2.0, 4.0)

# Regression baseline for the Morse-index changing point at (N=3, alpha=1),
# recorded from the first converged computation (grid-extrapolated value;
# no published number exists to assert against a priori).
P_BAR_BASELINE = 2.0486077
P_BAR_BASELINE_TOL = 1e-3


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: str


@dataclass
class AcceptanceContext:
    """Shared lazily-computed artifacts for the acceptance suite."""

    N: int = 3
    alpha: float = 1.0
    seed: int = 0
    _profiles: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict)

    def profile(self, p: float):
        if p not in self._profiles:
            self._profiles[p] = solve_radial(HenonParams(self.N, self.alpha, p))
        return self._profiles[p]

    def scan(self, num: int):
        key = ("scan", num)
        if key not in self._cache:
            grid = morse_scan.default_grid(self.N, self.alpha, num=num)
            self._cache[key] = morse_scan.scan(self.N, self.alpha, grid=grid)
        return self._cache[key]

    def degeneracy_points(self, num: int = 101):
        key = ("points", num)
        if key not in self._cache:
            self._cache[key] = morse_scan.find_degeneracy_points(self.scan(num))
        return self._cache[key]

    def branch(self):
        if "branch" not in self._cache:
            changing = [pt for pt in self.degeneracy_points() if pt.changing]
            self._cache["branch"] = continuation.continue_branch(
                changing[0], N=self.N, alpha=self.alpha, max_steps=40
            )
        return self._cache["branch"]


# ---------------------------------------------------------------------------
# the eight primary criteria
# ---------------------------------------------------------------------------


def check_exact_eigenvalue_oracle(ctx: AcceptanceContext) -> CheckResult:
    """Lambda_{1,0} = 1/p to 1e-6 relative, eigenfunction aligned with u_p to 1e-5."""
    worst_val, worst_ang = 0.0, 0.0
    for p in EIG_ORACLE_PS:
        prof = ctx.profile(p)
        spec = solve_mode_spectrum(ModeProblem(prof, 0), 2)
        worst_val = max(worst_val, abs(spec.eigenvalues[0] * p - 1.0))
        u_nodes = np.interp(spec.mesh, prof.mesh, prof.u)
        psi = spec.eigenfunctions[:, 0]
        w = spec.weights
        num = float(np.sum(w * psi * u_nodes))
        den = math.sqrt(float(np.sum(w * psi * psi)) * float(np.sum(w * u_nodes * u_nodes)))
        cosang = min(1.0, abs(num) / den)
        worst_ang = max(worst_ang, math.sqrt(max(0.0, 1.0 - cosang ** 2)))
    passed = worst_val <= 1e-6 and worst_ang <= 1e-5
    return CheckResult(
        "exact-eigenvalue-oracle",
        passed,
        f"max |p*Lambda_10 - 1| = {worst_val:.2e} (<=1e-6), "
        f"max misalignment = {worst_ang:.2e} (<=1e-5)",
    )


def check_inequality_suite(ctx: AcceptanceContext) -> CheckResult:
    """Lambda_20, Lambda_12, Lambda_21 > 1; Lambda_1k increasing in k; barrier g in (0,1)."""
    ok = True
    notes = []
    for p in EIG_ORACLE_PS:
        prof = ctx.profile(p)
        s0 = solve_mode_spectrum(ModeProblem(prof, 0), 2)
        s1 = solve_mode_spectrum(ModeProblem(prof, 1), 2)
        firsts = [s0.eigenvalues[0], s1.eigenvalues[0]]
        for k in (2, 3, 4):
            firsts.append(solve_mode_spectrum(ModeProblem(prof, k), 1).eigenvalues[0])
        lam20, lam21, lam12 = s0.eigenvalues[1], s1.eigenvalues[1], firsts[2]
        increasing = all(a < b for a, b in zip(firsts, firsts[1:]))
        g = prof.g
        g_ok = (
            np.all(g[1:-1] > 0.0)
            and np.all(g[1:-1] < 1.0)
            and int(np.argmax(g[1:-1])) == 0
        )
        row_ok = lam20 > 1 and lam21 > 1 and lam12 > 1 and increasing and g_ok
        ok = ok and row_ok
        notes.append(
            f"p={p}: L20={lam20:.4f} L12={lam12:.4f} L21={lam21:.4f} "
            f"inc={increasing} g={g_ok}"
        )
    return CheckResult("inequality-suite", ok, "; ".join(notes))


def check_morse_dichotomy(ctx: AcceptanceContext) -> CheckResult:
    """Index 1 at p=1.05 and N+1 at p=6.9; full count equals shortcut on the scan."""
    lo = spectral.morse_index(ctx.profile(P_LOW))
    hi = spectral.morse_index(ctx.profile(P_HIGH))
    scan = ctx.scan(101)
    agree = all(
        row.morse_index in (1, ctx.N + 1) and row.degenerate is False
        or row.degenerate
        for row in scan.rows
    )
    shortcut_ok = True
    for row in scan.rows:
        want = 1 if row.lambda_11 >= 1.0 else ctx.N + 1
        if not row.degenerate and row.morse_index != want:
            shortcut_ok = False
    passed = (
        lo.morse_index == 1
        and hi.morse_index == ctx.N + 1
        and agree
        and shortcut_ok
        and len(scan.rows) == 101
    )
    return CheckResult(
        "morse-dichotomy-endpoints",
        passed,
        f"index(p={P_LOW})={lo.morse_index} (want 1), "
        f"index(p={P_HIGH})={hi.morse_index} (want {ctx.N + 1}), "
        f"full==shortcut at {len(scan.rows)} scan rows: {shortcut_ok}",
    )


def check_degeneracy_detection(ctx: AcceptanceContext) -> CheckResult:
    """Odd number of changing points, a 1 -> N+1 jump, grid-stable location."""
    points = [pt for pt in ctx.degeneracy_points(101) if pt.changing]
    odd = len(points) % 2 == 1
    jump = False
    for pt in points:
        lo = spectral.morse_index(ctx.profile(pt.bracket[0])).morse_index
        hi = spectral.morse_index(ctx.profile(pt.bracket[1])).morse_index
        if {lo, hi} == {1, ctx.N + 1}:
            jump = True
    points2 = [pt for pt in ctx.degeneracy_points(201) if pt.changing]
    stable = len(points2) == len(points) and all(
        abs(a.p_bar - b.p_bar) <= 1e-4 for a, b in zip(points, points2)
    )
    baseline = any(abs(pt.p_bar - P_BAR_BASELINE) <= P_BAR_BASELINE_TOL for pt in points)
    passed = odd and jump and stable and baseline
    locs = ", ".join(f"{pt.p_bar:.7f}" for pt in points)
    return CheckResult(
        "degeneracy-detection",
        passed,
        f"changing points at [{locs}] (count {len(points)}, odd={odd}), "
        f"jump 1->4: {jump}, 101-vs-201 grid stable to 1e-4: {stable}, "
        f"regression baseline {P_BAR_BASELINE}: {baseline}",
    )


def check_p_to_one(ctx: AcceptanceContext) -> CheckResult:
    """sup^{p-1} -> lambda_1 monotonically with 1% extrapolation; lambda_R scaling."""
    report = asymptotics.verify_p_to_1(ctx.N, ctx.alpha)
    rich_ok = abs(report.extrapolated - report.lambda_1) <= 0.01 * report.lambda_1
    scale_vals = []
    for R in RADII:
        pair = asymptotics.weighted_first_eigen(ctx.N, ctx.alpha, R)
        scale_vals.append(pair.lambda_1 * R ** (2 + ctx.alpha))
    spread = (max(scale_vals) - min(scale_vals)) / report.lambda_1
    passed = report.converged and rich_ok and spread <= 1e-6
    return CheckResult(
        "p-to-1-asymptotics",
        passed,
        f"deviations decreasing: {report.converged}, Richardson "
        f"{report.extrapolated:.6f} vs lambda1 {report.lambda_1:.6f} "
        f"(rel {abs(report.extrapolated - report.lambda_1) / report.lambda_1:.2e}), "
        f"lambda_R R^(2+a) spread {spread:.2e} (<=1e-6)",
    )


def check_p_to_palpha(ctx: AcceptanceContext) -> CheckResult:
    """u_tilde <= U pointwise, window distance decreasing, transform identities."""
    dists, margins = [], []
    pullback = 0.0
    for p in BLOWUP_PS:
        resc = asymptotics.rescale_profile(ctx.profile(p))
        dists.append(resc.sup_distance)
        margins.append(resc.bound_margin)
        ef = asymptotics.emden_fowler(resc, seed=ctx.seed)
        pullback = max(pullback, ef.pullback_error)
    params = HenonParams(ctx.N, ctx.alpha, 2.0)
    const_ok = (
        abs(params.kappa - 5.0) < 1e-14 and abs(params.C_alpha - 0.25) < 1e-14
    )
    decreasing = all(a > b for a, b in zip(dists, dists[1:]))
    bound_ok = max(margins) <= 1e-8
    passed = decreasing and bound_ok and pullback <= 1e-12 and const_ok
    return CheckResult(
        "p-to-palpha-asymptotics",
        passed,
        f"bound margin max {max(margins):.2e} (<=1e-8), window distances "
        f"{['%.4f' % d for d in dists]} decreasing: {decreasing}, pullback "
        f"identity {pullback:.2e} (<=1e-12), kappa=5 & C_alpha=1/4: {const_ok}",
    )


def check_quadratic_form(ctx: AcceptanceContext) -> CheckResult:
    """Radial quadratic form nonnegative on random draws, zero at u_p."""
    ok = True
    notes = []
    for p in QUAD_PS:
        prof = ctx.profile(p)
        worst = np.inf
        for v, vp in morse_scan.random_radial_test_functions(100, seed=ctx.seed):
            t1, t2, t3 = morse_scan.quadform_terms(prof, v, vp)
            scale = t1 + abs(t2) + t3
            worst = min(worst, (t1 - t2 + t3) / scale)
        t1, t2, t3 = morse_scan.quadform_terms(prof, prof.u, prof.u_prime)
        eq_rel = abs(t1 - t2 + t3) / (t1 + abs(t2) + t3)
        row_ok = worst >= -1e-8 and eq_rel <= 1e-9
        ok = ok and row_ok
        notes.append(f"p={p}: min scaled value {worst:.2e}, |Q(u_p)|/scale {eq_rel:.2e}")
    return CheckResult("quadratic-form-R4", ok, "; ".join(notes))


def check_continuation(ctx: AcceptanceContext) -> CheckResult:
    """Branch switch succeeds; >=20 accepted points, all positive and asymmetric;
    sector crossing matches the scan location to 1e-4."""
    branch = ctx.branch()
    n_pts = len(branch.points)
    res_ok = all(pt.residual_norm < 1e-8 for pt in branch.points)
    asym_ok = all(pt.asymmetry > 0.0 for pt in branch.points)
    pos_ok = branch.termination != "positivity-failure"
    pos_ok = pos_ok and all(np.all(pt.values > 0.0) for pt in branch.points)
    cross_ok = abs(branch.origin_p - branch.origin_p_scan) <= 1e-4
    lo, hi = branch.norm_range
    passed = n_pts >= 20 and res_ok and asym_ok and pos_ok and cross_ok
    return CheckResult(
        "continuation-branch",
        passed,
        f"{n_pts} accepted points (>=20), residual<1e-8: {res_ok}, positive: "
        f"{pos_ok}, asymmetry>0: {asym_ok}, crossing {branch.origin_p:.7f} vs "
        f"scan {branch.origin_p_scan:.7f} (|diff|<=1e-4: {cross_ok}); "
        f"p range [{branch.points[0].p:.4f}, {branch.points[-1].p:.4f}], "
        f"C1-norm range [{lo:.3f}, {hi:.3f}], termination {branch.termination}",
    )


ALL_CHECKS = (
    check_exact_eigenvalue_oracle,
    check_inequality_suite,
    check_morse_dichotomy,
    check_degeneracy_detection,
    check_p_to_one,
    check_p_to_palpha,
    check_quadratic_form,
    check_continuation,
)


def run_acceptance(N: int = 3, alpha: float = 1.0, seed: int = 0):
    """Run every acceptance criterion; returns (results, context)."""
    ctx = AcceptanceContext(N=N, alpha=alpha, seed=seed)
    return [check(ctx) for check in ALL_CHECKS], ctx
