"""Sweep of the exponent range: degeneracy points and the Morse-index staircase.

The radial solution u_p is degenerate exactly when Lambda_{1,1}(p) = 1, and
for alpha in (0, 1] the Morse index takes only the two values 1 (when
Lambda_{1,1} >= 1) and N+1 (when Lambda_{1,1} < 1).  A Morse-index changing
point is a root of Lambda_{1,1} - 1 across which the sign flips; the number
of such points in (1, p_alpha) is odd, so at least one exists and the scan
must find an odd count.  Roots are located from sign changes on the grid
and refined by bisection (the map p -> Lambda_{1,1}(p) is smooth but no
monotonicity is assumed, so all sign changes are kept).

The module also carries the radial quadratic-form inequality used by the
radial-nondegeneracy argument:

    Q(v) = int r^{N-1} (v')^2 - p int r^{N-1+alpha} u_p^{p-1} v^2
           + (p-1) (int r^{N-1+alpha} u_p^p v)^2 / int r^{N-1+alpha} u_p^{p+1}
         >= 0

for every radial v with v(1) = 0 and finite weighted energy, with equality
exactly at v = u_p (where the three terms cancel through the eigenvalue
identity Lambda_{1,0} = 1/p).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import ParameterError, ParityViolationError, SolverError
from .params import HenonParams, critical_exponent
from .radial import RadialProfile, solve_radial
from .spectral import (
    DEFAULT_SPECTRAL_MESH,
    DEGENERACY_TOL,
    ModeProblem,
    morse_index,
    solve_mode_spectrum,
)

DEFAULT_GRID_SIZE = 101
DEFAULT_GRID_MARGIN = 1e-2
DEFAULT_REFINE_TOL = 1e-8

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(5)


@dataclass(frozen=True)
class ScanRow:
    p: float
    lambda_11: float
    morse_index: int
    sup_norm: float
    degenerate: bool


@dataclass(frozen=True)
class ScanResult:
    N: int
    alpha: float
    k_max: int
    p_lo: float
    p_hi: float
    rows: tuple[ScanRow, ...]
    failures: tuple[str, ...]


@dataclass(frozen=True)
class DegeneracyPoint:
    """A refined root of Lambda_{1,1}(p) - 1 (or a flagged near-tangency).

    ``changing`` is True when the sign flips across ``bracket`` (a Morse
    index changing point); tangency candidates, where |Lambda_{1,1} - 1|
    dips below sqrt(tol) at a grid local minimum without a sign change, are
    reported with ``changing=False``.  ``kernel`` is the first mode-1
    eigenfunction at p_bar, positive with psi(0) = psi(1) = 0, sampled on
    ``kernel_mesh``.
    """

    p_bar: float
    bracket: tuple[float, float]
    changing: bool
    lambda_gap: float  # Lambda_{1,1}(p_bar) - 1 after refinement
    kernel: np.ndarray
    kernel_mesh: np.ndarray


def default_grid(N: int, alpha: float, num: int = DEFAULT_GRID_SIZE,
                 margin: float = DEFAULT_GRID_MARGIN) -> np.ndarray:
    """Geometrically spaced grid in p - 1 on (1 + margin, p_alpha - margin)."""
    pa = critical_exponent(N, alpha)
    return 1.0 + np.geomspace(margin, pa - 1.0 - margin, num)


def _lambda_11(N: int, alpha: float, p: float, mesh_size: int):
    profile = solve_radial(HenonParams(N, alpha, p))
    spec = solve_mode_spectrum(ModeProblem(profile, 1), 1, mesh_size=mesh_size)
    return float(spec.eigenvalues[0]), profile, spec


def scan(
    N: int,
    alpha: float,
    grid: np.ndarray | None = None,
    k_max: int = 2,
    mesh_size: int = DEFAULT_SPECTRAL_MESH,
) -> ScanResult:
    """One row per grid exponent: Lambda_{1,1}, Morse index, sup norm.

    Per-row solver failures are recorded and the scan continues; rows come
    out sorted by p.
    """
    if grid is None:
        grid = default_grid(N, alpha)
    grid = np.sort(np.asarray(grid, dtype=float))
    pa = critical_exponent(N, alpha)
    if grid[0] <= 1.0 or grid[-1] >= pa:
        raise ParameterError(f"grid must lie inside (1, {pa:g})")

    rows, failures = [], []
    for p in grid:
        try:
            profile = solve_radial(HenonParams(N, alpha, p))
            report = morse_index(profile, k_max=k_max, mesh_size=mesh_size)
            rows.append(
                ScanRow(
                    p=float(p),
                    lambda_11=report.lambda_11,
                    morse_index=report.morse_index,
                    sup_norm=profile.sup_norm,
                    degenerate=report.degenerate,
                )
            )
        except SolverError as exc:  # pragma: no cover - defensive per-row skip
            failures.append(f"p={p:.6g}: {exc}")
    return ScanResult(
        N=N,
        alpha=alpha,
        k_max=k_max,
        p_lo=float(grid[0]),
        p_hi=float(grid[-1]),
        rows=tuple(rows),
        failures=tuple(failures),
    )


def find_degeneracy_points(
    scan_result: ScanResult,
    tol: float = DEFAULT_REFINE_TOL,
    mesh_size: int = DEFAULT_SPECTRAL_MESH,
    _allow_refine: bool = True,
) -> list[DegeneracyPoint]:
    """Refine every sign change of Lambda_{1,1} - 1 to |gap| < tol.

    Bisection on p (sign-based, no derivative estimates) followed by one
    secant polish.  For alpha <= 1 the count of changing points must be
    odd; on an even count the scan is repeated once on a doubled grid
    before raising ``ParityViolationError``.  Near-tangencies are appended
    as non-changing candidates.
    """
    rows = scan_result.rows
    if len(rows) < 2:
        raise ParameterError("scan needs at least two rows")
    N, alpha = scan_result.N, scan_result.alpha

    gaps = np.array([row.lambda_11 - 1.0 for row in rows])
    ps = np.array([row.p for row in rows])

    points: list[DegeneracyPoint] = []
    for i in range(len(rows) - 1):
        if gaps[i] == 0.0 or gaps[i] * gaps[i + 1] >= 0.0:
            continue
        p_lo, p_hi = ps[i], ps[i + 1]
        f_lo = gaps[i]
        p_mid, f_mid = p_lo, f_lo
        history = [(p_lo, gaps[i]), (p_hi, gaps[i + 1])]
        for _ in range(200):
            p_mid = 0.5 * (p_lo + p_hi)
            f_mid, _, _ = _lambda_11(N, alpha, p_mid, mesh_size)
            f_mid -= 1.0
            history.append((p_mid, f_mid))
            if abs(f_mid) < tol:
                break
            if f_lo * f_mid < 0:
                p_hi = p_mid
            else:
                p_lo, f_lo = p_mid, f_mid
        else:
            raise SolverError(f"bisection stalled in bracket ({ps[i]:g}, {ps[i+1]:g})")
        # one secant polish from the last two distinct iterates
        (pa_, fa_), (pb_, fb_) = history[-2], history[-1]
        if fb_ != fa_:
            p_sec = pb_ - fb_ * (pb_ - pa_) / (fb_ - fa_)
            if ps[i] < p_sec < ps[i + 1]:
                f_sec, _, spec = _lambda_11(N, alpha, p_sec, mesh_size)
                f_sec -= 1.0
                if abs(f_sec) < abs(f_mid):
                    p_mid, f_mid = p_sec, f_sec
        _, _, spec = _lambda_11(N, alpha, p_mid, mesh_size)
        points.append(
            DegeneracyPoint(
                p_bar=float(p_mid),
                bracket=(float(ps[i]), float(ps[i + 1])),
                changing=True,
                lambda_gap=float(f_mid),
                kernel=spec.eigenfunctions[:, 0].copy(),
                kernel_mesh=spec.mesh.copy(),
            )
        )

    if alpha <= 1.0 and len(points) % 2 == 0:
        if _allow_refine:
            fine = scan(
                N,
                alpha,
                grid=np.sort(np.concatenate([ps, 0.5 * (ps[:-1] + ps[1:])])),
                k_max=scan_result.k_max,
                mesh_size=mesh_size,
            )
            return find_degeneracy_points(fine, tol, mesh_size, _allow_refine=False)
        raise ParityViolationError(
            f"found {len(points)} Morse-index changing points; an odd count "
            "is guaranteed for alpha <= 1 (a root was missed)"
        )

    # tangency candidates: interior local minima of |gap| below sqrt(tol)
    absgap = np.abs(gaps)
    for i in range(1, len(rows) - 1):
        if (
            absgap[i] < np.sqrt(tol)
            and absgap[i] <= absgap[i - 1]
            and absgap[i] <= absgap[i + 1]
            and gaps[i - 1] * gaps[i] > 0
            and gaps[i] * gaps[i + 1] > 0
        ):
            _, _, spec = _lambda_11(N, alpha, ps[i], mesh_size)
            points.append(
                DegeneracyPoint(
                    p_bar=float(ps[i]),
                    bracket=(float(ps[i - 1]), float(ps[i + 1])),
                    changing=False,
                    lambda_gap=float(gaps[i]),
                    kernel=spec.eigenfunctions[:, 0].copy(),
                    kernel_mesh=spec.mesh.copy(),
                )
            )
    points.sort(key=lambda d: d.p_bar)
    return points


# ---------------------------------------------------------------------------
# radial quadratic form
# ---------------------------------------------------------------------------


def _profile_quadrature(profile: RadialProfile):
    """Gauss-Legendre points/weights per mesh interval plus u, u' there."""
    mesh = profile.mesh
    a, b = mesh[:-1], mesh[1:]
    half = 0.5 * (b - a)
    pts = half[:, None] * _GAUSS_X[None, :] + 0.5 * (a + b)[:, None]
    wts = half[:, None] * _GAUSS_W[None, :]
    u_spline = CubicHermiteSpline(mesh, profile.u, profile.u_prime)
    return pts.ravel(), wts.ravel(), np.clip(u_spline(pts.ravel()), 0.0, None)


def quadform_terms(
    profile: RadialProfile, v, v_prime
) -> tuple[float, float, float]:
    """The three integrals of the radial quadratic form, by composite Gauss
    quadrature on the profile mesh.  ``v``/``v_prime`` may be callables or
    arrays sampled on the profile mesh (arrays are interpolated in C^1)."""
    params = profile.params
    N, alpha, p = params.N, params.alpha, params.p
    pts, wts, u = _profile_quadrature(profile)
    if callable(v):
        vv = np.asarray(v(pts), dtype=float)
        vp = np.asarray(v_prime(pts), dtype=float)
    else:
        if v_prime is None or not hasattr(v_prime, "__len__"):
            raise ParameterError("array-valued v requires array-valued v_prime")
        spl = CubicHermiteSpline(profile.mesh, np.asarray(v), np.asarray(v_prime))
        vv = spl(pts)
        vp = spl.derivative()(pts)

    rNm1 = pts ** (N - 1)
    rNw = pts ** (N - 1 + alpha)
    term1 = float(np.sum(wts * rNm1 * vp ** 2))
    term2 = float(p * np.sum(wts * rNw * u ** (p - 1) * vv ** 2))
    cross = float(np.sum(wts * rNw * u ** p * vv))
    denom = float(np.sum(wts * rNw * u ** (p + 1)))
    term3 = float((p - 1) * cross ** 2 / denom)
    return term1, term2, term3


def quadform_R4(profile: RadialProfile, v, v_prime=None) -> float:
    """Value of the radial quadratic form at v; nonnegative up to quadrature.

    The sign convention returns term1 - term2 + term3, vanishing at
    v = u_p.  For v given as arrays on the profile mesh, pass the matching
    derivative samples in ``v_prime``.
    """
    t1, t2, t3 = quadform_terms(profile, v, v_prime)
    return t1 - t2 + t3


def random_radial_test_functions(count: int, seed: int = 0, max_modes: int = 8):
    """Seeded random smooth radial test functions vanishing at r = 1.

    Each draw is a combination v(r) = sum_j c_j sinc(j r) of the first
    ``max_modes`` spherical Bessel modes sin(j pi r)/(j pi r), which are
    smooth, satisfy v(1) = 0 and carry finite weighted energy.  Returns a
    list of (v, v') callable pairs; the generator is fixed by ``seed`` for
    reproducibility.
    """
    rng = np.random.default_rng(seed)
    draws = []
    for _ in range(count):
        coeff = rng.standard_normal(max_modes) / np.arange(1, max_modes + 1)

        def v(r, c=coeff):
            r = np.asarray(r, dtype=float)
            return sum(cj * np.sinc((j + 1) * r) for j, cj in enumerate(c))

        def v_prime(r, c=coeff):
            r = np.asarray(r, dtype=float)
            out = np.zeros_like(r)
            for j, cj in enumerate(c):
                x = (j + 1) * r
                small = np.abs(x) < 1e-4
                ds = np.empty_like(r)
                xs = x[~small]
                ds[~small] = (np.cos(np.pi * xs) - np.sinc(xs)) / xs
                ds[small] = -(np.pi ** 2) * x[small] / 3.0
                out += cj * (j + 1) * ds
            return out

        draws.append((v, v_prime))
    return draws
