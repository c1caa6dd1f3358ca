"""Axisymmetric discretization and pseudo-arclength continuation of the
symmetry-breaking branch.

The nonradial branch bifurcating at a Morse-index changing point lives in
the class of functions invariant under rotations of the first N-1
coordinates, i.e. functions of the radius r and the polar angle theta.
In these variables

    Delta u = u_rr + (N-1)/r u_r + r^{-2} (u_thth + (N-2) cot(theta) u_th),

and the natural measure is r^{N-1} sin^{N-2}(theta) dr dtheta.  With
xi = cos(theta) the angular part is the Gegenbauer operator

    (1 - xi^2) y'' - (N-1) xi y',

whose eigenfunctions are the Gegenbauer polynomials G_k(xi) with
eigenvalues -mu_k = -k(k + N - 2); G_1 is proportional to cos(theta), the
direction in which the symmetry breaks.

Discretization: cell-centered finite volumes in r (faces graded toward the
solution core, zero-flux closure at the degenerate faces r = 0 and theta
in {0, pi}, Dirichlet at r = 1), Gauss-Jacobi collocation in xi with the
angular operator applied modally through an exact Gegenbauer transform.
Consequences used heavily downstream:

  * applying the operator to a theta-independent field reproduces the 1D
    radial scheme exactly, so radial states embed with the 1D residual and
    Newton preserves radiality to machine precision;
  * restricted to fields psi(r) G_k(xi), the linearization is exactly the
    1D mode pencil with the exact angular eigenvalue mu_k, so the zero
    crossing of the linearization in the cos(theta) sector can be located
    by cheap 1D eigensolves and agrees with the spectral module's
    degeneracy point up to the radial discretization error alone.

The branch itself is tracked by pseudo-arclength continuation with a
bordered Newton corrector, solved as one sparse system so that folds,
where the plain Jacobian degenerates, need no special casing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.sparse.linalg import eigsh, splu

from .errors import (
    JacobianSingularError,
    NoConvergenceError,
    ParameterError,
    SolverError,
)
from .morse_scan import DegeneracyPoint
from .params import HenonParams
from .radial import integrate_normalized

DEFAULT_NR = 129
DEFAULT_NTHETA = 65
DEFAULT_NEWTON_TOL = 1e-10
RADIAL_RETURN_TOL = 1e-6


def _gegenbauer_basis(nt: int, N: int, xi: np.ndarray) -> np.ndarray:
    """Columns G_k(xi), k = 0..nt-1, by the three-term recurrence for the
    Gegenbauer family with parameter lambda = (N-2)/2 (Legendre for N=3)."""
    lam = 0.5 * (N - 2)
    V = np.empty((len(xi), nt))
    V[:, 0] = 1.0
    if nt > 1:
        V[:, 1] = 2.0 * lam * xi
    for k in range(1, nt - 1):
        V[:, k + 1] = (
            2.0 * (k + lam) * xi * V[:, k] - (k + 2.0 * lam - 1.0) * V[:, k - 1]
        ) / (k + 1.0)
    return V


@dataclass(frozen=True)
class AxisymGrid:
    """Tensor grid for O(N-1)-invariant fields on the unit ball."""

    N: int
    alpha: float
    faces: np.ndarray      # nr + 1 radial cell faces, faces[0] = 0, faces[-1] = 1
    r: np.ndarray          # nr cell centers
    xi: np.ndarray         # ntheta Gauss-Jacobi nodes in (-1, 1), ascending
    theta: np.ndarray      # arccos(xi), descending
    wt: np.ndarray         # angular quadrature weights (measure sin^{N-2})
    Vr: np.ndarray         # cell integrals of r^{N-1}
    Vr2: np.ndarray        # cell integrals of r^{N-3}
    Vra: np.ndarray        # cell integrals of r^{N-1+alpha}
    cond: np.ndarray       # interior face conductances r_f^{N-1}/dr
    cond_boundary: float   # Dirichlet closure conductance at r = 1
    Ath: np.ndarray        # modal angular operator (exact eigenpairs mu_k, G_k)
    basis: np.ndarray      # G_k sampled at the nodes

    @property
    def nr(self) -> int:
        return len(self.r)

    @property
    def ntheta(self) -> int:
        return len(self.xi)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nr, self.ntheta)

    def omega(self) -> np.ndarray:
        """Cell measure r^{N-1} sin^{N-2}theta dr dtheta on the grid."""
        return self.Vr[:, None] * self.wt[None, :]

    # -- radial 1D pieces -------------------------------------------------

    def stiffness_1d(self, mu: float) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal/off-diagonal of the sector-mu radial stiffness."""
        d = np.zeros(self.nr)
        d[:-1] += self.cond
        d[1:] += self.cond
        d[-1] += self.cond_boundary
        if mu != 0.0:
            d = d + mu * self.Vr2
        return d, -self.cond

    def apply_radial(self, U: np.ndarray) -> np.ndarray:
        """Radial stiffness (mu = 0) applied along the first axis."""
        d, e = self.stiffness_1d(0.0)
        out = d[:, None] * U
        out[:-1] += e[:, None] * U[1:]
        out[1:] += e[:, None] * U[:-1]
        return out

    def mode_coefficient(self, U: np.ndarray, k: int) -> np.ndarray:
        """Radial profile of the degree-k angular coefficient of U."""
        gk = self.basis[:, k]
        return (U * (self.wt * gk)[None, :]).sum(axis=1) / np.sum(self.wt * gk * gk)

    def asymmetry(self, U: np.ndarray) -> float:
        """Weighted norm of the mode-1 angular projection profile."""
        c1 = self.mode_coefficient(U, 1)
        return float(np.sqrt(np.sum(self.Vr * c1 ** 2)))

    def c1_norm(self, U: np.ndarray) -> float:
        """max|u| + max|grad u| on the grid (Holder-norm growth proxy)."""
        du_r = np.abs(np.diff(U, axis=0)) / np.diff(self.r)[:, None]
        dth = np.abs(np.diff(self.theta))
        du_t = np.abs(np.diff(U, axis=1)) / dth[None, :] / self.r[:, None]
        return float(np.abs(U).max() + max(du_r.max(), du_t.max()))


def make_grid(
    N: int,
    alpha: float,
    nr: int = DEFAULT_NR,
    ntheta: int = DEFAULT_NTHETA,
    core_scale: float = 0.4,
) -> AxisymGrid:
    """Build the tensor grid; faces sinh-graded into [0, core_scale]."""
    if nr < 8 or ntheta < 4:
        raise ParameterError(f"grid too small: nr={nr}, ntheta={ntheta}")
    s = min(max(core_scale, 1e-3), 0.5)
    c = np.arcsinh(1.0 / s)
    faces = s * np.sinh(c * np.arange(nr + 1) / nr)
    faces[0], faces[-1] = 0.0, 1.0
    r = 0.5 * (faces[:-1] + faces[1:])

    def cvint(e):
        return (faces[1:] ** e - faces[:-1] ** e) / e

    from scipy.special import roots_jacobi

    a = 0.5 * (N - 3)
    xi, wt = roots_jacobi(ntheta, a, a)
    order = np.argsort(xi)
    xi, wt = xi[order], wt[order]
    basis = _gegenbauer_basis(ntheta, N, xi)
    gamma = (basis * basis * wt[:, None]).sum(axis=0)
    mu = np.array([k * (k + N - 2) for k in range(ntheta)], dtype=float)
    inv = (basis * wt[:, None]).T / gamma[:, None]
    Ath = basis @ (mu[:, None] * inv)

    return AxisymGrid(
        N=N,
        alpha=alpha,
        faces=faces,
        r=r,
        xi=xi,
        theta=np.arccos(xi),
        wt=wt,
        Vr=cvint(N),
        Vr2=cvint(N - 2),
        Vra=cvint(N + alpha),
        cond=faces[1:-1] ** (N - 1) / np.diff(r),
        cond_boundary=1.0 / (1.0 - r[-1]),
        Ath=Ath,
        basis=basis,
    )


@dataclass(frozen=True)
class AxisymState:
    """A discrete axisymmetric field at exponent p, with acceptance metadata."""

    grid: AxisymGrid
    p: float
    values: np.ndarray  # shape (nr, ntheta)
    residual_norm: float
    asymmetry: float
    positive: bool

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())


def _odd_power(v: np.ndarray, p: float) -> np.ndarray:
    return np.sign(v) * np.abs(v) ** p


def residual(p: float, state_or_values, grid: AxisymGrid | None = None):
    """Weighted finite-volume residual of -Delta u - |x|^alpha |u|^{p-1} u.

    Returns (field, norm): the field holds cell integrals of the strong
    residual times the angular weights; the norm is the measure-weighted
    root-mean-square of the pointwise residual, divided by max(1, sup)^p so
    that the acceptance threshold is scale-free.
    """
    if isinstance(state_or_values, AxisymState):
        grid = state_or_values.grid
        U = state_or_values.values
    else:
        U = state_or_values
        if grid is None:
            raise ParameterError("grid required when passing raw values")
    R = grid.apply_radial(U)
    R += grid.Vr2[:, None] * (U @ grid.Ath.T)
    R -= grid.Vra[:, None] * _odd_power(U, p)
    R *= grid.wt[None, :]
    omega = grid.omega()
    norm = float(np.sqrt(np.sum(R * R / omega) / np.sum(omega)))
    scale = max(1.0, float(np.abs(U).max())) ** p
    return R, norm / scale


def _jacobian(grid: AxisymGrid, p: float, U: np.ndarray) -> sp.csc_matrix:
    """Sparse symmetric Jacobian of the weighted residual."""
    nr, nt = grid.shape
    d, e = grid.stiffness_1d(0.0)
    wt = grid.wt
    idx = np.arange(nr * nt).reshape(nr, nt)

    rows = [idx.ravel()]
    cols = [idx.ravel()]
    vals = [((d[:, None] - grid.Vra[:, None] * p * np.abs(U) ** (p - 1)) * wt).ravel()]

    off = (e[:, None] * wt[None, :]).ravel()
    rows += [idx[:-1].ravel(), idx[1:].ravel()]
    cols += [idx[1:].ravel(), idx[:-1].ravel()]
    vals += [off, off]

    WA = wt[:, None] * grid.Ath  # symmetric angular block
    bi = np.repeat(np.arange(nr), nt * nt)
    bj = np.tile(np.repeat(np.arange(nt), nt), nr)
    bl = np.tile(np.tile(np.arange(nt), nt), nr)
    rows.append(bi * nt + bj)
    cols.append(bi * nt + bl)
    vals.append(grid.Vr2[bi] * WA[bj, bl])

    return sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nr * nt, nr * nt),
    )


def _dresidual_dp(grid: AxisymGrid, p: float, U: np.ndarray) -> np.ndarray:
    f = _odd_power(U, p)
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.where(np.abs(U) > 0.0, np.log(np.abs(U)), 0.0)
    return (-grid.Vra[:, None] * f * lg * grid.wt[None, :]).ravel()


def _make_state(grid: AxisymGrid, p: float, U: np.ndarray) -> AxisymState:
    _, rn = residual(p, U, grid)
    return AxisymState(
        grid=grid,
        p=p,
        values=U,
        residual_norm=rn,
        asymmetry=grid.asymmetry(U),
        positive=bool(np.all(U > 0.0)),
    )


# ---------------------------------------------------------------------------
# radial embedding and the cos(theta) sector
# ---------------------------------------------------------------------------


def embed_radial(
    grid: AxisymGrid, p: float, tol: float = 1e-12, max_iter: int = 50
) -> AxisymState:
    """The grid's own discrete radial solution, extended constantly in theta.

    Solves the 1D cell-centered system K u = Vra u^p by Newton, seeded from
    the high-accuracy normalized profile; because the angular operator
    annihilates theta-constant fields exactly, the embedded state carries
    the 1D residual unchanged.
    """
    params = HenonParams(grid.N, grid.alpha, p)
    norm = integrate_normalized(params)
    if norm.first_zero is None:
        raise SolverError(f"no radial solution at p={p}")
    R0 = norm.first_zero
    amp = R0 ** ((2 + grid.alpha) / (p - 1))
    v, _, _ = norm.evaluate(R0 * grid.r)
    u = amp * np.clip(v, 0.0, None)

    d, e = grid.stiffness_1d(0.0)
    K = sp.diags([e, d, e], [-1, 0, 1], format="csc")
    for _ in range(max_iter):
        res = K @ u - grid.Vra * _odd_power(u, p)
        J = K - sp.diags(grid.Vra * p * np.abs(u) ** (p - 1), 0, format="csc")
        du = splu(J).solve(-res)
        u = u + du
        if np.linalg.norm(du) <= tol * max(1.0, np.linalg.norm(u)):
            break
    else:
        raise NoConvergenceError(f"radial embedding Newton stalled at p={p}")
    U = np.repeat(u[:, None], grid.ntheta, axis=1)
    return _make_state(grid, p, U)


def sector_eigenvalue(
    grid: AxisymGrid, p: float, k: int = 1, radial_values: np.ndarray | None = None
) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue Lambda of the linearization in the degree-k sector.

    At a radial state the 2D linearization block-diagonalizes exactly over
    the angular basis; the degree-k block is the 1D pencil
    (K(mu_k), p Vra u^{p-1}) on the grid's radial cells.
    """
    if radial_values is None:
        radial_values = embed_radial(grid, p).values[:, 0]
    u = radial_values
    d, e = grid.stiffness_1d(float(k * (k + grid.N - 2)))
    K = sp.diags([e, d, e], [-1, 0, 1], format="csc")
    M = sp.diags(p * grid.Vra * np.abs(u) ** (p - 1), 0, format="csc")
    vals, vecs = eigsh(K, k=1, M=M, sigma=0.0, which="LM")
    psi = vecs[:, 0]
    if psi[np.argmax(np.abs(psi))] < 0:
        psi = -psi
    return float(vals[0]), psi


def sector_crossing(
    grid: AxisymGrid,
    p_lo: float,
    p_hi: float,
    k: int = 1,
    xtol: float = 1e-10,
) -> float:
    """Exponent where the degree-k sector eigenvalue crosses 1 on this grid."""

    def gap(p):
        return sector_eigenvalue(grid, p, k)[0] - 1.0

    g_lo, g_hi = gap(p_lo), gap(p_hi)
    if g_lo * g_hi > 0:
        raise SolverError(
            f"sector eigenvalue does not cross 1 in ({p_lo:g}, {p_hi:g})"
        )
    return float(brentq(gap, p_lo, p_hi, xtol=xtol))


def kernel_direction(
    dp: DegeneracyPoint, grid: AxisymGrid, p_grid: float | None = None
) -> tuple[np.ndarray, float]:
    """Unit kernel field psi_{1,1}(r) cos(theta) of the grid linearization.

    The radial factor is recomputed on the grid at the grid's own crossing
    (near dp.p_bar) rather than interpolated from the fine-mesh kernel:
    interpolation would leave an O(h^2) defect, while the grid eigenvector
    at the grid crossing annihilates the Jacobian to solver precision.
    Returns (field, p) with the field normalized in the grid measure.
    """
    if p_grid is None:
        width = max(2e-3, 1e-3 * dp.p_bar)
        p_grid = sector_crossing(grid, dp.p_bar - width, dp.p_bar + width)
    rad = embed_radial(grid, p_grid)
    _, psi = sector_eigenvalue(grid, p_grid, 1, radial_values=rad.values[:, 0])
    fld = psi[:, None] * grid.xi[None, :]
    fld /= np.sqrt(np.sum(fld * fld * grid.omega()))
    return fld, float(p_grid)


# ---------------------------------------------------------------------------
# Newton and continuation
# ---------------------------------------------------------------------------


def newton_solve(
    p: float,
    guess,
    grid: AxisymGrid | None = None,
    tol: float = DEFAULT_NEWTON_TOL,
    max_iter: int = 30,
) -> AxisymState:
    """Plain Newton on the axisymmetric system at fixed exponent p.

    ``guess`` may be an AxisymState or a raw (nr, ntheta) array with an
    explicit grid.  Raises ``JacobianSingularError`` when the linear solve
    degenerates (near folds or bifurcation points a bordered formulation
    must be used instead) and ``NoConvergenceError`` past the iteration
    budget.
    """
    if isinstance(guess, AxisymState):
        grid = guess.grid
        U = guess.values.copy()
    else:
        if grid is None:
            raise ParameterError("grid required when passing raw values")
        U = np.array(guess, dtype=float)

    _, rn = residual(p, U, grid)
    for _ in range(max_iter):
        if rn < tol:
            return _make_state(grid, p, U)
        R, _ = residual(p, U, grid)
        J = _jacobian(grid, p, U)
        try:
            dU = splu(J).solve(-R.ravel()).reshape(U.shape)
        except RuntimeError as exc:
            raise JacobianSingularError(f"linear solve failed at p={p}: {exc}") from exc
        if not np.all(np.isfinite(dU)):
            raise JacobianSingularError(f"singular linearization at p={p}")
        # damped update: halve until the residual decreases
        step = 1.0
        for _ in range(12):
            _, rn_new = residual(p, U + step * dU, grid)
            if rn_new < rn:
                break
            step *= 0.5
        U = U + step * dU
        rn = rn_new
    raise NoConvergenceError(
        f"Newton stalled at p={p}: residual {rn:.3e} after {max_iter} iterations"
    )


@dataclass(frozen=True)
class BranchPoint:
    arclength: float
    p: float
    asymmetry: float
    sup_norm: float
    residual_norm: float
    c1_norm: float
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class Branch:
    """Continuation curve leaving the radial family at a degeneracy point."""

    grid: AxisymGrid
    origin_p: float          # grid-refined crossing used as the branch root
    origin_p_scan: float     # the degeneracy point the caller supplied
    points: tuple[BranchPoint, ...]
    termination: str         # step-limit | fold-count-limit | residual-failure |
    #                          returned-to-radial | positivity-failure
    folds: int

    @property
    def norm_range(self) -> tuple[float, float]:
        """Extent of the Holder-norm proxy along the branch (growth report)."""
        c = [pt.c1_norm for pt in self.points]
        return (min(c), max(c))


def _bordered_solve(J, col, row, corner, rhs_top, rhs_bot):
    """Solve the sparse bordered system [[J, col], [row, corner]]."""
    B = sp.bmat(
        [[J, col.reshape(-1, 1)], [row.reshape(1, -1), np.array([[corner]])]],
        format="csc",
    )
    try:
        sol = splu(B).solve(np.concatenate([rhs_top, [rhs_bot]]))
    except RuntimeError as exc:
        raise JacobianSingularError(f"bordered solve failed: {exc}") from exc
    return sol[:-1], sol[-1]


def _switch_onto_branch(grid, p0, u_rad, kernel, eps_abs, tol, max_iter=40):
    """Amplitude-constrained bordered Newton for the first nonradial point.

    Unknowns (U, p); equations: residual = 0 together with
    <kernel, U>_omega = eps_abs.  Radial fields have zero kernel projection
    (the kernel is odd in xi), so the constraint pins the distance from the
    radial curve while p finds the branch side on its own.
    """
    omega = grid.omega()
    crow = (kernel * omega).ravel()
    U = u_rad + eps_abs * kernel
    p = p0
    scale = max(1.0, float(np.abs(u_rad).max()))
    for _ in range(max_iter):
        R, _ = residual(p, U, grid)
        c = float(np.sum(kernel * U * omega)) - eps_abs
        if np.linalg.norm(R.ravel()) + abs(c) < tol * scale:
            return _make_state(grid, p, U)
        J = _jacobian(grid, p, U)
        dU, dp = _bordered_solve(
            J, _dresidual_dp(grid, p, U), crow, 0.0, -R.ravel(), -c
        )
        U = U + dU.reshape(U.shape)
        p = p + dp
    raise NoConvergenceError("branch switch Newton did not converge")


def continue_branch(
    origin: DegeneracyPoint,
    grid: AxisymGrid | None = None,
    N: int | None = None,
    alpha: float | None = None,
    epsilon: float = 1e-2,
    step: float = 0.05,
    max_steps: int = 60,
    tol: float = 1e-10,
    max_folds: int = 8,
    min_step: float = 1e-7,
) -> Branch:
    """Follow the nonradial branch from a Morse-index changing point.

    Switching: the first point solves the amplitude-constrained bordered
    system at amplitude epsilon * sup(u_radial), retrying at epsilon/2 and
    epsilon/4 before failing.  Tracking: pseudo-arclength steps with a
    secant tangent, the arclength metric weighting the field by the grid
    measure over sup(u_radial)^2 so that p and shape contribute
    comparably; the corrector is one sparse bordered Newton system per
    iteration, valid through folds.  Every accepted point must satisfy the
    residual bound, strict interior positivity, and positive asymmetry.
    """
    if not origin.changing:
        raise ParameterError("continuation must start from a changing point")
    if grid is None:
        if N is None or alpha is None:
            raise ParameterError("pass a grid, or N and alpha to build one")
        params = HenonParams(N, alpha, origin.p_bar)
        norm = integrate_normalized(params)
        core = 3.0 / norm.first_zero if norm.first_zero else 0.4
        grid = make_grid(N, alpha, core_scale=core)

    width = max(2e-3, 1e-3 * origin.p_bar)
    p_star = sector_crossing(grid, origin.p_bar - width, origin.p_bar + width)
    kernel, _ = kernel_direction(origin, grid, p_grid=p_star)
    rad = embed_radial(grid, p_star)
    scale_u = rad.sup_norm
    omega = grid.omega()

    first = None
    eps_abs0 = epsilon * scale_u
    for eps_abs in (eps_abs0, 0.5 * eps_abs0, 0.25 * eps_abs0):
        try:
            first = _switch_onto_branch(
                grid, p_star, rad.values, kernel, eps_abs, tol
            )
            if first.asymmetry > 0.0:
                break
        except (NoConvergenceError, JacobianSingularError):
            continue
    if first is None:
        raise NoConvergenceError(
            "branch switch failed at three decreasing amplitudes"
        )

    def xnorm(dU, dp):
        return math.sqrt(float(np.sum(dU * dU * omega)) / scale_u ** 2 + dp * dp)

    def accept(state: AxisymState, s: float) -> BranchPoint:
        return BranchPoint(
            arclength=s,
            p=state.p,
            asymmetry=state.asymmetry,
            sup_norm=state.sup_norm,
            residual_norm=state.residual_norm,
            c1_norm=grid.c1_norm(state.values),
            values=state.values,
        )

    points = []
    termination = "step-limit"
    folds = 0

    U_cur, p_cur = first.values, first.p
    s = xnorm(U_cur - rad.values, p_cur - p_star)
    points.append(accept(first, s))

    ds = min(step, 4.0 * s) if s > 0 else step
    nrm = xnorm(U_cur - rad.values, p_cur - p_star)
    tang_U = (U_cur - rad.values) / nrm
    tang_p = (p_cur - p_star) / nrm
    dp_prev = p_cur - p_star

    for _ in range(max_steps - 1):
        converged = None
        while ds >= min_step:
            U = U_cur + ds * tang_U
            p = p_cur + ds * tang_p
            try:
                converged = _arc_corrector(
                    grid, U, p, U_cur, p_cur, tang_U, tang_p, ds, omega,
                    scale_u, tol,
                )
            except (NoConvergenceError, JacobianSingularError):
                converged = None
            if converged is not None:
                break
            ds *= 0.5
        if converged is None:
            termination = "residual-failure"
            break
        state, iters = converged
        if not state.positive:
            termination = "positivity-failure"
            break
        dp_new = state.p - p_cur
        if dp_new * dp_prev < 0:
            folds += 1
        if dp_new != 0.0:
            dp_prev = dp_new
        s += xnorm(state.values - U_cur, dp_new)
        points.append(accept(state, s))
        if folds >= max_folds:
            termination = "fold-count-limit"
            break
        if state.asymmetry < RADIAL_RETURN_TOL * scale_u:
            termination = "returned-to-radial"
            break
        nrm = xnorm(state.values - U_cur, dp_new)
        tang_U = (state.values - U_cur) / nrm
        tang_p = dp_new / nrm
        U_cur, p_cur = state.values, state.p
        if iters <= 3:
            ds = min(ds * 1.4, 4.0 * step)

    return Branch(
        grid=grid,
        origin_p=p_star,
        origin_p_scan=origin.p_bar,
        points=tuple(points),
        termination=termination,
        folds=folds,
    )


def _arc_corrector(
    grid, U, p, U_ref, p_ref, tang_U, tang_p, ds, omega, scale_u, tol, max_iter=12
):
    """Bordered Newton corrector for one pseudo-arclength step.

    Returns (state, iterations) or raises on failure; the arclength
    constraint <tang, X - X_ref>_scaled = ds is satisfied to solver
    tolerance at acceptance.
    """
    crow = (tang_U * omega / scale_u ** 2).ravel()
    scale = max(1.0, scale_u)
    for it in range(max_iter):
        R, _ = residual(p, U, grid)
        arc = (
            float(np.sum(tang_U * (U - U_ref) * omega)) / scale_u ** 2
            + tang_p * (p - p_ref)
            - ds
        )
        if np.linalg.norm(R.ravel()) + abs(arc) < tol * scale:
            state = _make_state(grid, p, U)
            return state, it
        J = _jacobian(grid, p, U)
        dU, dp = _bordered_solve(
            J, _dresidual_dp(grid, p, U), crow, tang_p, -R.ravel(), -arc
        )
        U = U + dU.reshape(U.shape)
        p = p + dp
    raise NoConvergenceError("arclength corrector did not converge")
