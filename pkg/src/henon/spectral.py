"""Weighted Sturm-Liouville spectra of the linearization, mode by mode.

Linearizing the problem at the radial solution u_p and separating variables
along spherical harmonics of degree k reduces the eigenvalue problem

    -Delta psi = Lambda p |x|^alpha u_p^{p-1} psi,   psi = 0 on the boundary,

to the family of one-dimensional problems on (0, 1)

    -(r^{N-1} psi')' + mu_k r^{N-3} psi = Lambda p r^{N-1+alpha} u_p^{p-1} psi,

with mu_k = k (k + N - 2), Neumann condition psi'(0) = 0 for k = 0 and
Dirichlet psi(0) = 0 for k >= 1 (forced by the mu_k r^{N-3} term), and
psi(1) = 0 always.  Each mode has a sequence of simple eigenvalues
Lambda_{1,k} < Lambda_{2,k} < ..., and the Morse index of u_p equals

    sum_k m(k) * #{i : Lambda_{i,k} < 1},

with m(k) the dimension of the degree-k spherical harmonic space.

Discretization: symmetric finite-volume scheme on a quasi-uniform mesh
graded toward the solution core (width ~ 1/R0), stiffness tridiagonal and
weight diagonal, solved by shift-invert Lanczos at sigma = 0.  Direct
tridiagonal reduction via W^{-1/2} is deliberately avoided: the weight
vanishes at r = 1 and the cell volumes vanish at r = 0, so the reduced
matrix norm can reach 1e14 and the low eigenvalues would drown in
roundoff.  Shift-inversion keeps the low end of the spectrum at full
accuracy regardless of how large the high end grows.

An independent cross-check, :func:`prufer_count`, counts eigenvalues below
a threshold by oscillation: the number of interior zeros of the solution
of the threshold-frozen initial value problem started with the regular
behavior at the origin (psi ~ 1 for k = 0, psi ~ r^k for k >= 1), i.e. the
number of half-turns of the Pruefer phase.  It shares nothing with the
matrix discretization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.sparse.linalg import eigsh

from .errors import (
    DiscretizationFailureError,
    ParameterError,
    StepFailureError,
    TruncationUncertifiedError,
)
from .params import HenonParams
from .radial import RadialProfile

DEFAULT_SPECTRAL_MESH = 2001
DEFAULT_EIG_RESIDUAL_TOL = 1e-8
DEGENERACY_TOL = 1e-8

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(5)


def angular_eigenvalue(k: int, N: int) -> float:
    """Eigenvalue k (k + N - 2) of the Laplace-Beltrami operator on S^{N-1}."""
    if k < 0:
        raise ParameterError(f"mode index must be >= 0, got {k}")
    if N < 3:
        raise ParameterError(f"dimension must be >= 3, got {N}")
    return float(k * (k + N - 2))


def multiplicity(k: int, N: int) -> int:
    """Dimension of the space of spherical harmonics of degree k on S^{N-1}."""
    if k < 0:
        raise ParameterError(f"mode index must be >= 0, got {k}")
    if k < 2:
        return 1 if k == 0 else N
    return math.comb(N + k - 1, k) - math.comb(N + k - 3, k - 2)


def spectral_mesh(n: int, core_scale: float) -> np.ndarray:
    """Sinh-graded mesh on [0, 1] refined on [0, core_scale], quasi-uniform elsewhere."""
    s = min(max(core_scale, 1e-3), 0.5)
    c = np.arcsinh(1.0 / s)
    mesh = s * np.sinh(c * np.arange(n) / (n - 1))
    mesh[-1] = 1.0
    return mesh


@dataclass(frozen=True)
class ModeProblem:
    """One angular mode of the linearized operator at a radial profile."""

    profile: RadialProfile
    k: int
    mu_k: float = field(init=False)
    bc_origin: str = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu_k", angular_eigenvalue(self.k, self.profile.params.N))
        object.__setattr__(self, "bc_origin", "neumann" if self.k == 0 else "dirichlet")


@dataclass(frozen=True)
class ModeSpectrum:
    """Lowest eigenvalues and eigenfunctions of one mode.

    Eigenfunctions are sampled on the solver's own mesh and normalized so
    that the discrete form of p int r^{N-1+alpha} u^{p-1} psi^2 dr equals 1;
    orthogonality holds in the same discrete inner product (``weights``).
    Sign convention: the lobe adjacent to r = 1 is positive.
    """

    k: int
    mu_k: float
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray  # shape (len(mesh), num_eigs)
    mesh: np.ndarray
    weights: np.ndarray
    residuals: np.ndarray

    def interior_zeros(self, i: int) -> int:
        """Number of interior sign changes of the i-th eigenfunction (1-based)."""
        psi = self.eigenfunctions[1:-1, i - 1]
        s = np.sign(psi[np.abs(psi) > 0])
        return int(np.sum(s[1:] * s[:-1] < 0))


@dataclass(frozen=True)
class MorseReport:
    """Morse index of u_p with the two-valued shortcut cross-check."""

    p: float
    lambda_11: float
    morse_index: int
    morse_index_shortcut: int
    degenerate: bool


# ---------------------------------------------------------------------------
# assembly and eigensolve
# ---------------------------------------------------------------------------


def _assemble_mode(mesh, N, alpha, p, mu, u_spline, weight_scale):
    """Tridiagonal stiffness (d, e) and diagonal weight W on the given mesh.

    Finite-volume closure: flux r^{N-1} psi' through face midpoints, exact
    cell integrals of the monomial coefficients, 5-point Gauss quadrature of
    the weight p r^{N-1+alpha} u^{p-1} with u from the profile's C^1
    interpolant.  Row/column 0 realizes the zero-flux (Neumann) closure at
    the origin; callers drop it for Dirichlet modes.
    """
    faces = 0.5 * (mesh[:-1] + mesh[1:])
    cond = faces ** (N - 1) / np.diff(mesh)
    cv_lo = np.concatenate(([0.0], faces))
    cv_hi = np.concatenate((faces, [mesh[-1]]))

    half = 0.5 * (cv_hi - cv_lo)
    pts = half[:, None] * _GAUSS_X[None, :] + 0.5 * (cv_lo + cv_hi)[:, None]
    uu = np.clip(u_spline(pts), 0.0, None)
    W = p * weight_scale * np.sum(
        pts ** (N - 1 + alpha) * uu ** (p - 1) * _GAUSS_W[None, :], axis=1
    ) * half

    diag = np.zeros(len(mesh))
    diag[:-1] += cond
    diag[1:] += cond
    if mu != 0.0:
        e = N - 2
        diag += mu * (cv_hi ** e - cv_lo ** e) / e
    return diag, -cond, W


def _lowest_eigenpairs(diag, off, W, num_eigs):
    """Lowest generalized eigenpairs of (tridiag(diag, off), diag(W)).

    Shift-invert at sigma = 0; the stiffness is symmetric positive definite
    so the factorization is safe and the low end of the pencil spectrum is
    resolved to roundoff of the inverted operator.
    """
    n = len(diag)
    if num_eigs >= n - 1:
        raise ParameterError(f"requested {num_eigs} eigenpairs from {n} unknowns")
    K = sp.diags([off, diag, off], [-1, 0, 1], format="csc")
    M = sp.diags(W, 0, format="csc")
    vals, vecs = eigsh(K, k=num_eigs, M=M, sigma=0.0, which="LM")
    order = np.argsort(vals)
    return vals[order], vecs[:, order], K, M


def _mode_spectrum_from_values(
    N: int,
    alpha: float,
    p: float,
    mesh_u: np.ndarray,
    u: np.ndarray,
    u_prime: np.ndarray,
    core_scale: float,
    k: int,
    num_eigs: int,
    mesh_size: int,
    weight_scale: float = 1.0,
    tol: float = DEFAULT_EIG_RESIDUAL_TOL,
) -> ModeSpectrum:
    """Mode spectrum from raw profile samples (shared with the asymptotics module,
    which passes normalized values together with weight_scale = sup^{p-1})."""
    mu = angular_eigenvalue(k, N)
    u_spline = CubicHermiteSpline(mesh_u, u, u_prime)

    size = mesh_size
    for attempt in range(2):
        mesh = spectral_mesh(size, core_scale)
        diag, off, W = _assemble_mode(mesh, N, alpha, p, mu, u_spline, weight_scale)
        if k == 0:
            d, e, ww = diag[:-1], off[:-1], W[:-1]
            lo, hi = 0, len(mesh) - 1
        else:
            d, e, ww = diag[1:-1], off[1:-1], W[1:-1]
            lo, hi = 1, len(mesh) - 1
        vals, vecs, K, M = _lowest_eigenpairs(d, e, ww, num_eigs)

        resid = np.empty(num_eigs)
        for i in range(num_eigs):
            x = vecs[:, i]
            resid[i] = np.linalg.norm(K @ x - vals[i] * (M @ x)) / np.linalg.norm(K @ x)
        if np.max(resid) <= tol:
            break
        size = 2 * size - 1
    else:
        raise DiscretizationFailureError(
            f"mode k={k}: eigenpair residual {np.max(resid):.2e} > {tol:.1e} "
            "after one mesh refinement"
        )

    funcs = np.zeros((len(mesh), num_eigs))
    funcs[lo:hi] = vecs
    for i in range(num_eigs):
        # positive lobe next to r = 1
        col = funcs[:, i]
        big = np.nonzero(np.abs(col) > 0.1 * np.abs(col).max())[0]
        if col[big[-1]] < 0:
            funcs[:, i] = -col

    full_w = np.zeros(len(mesh))
    full_w[lo:hi] = ww
    spectrum = ModeSpectrum(
        k=k,
        mu_k=mu,
        eigenvalues=vals,
        eigenfunctions=funcs,
        mesh=mesh,
        weights=full_w,
        residuals=resid,
    )
    for i in range(1, num_eigs + 1):
        if spectrum.interior_zeros(i) != i - 1:
            raise DiscretizationFailureError(
                f"mode k={k}: eigenfunction {i} has {spectrum.interior_zeros(i)} "
                f"interior zeros, expected {i - 1}"
            )
    return spectrum


def solve_mode_spectrum(
    problem: ModeProblem,
    num_eigs: int,
    mesh_size: int = DEFAULT_SPECTRAL_MESH,
    tol: float = DEFAULT_EIG_RESIDUAL_TOL,
) -> ModeSpectrum:
    """Lowest ``num_eigs`` eigenvalues of one angular mode at a radial profile."""
    if num_eigs < 1:
        raise ParameterError(f"num_eigs must be >= 1, got {num_eigs}")
    prof = problem.profile
    params = prof.params
    return _mode_spectrum_from_values(
        params.N,
        params.alpha,
        params.p,
        prof.mesh,
        prof.u,
        prof.u_prime,
        core_scale=3.0 / prof.first_zero,
        k=problem.k,
        num_eigs=num_eigs,
        mesh_size=mesh_size,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# oscillation-count oracle
# ---------------------------------------------------------------------------


def prufer_count(
    problem: ModeProblem,
    threshold: float,
    start_radius: float = 1e-5,
    tol: float = 1e-9,
) -> int:
    """Number of mode eigenvalues strictly below ``threshold``, by shooting.

    Integrates (psi, z = r^{N-1} psi') outward from the regular solution at
    the origin with Lambda frozen at the threshold and counts interior
    zeros of psi; by Sturm oscillation this equals the eigenvalue count.
    Outward integration is stable because the singular complementary
    solution r^{-(k+N-2)} decays away from the origin.
    """
    prof = problem.profile
    params = prof.params
    N, alpha, p = params.N, params.alpha, params.p
    k, mu = problem.k, problem.mu_k
    u_spline = CubicHermiteSpline(prof.mesh, prof.u, prof.u_prime)

    def weight(r):
        return threshold * p * r ** (N - 1 + alpha) * np.clip(u_spline(r), 0.0, None) ** (p - 1)

    def rhs(r, y):
        return (y[1] / r ** (N - 1), (mu * r ** (N - 3) - weight(r)) * y[0])

    # initial data scaled so psi(start) = 1 (the problem is linear and the
    # zero set is scale-free); the singular complementary solution decays
    # outward, so no renormalization is needed along the way
    d = start_radius
    if k == 0:
        y0 = [1.0, -threshold * p * prof.sup_norm ** (p - 1) * d ** (N + alpha) / (N + alpha)]
    else:
        y0 = [1.0, k * d ** (N - 2)]

    def crossing(r, y):
        return y[0]

    crossing.direction = 0

    sol = solve_ivp(
        rhs, (d, 1.0), y0, method="DOP853", rtol=tol, atol=1e-12, events=crossing
    )
    if sol.status == -1:
        raise StepFailureError(f"oscillation count integration failed: {sol.message}")
    zeros = sol.t_events[0]
    return int(np.sum(zeros < 1.0 - 1e-12))


# ---------------------------------------------------------------------------
# Morse index
# ---------------------------------------------------------------------------


def morse_index(
    profile: RadialProfile,
    k_max: int = 2,
    mesh_size: int = DEFAULT_SPECTRAL_MESH,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> MorseReport:
    """Morse index by the full harmonic count, with a truncation certificate.

    Counts eigenvalues below 1 for every mode k <= k_max, weighting mode k
    by the harmonic multiplicity m(k).  Truncation at k_max is certified by
    Lambda_{1,k_max} > 1: the first eigenvalue is strictly increasing in k
    (the Rayleigh quotient gains the positive mu_k term), so no higher mode
    can contribute.  The shortcut value is 1 if Lambda_{1,1} >= 1 and N+1
    otherwise; the two agree for alpha <= 1 away from degeneracy.
    """
    if k_max < 2:
        raise ParameterError(f"k_max must be >= 2, got {k_max}")
    params = profile.params
    N = params.N

    counts = {}
    lambda_11 = None
    for k in range(k_max + 1):
        num = 4
        while True:
            spec = solve_mode_spectrum(ModeProblem(profile, k), num, mesh_size=mesh_size)
            if spec.eigenvalues[-1] >= 1.0 or num >= 32:
                break
            num *= 2
        counts[k] = int(np.sum(spec.eigenvalues < 1.0))
        if k == 1:
            lambda_11 = float(spec.eigenvalues[0])
        if k == k_max and spec.eigenvalues[0] <= 1.0:
            raise TruncationUncertifiedError(
                f"Lambda_(1,{k_max}) = {spec.eigenvalues[0]:.6f} <= 1: "
                "mode truncation not certified, raise k_max"
            )

    index = sum(multiplicity(k, N) * c for k, c in counts.items())
    shortcut = 1 if lambda_11 >= 1.0 else N + 1
    return MorseReport(
        p=params.p,
        lambda_11=lambda_11,
        morse_index=index,
        morse_index_shortcut=shortcut,
        degenerate=abs(lambda_11 - 1.0) < degeneracy_tol,
    )
