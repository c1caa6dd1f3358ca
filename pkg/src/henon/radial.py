"""High-accuracy radial solver for -Delta u = |x|^alpha u^p on the unit ball.

In radial coordinates the problem reads

    -(r^{N-1} u')' = r^{N-1+alpha} u^p,   u'(0) = 0,  u(1) = 0,  u > 0.

Instead of shooting on u(0), the two-point problem is reduced to a single
normalized initial value problem: let v solve

    v'' + (N-1)/r v' + r^alpha v^p = 0,   v(0) = 1, v'(0) = 0,

and let R0 be its first zero.  The scaling map

    u(r) = a v(R0 r),   a = R0^{(2+alpha)/(p-1)},

produces the unique positive radial solution with u(1) = 0, because
v(R0 r) rescales the weight by R0^{2+alpha} and the nonlinearity by
a^{p-1}, and the two factors cancel exactly when a^{p-1} = R0^{2+alpha}.
In particular sup u = u(0) = a and sup^{p-1} = R0^{2+alpha}.

The coordinate singularity at r = 0 is handled by starting the integration
at a small radius r0 with the two-term series obtained by integrating the
equation once:

    v(r)  = 1 - r^{2+alpha} / ((2+alpha)(N+alpha)) + O(r^{2(2+alpha)}),
    v'(r) = -r^{1+alpha} / (N+alpha) + O(r^{3+2 alpha}).

The integrator additionally carries the cumulative flux integral
I(r) = int_0^r s^{N-1+alpha} v^p ds, whose defect against -r^{N-1} v'
is an a-posteriori residual of the computed profile (the equation in
first-integral form), independent of the time stepper's own error model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DegenerateProfileError,
    NoZeroFoundError,
    ParameterError,
    SolverError,
    StepFailureError,
)
from .params import HenonParams

SERIES_RADIUS = 1e-6        # integration start radius
SERIES_EVAL_RADIUS = 1e-3   # evaluation switch-over: below this the origin
#                             series beats the integrator's absolute error
#                             (series error ~ r^{2(2+alpha)}, dense ~ tol)
DEFAULT_IVP_TOL = 1e-10     # relative tolerance of the adaptive integrator
DEFAULT_RESIDUAL_TOL = 1e-8  # accepted profile residual, relative to sup^p
DEFAULT_MESH_SIZE = 2001
_HORIZON_START = 16.0
_HORIZON_CAP = 1e7
_LOG_FLOAT_MAX = math.log(np.finfo(float).max) - 2.0


def graded_mesh(n: int = DEFAULT_MESH_SIZE) -> np.ndarray:
    """Cosine-graded mesh on [0, 1], clustered at both endpoints."""
    if n < 3:
        raise ParameterError(f"mesh needs at least 3 points, got {n}")
    return 0.5 * (1.0 - np.cos(np.pi * np.arange(n) / (n - 1)))


def _odd_power(v: np.ndarray | float, p: float):
    """sign(v) |v|^p, the odd extension used past roundoff-level zero crossings."""
    return np.sign(v) * np.abs(v) ** p


def _series_v(r, N: int, alpha: float):
    return 1.0 - r ** (2 + alpha) / ((2 + alpha) * (N + alpha))


def _series_v_prime(r, N: int, alpha: float):
    return -(r ** (1 + alpha)) / (N + alpha)


@dataclass(frozen=True)
class NormalizedProfile:
    """Solution of the normalized IVP with v(0) = 1, up to its first zero.

    ``mesh``/``v``/``v_prime`` are the accepted integrator steps; dense
    evaluation anywhere in [r0, horizon] is available through
    :meth:`evaluate`.  ``first_zero`` is None when v stayed positive up to
    the integration horizon (which happens exactly for p >= p_alpha).
    """

    params: HenonParams
    mesh: np.ndarray
    v: np.ndarray
    v_prime: np.ndarray
    first_zero: float | None
    horizon: float
    _sol: object = field(repr=False, compare=False)

    def evaluate(self, r):
        """Return (v, v', I) at radii r, using the origin series below r0."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        N, alpha = self.params.N, self.params.alpha
        top = self.first_zero if self.first_zero is not None else self.horizon
        out = self._sol(np.clip(r, SERIES_RADIUS, top))
        v, vp, integ = out[0].copy(), out[1].copy(), out[2].copy()
        tiny = r < SERIES_EVAL_RADIUS
        if np.any(tiny):
            v[tiny] = _series_v(r[tiny], N, alpha)
            vp[tiny] = _series_v_prime(r[tiny], N, alpha)
            integ[tiny] = r[tiny] ** (N + alpha) / (N + alpha)
        return v, vp, integ

    def flux_defect(self, r) -> np.ndarray:
        """Residual r^{N-1} v' + I(r) of the once-integrated equation."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        v, vp, integ = self.evaluate(r)
        return r ** (self.params.N - 1) * vp + integ


@dataclass(frozen=True)
class RadialProfile:
    """The positive radial solution u_p on [0, 1] with derived functions.

    ``w = -u'`` is positive on (0, 1]; ``z = r u' + 2/(p-1) u`` changes sign
    exactly once, with z(0) > 0 and z(1) = u'(1) < 0; the barrier

        g(r) = r^{1+alpha} u^p / ((N + alpha) w)

    takes values in (0, 1) on (0, 1), tends to 1 as r -> 0+ and vanishes
    at r = 1.  ``residual`` is the max over the mesh of the first-integral
    defect of u, divided by sup_norm^p.
    """

    params: HenonParams
    mesh: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray
    sup_norm: float
    first_zero: float
    residual: float
    w: np.ndarray | None = None
    z: np.ndarray | None = None
    g: np.ndarray | None = None

    @property
    def normalized(self) -> np.ndarray:
        """u / sup_norm, the profile with unit maximum."""
        return self.u / self.sup_norm


def integrate_normalized(
    params: HenonParams,
    r_max: float | None = None,
    tol: float = DEFAULT_IVP_TOL,
) -> NormalizedProfile:
    """Integrate the normalized IVP until v crosses zero or reaches the horizon.

    With ``r_max=None`` the horizon grows geometrically until a zero is
    found (or a hard cap is hit), which accommodates the divergence of the
    first zero R0 as p approaches p_alpha.  Reaching a user-supplied
    ``r_max`` without a zero is not an error; ``first_zero`` is then None.
    """
    if r_max is not None and r_max <= 0:
        raise ParameterError(f"integration horizon must be positive, got {r_max}")
    if tol <= 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    N, alpha, p = params.N, params.alpha, params.p
    r0 = SERIES_RADIUS
    y0 = [
        _series_v(r0, N, alpha),
        _series_v_prime(r0, N, alpha),
        r0 ** (N + alpha) / (N + alpha),
    ]

    def rhs(r, y):
        f = _odd_power(y[0], p)
        return (y[1], -(N - 1) / r * y[1] - r ** alpha * f, r ** (N - 1 + alpha) * f)

    def crossing(r, y):
        return y[0]

    crossing.terminal = True
    crossing.direction = -1

    horizon = r_max if r_max is not None else _HORIZON_START
    while True:
        sol = solve_ivp(
            rhs,
            (r0, horizon),
            y0,
            method="DOP853",
            rtol=tol,
            atol=tol * 1e-2,
            events=crossing,
            dense_output=True,
        )
        if sol.status == -1:
            raise StepFailureError(f"integrator failed at p={p}: {sol.message}")
        if len(sol.t_events[0]) or r_max is not None:
            break
        if horizon > _HORIZON_CAP:
            break
        horizon *= 8.0

    if len(sol.t_events[0]):
        first_zero = float(sol.t_events[0][0])
    elif np.min(sol.y[0]) <= tol:
        # tangential touch within tolerance: impossible analytically, so it
        # can only be roundoff; treat the minimizer as the zero
        first_zero = float(sol.t[np.argmin(sol.y[0])])
    else:
        first_zero = None

    return NormalizedProfile(
        params=params,
        mesh=sol.t.copy(),
        v=sol.y[0].copy(),
        v_prime=sol.y[1].copy(),
        first_zero=first_zero,
        horizon=float(sol.t[-1]),
        _sol=sol.sol,
    )


def solve_radial(
    params: HenonParams,
    tol: float = DEFAULT_IVP_TOL,
    mesh_size: int = DEFAULT_MESH_SIZE,
    normalized: NormalizedProfile | None = None,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> RadialProfile:
    """Positive radial solution with u(1) = 0, via the scaling reduction.

    Raises ``NoZeroFoundError`` when the normalized run produced no first
    zero (p >= p_alpha, or an explicit horizon was too small), and
    ``SolverError`` when the rescaling amplitude R0^{(2+alpha)/(p-1)}
    overflows double precision (p extremely close to 1; use the normalized
    profile and the identity sup^{p-1} = R0^{2+alpha} in that regime).
    """
    if params.p <= 1:
        raise ParameterError(f"exponent p must exceed 1, got {params.p}")
    N, alpha, p = params.N, params.alpha, params.p
    if normalized is None:
        normalized = integrate_normalized(params, tol=tol)
    if normalized.first_zero is None:
        raise NoZeroFoundError(
            f"normalized profile has no zero up to r={normalized.horizon:g} "
            f"(p={p:g}, p_alpha={params.p_alpha:g})"
        )
    R0 = normalized.first_zero
    log_a = (2 + alpha) / (p - 1) * math.log(R0)
    if log_a * max(p, 1.0) > _LOG_FLOAT_MAX:
        raise SolverError(
            f"sup-norm R0^((2+alpha)/(p-1)) = exp({log_a:.1f}) overflows float64; "
            "work with the normalized profile for p this close to 1"
        )
    a = math.exp(log_a)

    r = graded_mesh(mesh_size)
    sigma = R0 * r
    v, vp, _ = normalized.evaluate(sigma)
    u = a * v
    u_prime = a * R0 * vp
    u[-1] = 0.0
    u[0] = a
    u_prime[0] = 0.0

    defect = normalized.flux_defect(sigma[1:])
    residual = float(np.max(np.abs(defect)) / R0 ** (N + alpha))
    if residual > residual_tol:
        raise SolverError(
            f"profile residual {residual:.3e} exceeds accepted bound {residual_tol:.1e}"
        )

    profile = RadialProfile(
        params=params,
        mesh=r,
        u=u,
        u_prime=u_prime,
        sup_norm=a,
        first_zero=R0,
        residual=residual,
    )
    return derived_functions(profile)


def derived_functions(profile: RadialProfile) -> RadialProfile:
    """Populate w = -u', z = r u' + 2/(p-1) u and the barrier g.

    The barrier is evaluated in normalized variables,

        g = sigma^{1+alpha} v^p / ((N+alpha)(-v')),   sigma = R0 r,

    which is exact because the scaling factors cancel.  Near the origin
    -v' carries the integrator's absolute error against a value of size
    sigma^{1+alpha}, so below a switch radius the expansion

        1 - g = p sigma^{2+alpha} / ((N+alpha)(N+2+2alpha)) + O(sigma^{2(2+alpha)})

    is used instead (obtained by dividing the two-term series of v^p and
    -v'), clamped to keep g strictly below 1: the true margin drops under
    machine epsilon at the innermost mesh points of the graded mesh.
    """
    params = profile.params
    N, alpha, p = params.N, params.alpha, params.p
    r, u, up = profile.mesh, profile.u, profile.u_prime
    w = -up
    if u[0] <= 0 or np.any(w[1:] <= 0):
        raise DegenerateProfileError(
            f"u' fails to be negative on (0,1] for p={params.p:g}"
        )
    z = r * up + 2.0 / (p - 1.0) * u

    R0 = profile.first_zero
    a = profile.sup_norm
    sigma = R0 * r
    g = np.empty_like(r)
    switch = 0.05  # series error ~ sigma^{2(2+alpha)}, -v' noise ~ tol/sigma^{1+alpha}
    interior = sigma >= switch
    vv = u[interior] / a
    vvp = up[interior] / (a * R0)
    g[interior] = sigma[interior] ** (1 + alpha) * vv ** p / ((N + alpha) * (-vvp))
    series = ~interior
    gap = p * sigma[series] ** (2 + alpha) / ((N + alpha) * (N + 2 + 2 * alpha))
    g[series] = 1.0 - np.maximum(gap, 2.0 ** -52)
    g[0] = 1.0  # limit value at the origin
    g[-1] = 0.0
    return replace(profile, w=w, z=z, g=g)
