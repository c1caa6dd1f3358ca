import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import solve_bvp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from henon import (
    HenonParams,
    derived_functions,
    graded_mesh,
    integrate_normalized,
    solve_radial,
)
from henon.errors import NoZeroFoundError, SolverError

# frozen oracle values for (N=3, alpha=1, p=2):
#   R0 from two independent integrators agreeing to ~1.5e-11
#   sup from the scaling identity, confirmed by direct BVP collocation
R0_312 = 3.2101956532
SUP_312 = 33.08220946


def rk4_first_zero(N, alpha, p, h=2e-4):
    """Fixed-step classical RK4 for the normalized IVP, independent of scipy's
    adaptive integrator; the crossing is refined on a cubic Hermite model."""

    def f(r, y):
        return np.array(
            [y[1], -(N - 1) / r * y[1] - r ** alpha * np.sign(y[0]) * abs(y[0]) ** p]
        )

    r = 1e-6
    y = np.array(
        [1 - r ** (2 + alpha) / ((2 + alpha) * (N + alpha)),
         -(r ** (1 + alpha)) / (N + alpha)]
    )
    prev = (r, y.copy())
    while y[0] > 0:
        prev = (r, y.copy())
        k1 = f(r, y)
        k2 = f(r + h / 2, y + h / 2 * k1)
        k3 = f(r + h / 2, y + h / 2 * k2)
        k4 = f(r + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        r += h
    (ra, ya), (rb, yb) = prev, (r, y)
    model = CubicHermiteSpline([ra, rb], [ya[0], yb[0]], [ya[1], yb[1]])
    return brentq(lambda x: float(model(x)), ra, rb, xtol=1e-14)


def test_series_start_derivative_limit():
    # v'(r)/r^alpha+1 -> -1/(N+alpha): for N=3, alpha=1 the ratio v'/r^2 -> -1/4
    norm = integrate_normalized(HenonParams(3, 1.0, 2.0))
    r = np.array([2e-6, 1e-5, 1e-4])
    _, vp, _ = norm.evaluate(r)
    assert_allclose(vp / r ** 2, -0.25, rtol=1e-4)


def test_no_zero_at_and_above_critical():
    for p in (7.0, 7.5):
        norm = integrate_normalized(HenonParams(3, 1.0, p), r_max=1e3)
        assert norm.first_zero is None
        assert norm.v[-1] > 0
        with pytest.raises(NoZeroFoundError):
            solve_radial(HenonParams(3, 1.0, p), normalized=norm)


def test_first_zero_cross_integrator():
    norm = integrate_normalized(HenonParams(3, 1.0, 2.0))
    r0_fixed = rk4_first_zero(3, 1.0, 2.0)
    assert abs(norm.first_zero - r0_fixed) / r0_fixed < 1e-8
    assert_allclose(norm.first_zero, R0_312, rtol=1e-9)


def test_sup_norm_scaling_identity(profile_p2):
    # sup = R0^{(2+alpha)/(p-1)} = R0^3 at p = 2
    assert_allclose(profile_p2.sup_norm, profile_p2.first_zero ** 3, rtol=1e-13)
    assert_allclose(profile_p2.sup_norm, SUP_312, rtol=1e-8)


def test_sup_norm_against_bvp_collocation(profile_p2):
    """Direct two-point collocation solve of the untransformed problem."""
    N, alpha, p = 3, 1.0, 2.0

    def fun(r, y):
        return np.vstack([y[1], -(r ** alpha) * np.sign(y[0]) * np.abs(y[0]) ** p])

    def bc(ya, yb):
        return np.array([ya[1], yb[0]])

    S = np.array([[0.0, 0.0], [0.0, -(N - 1)]])
    x = np.linspace(0, 1, 200)
    sup = None
    for amplitude in (10.0, 30.0, 50.0):
        y = np.vstack([amplitude * (1 - x ** 2), -2 * amplitude * x])
        sol = solve_bvp(fun, bc, x, y, S=S, tol=1e-10, max_nodes=100000)
        if sol.success and sol.sol(0.0)[0] > 1.0:
            sup = sol.sol(0.0)[0]
            break
    assert sup is not None, "collocation oracle failed to find the positive solution"
    assert_allclose(profile_p2.sup_norm, sup, rtol=1e-8)


def test_residual_bound(profile_p2, profile_p65):
    for prof in (profile_p2, profile_p65):
        assert prof.residual < 1e-8  # scaled by sup^p inside the solver


def test_profile_invariants(profile_p2):
    prof = profile_p2
    r = prof.mesh
    assert prof.u[0] == prof.sup_norm
    assert prof.u[-1] == 0.0
    assert prof.u_prime[0] == 0.0
    assert np.all(prof.u[:-1] > 0)
    assert np.all(prof.u_prime[1:] < 0)  # strictly decreasing, Hopf at r=1
    assert prof.u_prime[-1] < 0
    assert np.all(np.diff(r) > 0) and r[0] == 0.0 and r[-1] == 1.0


def test_derived_function_endpoints(profile_p2):
    prof = profile_p2
    p = prof.params.p
    assert np.all(prof.w[1:] > 0)
    # z(0) = 2/(p-1) u(0) > 0 and z(1) = u'(1) < 0
    assert_allclose(prof.z[0], 2 / (p - 1) * prof.sup_norm, rtol=1e-14)
    assert_allclose(prof.z[-1], prof.u_prime[-1], rtol=1e-14)
    assert prof.z[0] > 0 > prof.z[-1]
    signs = np.sign(prof.z)
    assert np.sum(signs[1:] * signs[:-1] < 0) == 1  # exactly one sign change


def test_barrier_properties(profile_p2, profile_p65):
    for prof in (profile_p2, profile_p65):
        g = prof.g
        assert g[0] == 1.0 and g[-1] == 0.0
        interior = g[1:-1]
        assert np.all(interior > 0) and np.all(interior < 1)
        assert interior.argmax() == 0  # maximum at the smallest positive radius
        assert interior[0] >= 1 - 1e-3


def test_barrier_series_matches_interior_formula(profile_p2):
    # the small-sigma expansion 1 - g = p sigma^{2+a}/((N+a)(N+2+2a)) must agree
    # with the direct ratio where both are accurate
    prof = profile_p2
    N, alpha, p = 3, 1.0, 2.0
    sigma = prof.first_zero * prof.mesh
    band = (sigma > 0.05) & (sigma < 0.3)
    gap_series = p * sigma[band] ** (2 + alpha) / ((N + alpha) * (N + 2 + 2 * alpha))
    assert_allclose(1.0 - prof.g[band], gap_series, rtol=2e-2)


def test_scaling_collapse():
    # independent horizon choices must give pointwise-identical profiles
    params = HenonParams(3, 1.0, 3.0)
    a = solve_radial(params, normalized=integrate_normalized(params, r_max=50.0))
    b = solve_radial(params)
    tol = 1e-10
    assert np.max(np.abs(a.u - b.u)) <= 10 * tol * a.sup_norm


def test_mesh_representation_convergence(profile_p2):
    """Order >= 1.9 convergence of the sampled representation under refinement.

    The solve itself is mesh-free (the mesh only samples the dense
    solution), so refinement is measured on the fidelity of the C^1
    interpolant rebuilt from the sampled values."""
    params = HenonParams(3, 1.0, 2.0)
    probes = np.linspace(0.05, 0.95, 311)
    ref = CubicHermiteSpline(profile_p2.mesh, profile_p2.u, profile_p2.u_prime)(probes)
    errs = []
    for n in (101, 201, 401):
        prof = solve_radial(params, mesh_size=n)
        vals = CubicHermiteSpline(prof.mesh, prof.u, prof.u_prime)(probes)
        errs.append(np.max(np.abs(vals - ref)))
    order1 = np.log2(errs[0] / errs[1])
    order2 = np.log2(errs[1] / errs[2])
    assert min(order1, order2) >= 1.9


def test_sup_overflow_guard():
    with pytest.raises(SolverError, match="overflow"):
        solve_radial(HenonParams(3, 1.0, 1.0005))


def test_graded_mesh_shape():
    mesh = graded_mesh(101)
    assert len(mesh) == 101
    assert mesh[0] == 0.0 and mesh[-1] == 1.0
    spacing = np.diff(mesh)
    assert spacing.min() > 0
    # clustering at both ends
    assert spacing[0] < spacing[len(spacing) // 2] / 10
    assert spacing[-1] < spacing[len(spacing) // 2] / 10


def test_derived_functions_idempotent(profile_p2):
    again = derived_functions(profile_p2)
    assert_allclose(again.g, profile_p2.g, rtol=0, atol=0)
    assert_allclose(again.z, profile_p2.z, rtol=0, atol=0)
