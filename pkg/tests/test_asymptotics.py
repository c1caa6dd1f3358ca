import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import brentq
from scipy.special import airy

from henon import (
    HenonParams,
    LimitProfile,
    blowup_table,
    emden_fowler,
    rescale_profile,
    solve_radial,
    verify_p_to_1,
    weighted_first_eigen,
)
from henon.asymptotics import weighted_first_eigen_shooting

# For N=3, alpha=1 the weighted eigenproblem -(r^2 phi')' = lambda r^3 phi
# maps to the Airy equation y'' + lambda r y = 0 under phi = y/r, so
# lambda_1 = t1^3 with t1 the first zero of Bi(0) Ai(-t) - Ai(0) Bi(-t).
# Value computed once from that closed form and frozen here.
LAMBDA1_31 = 18.956265591373203


def airy_lambda1():
    ai0, _, bi0, _ = airy(0.0)

    def cross(t):
        ai, _, bi, _ = airy(-t)
        return bi0 * ai - ai0 * bi

    return brentq(cross, 1.0, 4.0, xtol=1e-14) ** 3


def test_frozen_lambda1_matches_airy_closed_form():
    assert_allclose(airy_lambda1(), LAMBDA1_31, rtol=1e-14)


def test_weighted_first_eigen_two_discretizations():
    pair = weighted_first_eigen(3, 1.0, extrapolate=True)
    shoot = weighted_first_eigen_shooting(3, 1.0)
    assert abs(pair.lambda_1 - shoot) / shoot <= 1e-8  # 8-digit agreement
    assert_allclose(pair.lambda_1, LAMBDA1_31, rtol=1e-8)
    assert_allclose(shoot, LAMBDA1_31, rtol=1e-10)


def test_weighted_eigenfunction_shape():
    pair = weighted_first_eigen(3, 1.0)
    assert pair.phi_1[0] == 1.0
    assert pair.phi_1[-1] == 0.0
    assert np.all(pair.phi_1[:-1] > 0)  # no interior zero


def test_lambda_R_scaling_law():
    base = weighted_first_eigen(3, 1.0, R=1.0)
    double = weighted_first_eigen(3, 1.0, R=2.0)
    assert_allclose(double.lambda_1, base.lambda_1 / 2 ** 3, rtol=1e-12)
    # non-trivial version: different mesh sizes so the identity is not
    # satisfied merely by exact mesh scaling
    vals = []
    for R, n in ((0.5, 1501), (1.0, 2001), (2.0, 2501), (4.0, 3001)):
        pair = weighted_first_eigen(3, 1.0, R=R, mesh_size=n, extrapolate=True)
        vals.append(pair.lambda_1 * R ** 3)
    spread = (max(vals) - min(vals)) / LAMBDA1_31
    assert spread <= 1e-6


def test_p_to_one_table():
    report = verify_p_to_1(3, 1.0)
    assert report.converged  # deviations strictly decreasing
    devs = [row.deviation for row in report.rows]
    assert all(a > b for a, b in zip(devs, devs[1:]))
    dists = [row.sup_distance for row in report.rows]
    assert all(a > b for a, b in zip(dists, dists[1:]))
    last = report.rows[-1]
    assert last.p == 1.001
    assert last.deviation / report.lambda_1 < 0.05
    assert abs(report.extrapolated - report.lambda_1) <= 0.01 * report.lambda_1
    assert report.morse_index_smallest_p == 1


def test_rescaled_profile_bound_and_convergence():
    dists = []
    for p in (6.0, 6.5, 6.9):
        prof = solve_radial(HenonParams(3, 1.0, p))
        resc = rescale_profile(prof)
        assert resc.u_tilde[0] == 1.0
        assert resc.u_tilde[-1] == 0.0
        assert resc.bound_margin <= 1e-8
        assert_allclose(resc.mu_p, prof.first_zero, rtol=1e-9)
        dists.append(resc.sup_distance)
    assert dists[0] > dists[1] > dists[2]


def test_limit_profile_values():
    U = LimitProfile(3, 1.0)
    assert U(0.0) == 1.0
    x = np.linspace(0.0, 30.0, 500)
    vals = U(x)
    assert np.all(np.diff(vals) < 0)
    assert np.all(vals > 0)
    # closed form at a hand-checked point: U(2) = (1 + 8/4)^{-1/3} = 3^{-1/3}
    assert_allclose(U(2.0), 3.0 ** (-1.0 / 3.0), rtol=1e-14)


def test_emden_fowler_transform(profile_p65):
    resc = rescale_profile(profile_p65)
    ef = emden_fowler(resc, seed=0)
    assert ef.kappa == 5.0  # (2(N-1)+alpha)/(N-2) at N=3, alpha=1
    assert ef.bound_margin <= 1e-8
    assert ef.pullback_error <= 1e-12  # barrier pulls back to U exactly
    assert ef.y_limit >= 1.0 - 1e-6  # y -> 1 as t -> infinity (x -> 0)


def test_emden_fowler_pullback_is_algebraic_identity():
    # check the identity at another (N, alpha): kappa - 2 = (2+alpha)/(N-2)
    # and 1/(kappa-1) = C_alpha (N-2)^2 make the pullback exact
    N, alpha = 5, 0.5
    params = HenonParams(N, alpha, 2.0)
    kappa, C = params.kappa, params.C_alpha
    assert_allclose(kappa - 2.0, (2 + alpha) / (N - 2), rtol=1e-15)
    assert_allclose(1.0 / (kappa - 1.0), C * (N - 2) ** 2, rtol=1e-15)
    cfac = (N - 2) ** (2.0 * (N - 2) / (2.0 + alpha))
    rng = np.random.default_rng(3)
    x = rng.uniform(1e-3, 50.0, size=100)
    t = cfac * x ** (-(N - 2.0))
    barrier = (1.0 + 1.0 / ((kappa - 1.0) * t ** (kappa - 2.0))) ** (
        -1.0 / (kappa - 2.0)
    )
    assert_allclose(barrier, LimitProfile(N, alpha)(x), rtol=1e-12)


def test_blowup_table():
    table = blowup_table(3, 1.0, (6.0, 6.5, 6.9))
    assert table.tail_increasing
    sups = [row.sup_norm for row in table.rows]
    assert sups[0] < sups[1] < sups[2]
    # scaling identity against the full solver, row by row
    for row in table.rows:
        prof = solve_radial(HenonParams(3, 1.0, row.p))
        assert_allclose(row.sup_norm, prof.sup_norm, rtol=1e-12)


def test_sup_norm_bounded_on_compact_subsets():
    table = blowup_table(3, 1.0, (3.0, 4.0, 5.0))
    assert all(row.sup_norm < 100.0 for row in table.rows)
