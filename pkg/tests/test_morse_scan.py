import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.interpolate import CubicSpline

from henon import (
    HenonParams,
    ModeProblem,
    default_grid,
    find_degeneracy_points,
    quadform_R4,
    quadform_terms,
    random_radial_test_functions,
    scan,
    solve_mode_spectrum,
)
from henon.errors import ParameterError

# frozen regression location of the Morse-index changing point (N=3, alpha=1),
# from the first converged grid-extrapolated computation
P_BAR_312 = 2.0486077


@pytest.fixture(scope="module")
def scan_coarse():
    return scan(3, 1.0, grid=default_grid(3, 1.0, num=15))


@pytest.fixture(scope="module")
def points_coarse(scan_coarse):
    return find_degeneracy_points(scan_coarse)


def test_default_grid_bounds():
    grid = default_grid(3, 1.0)
    assert len(grid) == 101
    assert grid[0] == pytest.approx(1.01)
    assert grid[-1] == pytest.approx(6.99)
    ratios = np.diff(np.log(grid - 1.0))
    assert_allclose(ratios, ratios[0], rtol=1e-10)  # geometric in p - 1


def test_grid_validation():
    with pytest.raises(ParameterError):
        scan(3, 1.0, grid=np.array([0.9, 2.0]))
    with pytest.raises(ParameterError):
        scan(3, 1.0, grid=np.array([2.0, 7.0]))


def test_scan_rows(scan_coarse):
    rows = scan_coarse.rows
    assert len(rows) == 15
    assert all(a.p < b.p for a, b in zip(rows, rows[1:]))
    assert rows[0].morse_index == 1  # near p = 1
    assert rows[-1].morse_index == 4  # near p_alpha: N + 1
    for row in rows:
        assert row.morse_index in (1, 4) or row.degenerate
        assert row.sup_norm > 0
    assert scan_coarse.failures == ()


def test_lambda11_endpoint_signs(scan_coarse):
    rows = scan_coarse.rows
    assert rows[0].lambda_11 > 1.0  # nondegenerate, index 1 end
    assert rows[-1].lambda_11 < 1.0  # index N+1 end


def test_changing_point_found(points_coarse):
    changing = [pt for pt in points_coarse if pt.changing]
    assert len(changing) % 2 == 1
    pt = changing[0]
    assert pt.bracket[0] < pt.p_bar < pt.bracket[1]
    assert abs(pt.lambda_gap) < 1e-8
    assert abs(pt.p_bar - P_BAR_312) < 1e-3


def test_changing_point_kernel(points_coarse):
    pt = [q for q in points_coarse if q.changing][0]
    psi = pt.kernel
    assert psi[0] == 0.0 and psi[-1] == 0.0  # Dirichlet at both ends for k=1
    interior = psi[1:-1]
    assert np.all(interior > 0)  # first eigenfunction: no interior zero


def test_root_stability_across_grids(scan_coarse):
    fine = scan(3, 1.0, grid=default_grid(3, 1.0, num=31))
    pts_a = [pt for pt in find_degeneracy_points(scan_coarse) if pt.changing]
    pts_b = [pt for pt in find_degeneracy_points(fine) if pt.changing]
    assert len(pts_a) == len(pts_b)
    for a, b in zip(pts_a, pts_b):
        assert abs(a.p_bar - b.p_bar) <= 1e-4


def test_quadform_equality_case(profile_p2):
    t1, t2, t3 = quadform_terms(profile_p2, profile_p2.u, profile_p2.u_prime)
    scale = t1 + abs(t2) + t3
    assert abs(t1 - t2 + t3) / scale <= 1e-9


def test_quadform_nonnegative_random(profile_p2, profile_p5):
    for prof in (profile_p2, profile_p5):
        for v, vp in random_radial_test_functions(25, seed=11):
            t1, t2, t3 = quadform_terms(prof, v, vp)
            scale = t1 + abs(t2) + t3
            assert (t1 - t2 + t3) >= -1e-8 * scale


def test_quadform_second_radial_eigenfunction(profile_p2):
    """Q(psi_20) = (Lambda_20 - 1) p int r^{N-1+a} u^{p-1} psi^2 = Lambda_20 - 1
    for the normalized second radial eigenfunction."""
    spec = solve_mode_spectrum(ModeProblem(profile_p2, 0), 2)
    spline = CubicSpline(spec.mesh, spec.eigenfunctions[:, 1])
    value = quadform_R4(profile_p2, spline, spline.derivative())
    assert value > 0
    assert_allclose(value, spec.eigenvalues[1] - 1.0, rtol=1e-4)


def test_random_test_functions_reproducible():
    a = random_radial_test_functions(3, seed=5)
    b = random_radial_test_functions(3, seed=5)
    r = np.linspace(0.0, 1.0, 101)
    for (va, _), (vb, _) in zip(a, b):
        assert_allclose(va(r), vb(r), rtol=0, atol=0)


def test_random_test_functions_vanish_at_boundary_and_derivative():
    for v, vp in random_radial_test_functions(5, seed=2):
        assert abs(v(1.0)) < 1e-14
        r = np.linspace(0.01, 0.99, 57)
        h = 1e-6
        fd = (v(r + h) - v(r - h)) / (2 * h)
        assert_allclose(vp(r), fd, rtol=1e-6, atol=1e-8)
