import numpy as np
import pytest
from numpy.testing import assert_allclose

from henon import (
    continue_branch,
    default_grid,
    embed_radial,
    find_degeneracy_points,
    kernel_direction,
    make_grid,
    newton_solve,
    residual,
    scan,
    sector_crossing,
    sector_eigenvalue,
)
from henon.continuation import _jacobian


@pytest.fixture(scope="module")
def grid():
    # moderate resolution keeps the module fast; acceptance runs the default
    return make_grid(3, 1.0, nr=96, ntheta=33, core_scale=0.45)


@pytest.fixture(scope="module")
def changing_point():
    result = scan(3, 1.0, grid=default_grid(3, 1.0, num=9))
    return [pt for pt in find_degeneracy_points(result) if pt.changing][0]


@pytest.fixture(scope="module")
def branch(changing_point, grid):
    return continue_branch(changing_point, grid=grid, max_steps=25)


def test_grid_geometry(grid):
    assert grid.faces[0] == 0.0 and grid.faces[-1] == 1.0
    assert np.all(np.diff(grid.faces) > 0)
    assert np.all((grid.r > 0) & (grid.r < 1))
    assert np.all(np.diff(grid.xi) > 0)
    assert np.all(grid.wt > 0)
    # angular operator has the exact eigenpairs: constants and cos(theta)
    assert np.abs(grid.Ath @ np.ones(grid.ntheta)).max() < 1e-9
    assert np.abs(grid.Ath @ grid.xi - 2.0 * grid.xi).max() < 1e-9  # mu_1 = N-1


def test_trivial_state_residual(grid):
    zero = np.zeros(grid.shape)
    field, norm = residual(2.0, zero, grid)
    assert np.all(field == 0.0)
    assert norm == 0.0


def test_embedded_radial_consistency(grid):
    state = embed_radial(grid, 2.05)
    # the 2D operator restricted to radial fields is the 1D scheme, so the
    # embedded state keeps the 1D Newton residual
    assert state.residual_norm <= 1e-10
    assert state.asymmetry <= 1e-12 * state.sup_norm
    assert state.positive


def test_jacobian_symmetry(grid):
    state = embed_radial(grid, 2.3)
    J = _jacobian(grid, 2.3, state.values)
    gap = abs(J - J.T).max()
    assert gap <= 1e-12 * abs(J).max()


def test_sector_crossing_matches_scan(grid, changing_point):
    p_star = sector_crossing(grid, changing_point.p_bar - 0.05, changing_point.p_bar + 0.05)
    assert abs(p_star - changing_point.p_bar) <= 1e-4


def test_sector_kernel_is_simple(grid, changing_point):
    lam, _ = sector_eigenvalue(grid, changing_point.p_bar, k=1)
    assert abs(lam - 1.0) < 1e-3
    # one-dimensional kernel in the invariant class: the next sector
    # eigenvalue stays far from 1
    state = embed_radial(grid, changing_point.p_bar)
    import scipy.sparse as sp
    from scipy.sparse.linalg import eigsh

    u = state.values[:, 0]
    d, e = grid.stiffness_1d(2.0)
    K = sp.diags([e, d, e], [-1, 0, 1], format="csc")
    M = sp.diags(changing_point.p_bar * grid.Vra * u ** (changing_point.p_bar - 1), 0)
    vals = eigsh(K, k=2, M=M.tocsc(), sigma=0.0, which="LM", return_eigenvectors=False)
    assert np.sort(vals)[1] > 1.5


def test_kernel_direction_annihilates_jacobian(grid, changing_point):
    kern, p_star = kernel_direction(changing_point, grid)
    omega = grid.omega()
    assert_allclose(np.sum(kern ** 2 * omega), 1.0, rtol=1e-12)
    assert grid.asymmetry(kern) > 0
    state = embed_radial(grid, p_star)
    J = _jacobian(grid, p_star, state.values)
    scale = abs(J).sum() / J.shape[0]
    assert np.linalg.norm(J @ kern.ravel()) <= 1e-6 * scale


def test_kernel_residual_quadratic_in_amplitude(grid, changing_point):
    """Perturbing along the kernel leaves only a second-order residual."""
    kern, p_star = kernel_direction(changing_point, grid)
    state = embed_radial(grid, p_star)
    norms = []
    amps = [1e-3 * state.sup_norm, 5e-4 * state.sup_norm, 2.5e-4 * state.sup_norm]
    for eps in amps:
        _, rn = residual(p_star, state.values + eps * kern, grid)
        norms.append(rn)
    slope1 = np.log2(norms[0] / norms[1])
    slope2 = np.log2(norms[1] / norms[2])
    assert min(slope1, slope2) >= 1.9


def test_newton_converges_to_radial(grid):
    # away from the degeneracy the radial solution is isolated: Newton from
    # a radial-ish guess falls back onto it with machine-zero asymmetry
    state = embed_radial(grid, 3.0)
    guess = state.values * 1.05
    out = newton_solve(3.0, guess, grid=grid)
    assert out.residual_norm < 1e-10
    assert out.asymmetry < 1e-10 * out.sup_norm
    assert out.positive


def test_newton_preserves_radial_symmetry(grid):
    state = embed_radial(grid, 2.5)
    out = newton_solve(2.5, state.values * 1.2, grid=grid)
    # the discretization commutes with angular averaging: iterates started
    # radial stay radial to roundoff
    col_spread = np.max(np.abs(out.values - out.values[:, :1]))
    assert col_spread <= 1e-10 * out.sup_norm


def test_newton_trivial_solution(grid):
    rng = np.random.default_rng(0)
    guess = 1e-6 * rng.standard_normal(grid.shape)
    out = newton_solve(2.0, guess, grid=grid)
    assert np.abs(out.values).max() < 1e-12


def test_newton_quadratic_convergence(grid):
    from scipy.sparse.linalg import splu

    p = 3.0
    state = embed_radial(grid, p)
    U = state.values * (1.0 + 0.05)
    res_norms = []
    for _ in range(4):
        R, rn = residual(p, U, grid)
        res_norms.append(rn)
        J = _jacobian(grid, p, U)
        U = U + splu(J).solve(-R.ravel()).reshape(U.shape)
    # ratios r_{k+1}/r_k^2 stay bounded: quadratic contraction
    q = [res_norms[i + 1] / res_norms[i] ** 2 for i in range(2)]
    assert max(q) < 1e3


def test_branch_switch_and_continuation(branch, changing_point):
    assert len(branch.points) >= 20
    assert abs(branch.origin_p - changing_point.p_bar) <= 1e-4
    s_values = [pt.arclength for pt in branch.points]
    assert all(a < b for a, b in zip(s_values, s_values[1:]))
    for pt in branch.points:
        assert pt.residual_norm < 1e-8
        assert pt.asymmetry > 0.0
        assert np.all(pt.values > 0.0)
    first = branch.points[0]
    eps_abs = 1e-2 * branch.points[0].sup_norm
    assert abs(first.p - branch.origin_p) < 0.05
    assert first.asymmetry > eps_abs / 2.0
    assert branch.termination in (
        "step-limit",
        "fold-count-limit",
        "residual-failure",
        "returned-to-radial",
        "positivity-failure",
    )


def test_branch_does_not_reconnect_immediately(branch):
    # after leaving the origin neighborhood the asymmetry stays bounded away
    # from zero unless the branch terminates at another degeneracy point
    tail = [pt.asymmetry for pt in branch.points[3:]]
    if branch.termination != "returned-to-radial":
        assert min(tail) > 1e-3


def test_branch_norm_range(branch):
    lo, hi = branch.norm_range
    assert 0 < lo <= hi
