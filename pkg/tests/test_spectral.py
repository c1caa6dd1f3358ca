import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from henon import (
    HenonParams,
    ModeProblem,
    angular_eigenvalue,
    morse_index,
    multiplicity,
    prufer_count,
    solve_mode_spectrum,
    solve_radial,
)
from henon.errors import ParameterError


def harmonic_dimension_bruteforce(k, N):
    """Dimension of degree-k harmonic polynomials in N variables, by building
    the Laplacian as a matrix on monomials and counting its kernel."""
    monos_k = sorted(
        a for a in itertools.product(range(k + 1), repeat=N) if sum(a) == k
    )
    if k < 2:
        return len(monos_k)
    monos_km2 = sorted(
        a for a in itertools.product(range(k - 1), repeat=N) if sum(a) == k - 2
    )
    row = {m: i for i, m in enumerate(monos_km2)}
    L = np.zeros((len(monos_km2), len(monos_k)))
    for j, a in enumerate(monos_k):
        for i in range(N):
            if a[i] >= 2:
                b = list(a)
                b[i] -= 2
                L[row[tuple(b)], j] += a[i] * (a[i] - 1)
    return len(monos_k) - np.linalg.matrix_rank(L)


def test_angular_eigenvalues():
    assert angular_eigenvalue(0, 3) == 0.0
    assert angular_eigenvalue(0, 9) == 0.0
    assert angular_eigenvalue(1, 3) == 2.0  # first mode: N - 1
    assert angular_eigenvalue(2, 3) == 6.0  # second mode: 2N
    for N in (3, 4, 5):
        assert angular_eigenvalue(1, N) == N - 1
        assert angular_eigenvalue(2, N) == 2 * N
        mus = [angular_eigenvalue(k, N) for k in range(6)]
        assert all(a < b for a, b in zip(mus, mus[1:]))
    with pytest.raises(ParameterError):
        angular_eigenvalue(-1, 3)


def test_multiplicities_against_bruteforce():
    assert multiplicity(0, 5) == 1
    assert multiplicity(1, 3) == 3
    assert multiplicity(2, 3) == 5
    for N in (3, 4, 5):
        for k in range(5):
            assert multiplicity(k, N) == harmonic_dimension_bruteforce(k, N)


def test_mode_problem_fields(profile_p2):
    prob0 = ModeProblem(profile_p2, 0)
    prob1 = ModeProblem(profile_p2, 1)
    assert prob0.mu_k == 0.0 and prob0.bc_origin == "neumann"
    assert prob1.mu_k == 2.0 and prob1.bc_origin == "dirichlet"


def test_exact_eigenpair_oracle(profile_p2, profile_p5, profile_p65):
    """Lambda_{1,0} p = 1 with eigenfunction parallel to u_p: one identity
    validating mesh, weights and eigensolver simultaneously."""
    for prof in (profile_p2, profile_p5, profile_p65):
        p = prof.params.p
        spec = solve_mode_spectrum(ModeProblem(prof, 0), 2)
        assert abs(spec.eigenvalues[0] * p - 1.0) <= 1e-6
        u_nodes = np.interp(spec.mesh, prof.mesh, prof.u)
        psi = spec.eigenfunctions[:, 0]
        w = spec.weights
        cosang = abs(np.sum(w * psi * u_nodes)) / math.sqrt(
            np.sum(w * psi ** 2) * np.sum(w * u_nodes ** 2)
        )
        assert math.sqrt(max(0.0, 1.0 - min(1.0, cosang) ** 2)) <= 1e-5


def test_inequalities(profile_p2, profile_p5, profile_p65):
    for prof in (profile_p2, profile_p5, profile_p65):
        s0 = solve_mode_spectrum(ModeProblem(prof, 0), 2)
        s1 = solve_mode_spectrum(ModeProblem(prof, 1), 2)
        s2 = solve_mode_spectrum(ModeProblem(prof, 2), 1)
        assert s0.eigenvalues[1] > 1.0  # second radial eigenvalue
        assert s2.eigenvalues[0] > 1.0  # first k=2 eigenvalue
        assert s1.eigenvalues[1] > 1.0  # second k=1 eigenvalue


def test_first_eigenvalue_increasing_in_k(profile_p2):
    firsts = [
        solve_mode_spectrum(ModeProblem(profile_p2, k), 1).eigenvalues[0]
        for k in range(5)
    ]
    assert all(a < b for a, b in zip(firsts, firsts[1:]))


def test_eigenvalues_simple_and_ordered(profile_p2):
    spec = solve_mode_spectrum(ModeProblem(profile_p2, 0), 5)
    assert np.all(np.diff(spec.eigenvalues) > 0)


def test_oscillation_counts(profile_p2):
    for k in (0, 1):
        spec = solve_mode_spectrum(ModeProblem(profile_p2, k), 4)
        for i in range(1, 5):
            assert spec.interior_zeros(i) == i - 1


def test_normalization_and_orthogonality(profile_p2):
    spec = solve_mode_spectrum(ModeProblem(profile_p2, 0), 4)
    G = spec.eigenfunctions.T @ (spec.weights[:, None] * spec.eigenfunctions)
    assert_allclose(np.diag(G), 1.0, rtol=1e-10)
    off = G - np.diag(np.diag(G))
    assert np.max(np.abs(off)) <= 1e-8


def test_eigenfunction_sign_convention(profile_p2):
    spec = solve_mode_spectrum(ModeProblem(profile_p2, 0), 3)
    for i in range(3):
        psi = spec.eigenfunctions[:, i]
        big = np.nonzero(np.abs(psi) > 0.1 * np.abs(psi).max())[0]
        assert psi[big[-1]] > 0  # lobe next to r = 1 is positive


def test_eigen_residuals(profile_p2):
    spec = solve_mode_spectrum(ModeProblem(profile_p2, 1), 3)
    assert np.max(spec.residuals) <= 1e-8


def test_prufer_counts_basic(profile_p2):
    p = profile_p2.params.p
    assert prufer_count(ModeProblem(profile_p2, 0), 1 / p + 0.01) == 1
    assert prufer_count(ModeProblem(profile_p2, 0), 1 / p - 0.01) == 0
    assert prufer_count(ModeProblem(profile_p2, 2), 1.0) == 0
    assert prufer_count(ModeProblem(profile_p2, 1), 1.0) == 0  # Lambda_11(2) > 1


def test_prufer_counts_above_crossing():
    prof = solve_radial(HenonParams(3, 1.0, 3.0))
    assert prufer_count(ModeProblem(prof, 1), 1.0) == 1  # Lambda_11(3) < 1


def test_prufer_cross_method(profile_p2):
    """Counts below 20 random thresholds agree with the matrix eigensolver."""
    rng = np.random.default_rng(7)
    for k in (0, 1, 2):
        spec = solve_mode_spectrum(ModeProblem(profile_p2, k), 10)
        vals = spec.eigenvalues
        thresholds = rng.uniform(0.05, vals[-1] - 0.05, size=20)
        # stay away from eigenvalues, where "strictly below" is ill-posed
        thresholds = np.array(
            [t for t in thresholds if np.min(np.abs(vals - t)) > 1e-3]
        )
        for t in thresholds:
            matrix_count = int(np.sum(vals < t))
            assert prufer_count(ModeProblem(profile_p2, k), float(t)) == matrix_count


def test_eigenvalue_refinement_order(profile_p2):
    vals = [
        solve_mode_spectrum(ModeProblem(profile_p2, 1), 1, mesh_size=n).eigenvalues[0]
        for n in (501, 1001, 2001)
    ]
    order = math.log2(abs(vals[0] - vals[1]) / abs(vals[1] - vals[2]))
    assert order >= 2.0 - 0.15


def test_morse_index_endpoints():
    lo = morse_index(solve_radial(HenonParams(3, 1.0, 1.05)))
    assert lo.morse_index == 1
    assert lo.morse_index_shortcut == 1
    assert not lo.degenerate
    hi = morse_index(solve_radial(HenonParams(3, 1.0, 6.9)))
    assert hi.morse_index == 4  # N + 1
    assert hi.morse_index_shortcut == 4
    assert not hi.degenerate


def test_morse_index_matches_shortcut_sampled():
    for p in (1.5, 2.5, 4.0, 6.0):
        report = morse_index(solve_radial(HenonParams(3, 1.0, p)))
        assert report.morse_index == report.morse_index_shortcut
