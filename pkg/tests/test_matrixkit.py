import numpy as np
import pytest
from scipy.linalg import lu_factor, lu_solve

from heatsync import (
    SymMatrix,
    is_negative_definite,
    kron,
    laplacian,
    power_dominant,
    solve_linear,
    sym_eigenvalues,
)
from heatsync.errors import NoConvergence, SingularMatrix
from heatsync import demo_graph


class TestSymMatrix:
    def test_symmetrizes_and_records_residual(self):
        m = SymMatrix([[1.0, 2.0], [0.0, 3.0]])
        assert np.allclose(m.mat, [[1.0, 1.0], [1.0, 3.0]])
        assert m.asym_residual == 2.0

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            SymMatrix(np.zeros((2, 3)))


class TestSymEigenvalues:
    def test_diagonal(self):
        spec = sym_eigenvalues(np.diag([3.0, -1.0, 2.0]))
        assert np.allclose(spec.eigenvalues, [-1.0, 2.0, 3.0])
        assert spec.residual <= 1e-10

    def test_known_2x2(self):
        spec = sym_eigenvalues(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(spec.eigenvalues, [-1.0, 1.0])

    def test_boundary_feedback_kernel_2x2(self):
        # oracle: roots of l^2 - tr*l + det for [[-pi^2/2, 3], [3, -6]]
        a = np.array([[-np.pi**2 / 2, 3.0], [3.0, -6.0]])
        tr, det = a.trace(), np.linalg.det(a)
        disc = np.sqrt(tr**2 - 4 * det)
        roots = sorted([(tr - disc) / 2, (tr + disc) / 2])
        assert roots[1] < 0  # both eigenvalues negative
        spec = sym_eigenvalues(a)
        assert np.allclose(spec.eigenvalues, roots, atol=1e-12)

    def test_matches_lapack_on_randoms(self):
        rng = np.random.default_rng(21)
        for _ in range(500):
            n = int(rng.integers(1, 13))
            b = rng.standard_normal((n, n))
            s = (b + b.T) / 2
            mine = sym_eigenvalues(s).eigenvalues
            ref = np.linalg.eigvalsh(s)
            assert np.max(np.abs(mine - ref)) <= 1e-9

    def test_trace_identity(self):
        rng = np.random.default_rng(22)
        for _ in range(100):
            n = int(rng.integers(1, 13))
            b = rng.standard_normal((n, n))
            s = (b + b.T) / 2
            spec = sym_eigenvalues(s)
            bound = n * 1e-10 * max(1.0, np.abs(s).max())
            assert abs(spec.eigenvalues.sum() - np.trace(s)) <= bound

    def test_no_convergence_when_capped(self):
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(NoConvergence):
            sym_eigenvalues(a, max_sweeps=0)


class TestNegativeDefinite:
    def test_minus_identity_with_margin(self):
        assert is_negative_definite(-np.eye(4), margin=0.5)

    def test_zero_matrix_not_definite(self):
        assert not is_negative_definite(np.zeros((3, 3)), margin=0.0)

    def test_agrees_with_eigenvalues(self):
        rng = np.random.default_rng(23)
        checked = 0
        while checked < 500:
            n = int(rng.integers(1, 13))
            b = rng.standard_normal((n, n))
            s = (b + b.T) / 2 - rng.uniform(-1, 1) * np.eye(n)
            margin = float(rng.choice([0.0, 1e-6, 0.1]))
            top = sym_eigenvalues(s).eigenvalues[-1]
            if abs(top + margin) <= 1e-8:  # boundary band excluded
                continue
            assert is_negative_definite(s, margin) == (top < -margin)
            checked += 1

    def test_rejects_negative_margin(self):
        with pytest.raises(ValueError):
            is_negative_definite(-np.eye(2), margin=-1.0)


class TestKron:
    def test_identity_factor_is_blockdiag(self):
        b = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = kron(np.eye(2), b)
        assert np.array_equal(out[:2, :2], b)
        assert np.array_equal(out[2:, 2:], b)
        assert np.array_equal(out[:2, 2:], np.zeros((2, 2)))

    def test_scalar_one_is_identity_map(self):
        a = np.arange(9.0).reshape(3, 3)
        assert np.array_equal(kron(a, np.array([[1.0]])), a)

    def test_demo_laplacian_blocks_sum_to_zero(self):
        lap = laplacian(demo_graph()).astype(float)
        out = kron(lap, np.eye(3))
        assert out.shape == (15, 15)
        assert np.allclose(out.sum(axis=1), 0.0)

    def test_eigenvalues_are_pairwise_products(self):
        rng = np.random.default_rng(24)
        for _ in range(20):
            na, nb = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            a = rng.standard_normal((na, na))
            a = (a + a.T) / 2
            b = rng.standard_normal((nb, nb))
            b = (b + b.T) / 2
            products = np.sort(np.outer(np.linalg.eigvalsh(a), np.linalg.eigvalsh(b)).ravel())
            assert np.allclose(np.sort(np.linalg.eigvalsh(kron(a, b))), products, atol=1e-9)


class TestSolveLinear:
    def test_identity(self):
        b = np.array([1.0, -2.0, 3.0])
        assert np.array_equal(solve_linear(np.eye(3), b), b)

    def test_diagonal(self):
        assert np.allclose(solve_linear(np.diag([2.0, 4.0]), [2.0, 8.0]), [1.0, 2.0])

    def test_random_multiply_back(self):
        rng = np.random.default_rng(25)
        a = rng.standard_normal((50, 50)) + 50 * np.eye(50)  # well conditioned
        b = rng.standard_normal(50)
        x = solve_linear(a, b)
        assert np.abs(a @ x - b).max() <= 1e-10 * (1 + np.abs(b).max())

    def test_singular_raises(self):
        with pytest.raises(SingularMatrix):
            solve_linear(np.array([[1.0, 2.0], [2.0, 4.0]]), [1.0, 1.0])

    def test_zero_matrix_raises(self):
        with pytest.raises(SingularMatrix):
            solve_linear(np.zeros((2, 2)), [1.0, 1.0])


class TestPowerDominant:
    def test_diagonal(self):
        rho, converged = power_dominant(np.diag([0.5, 0.9]))
        assert converged and abs(rho - 0.9) <= 1e-8

    def test_zero_matrix(self):
        rho, converged = power_dominant(np.zeros((4, 4)))
        assert converged and rho == 0.0

    def test_heat_propagator_conserved_mode(self):
        # one-step matrix of the pure-Neumann heat step: the constant vector
        # is an exact fixed point, so the spectral radius is exactly 1
        nx, dt = 61, 0.01
        dx = 1.0 / (nx - 1)
        t = np.zeros((nx, nx))
        t[0, 0], t[0, 1] = -2.0, 2.0
        idx = np.arange(1, nx - 1)
        t[idx, idx - 1] = t[idx, idx + 1] = 1.0
        t[idx, idx] = -2.0
        t[nx - 1, nx - 2], t[nx - 1, nx - 1] = 2.0, -2.0
        a = t / dx**2
        lu = lu_factor(np.eye(nx) - dt / 2 * a)
        phi = lu_solve(lu, np.eye(nx) + dt / 2 * a)
        ones = np.ones(nx)
        assert np.allclose(phi @ ones, ones, atol=1e-10)  # fixed point directly
        rho, converged = power_dominant(phi)
        assert converged and abs(rho - 1.0) <= 1e-6
