import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from splitqp.linalg import (NotPositiveDefiniteError, adjoint_matvec,
                            as_vector, matvec, spd_factor, spd_solve,
                            spectral_norm_est)


def test_matvec_examples():
    assert np.allclose(matvec([[1, 2], [3, 4]], [1, 1]), [3, 7])
    assert np.allclose(matvec(np.eye(3), [5, -2, 0]), [5, -2, 0])
    assert np.allclose(matvec([[0, 0]], [9, 9]), [0])


def test_matvec_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        matvec([[1, 2]], [1, 2, 3])


def test_adjoint_examples():
    assert np.allclose(adjoint_matvec([[1], [1]], [1, -1]), [0])
    assert np.allclose(adjoint_matvec(np.eye(2), [3, 4]), [3, 4])
    assert np.allclose(adjoint_matvec([[2, 0], [0, 3]], [1, 1]), [2, 3])
    with pytest.raises(ValueError, match="dimension mismatch"):
        adjoint_matvec([[1, 2]], [1, 2])


def test_as_vector_rejects_nonfinite():
    with pytest.raises(ValueError, match="non-finite"):
        as_vector([1.0, np.nan])
    with pytest.raises(ValueError, match="non-finite"):
        as_vector([np.inf])


def test_spd_factor_examples():
    f = spd_factor([[4.0]])
    assert np.allclose(spd_solve(f, [8.0]), [2.0])
    f = spd_factor(np.eye(2))
    assert np.allclose(spd_solve(f, [1.0, 2.0]), [1.0, 2.0])
    f = spd_factor([[2.0, 1.0], [1.0, 2.0]])
    s = spd_solve(f, [3.0, 3.0])
    assert np.allclose(s, [1.0, 1.0])
    # residual check of the derived value
    assert np.max(np.abs(np.array([[2.0, 1.0], [1.0, 2.0]]) @ s - [3.0, 3.0])) <= 1e-12


def test_spd_factor_rejects_nonsymmetric():
    with pytest.raises(ValueError, match="not symmetric"):
        spd_factor([[1.0, 0.5], [0.0, 1.0]])


def test_spd_factor_rejects_indefinite():
    with pytest.raises(NotPositiveDefiniteError, match="not positive definite"):
        spd_factor([[1.0, 0.0], [0.0, -1.0]])


def test_spd_factor_reconstruction():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = rng.integers(1, 8)
        G = rng.normal(size=(n, n))
        M = G.T @ G + np.eye(n)
        f = spd_factor(M)
        L = np.tril(f._cho[0])
        rel = np.linalg.norm(L @ L.T - f.matrix) / np.linalg.norm(f.matrix)
        assert rel <= 1e-10


def test_spd_solve_random_property():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = rng.integers(1, 12)
        G = rng.normal(size=(n, n))
        M = G.T @ G + np.eye(n)
        b = rng.normal(size=n)
        s = spd_solve(spd_factor(M), b)
        bound = 1e-9 * (1.0 + np.max(np.abs(b)))
        assert np.max(np.abs(M @ s - b)) <= bound


def test_spd_solve_dimension_mismatch():
    f = spd_factor(np.eye(2))
    with pytest.raises(ValueError):
        spd_solve(f, [1.0, 2.0, 3.0])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_adjoint_consistency(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 7, size=2)
    M = rng.normal(size=(m, n))
    x = rng.normal(size=n)
    y = rng.normal(size=m)
    lhs = float((M @ x) @ y)
    rhs = float(x @ (M.T @ y))
    assert abs(lhs - rhs) <= 1e-12 * (1.0 + abs(lhs))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6),
       st.floats(-10, 10, allow_nan=False),
       st.floats(-10, 10, allow_nan=False))
def test_matvec_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 7, size=2)
    M = rng.normal(size=(m, n))
    x = rng.normal(size=n)
    y = rng.normal(size=n)
    lhs = matvec(M, a * x + b * y)
    rhs = a * matvec(M, x) + b * matvec(M, y)
    scale = 1.0 + max(np.max(np.abs(lhs)), np.max(np.abs(rhs)))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


def test_spectral_norm_estimate():
    rng = np.random.default_rng(5)
    for _ in range(10):
        M = rng.normal(size=(6, 4))
        est = spectral_norm_est(M)
        true = np.linalg.norm(M, 2)
        assert abs(est - true) <= 1e-6 * true
    assert spectral_norm_est(np.zeros((3, 2))) == 0.0
