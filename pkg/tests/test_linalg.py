"""Dense kernels checked against closed forms and numpy.linalg."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lvmut.errors import NoConvergence, NotIrreducible, NotSymmetric, SingularMatrix
from lvmut.linalg import (
    expm_action,
    is_irreducible,
    is_positive_definite,
    perron_eigenpair,
    solve_linear,
    symmetric_spectrum,
)


def test_perron_2x2_closed_form():
    # eigenvalues of [[0.9, 0.1], [0.1, 1.9]] from the quadratic formula
    a = np.array([[0.9, 0.1], [0.1, 1.9]])
    lam_exact = (2.8 + math.sqrt(1.04)) / 2.0
    res = perron_eigenpair(a)
    assert abs(res.lambda_p - lam_exact) < 1e-13
    # eigenvector direction: second component / first = (lam - 0.9)/0.1
    ratio = res.v_p[1] / res.v_p[0]
    assert abs(ratio - (lam_exact - 0.9) / 0.1) < 1e-10
    assert np.all(res.v_p > 0)
    assert res.residual < 1e-12


def test_perron_negative_diagonal_shift():
    a = np.array([[-0.5, 0.2], [0.3, -0.1]])
    res = perron_eigenpair(a)
    lam_np = max(np.linalg.eigvals(a).real)
    assert abs(res.lambda_p - lam_np) < 1e-12
    assert np.all(res.v_p > 0)


def test_perron_rejects_negative_offdiagonal():
    with pytest.raises(ValueError):
        perron_eigenpair(np.array([[1.0, -0.1], [0.2, 1.0]]))


def test_perron_rejects_reducible():
    block = np.array([[1.0, 0.0], [0.0, 2.0]])
    with pytest.raises(NotIrreducible):
        perron_eigenpair(block)


def test_irreducibility():
    assert is_irreducible(np.array([[0.0]]))
    cycle = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    assert is_irreducible(cycle)
    # one-way chain: no path back
    chain = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert not is_irreducible(chain)


@settings(deadline=None, max_examples=50)
@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**31))
def test_jacobi_matches_numpy(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n))
    sym = 0.5 * (m + m.T)
    spec = symmetric_spectrum(sym)
    ref = np.linalg.eigvalsh(sym)[::-1]
    scale = max(1.0, float(np.max(np.abs(ref))))
    assert np.max(np.abs(spec.eigenvalues - ref)) < 1e-12 * scale
    q = spec.eigenvectors
    assert np.max(np.abs(q.T @ q - np.eye(n))) < 1e-12
    recon = q @ np.diag(spec.eigenvalues) @ q.T
    assert np.max(np.abs(recon - sym)) < 1e-11 * scale


def test_jacobi_descending_order():
    sym = np.diag([3.0, -1.0, 5.0])
    spec = symmetric_spectrum(sym)
    assert np.all(np.diff(spec.eigenvalues) <= 0)
    assert np.allclose(spec.eigenvalues, [5.0, 3.0, -1.0])


def test_jacobi_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        symmetric_spectrum(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_solve_linear_cramer_oracle():
    a = np.array([[0.9, 0.1], [0.1, 1.9]])
    x = solve_linear(a, np.array([1.0, 2.0]))
    # by Cramer: det = 1.70, x1 = (1*1.9 - 0.1*2)/1.7 = 1, x2 = (0.9*2 - 0.1)/1.7 = 1
    assert np.max(np.abs(x - 1.0)) < 1e-14


@settings(deadline=None, max_examples=50)
@given(st.integers(min_value=1, max_value=7), st.integers(min_value=0, max_value=2**31))
def test_solve_linear_matches_numpy(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + n * np.eye(n)
    b = rng.normal(size=n)
    x = solve_linear(a, b)
    assert np.max(np.abs(x - np.linalg.solve(a, b))) < 1e-10


def test_solve_linear_singular():
    with pytest.raises(SingularMatrix):
        solve_linear(np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 1.0]))


def test_expm_action_taylor_oracle():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(4, 4))
    sym = 0.5 * (m + m.T)
    v0 = rng.normal(size=4)
    t = 0.37
    term = v0.copy()
    total = v0.copy()
    for k in range(1, 40):
        term = sym @ term * (t / k)
        total += term
    assert np.max(np.abs(expm_action(sym, t, v0) - total)) < 1e-12


def test_expm_action_semigroup():
    sym = np.array([[0.9, 0.1], [0.1, 1.9]])
    v0 = np.array([1.0, 2.0])
    one = expm_action(sym, 0.7, expm_action(sym, 0.3, v0))
    both = expm_action(sym, 1.0, v0)
    assert np.max(np.abs(one - both)) < 1e-12
    assert np.max(np.abs(expm_action(sym, 0.0, v0) - v0)) < 1e-15


def test_positive_definiteness():
    assert is_positive_definite(np.array([[2.0, 0.5], [0.5, 2.0]]))
    assert not is_positive_definite(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_jacobi_handles_tiny_offdiagonals():
    # near-diagonal input with subnormal couplings must not stall the sweep
    a = np.diag([1.0, 2.0, 3.0])
    a[0, 1] = a[1, 0] = 1e-200
    spec = symmetric_spectrum(a)
    assert np.allclose(spec.eigenvalues, [3.0, 2.0, 1.0])
