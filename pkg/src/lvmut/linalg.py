"""Dense linear algebra for small genotype systems.

Everything here is written for matrices of modest size (a handful to a few
hundred genotypes): power iteration for dominant eigenpairs of shifted
nonnegative matrices, cyclic Jacobi sweeps for symmetric spectra, Gaussian
elimination with partial pivoting, and the matrix exponential action built
from the symmetric eigendecomposition.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotIrreducible, NotSymmetric, SingularMatrix

_SYM_ATOL = 1e-12
_PIVOT_REL = 1e-14
_OFFDIAG_REL = 1e-14


@dataclass(frozen=True)
class PerronResult:
    nu_p: float
    lambda_p: float
    v_p: np.ndarray
    mu_bar: float
    iterations: int
    residual: float


@dataclass(frozen=True)
class SymmetricSpectrum:
    eigenvalues: np.ndarray   # descending
    eigenvectors: np.ndarray  # orthonormal columns, eigenvectors[:, k] pairs with eigenvalues[k]


def is_irreducible(mat: np.ndarray) -> bool:
    """Strong connectivity of the directed graph of positive off-diagonal entries."""
    mat = np.asarray(mat, dtype=float)
    n = mat.shape[0]
    if n == 1:
        return True
    adj = mat > 0.0
    np.fill_diagonal(adj, False)

    def reaches_all(a: np.ndarray) -> bool:
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for i in frontier:
                for j in np.nonzero(a[i])[0]:
                    if not seen[j]:
                        seen[j] = True
                        nxt.append(j)
            frontier = nxt
        return bool(seen.all())

    return reaches_all(adj) and reaches_all(adj.T)


def perron_eigenpair(
    mat: np.ndarray,
    shift_to_nonneg: bool = False,
    tol: float = 1e-13,
    max_iter: int = 200_000,
) -> PerronResult:
    """Dominant eigenpair of a Metzler-type matrix via shifted power iteration.

    The shift mu_bar is the largest off-diagonal row sum by default (the
    natural choice when mat is a growth-plus-mutation matrix), or the minimal
    diagonal shift making every entry nonnegative when shift_to_nonneg is set.
    lambda_p = nu_p - mu_bar is invariant under the choice.
    """
    mat = np.asarray(mat, dtype=float)
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError("matrix must be square")
    offdiag = mat - np.diag(np.diag(mat))
    if np.any(offdiag < 0.0):
        raise ValueError("off-diagonal entries must be nonnegative")
    if not is_irreducible(mat):
        raise NotIrreducible("positive off-diagonal pattern is not strongly connected")

    if shift_to_nonneg:
        mu_bar = max(0.0, -float(np.min(np.diag(mat))))
    else:
        mu_bar = float(np.max(offdiag.sum(axis=1)))
        # fall back to the minimal nonnegativity shift if the canonical one is short
        mu_bar = max(mu_bar, -float(np.min(np.diag(mat))), 0.0)
    shifted = mat + mu_bar * np.eye(n)

    x = np.full(n, 1.0 / np.sqrt(n))
    z = shifted @ x
    nu = float(x @ z)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        norm = float(np.linalg.norm(z))
        if norm == 0.0 or not np.isfinite(norm):
            raise NoConvergence("power iteration collapsed")
        x = z / norm
        z = shifted @ x
        nu_new = float(x @ z)
        residual = float(np.max(np.abs(z - nu_new * x)))
        done = abs(nu_new - nu) < tol and residual < tol
        nu = nu_new
        if done:
            break
    else:
        raise NoConvergence(f"power iteration did not converge in {max_iter} iterations")

    if np.min(x) <= 0.0:
        raise NoConvergence("dominant eigenvector is not strictly positive")
    nu_p = nu
    lambda_p = nu_p - mu_bar
    residual = float(np.max(np.abs(mat @ x - lambda_p * x)))
    return PerronResult(
        nu_p=nu_p,
        lambda_p=lambda_p,
        v_p=x,
        mu_bar=mu_bar,
        iterations=iterations,
        residual=residual,
    )


def symmetric_spectrum(mat: np.ndarray) -> SymmetricSpectrum:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps."""
    s = np.asarray(mat, dtype=float)
    n = s.shape[0]
    if s.shape != (n, n):
        raise ValueError("matrix must be square")
    if np.max(np.abs(s - s.T), initial=0.0) > _SYM_ATOL:
        raise NotSymmetric("matrix is not symmetric within 1e-12")
    a = 0.5 * (s + s.T)  # kill roundoff asymmetry
    v = np.eye(n)
    fro = float(np.linalg.norm(a))
    if n == 1 or fro == 0.0:
        return SymmetricSpectrum(eigenvalues=np.diag(a).copy(), eigenvectors=v)

    threshold = _OFFDIAG_REL * fro
    for _ in range(200):
        # summed directly, not as fro^2 minus diag^2: that difference hits
        # rounding noise at sqrt(eps)*fro and would never pass the threshold
        off_mat = a.copy()
        np.fill_diagonal(off_mat, 0.0)
        off = float(np.sqrt(np.sum(off_mat * off_mat)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e10:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * c
                rot_p = a[:, p].copy()
                rot_q = a[:, q].copy()
                a[:, p] = c * rot_p - sn * rot_q
                a[:, q] = sn * rot_p + c * rot_q
                rot_p = a[p, :].copy()
                rot_q = a[q, :].copy()
                a[p, :] = c * rot_p - sn * rot_q
                a[q, :] = sn * rot_p + c * rot_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    else:
        raise NoConvergence("Jacobi sweeps failed to reduce the off-diagonal mass")

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues)[::-1]
    return SymmetricSpectrum(eigenvalues=eigenvalues[order], eigenvectors=v[:, order])


def _lu_factor(mat: np.ndarray):
    """LU with partial pivoting; returns (lu, piv). Raises SingularMatrix."""
    a = np.array(mat, dtype=float)
    n = a.shape[0]
    scale = float(np.max(np.abs(a).sum(axis=1), initial=0.0))
    piv = np.arange(n)
    for k in range(n):
        row = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[row, k]) < _PIVOT_REL * max(scale, 1e-300):
            raise SingularMatrix(f"pivot {k} below threshold")
        if row != k:
            a[[k, row]] = a[[row, k]]
            piv[[k, row]] = piv[[row, k]]
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return a, piv


def _lu_solve(lu_piv, b: np.ndarray) -> np.ndarray:
    lu, piv = lu_piv
    n = lu.shape[0]
    x = np.asarray(b, dtype=float)[piv].copy()
    for k in range(1, n):
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1:] @ x[k + 1:]) / lu[k, k]
    return x


def solve_linear(mat: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve mat @ x = b by Gaussian elimination with partial pivoting."""
    mat = np.asarray(mat, dtype=float)
    b = np.asarray(b, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("matrix must be square")
    if b.shape != (mat.shape[0],):
        raise ValueError("right-hand side has wrong length")
    return _lu_solve(_lu_factor(mat), b)


def expm_action(sym: np.ndarray, t: float, v0: np.ndarray) -> np.ndarray:
    """exp(t*sym) @ v0 for symmetric sym, via the eigendecomposition."""
    spec = symmetric_spectrum(sym)
    w = spec.eigenvectors.T @ np.asarray(v0, dtype=float)
    return spec.eigenvectors @ (np.exp(spec.eigenvalues * t) * w)


def is_positive_definite(mat: np.ndarray) -> bool:
    """True when the symmetric part's smallest eigenvalue is strictly positive."""
    mat = np.asarray(mat, dtype=float)
    spec = symmetric_spectrum(0.5 * (mat + mat.T))
    return bool(spec.eigenvalues[-1] > 0.0)
