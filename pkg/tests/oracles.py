"""Independent numerical oracles used by the test suite.

These deliberately avoid the code paths they are checking: the Hermitian
eigensolver here is a hand-rolled cyclic Jacobi iteration (the library
delegates to LAPACK), characteristic-polynomial roots come from Newton's
identities, and quadrature oracles re-do Riemann sums with plain
ndarray arithmetic.
"""

from __future__ import annotations

import numpy as np


def jacobi_hermitian(matrix, tol: float = 1e-14, max_sweeps: int = 100):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns (eigenvalues descending, unitary eigenvector columns).
    """
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        scale = max(np.sqrt(np.sum(np.abs(a) ** 2)), 1e-300)
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r <= 1e-300:
                    continue
                phase = a[p, q] / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                e_neg = np.conj(phase)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * e_neg * col_q
                a[:, q] = s * col_p + c * e_neg * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * row_p + c * phase * row_q
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * e_neg * vec_q
                v[:, q] = s * vec_p + c * e_neg * vec_q
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(a).real
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def charpoly_eigvals_4x4(matrix) -> np.ndarray:
    """Eigenvalues of a Hermitian 4x4 matrix from its characteristic
    polynomial (Newton's identities + companion roots), sorted descending."""
    a = np.asarray(matrix, dtype=complex)
    assert a.shape == (4, 4)
    s = [np.trace(np.linalg.matrix_power(a, k)).real for k in range(1, 5)]
    e1 = s[0]
    e2 = (e1 * s[0] - s[1]) / 2.0
    e3 = (e2 * s[0] - e1 * s[1] + s[2]) / 3.0
    e4 = (e3 * s[0] - e2 * s[1] + e1 * s[2] - s[3]) / 4.0
    roots = np.roots([1.0, -e1, e2, -e3, e4])
    return np.sort(roots.real)[::-1]


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Gaussian matrix."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng: np.random.Generator, n: int) -> np.ndarray:
    """Full-rank random density matrix (Hilbert-Schmidt style)."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = z @ z.conj().T
    return h / np.trace(h).real


def random_pure(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.sqrt(np.sum(np.abs(z) ** 2))


def random_probs(rng: np.random.Generator, n: int) -> np.ndarray:
    """Dirichlet-style random probability vector."""
    x = rng.gamma(1.0, size=n)
    return x / x.sum()


def dyadic_weights(rng: np.random.Generator, n: int, denom_bits: int = 6) -> np.ndarray:
    """Random counting weights that are exact dyadic rationals (sum == n)."""
    denom = 2**denom_bits
    counts = rng.multinomial(n * denom, np.full(n, 1.0 / n))
    return counts / float(denom)


def midpoint_min_fraction(intensity, lo: float, hi: float, cells: int) -> float:
    """Plain midpoint-rule evaluation of the minimal occupied fraction of a
    1-d intensity profile (independent of the library's code path)."""
    h = (hi - lo) / cells
    x = lo + (np.arange(cells) + 0.5) * h
    vals = np.asarray(intensity(x), dtype=float)
    p = vals / vals.sum()
    return float(np.sum(np.minimum(cells * p, 1.0))) / cells
