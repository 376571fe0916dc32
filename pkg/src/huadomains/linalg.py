"""Dense complex linear algebra at desk scale.

Matrices are plain ``numpy`` complex arrays; the helpers here validate shape
and finiteness and wrap the LAPACK routines the rest of the package needs.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError

MAX_DET_SIZE = 64


def as_cmatrix(m) -> np.ndarray:
    """Return ``m`` as a 2-D complex array, rejecting NaN/Inf entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def as_cvector(v) -> np.ndarray:
    a = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(a)):
        raise DomainError("vector has non-finite entries")
    return a


def _require_square(a: np.ndarray) -> None:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix must be square, got {a.shape}")


def det(m) -> complex:
    """Determinant via LU with partial pivoting."""
    a = as_cmatrix(m)
    _require_square(a)
    n = a.shape[0]
    if n > MAX_DET_SIZE:
        raise DimensionError(f"det limited to size {MAX_DET_SIZE}, got {n}")
    if n == 0:
        return 1.0 + 0.0j
    with warnings.catch_warnings():
        # exactly singular input is legitimate here (boundary points)
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    sign = -1.0 if np.count_nonzero(piv != np.arange(n)) % 2 else 1.0
    return complex(sign * np.prod(np.diag(lu)))


def is_hermitian(m, tol: float = 1e-10) -> bool:
    a = as_cmatrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, np.linalg.norm(a))
    return bool(np.linalg.norm(a - a.conj().T) <= tol * scale)


def hermitian_sqrt(m, tol: float = 1e-10) -> np.ndarray:
    """Positive square root of a Hermitian positive definite matrix.

    Raises :class:`DomainError` (with ``value`` set to the smallest
    eigenvalue) when the input is not Hermitian or not positive definite.
    """
    a = as_cmatrix(m)
    _require_square(a)
    if not is_hermitian(a, tol):
        raise DomainError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(a)
    if w[0] <= 0:
        raise DomainError(f"matrix is not positive definite (min eigenvalue {w[0]:.3e})", value=float(w[0]))
    return (v * np.sqrt(w)) @ v.conj().T


def hermitian_inv_sqrt(m, tol: float = 1e-10) -> np.ndarray:
    a = as_cmatrix(m)
    _require_square(a)
    if not is_hermitian(a, tol):
        raise DomainError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(a)
    if w[0] <= 0:
        raise DomainError(f"matrix is not positive definite (min eigenvalue {w[0]:.3e})", value=float(w[0]))
    return (v / np.sqrt(w)) @ v.conj().T


def null_space(m, tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormal basis of the row null space ``{x : x @ m = 0}``.

    Singular values below ``tol * sigma_max`` count as zero. An all-zero
    matrix has the whole space as null space.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = as_cmatrix(m)
    rows = a.shape[0]
    if rows == 0:
        return []
    # x @ a = 0  <=>  a^H x^H = 0, i.e. conj(x) spans the null space of a^H.
    u, s, _ = np.linalg.svd(a, full_matrices=True)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > tol * smax))
    return [u[:, k].conj().copy() for k in range(rank, rows)]


def matrix_rank(m, tol: float = 1e-10) -> int:
    a = as_cmatrix(m)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def unitary_check(m, tol: float = 1e-10) -> bool:
    a = as_cmatrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])) < tol)


def unitary_residual(m) -> float:
    a = as_cmatrix(m)
    _require_square(a)
    return float(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])))


def rng_from(seed) -> np.random.Generator:
    """Build a generator from an explicit integer seed (or pass one through)."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("an explicit seed is required")
    return np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)


def random_unitary(n: int, seed) -> np.ndarray:
    """Haar-distributed unitary from the QR factorisation of a complex Gaussian."""
    if n < 1:
        raise DimensionError("n must be at least 1")
    rng = rng_from(seed)
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_orthogonal(n: int, seed) -> np.ndarray:
    rng = rng_from(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))
