"""Classical bounded symmetric domains in Harish-Chandra realization.

A base point is a 1-D complex array of independent coordinates:

* ``I(m, n)`` and ``ball(d)``: the matrix entries in row-major order
  (the ball is the 1 x d case);
* ``II(n)``: the strictly upper triangular entries of an antisymmetric
  n x n matrix, row-major;
* ``III(n)``: the upper triangular entries (diagonal included) of a
  symmetric n x n matrix, row-major;
* ``IV(n)``: the vector itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BranchError, DimensionError, DomainError, InvalidSpecError
from .linalg import det

KINDS = ("I", "II", "III", "IV", "ball")
CLOSED_MARGIN = -1e-9
TYPE_II_STEPS = 16


@dataclass(frozen=True)
class CartanSpec:
    kind: str
    m: int = 1
    n: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpecError(f"unknown Cartan kind {self.kind!r}")
        if self.kind == "I" and (self.m < 1 or self.n < 1):
            raise InvalidSpecError("type I needs m, n >= 1")
        if self.kind in ("II", "III") and self.n < 2:
            raise InvalidSpecError(f"type {self.kind} needs n >= 2")
        if self.kind == "IV" and self.n < 3:
            raise InvalidSpecError("type IV needs n >= 3")
        if self.kind == "ball" and self.n < 1:
            raise InvalidSpecError("ball needs d >= 1")

    @classmethod
    def type_i(cls, m, n):
        return cls("I", int(m), int(n))

    @classmethod
    def type_ii(cls, n):
        return cls("II", 1, int(n))

    @classmethod
    def type_iii(cls, n):
        return cls("III", 1, int(n))

    @classmethod
    def type_iv(cls, n):
        return cls("IV", 1, int(n))

    @classmethod
    def ball(cls, d):
        return cls("ball", 1, int(d))

    @property
    def dim(self) -> int:
        return ambient_dim(self)

    @property
    def matrix_shape(self) -> tuple[int, int]:
        if self.kind == "I":
            return (self.m, self.n)
        if self.kind in ("II", "III"):
            return (self.n, self.n)
        return (1, self.n)

    def __str__(self):
        if self.kind == "I":
            return f"I({self.m},{self.n})"
        if self.kind == "ball":
            return f"ball({self.n})"
        return f"{self.kind}({self.n})"


def ambient_dim(spec: CartanSpec) -> int:
    k, m, n = spec.kind, spec.m, spec.n
    if k == "I":
        return m * n
    if k == "II":
        return n * (n - 1) // 2
    if k == "III":
        return n * (n + 1) // 2
    return n


def genus(spec: CartanSpec) -> int:
    k, m, n = spec.kind, spec.m, spec.n
    if k == "I":
        return m + n
    if k == "II":
        return 2 * (n - 1)
    if k == "III":
        return n + 1
    if k == "IV":
        return n
    return n + 1


def rank(spec: CartanSpec) -> int:
    k, m, n = spec.kind, spec.m, spec.n
    if k == "I":
        return min(m, n)
    if k == "II":
        return n // 2
    if k == "III":
        return n
    if k == "IV":
        return 2
    return 1


def is_ball_like(spec: CartanSpec) -> bool:
    """Rank-one bases coincide with the unit ball in their own coordinates."""
    return rank(spec) == 1


@lru_cache(maxsize=None)
def coordinate_basis(spec: CartanSpec) -> np.ndarray:
    """Matrices E_k with Z = sum_k u_k E_k; shape (d, rows, cols)."""
    rows, cols = spec.matrix_shape
    mats = []
    if spec.kind in ("I", "ball", "IV"):
        for a in range(rows):
            for b in range(cols):
                e = np.zeros((rows, cols))
                e[a, b] = 1.0
                mats.append(e)
    elif spec.kind == "II":
        for a in range(rows):
            for b in range(a + 1, cols):
                e = np.zeros((rows, cols))
                e[a, b] = 1.0
                e[b, a] = -1.0
                mats.append(e)
    else:
        for a in range(rows):
            for b in range(a, cols):
                e = np.zeros((rows, cols))
                e[a, b] = 1.0
                e[b, a] = 1.0
                mats.append(e)
    out = np.array(mats, dtype=complex)
    out.setflags(write=False)
    return out


def _coords(spec: CartanSpec, z) -> np.ndarray:
    a = np.asarray(z, dtype=complex).reshape(-1)
    if a.size != ambient_dim(spec):
        raise DimensionError(f"{spec} expects {ambient_dim(spec)} coordinates, got {a.size}")
    return a


def to_matrix(spec: CartanSpec, z) -> np.ndarray:
    """Embed independent coordinates into the (constrained) matrix form."""
    u = _coords(spec, z)
    rows, cols = spec.matrix_shape
    if spec.kind in ("I", "ball", "IV"):
        return u.reshape(rows, cols).copy()
    return np.tensordot(u, coordinate_basis(spec), axes=1)


def from_matrix(spec: CartanSpec, zmat, tol: float = 1e-12) -> np.ndarray:
    """Extract independent coordinates, validating the symmetry constraint."""
    a = np.asarray(zmat, dtype=complex)
    if a.shape != spec.matrix_shape:
        raise DimensionError(f"{spec} expects a {spec.matrix_shape} matrix, got {a.shape}")
    if spec.kind in ("I", "ball", "IV"):
        return a.reshape(-1).copy()
    sgn = -1.0 if spec.kind == "II" else 1.0
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - sgn * a.T).max() > tol * scale:
        name = "antisymmetric" if spec.kind == "II" else "symmetric"
        raise DomainError(f"matrix is not {name}")
    n = spec.n
    if spec.kind == "II":
        iu = np.triu_indices(n, 1)
    else:
        iu = np.triu_indices(n, 0)
    return a[iu].copy()


def base_margin(spec: CartanSpec, z) -> float:
    """Signed margin, positive exactly on the open domain."""
    u = _coords(spec, z)
    if spec.kind == "ball":
        return float(1.0 - np.vdot(u, u).real)
    if spec.kind == "IV":
        s = np.vdot(u, u).real
        q = abs(np.sum(u * u)) ** 2
        return float(min(1.0 - 2.0 * s + q, 1.0 - s))
    zm = to_matrix(spec, u)
    h = np.eye(zm.shape[0]) - zm @ zm.conj().T
    return float(np.linalg.eigvalsh(h)[0])


def _check_closed(spec, u, label):
    mg = base_margin(spec, u)
    if mg < CLOSED_MARGIN:
        raise DomainError(f"{label} lies outside the closed domain {spec} (margin {mg:.3e})", value=mg)


def diagonal_norm(spec: CartanSpec, z, check: bool = True) -> float:
    """N(z, z), real-valued."""
    u = _coords(spec, z)
    if check:
        _check_closed(spec, u, "z")
    if spec.kind == "ball":
        return float(1.0 - np.vdot(u, u).real)
    if spec.kind == "IV":
        s = np.vdot(u, u).real
        return float(1.0 - 2.0 * s + abs(np.sum(u * u)) ** 2)
    zm = to_matrix(spec, u)
    if spec.kind == "II":
        # singular values of an antisymmetric matrix come in equal pairs;
        # the square root of det(I - z z*) is the product over one of each pair
        s = np.linalg.svd(zm, compute_uv=False)
        pairs = s[: 2 * (spec.n // 2) : 2]
        return float(np.prod(1.0 - pairs**2))
    return float(det(np.eye(zm.shape[0]) - zm @ zm.conj().T).real)


def _type_ii_polarized(zm: np.ndarray, xm: np.ndarray) -> complex:
    n = zm.shape[0]
    prod = zm @ xm.conj().T
    eye = np.eye(n)
    root = 1.0 + 0.0j
    for k in range(1, TYPE_II_STEPS + 1):
        t = k / TYPE_II_STEPS
        dv = det(eye - (t * t) * prod)
        r = np.sqrt(dv)
        if k < TYPE_II_STEPS and abs(r) < 1e-7:
            raise BranchError(f"type II square root branch lost at step {k} (det {dv:.3e})")
        root = r if abs(r - root) <= abs(r + root) else -r
    return complex(root)


def generic_norm(spec: CartanSpec, z, xi=None, check: bool = True) -> complex:
    """Polarized generic norm N(z, conj(xi)); ``xi=None`` means xi = z."""
    u = _coords(spec, z)
    if xi is None:
        return complex(diagonal_norm(spec, u, check=check))
    v = _coords(spec, xi)
    if check:
        _check_closed(spec, u, "z")
        _check_closed(spec, v, "xi")
    if spec.kind == "ball":
        return complex(1.0 - np.sum(u * v.conj()))
    if spec.kind == "IV":
        return complex(1.0 - 2.0 * np.sum(u * v.conj()) + np.sum(u * u) * np.conj(np.sum(v * v)))
    zm = to_matrix(spec, u)
    xm = to_matrix(spec, v)
    if spec.kind == "II":
        return _type_ii_polarized(zm, xm)
    return det(np.eye(zm.shape[0]) - zm @ xm.conj().T)


def norm_gradient(spec: CartanSpec, z) -> np.ndarray:
    """Holomorphic gradient dN/dz_k of the diagonal norm N(z, z)."""
    u = _coords(spec, z)
    if spec.kind == "ball":
        return -u.conj()
    if spec.kind == "IV":
        q = np.sum(u * u)
        return -2.0 * u.conj() + 2.0 * u * np.conj(q)
    nval, a = _log_gradient(spec, u)
    return nval * a


def _det_pieces(spec, u):
    zm = to_matrix(spec, u)
    eye = np.eye(zm.shape[0])
    k = np.linalg.inv(eye - zm @ zm.conj().T)
    c = 0.5 if spec.kind == "II" else 1.0
    return zm, k, c


def _log_gradient(spec, u):
    zm, k, c = _det_pieces(spec, u)
    basis = coordinate_basis(spec)
    ke = np.einsum("ij,kjl->kil", k, basis)
    # d log N / dz_k = -c tr(K E_k Z*)
    a = -c * np.einsum("kab,ab->k", ke, zm.conj())
    return diagonal_norm(spec, u, check=False), a


def norm_hessian(spec: CartanSpec, z) -> np.ndarray:
    """Complex Hessian H[k, l] = d^2 N / dz_k dconj(z_l) of N(z, z)."""
    u = _coords(spec, z)
    d = u.size
    if spec.kind == "ball":
        return -np.eye(d, dtype=complex)
    if spec.kind == "IV":
        return -2.0 * np.eye(d, dtype=complex) + 4.0 * np.outer(u, u.conj())
    zm, k, c = _det_pieces(spec, u)
    basis = coordinate_basis(spec)
    nval, a = _log_gradient(spec, u)
    inner = np.eye(zm.shape[1]) + zm.conj().T @ k @ zm
    r = np.einsum("ij,kjl,lm->kim", k, basis, inner)
    b = -c * np.einsum("kab,lab->kl", r, basis.conj())
    return nval * (np.outer(a, a.conj()) + b)


def log_norm_hessian(spec: CartanSpec, z) -> np.ndarray:
    """Complex Hessian of log N(z, z)."""
    u = _coords(spec, z)
    nval = diagonal_norm(spec, u, check=False)
    g = norm_gradient(spec, u)
    return norm_hessian(spec, u) / nval - np.outer(g, g.conj()) / nval**2


def boundary_scale(spec: CartanSpec, z) -> float:
    """The t > 0 with t*z on the boundary of the domain (inf for z = 0)."""
    u = _coords(spec, z)
    if not np.any(u):
        return float("inf")
    if spec.kind == "ball":
        return float(1.0 / np.linalg.norm(u))
    if spec.kind == "IV":
        s = np.vdot(u, u).real
        b = abs(np.sum(u * u)) ** 2
        # smallest root of 1 - 2 s t^2 + b t^4
        return float(np.sqrt(1.0 / (s + np.sqrt(max(s * s - b, 0.0)))))
    return float(1.0 / np.linalg.norm(to_matrix(spec, u), 2))


def random_direction(spec: CartanSpec, rng) -> np.ndarray:
    d = ambient_dim(spec)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_interior(spec: CartanSpec, rng, max_fraction: float = 0.95) -> np.ndarray:
    """Random point t * s * v with v a random direction, s its boundary scale, t uniform."""
    v = random_direction(spec, rng)
    return rng.uniform(0.0, max_fraction) * boundary_scale(spec, v) * v


def project_to_base_boundary(spec: CartanSpec, z) -> np.ndarray:
    u = _coords(spec, z)
    return boundary_scale(spec, u) * u


def log_generic_norm(spec: CartanSpec, z, xi) -> complex:
    """Holomorphic branch of log N(z, conj(xi)) on the closed domain times the open one.

    N factors as a product of (1 - lambda_i) over the eigenvalues of z xi*
    (for type IV over the two roots of a quadratic), each with |lambda_i| < 1,
    so the sum of principal logs is continuous in z and equals 0 at z = 0.
    """
    u = _coords(spec, z)
    v = _coords(spec, xi)
    if spec.kind == "IV":
        s = np.sum(u * v.conj())
        q = np.sum(u * u) * np.conj(np.sum(v * v))
        disc = np.sqrt(s * s - q + 0j)
        lam = np.array([s + disc, s - disc])
        c = 1.0
    else:
        zm = to_matrix(spec, u)
        xm = to_matrix(spec, v)
        lam = np.linalg.eigvals(zm @ xm.conj().T)
        c = 0.5 if spec.kind == "II" else 1.0
    if np.any(np.abs(lam) >= 1.0 - 1e-13):
        raise BranchError("log N(z, xi) needs one argument strictly inside the domain")
    return complex(c * np.sum(np.log(1.0 - lam)))
