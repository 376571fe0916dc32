"""Defining function, Levi form and strong pseudoconvexity of Hua domains.

The defining function is ``rho = sum ||w_j||^(2 p_j) - N(z, z)``. Hessians are
complex Hessians ``H[i, j] = d^2 rho / dzeta_i dconj(zeta_j)`` in the flat
coordinates ``(z, w_(1), ..., w_(r))``, and the Levi form of a tangent vector
``T`` is ``sum H[i, j] T_i conj(T_j)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import cartan
from .errors import NonSmoothPointError, NotTangentError, SingularPointError, SmoothnessWarning
from .hua import B0, B1, BASE_EDGE, HuaPoint, HuaSpec, check_point, classify_boundary, hua_margin
from .linalg import null_space

FD_STEP = 1e-4
GRAD_FD_STEP = 1e-5
PSC_TOL = 1e-7
TANGENT_TOL = 1e-8
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TangentVector:
    xi: np.ndarray
    eta: tuple

    def flat(self) -> np.ndarray:
        return np.concatenate([self.xi, *self.eta]) if self.eta else self.xi.copy()

    @classmethod
    def from_flat(cls, spec: HuaSpec, v) -> "TangentVector":
        p = HuaPoint.from_flat(spec, v)
        return cls(p.z, p.w)


@dataclass
class LeviReport:
    point: HuaPoint
    stratum: str
    eigenvalues: list
    min_eigenvalue: float
    strongly_pseudoconvex: bool


def rho(spec: HuaSpec, p: HuaPoint) -> float:
    return -hua_margin(spec, p)


def _rho_flat(spec: HuaSpec, v: np.ndarray) -> float:
    p = HuaPoint.from_flat(spec, v)
    return sum(np.vdot(b, b).real ** e for b, e in zip(p.w, spec.exponents)) - cartan.diagonal_norm(
        spec.base, p.z, check=False
    )


def _vanishing_blocks(spec, p):
    return [k for k, b in enumerate(p.w) if not np.any(b)]


def gradient_rho(spec: HuaSpec, p: HuaPoint) -> TangentVector:
    """Holomorphic gradient of rho (the covector paired with tangent vectors)."""
    check_point(spec, p)
    for k in _vanishing_blocks(spec, p):
        if spec.exponents[k] < 1:
            raise NonSmoothPointError(f"fiber block {k + 1} vanishes and has exponent {spec.exponents[k]} < 1")
    if any(e < 1 for e in spec.exponents):
        warnings.warn("fiber exponents below 1: boundary is not smooth where those blocks vanish", SmoothnessWarning, stacklevel=2)
    gz = -cartan.norm_gradient(spec.base, p.z)
    gw = []
    for b, e in zip(p.w, spec.exponents):
        s = np.vdot(b, b).real
        gw.append(e * s ** (e - 1) * b.conj() if np.any(b) else np.zeros_like(b))
    return TangentVector(gz, tuple(gw))


def gradient_rho_fd(spec: HuaSpec, p: HuaPoint, h: float = GRAD_FD_STEP) -> np.ndarray:
    """Central-difference holomorphic gradient, d/dzeta = (d/dx - i d/dy) / 2."""
    v = p.flat()
    g = np.zeros(v.size, complex)
    for i in range(v.size):
        e = np.zeros(v.size, complex)
        e[i] = h
        dx = (_rho_flat(spec, v + e) - _rho_flat(spec, v - e)) / (2 * h)
        dy = (_rho_flat(spec, v + 1j * e) - _rho_flat(spec, v - 1j * e)) / (2 * h)
        g[i] = 0.5 * (dx - 1j * dy)
    return g


def _fiber_hessian(b: np.ndarray, e: float) -> np.ndarray:
    n = b.size
    s = np.vdot(b, b).real
    if s == 0.0:
        if e == 1.0:
            return np.eye(n, dtype=complex)
        if e >= 2.0:
            return np.zeros((n, n), complex)
        raise NonSmoothPointError(f"vanishing block with exponent {e} is not C^2")
    return e * s ** (e - 1) * np.eye(n) + e * (e - 1) * s ** (e - 2) * np.outer(b.conj(), b)


def hessian_rho(spec: HuaSpec, p: HuaPoint) -> np.ndarray:
    check_point(spec, p)
    dim = spec.dim
    h = np.zeros((dim, dim), complex)
    d = spec.base_dim
    h[:d, :d] = -cartan.norm_hessian(spec.base, p.z)
    start = d
    for b, e in zip(p.w, spec.exponents):
        n = b.size
        h[start : start + n, start : start + n] = _fiber_hessian(b, e)
        start += n
    return h


def hessian_rho_fd(spec: HuaSpec, p: HuaPoint, h: float = FD_STEP) -> np.ndarray:
    """Complex Hessian of rho from central differences of the real Hessian."""
    v = p.flat()
    n = v.size
    steps = [np.eye(n, dtype=complex)[i] for i in range(n)] + [1j * np.eye(n, dtype=complex)[i] for i in range(n)]
    f0 = _rho_flat(spec, v)
    plus = [_rho_flat(spec, v + h * s) for s in steps]
    minus = [_rho_flat(spec, v - h * s) for s in steps]
    m = 2 * n
    real_h = np.zeros((m, m))
    for a in range(m):
        real_h[a, a] = (plus[a] - 2 * f0 + minus[a]) / h**2
        for b in range(a + 1, m):
            sa, sb = steps[a], steps[b]
            val = (
                _rho_flat(spec, v + h * (sa + sb))
                - _rho_flat(spec, v + h * (sa - sb))
                - _rho_flat(spec, v - h * (sa - sb))
                + _rho_flat(spec, v - h * (sa + sb))
            ) / (4 * h**2)
            real_h[a, b] = real_h[b, a] = val
    xx, yy = real_h[:n, :n], real_h[n:, n:]
    xy, yx = real_h[:n, n:], real_h[n:, :n]
    return 0.25 * (xx + yy + 1j * (xy - yx))


def _smooth_point_check(spec: HuaSpec, p: HuaPoint, tol: float = BOUNDARY_TOL, allow_edge: bool = False) -> str:
    st = classify_boundary(spec, p, tol)
    if st.tag == BASE_EDGE and not allow_edge:
        raise NonSmoothPointError("points of bOmega x {0} are excluded from the Levi classification")
    if st.tag not in (B0, B1) and not (st.tag == BASE_EDGE and allow_edge):
        raise NotTangentError(f"point is not on the boundary ({st.tag})")
    for k in _vanishing_blocks(spec, p):
        e = spec.exponents[k]
        if e != 1.0 and e < 2.0:
            raise NonSmoothPointError(f"fiber block {k + 1} vanishes with exponent {e}; the boundary is not C^2 there")
    return st.tag


def complex_tangent_basis(spec: HuaSpec, p: HuaPoint) -> list:
    """Orthonormal basis of the kernel of T -> <d rho, T> (flat vectors)."""
    g = gradient_rho(spec, p).flat()
    if np.linalg.norm(g) < 1e-14:
        raise SingularPointError("gradient of rho vanishes")
    return null_space(g.reshape(-1, 1), tol=1e-12)


def _check_tangent(g, t, tol=TANGENT_TOL):
    pairing = abs(np.sum(g * t))
    if pairing > tol * max(1.0, np.linalg.norm(g)) * max(1.0, np.linalg.norm(t)):
        raise NotTangentError(f"vector is not complex tangent (pairing {pairing:.3e})")


def contract(h: np.ndarray, t: np.ndarray) -> complex:
    return complex(t @ h @ t.conj())


def levi_form(spec: HuaSpec, p: HuaPoint, t, mode: str = "analytic", hessian=None) -> float:
    """L_rho(T, T) at a boundary point where rho is C^2.

    Base-edge points are accepted here as long as the gradient of rho is
    nonzero (e.g. over a ball base); the classification below still skips them.
    """
    _smooth_point_check(spec, p, allow_edge=True)
    tv = t.flat() if isinstance(t, TangentVector) else np.asarray(t, dtype=complex).reshape(-1)
    g = gradient_rho(spec, p).flat()
    if np.linalg.norm(g) < 1e-14:
        raise SingularPointError("gradient of rho vanishes")
    _check_tangent(g, tv)
    if hessian is None:
        hessian = hessian_rho(spec, p) if mode == "analytic" else hessian_rho_fd(spec, p)
    val = contract(hessian, tv)
    assert abs(val.imag) <= 1e-9 * max(1.0, abs(val.real)), f"Levi form not real: {val}"
    return float(val.real)


def levi_matrix(spec: HuaSpec, p: HuaPoint, mode: str = "analytic", basis=None) -> np.ndarray:
    """Hermitian matrix of the Levi form on the complex tangent space.

    Entry (a, b) is sum H[i, j] T_a[i] conj(T_b[j]).
    """
    _smooth_point_check(spec, p)
    if basis is None:
        basis = complex_tangent_basis(spec, p)
    h = hessian_rho(spec, p) if mode == "analytic" else hessian_rho_fd(spec, p)
    x = np.array(basis).T
    return x.T @ h @ x.conj()


def classify_pseudoconvexity(spec: HuaSpec, p: HuaPoint, tol: float = PSC_TOL, mode: str = "analytic") -> LeviReport:
    tag = _smooth_point_check(spec, p)
    lm = levi_matrix(spec, p, mode)
    lm = 0.5 * (lm + lm.conj().T)
    ev = np.linalg.eigvalsh(lm) if lm.size else np.zeros(0)
    mn = float(ev[0]) if ev.size else float("inf")
    return LeviReport(p, tag, [float(x) for x in ev], mn, bool(mn > tol))


def levi_terms(spec: HuaSpec, p: HuaPoint, t) -> tuple[float, float, float]:
    """The three Cauchy-Schwarz brackets whose sum is the Levi form at a b0 point.

    Returns (fiber Gram term, exponent-weighted term, base term). Each is
    nonnegative; the middle term is normalised by sum ||w_k||^(2 p_k), which
    equals N(z, z) on the boundary.
    """
    tv = TangentVector.from_flat(spec, t.flat() if isinstance(t, TangentVector) else t)
    gram = 0.0
    weighted_sq = 0.0
    pairing = 0.0 + 0.0j
    total = 0.0
    for b, eta, e in zip(p.w, tv.eta, spec.exponents):
        s = np.vdot(b, b).real
        c = np.vdot(b, eta)  # conj(w) . eta
        gram += e * s ** (e - 2) * (s * np.vdot(eta, eta).real - abs(c) ** 2)
        weighted_sq += e * e * s ** (e - 2) * abs(c) ** 2
        pairing += e * s ** (e - 1) * c
        total += s**e
    middle = (weighted_sq * total - abs(pairing) ** 2) / total
    nval = cartan.diagonal_norm(spec.base, p.z, check=False)
    lh = cartan.log_norm_hessian(spec.base, p.z)
    base = -nval * (tv.xi @ lh @ tv.xi.conj()).real
    return float(gram), float(middle), float(base)


def degenerate_direction(spec: HuaSpec, p: HuaPoint, j: int, rng=None) -> np.ndarray:
    """Unit tangent vector supported on vanishing fiber block ``j`` (1-based)."""
    n = spec.fiber_dims[j - 1]
    eta = np.zeros(n, complex)
    if rng is None:
        eta[0] = 1.0
    else:
        eta = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        eta /= np.linalg.norm(eta)
    blocks = [np.zeros(k, complex) for k in spec.fiber_dims]
    blocks[j - 1] = eta
    return TangentVector(np.zeros(spec.base_dim, complex), tuple(blocks)).flat()
