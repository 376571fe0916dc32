"""Independent reference computations used only by the tests."""

import numpy as np
import sympy


def pfaffian(a: np.ndarray) -> complex:
    """Pfaffian of an antisymmetric matrix by Parlett-Reid elimination with pivoting."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if n % 2:
        return 0.0
    pf = 1.0 + 0.0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1 :, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0:
            return 0.0
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2 :] / a[k, k + 1]
            a[k + 2 :, k + 2 :] += np.outer(tau, a[k + 2 :, k + 1]) - np.outer(a[k + 2 :, k + 1], tau)
    return pf


def type_ii_norm(zm: np.ndarray, xm: np.ndarray) -> complex:
    """N(z, conj(xi)) for antisymmetric z, xi as a Pfaffian, a polynomial with value 1 at 0."""
    n = zm.shape[0]
    big = np.block([[zm, np.eye(n)], [-np.eye(n), xm.conj()]])
    return (-1) ** (n * (n - 1) // 2) * pfaffian(big)


def wirtinger_hessian(f, v: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """d^2 f / dv_i dconj(v_j) = (f_xx + f_yy + i (f_xy - f_yx)) / 4 by central differences."""
    n = v.size
    e = np.eye(n)

    def mixed(a, b):
        return (f(v + h * (a + b)) - f(v + h * (a - b)) - f(v - h * (a - b)) + f(v - h * (a + b))) / (4 * h * h)

    out = np.zeros((n, n), complex)
    for i in range(n):
        for j in range(n):
            xx = mixed(e[i], e[j])
            yy = mixed(1j * e[i], 1j * e[j])
            xy = mixed(e[i], 1j * e[j])
            yx = mixed(1j * e[i], e[j])
            out[i, j] = 0.25 * (xx + yy + 1j * (xy - yx))
    return out


def exact_block_solvable(blocks) -> bool:
    """Exact rational decision: the null space of the stacked system meets every block."""
    mats = [sympy.Matrix(b) for b in blocks]
    stacked = sympy.Matrix.vstack(*mats)
    null = stacked.T.nullspace()
    if not null:
        return False
    basis = sympy.Matrix.hstack(*null)
    start = 0
    for m in mats:
        if basis[start : start + m.rows, :].is_zero_matrix:
            return False
        start += m.rows
    return True


def numeric_rho(spec, v):
    from huadomains import cartan
    from huadomains.hua import HuaPoint

    p = HuaPoint.from_flat(spec, v)
    s = sum(np.vdot(b, b).real ** e for b, e in zip(p.w, spec.exponents))
    return s - cartan.diagonal_norm(spec.base, p.z, check=False)


def _sym_matrix(n, u, sign):
    m = np.zeros((n, n), complex)
    k = 0
    for a in range(n):
        for b in range(a if sign > 0 else a + 1, n):
            m[a, b] = u[k]
            m[b, a] = sign * u[k]
            k += 1
    return m


def direct_norm(spec, u) -> float:
    """N(z, z) from the closed formulas, built straight from the coordinates."""
    u = np.asarray(u, complex)
    if spec.kind == "ball":
        return float(1 - np.vdot(u, u).real)
    if spec.kind == "IV":
        return float((1 - 2 * np.vdot(u, u) + abs(np.sum(u * u)) ** 2).real)
    if spec.kind == "I":
        z = u.reshape(spec.m, spec.n)
        return float(np.linalg.det(np.eye(spec.m) - z @ z.conj().T).real)
    if spec.kind == "III":
        z = _sym_matrix(spec.n, u, 1)
        return float(np.linalg.det(np.eye(spec.n) - z @ z.conj().T).real)
    z = _sym_matrix(spec.n, u, -1)
    return float(type_ii_norm(z, z).real)
