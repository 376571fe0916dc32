"""Explicit automorphisms of classical domains, Hua domains and ellipsoids.

A base automorphism is stored as a chain of elementary steps (Moebius maps
and linear isotropies) together with ``z0``, the preimage of the origin, so
that the fiber factor ``N(z0, z0)^(1/2p) / N(z, z0)^(1/p)`` can be evaluated
without numerically inverting anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cartan
from .cartan import CartanSpec
from .errors import DimensionError, DomainError, InvalidAutomorphismError, UnsupportedError
from .hua import EllipsoidSpec, HuaPoint, HuaSpec, check_point, random_interior_point, split_blocks
from .linalg import hermitian_inv_sqrt, hermitian_sqrt, random_orthogonal, random_unitary, rng_from, unitary_check

UNITARY_TOL = 1e-10
SYMMETRY_TOL = 1e-9
COMPOSE_CHECKS = 8
COMPOSE_TOL = 1e-8


# ---------------------------------------------------------------- elementary maps


def ball_mobius_map(a, z) -> np.ndarray:
    """Involutive ball automorphism exchanging ``a`` and 0."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    z = np.asarray(z, dtype=complex).reshape(-1)
    aa = np.vdot(a, a).real
    if aa == 0.0:
        return z.copy()
    za = np.sum(z * a.conj())
    proj = (za / aa) * a
    s = np.sqrt(1.0 - aa)
    return (a - proj - s * (z - proj)) / (1.0 - za)


def type_i_mobius_map(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    """(I - a a*)^(-1/2) (z - a) (I - a* z)^(-1) (I - a* a)^(1/2) on matrices."""
    m, n = a.shape
    left = hermitian_inv_sqrt(np.eye(m) - a @ a.conj().T)
    right = hermitian_sqrt(np.eye(n) - a.conj().T @ a)
    mid = np.eye(n) - a.conj().T @ z
    return left @ np.linalg.solve(mid.T, (z - a).T).T @ right


@dataclass(frozen=True, eq=False)
class Step:
    """One elementary automorphism. ``kind`` is 'mobius' or 'linear'.

    mobius: ``a`` is a base point (coordinates); the ball uses the involutive
    map, the matrix types the map sending a to 0 (its inverse is the one at -a).
    linear: ``left``/``right`` are unitary (or real orthogonal for type IV,
    with ``phase`` the scalar e^(i theta)).
    """

    kind: str
    a: np.ndarray | None = None
    left: np.ndarray | None = None
    right: np.ndarray | None = None
    phase: complex = 1.0

    def apply(self, spec: CartanSpec, z: np.ndarray) -> np.ndarray:
        if self.kind == "mobius":
            if spec.kind == "ball":
                return ball_mobius_map(self.a, z)
            zm = cartan.to_matrix(spec, z)
            am = cartan.to_matrix(spec, self.a)
            return cartan.from_matrix(spec, type_i_mobius_map(am, zm), tol=SYMMETRY_TOL)
        if spec.kind == "ball":
            return z @ self.right
        if spec.kind == "IV":
            return self.phase * (z @ self.right)
        zm = cartan.to_matrix(spec, z)
        out = self.left @ zm @ self.right
        return cartan.from_matrix(spec, out, tol=SYMMETRY_TOL)

    def inverse(self, spec: CartanSpec) -> "Step":
        if self.kind == "mobius":
            return self if spec.kind == "ball" else Step("mobius", a=-self.a)
        left = None if self.left is None else self.left.conj().T
        right = None if self.right is None else self.right.conj().T
        return Step("linear", left=left, right=right, phase=np.conj(self.phase))

    def to_json(self) -> dict:
        from .io import encode_array, encode_complex

        out = {"kind": self.kind}
        if self.kind == "mobius":
            out["a"] = encode_array(self.a)
        else:
            if self.left is not None:
                out["left"] = encode_array(self.left)
            if self.right is not None:
                out["right"] = encode_array(self.right)
            out["phase"] = encode_complex(self.phase)
        return out


@dataclass(frozen=True, eq=False)
class BaseAut:
    spec: CartanSpec
    steps: tuple = ()
    z0: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.z0 is None:
            object.__setattr__(self, "z0", _run(self.spec, _inverse_steps(self.spec, self.steps), np.zeros(self.spec.dim, complex)))

    def __call__(self, z) -> np.ndarray:
        return _run(self.spec, self.steps, np.asarray(z, dtype=complex).reshape(-1))

    def inverse(self) -> "BaseAut":
        inv = _inverse_steps(self.spec, self.steps)
        return BaseAut(self.spec, inv, self(np.zeros(self.spec.dim, complex)))

    def then(self, other: "BaseAut") -> "BaseAut":
        """``other`` after ``self``."""
        if other.spec != self.spec:
            raise DimensionError("base automorphisms act on different domains")
        return BaseAut(self.spec, self.steps + other.steps)

    @property
    def is_linear(self) -> bool:
        return all(s.kind == "linear" for s in self.steps)


def _run(spec, steps, z):
    for s in steps:
        z = s.apply(spec, z)
    return z


def _inverse_steps(spec, steps):
    return tuple(s.inverse(spec) for s in reversed(steps))


def identity_base(spec: CartanSpec) -> BaseAut:
    return BaseAut(spec, (), np.zeros(spec.dim, complex))


def _require_interior(spec, a, label="a"):
    mg = cartan.base_margin(spec, a)
    if mg <= 0:
        raise DomainError(f"{label} must lie in the open domain {spec} (margin {mg:.3e})", value=mg)


def ball_mobius(a) -> BaseAut:
    a = np.asarray(a, dtype=complex).reshape(-1)
    spec = CartanSpec.ball(a.size)
    _require_interior(spec, a)
    if not np.any(a):
        return identity_base(spec)
    return BaseAut(spec, (Step("mobius", a=a.copy()),), a.copy())


def typeI_mobius(spec: CartanSpec, a) -> BaseAut:
    """Moebius map of a matrix domain sending ``a`` to 0 (types I, II, III)."""
    if spec.kind not in ("I", "II", "III"):
        raise UnsupportedError(f"matrix Moebius maps are not defined for {spec}")
    a = np.asarray(a, dtype=complex).reshape(-1)
    if a.size != spec.dim:
        raise DimensionError(f"{spec} expects {spec.dim} coordinates")
    _require_interior(spec, a)
    if not np.any(a):
        return identity_base(spec)
    return BaseAut(spec, (Step("mobius", a=a.copy()),), a.copy())


def mobius_to_origin(spec: CartanSpec, a) -> BaseAut:
    if spec.kind == "ball":
        return ball_mobius(a)
    if spec.kind == "IV":
        raise UnsupportedError("Moebius maps of the Lie ball are not implemented; only linear isotropies")
    return typeI_mobius(spec, a)


def base_aut_for(spec: CartanSpec, source, target) -> BaseAut:
    """Automorphism sending ``source`` to ``target`` through the origin."""
    if spec.kind == "IV":
        raise UnsupportedError("transitivity on the Lie ball needs Moebius maps, which are out of scope")
    source = np.asarray(source, dtype=complex).reshape(-1)
    target = np.asarray(target, dtype=complex).reshape(-1)
    _require_interior(spec, source, "source")
    _require_interior(spec, target, "target")
    return mobius_to_origin(spec, source).then(mobius_to_origin(spec, target).inverse())


def linear_isotropy(spec: CartanSpec, left=None, right=None, phase: complex = 1.0) -> BaseAut:
    """Linear automorphism: U z V (I), U z U^T (II, III), e^(i theta) z O (IV), z V (ball)."""
    rows, cols = spec.matrix_shape
    if spec.kind in ("II", "III"):
        right = left.T if right is None else right
    if spec.kind == "IV":
        o = np.asarray(right)
        if np.iscomplexobj(o) and np.abs(o.imag).max() > UNITARY_TOL:
            raise InvalidAutomorphismError("type IV isotropy needs a real orthogonal matrix")
        o = o.real.astype(float)
        if not unitary_check(o, UNITARY_TOL) or abs(abs(phase) - 1.0) > UNITARY_TOL:
            raise InvalidAutomorphismError("type IV isotropy needs a real orthogonal matrix and a unimodular phase")
        return BaseAut(spec, (Step("linear", right=o.astype(complex), phase=complex(phase)),), np.zeros(spec.dim, complex))
    if spec.kind == "ball":
        left = None
    for mat, size in ((left, rows), (right, cols)):
        if mat is None:
            continue
        if np.shape(mat) != (size, size) or not unitary_check(mat, UNITARY_TOL):
            raise InvalidAutomorphismError(f"isotropy factor must be a {size}x{size} unitary")
    left = None if left is None else np.asarray(left, dtype=complex)
    right = np.eye(cols, dtype=complex) if right is None else np.asarray(right, dtype=complex)
    if spec.kind in ("II", "III") and np.linalg.norm(right - left.T) > UNITARY_TOL:
        raise InvalidAutomorphismError("types II and III need z -> U z U^T")
    if spec.kind == "I" and left is None:
        left = np.eye(rows, dtype=complex)
    return BaseAut(spec, (Step("linear", left=left, right=right),), np.zeros(spec.dim, complex))


def random_isotropy(spec: CartanSpec, rng) -> BaseAut:
    rng = rng_from(rng)
    rows, cols = spec.matrix_shape
    seed = int(rng.integers(2**63))
    if spec.kind == "IV":
        return linear_isotropy(spec, right=random_orthogonal(cols, seed), phase=np.exp(1j * rng.uniform(0, 2 * np.pi)))
    if spec.kind == "ball":
        return linear_isotropy(spec, right=random_unitary(cols, seed))
    if spec.kind in ("II", "III"):
        return linear_isotropy(spec, left=random_unitary(rows, seed))
    return linear_isotropy(spec, left=random_unitary(rows, seed), right=random_unitary(cols, seed + 1))


def random_base_aut(spec: CartanSpec, rng, max_fraction: float = 0.8) -> BaseAut:
    """Isotropy followed (except for type IV) by a Moebius map to a random point."""
    rng = rng_from(rng)
    iso = random_isotropy(spec, rng)
    if spec.kind == "IV":
        return iso
    a = cartan.random_interior(spec, rng, max_fraction)
    return iso.then(mobius_to_origin(spec, a))


# ---------------------------------------------------------------- Hua domains


def _factor(base: BaseAut, z: np.ndarray, p: float) -> complex:
    """N(z0, z0)^(1/2p) / N(z, z0)^(1/p) on the holomorphic branch through z = 0."""
    z0 = base.z0
    if not np.any(z0):
        return 1.0 + 0.0j
    n00 = cartan.diagonal_norm(base.spec, z0, check=False)
    lg = cartan.log_generic_norm(base.spec, z, z0)
    return complex(np.exp(np.log(n00) / (2 * p) - lg / p))


@dataclass(frozen=True, eq=False)
class GammaAut:
    """(z, w) -> (phi(z), U_j w_j N(z0, z0)^(1/2p_j) / N(z, z0)^(1/p_j))."""

    spec: HuaSpec
    phi: BaseAut
    unitaries: tuple

    def __post_init__(self):
        if self.phi.spec != self.spec.base:
            raise InvalidAutomorphismError("base automorphism acts on a different domain")
        us = tuple(np.asarray(u, dtype=complex) for u in self.unitaries)
        if len(us) != self.spec.r:
            raise InvalidAutomorphismError(f"expected {self.spec.r} unitaries, got {len(us)}")
        for j, (u, n) in enumerate(zip(us, self.spec.fiber_dims), start=1):
            if u.shape != (n, n) or not unitary_check(u, UNITARY_TOL):
                raise InvalidAutomorphismError(f"U_{j} must be a {n}x{n} unitary")
        object.__setattr__(self, "unitaries", us)

    def __call__(self, p: HuaPoint) -> HuaPoint:
        return gamma_apply(self, p)

    def scalars(self, z) -> list:
        return [_factor(self.phi, z, e) for e in self.spec.exponents]


def gamma_apply(g: GammaAut, p: HuaPoint) -> HuaPoint:
    check_point(g.spec, p)
    mb = cartan.base_margin(g.spec.base, p.z)
    if mb < cartan.CLOSED_MARGIN:
        raise DomainError("point lies outside the closed domain", value=mb)
    facs = g.scalars(p.z)
    w = tuple(f * (u @ b) for f, u, b in zip(facs, g.unitaries, p.w))
    return HuaPoint(g.phi(p.z), w)


def identity_gamma(spec: HuaSpec) -> GammaAut:
    return GammaAut(spec, identity_base(spec.base), tuple(np.eye(n, dtype=complex) for n in spec.fiber_dims))


def _check_witness(target: GammaAut, reference, spec, rng, count=COMPOSE_CHECKS):
    for _ in range(count):
        p = random_interior_point(spec, rng)
        a = target(p).flat()
        b = reference(p).flat()
        res = np.linalg.norm(a - b)
        if res > COMPOSE_TOL * max(1.0, np.linalg.norm(b)):
            raise InvalidAutomorphismError(f"group law check failed (residual {res:.3e})")


def _fix_phases(spec, phi, raw_unitaries, scalar_fn):
    """Fold the constant unimodular ratio scalar_fn(0) / factor(0) into the unitaries."""
    z = np.zeros(spec.base_dim, complex)
    out = []
    for j, (u, e) in enumerate(zip(raw_unitaries, spec.exponents)):
        lam = scalar_fn(z, j) / _factor(phi, z, e)
        out.append(lam / abs(lam) * u)
    return tuple(out)


def gamma_compose(g1: GammaAut, g2: GammaAut, seed: int = 0) -> GammaAut:
    """Element of Gamma agreeing with ``g1 o g2`` (g2 applied first), sample-checked."""
    if g1.spec != g2.spec:
        raise InvalidAutomorphismError("cannot compose automorphisms of different domains")
    spec = g1.spec
    phi = g2.phi.then(g1.phi)
    raw = [u1 @ u2 for u1, u2 in zip(g1.unitaries, g2.unitaries)]

    def scalar(z, j):
        e = spec.exponents[j]
        return _factor(g2.phi, z, e) * _factor(g1.phi, g2.phi(z), e)

    out = GammaAut(spec, phi, _fix_phases(spec, phi, raw, scalar))
    _check_witness(out, lambda p: g1(g2(p)), spec, rng_from(seed))
    return out


def gamma_invert(g: GammaAut, seed: int = 0) -> GammaAut:
    spec = g.spec
    phi = g.phi.inverse()
    raw = [u.conj().T for u in g.unitaries]

    def scalar(z, j):
        return 1.0 / _factor(g.phi, phi(z), spec.exponents[j])

    out = GammaAut(spec, phi, _fix_phases(spec, phi, raw, scalar))
    rng = rng_from(seed)
    for _ in range(COMPOSE_CHECKS):
        p = random_interior_point(spec, rng)
        q = out(g(p))
        if not q.allclose(p, COMPOSE_TOL * max(1.0, np.linalg.norm(p.flat()))):
            raise InvalidAutomorphismError("inverse check failed")
    return out


def random_gamma(spec: HuaSpec, rng, max_fraction: float = 0.8) -> GammaAut:
    rng = rng_from(rng)
    phi = random_base_aut(spec.base, rng, max_fraction)
    us = tuple(random_unitary(n, int(rng.integers(2**63))) for n in spec.fiber_dims)
    return GammaAut(spec, phi, us)


# ---------------------------------------------------------------- ellipsoids


@dataclass(frozen=True, eq=False)
class EllipsoidAut:
    """Either a block permutation with unitaries or a Moebius map in block 1.

    linear: zeta -> (gamma_1 zeta_sigma(1), ..., gamma_r zeta_sigma(r));
    mobius: zeta -> (T_a zeta_1, zeta_k psi_a(zeta_1)^(1/2p_k)), followed by
    the block unitaries.
    """

    spec: EllipsoidSpec
    kind: str
    sigma: tuple = ()
    unitaries: tuple = ()
    a: np.ndarray | None = None

    def __call__(self, zeta) -> np.ndarray:
        blocks = split_blocks(self.spec.fiber_dims, zeta)
        if self.kind == "linear":
            return np.concatenate([u @ blocks[s - 1] for u, s in zip(self.unitaries, self.sigma)])
        a = self.a
        z1 = blocks[0]
        out = [ball_mobius_map(a, z1)]
        den = 1.0 - np.sum(z1 * a.conj())
        if den.real <= 0:
            raise DomainError("1 - <zeta_1, a> must have positive real part")
        log_psi_half = 0.5 * np.log(1.0 - np.vdot(a, a).real) - np.log(den)
        for b, e in zip(blocks[1:], self.spec.exponents[1:]):
            out.append(np.exp(log_psi_half / e) * b)
        return np.concatenate([u @ b for u, b in zip(self.unitaries, out)])


def _check_unitaries(dims, unitaries):
    us = tuple(np.asarray(u, dtype=complex) for u in unitaries)
    if len(us) != len(dims):
        raise InvalidAutomorphismError(f"expected {len(dims)} unitaries")
    for j, (u, n) in enumerate(zip(us, dims), start=1):
        if u.shape != (n, n) or not unitary_check(u, UNITARY_TOL):
            raise InvalidAutomorphismError(f"gamma_{j} must be a {n}x{n} unitary")
    return us


def ellipsoid_linear(spec: EllipsoidSpec, sigma, unitaries=None) -> EllipsoidAut:
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(1, spec.r + 1)):
        raise InvalidAutomorphismError(f"{sigma} is not a permutation of 1..{spec.r}")
    for i, s in enumerate(sigma):
        if spec.fiber_dims[s - 1] != spec.fiber_dims[i] or spec.exponents[s - 1] != spec.exponents[i]:
            raise InvalidAutomorphismError(
                f"sigma({i + 1}) = {s} pairs block (n={spec.fiber_dims[i]}, p={spec.exponents[i]:g}) "
                f"with (n={spec.fiber_dims[s - 1]}, p={spec.exponents[s - 1]:g})"
            )
    if unitaries is None:
        unitaries = [np.eye(n, dtype=complex) for n in spec.fiber_dims]
    return EllipsoidAut(spec, "linear", sigma, _check_unitaries(spec.fiber_dims, unitaries))


def ellipsoid_mobius(spec: EllipsoidSpec, a, unitaries=None) -> EllipsoidAut:
    if spec.exponents[0] != 1.0:
        raise InvalidAutomorphismError("Moebius automorphisms need p_1 = 1")
    a = np.asarray(a, dtype=complex).reshape(-1)
    if a.size != spec.fiber_dims[0]:
        raise DimensionError(f"a must have {spec.fiber_dims[0]} entries")
    if np.vdot(a, a).real >= 1.0:
        raise DomainError("a must lie in the open unit ball")
    if unitaries is None:
        unitaries = [np.eye(n, dtype=complex) for n in spec.fiber_dims]
    return EllipsoidAut(spec, "mobius", tuple(range(1, spec.r + 1)), _check_unitaries(spec.fiber_dims, unitaries), a.copy())


def psi(a, zeta1) -> complex:
    a = np.asarray(a, dtype=complex).reshape(-1)
    zeta1 = np.asarray(zeta1, dtype=complex).reshape(-1)
    return complex((1.0 - np.vdot(a, a).real) / (1.0 - np.sum(zeta1 * a.conj())) ** 2)


def random_ellipsoid_aut(spec: EllipsoidSpec, rng, max_fraction: float = 0.8) -> EllipsoidAut:
    """Moebius map when p_1 = 1, otherwise a random admissible block permutation."""
    rng = rng_from(rng)
    us = [random_unitary(n, int(rng.integers(2**63))) for n in spec.fiber_dims]
    if spec.delta:
        a = cartan.random_interior(CartanSpec.ball(spec.fiber_dims[0]), rng, max_fraction)
        return ellipsoid_mobius(spec, a, us)
    groups: dict = {}
    for i, key in enumerate(zip(spec.fiber_dims, spec.exponents)):
        groups.setdefault(key, []).append(i + 1)
    sigma = [0] * spec.r
    for members in groups.values():
        shuffled = list(rng.permutation(members))
        for i, s in zip(members, shuffled):
            sigma[i - 1] = int(s)
    return ellipsoid_linear(spec, sigma, us)
