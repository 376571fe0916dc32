"""Hua domains and generalized complex ellipsoids.

A Hua domain over a base ``Omega`` with fiber blocks ``w_(1..r)`` is the set
where ``sum ||w_j||^(2 p_j) < N(z, z)``. Block indices in the public API are
1-based, matching the usual way the strata are written down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import cartan
from .cartan import CartanSpec
from .errors import DimensionError, DomainError, InvalidSpecError, NonStandardSpecError

DEFAULT_TOL = 1e-9


def _check_exponents(dims, exps):
    if len(dims) != len(exps):
        raise InvalidSpecError("fiber_dims and exponents differ in length")
    for n in dims:
        if int(n) != n or n < 1:
            raise InvalidSpecError(f"fiber dimension must be a positive integer, got {n}")
    for p in exps:
        if not (p > 0 and math.isfinite(p)):
            raise InvalidSpecError(f"exponent must be a positive real, got {p}")


@dataclass(frozen=True)
class HuaSpec:
    base: CartanSpec
    fiber_dims: tuple = ()
    exponents: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "fiber_dims", tuple(int(n) for n in self.fiber_dims))
        object.__setattr__(self, "exponents", tuple(float(p) for p in self.exponents))
        _check_exponents(self.fiber_dims, self.exponents)

    @property
    def r(self) -> int:
        return len(self.fiber_dims)

    @property
    def delta(self) -> int:
        return 1 if self.r and self.exponents[0] == 1.0 else 0

    @property
    def base_dim(self) -> int:
        return cartan.ambient_dim(self.base)

    @property
    def fiber_dim(self) -> int:
        return sum(self.fiber_dims)

    @property
    def dim(self) -> int:
        return self.base_dim + self.fiber_dim

    def __str__(self):
        dims = ",".join(str(n) for n in self.fiber_dims)
        exps = ",".join(f"{p:g}" for p in self.exponents)
        return f"H_{self.base}(({dims});({exps}))"


@dataclass(frozen=True)
class EllipsoidSpec:
    """Generalized complex ellipsoid {sum ||zeta_k||^(2 p_k) < 1}."""

    fiber_dims: tuple
    exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "fiber_dims", tuple(int(n) for n in self.fiber_dims))
        object.__setattr__(self, "exponents", tuple(float(p) for p in self.exponents))
        _check_exponents(self.fiber_dims, self.exponents)
        if not self.fiber_dims:
            raise InvalidSpecError("an ellipsoid needs at least one block")
        if any(p == 1.0 for p in self.exponents[1:]):
            raise InvalidSpecError("an exponent equal to 1 is only allowed in slot 1")

    @property
    def r(self) -> int:
        return len(self.fiber_dims)

    @property
    def delta(self) -> int:
        return 1 if self.exponents[0] == 1.0 else 0

    @property
    def dim(self) -> int:
        return sum(self.fiber_dims)

    def __str__(self):
        dims = ",".join(str(n) for n in self.fiber_dims)
        exps = ",".join(f"{p:g}" for p in self.exponents)
        return f"Sigma(({dims});({exps}))"


@dataclass(frozen=True, eq=False)
class HuaPoint:
    z: np.ndarray
    w: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "z", np.asarray(self.z, dtype=complex).reshape(-1))
        object.__setattr__(self, "w", tuple(np.asarray(b, dtype=complex).reshape(-1) for b in self.w))

    def flat(self) -> np.ndarray:
        return np.concatenate([self.z, *self.w]) if self.w else self.z.copy()

    @classmethod
    def from_flat(cls, spec: HuaSpec, v) -> "HuaPoint":
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.size != spec.dim:
            raise DimensionError(f"{spec} expects {spec.dim} coordinates, got {v.size}")
        d = spec.base_dim
        blocks = []
        start = d
        for n in spec.fiber_dims:
            blocks.append(v[start : start + n])
            start += n
        return cls(v[:d], tuple(blocks))

    def scaled(self, t: float) -> "HuaPoint":
        return HuaPoint(t * self.z, tuple(t * b for b in self.w))

    def allclose(self, other: "HuaPoint", atol: float) -> bool:
        return bool(np.linalg.norm(self.flat() - other.flat()) <= atol)

    def __repr__(self):
        return f"HuaPoint(z={self.z!r}, w={list(self.w)!r})"


def origin(spec: HuaSpec) -> HuaPoint:
    return HuaPoint(np.zeros(spec.base_dim, complex), tuple(np.zeros(n, complex) for n in spec.fiber_dims))


def check_point(spec: HuaSpec, p: HuaPoint) -> None:
    if p.z.size != spec.base_dim:
        raise DimensionError(f"base part has {p.z.size} coordinates, {spec} expects {spec.base_dim}")
    if len(p.w) != spec.r:
        raise DimensionError(f"point has {len(p.w)} fiber blocks, {spec} expects {spec.r}")
    for j, (b, n) in enumerate(zip(p.w, spec.fiber_dims), start=1):
        if b.size != n:
            raise DimensionError(f"fiber block {j} has {b.size} entries, expected {n}")


def fiber_sum(exponents, blocks) -> float:
    return float(sum(np.vdot(b, b).real ** p for b, p in zip(blocks, exponents)))


# ---------------------------------------------------------------- standard form


def is_standard(spec: HuaSpec) -> bool:
    ones = [k for k, p in enumerate(spec.exponents) if p == 1.0]
    if cartan.is_ball_like(spec.base):
        return not ones
    return ones in ([], [0])


@dataclass(frozen=True)
class Relabeling:
    """Coordinate map from a spec to its standard form.

    ``order[i]`` is the original (0-based) index of the block placed in new
    slot ``i``; ``merged`` is the original index of a block folded into a
    ball base, or ``None``.
    """

    source: HuaSpec
    target: HuaSpec
    order: tuple
    merged: int | None = None

    @property
    def is_identity(self) -> bool:
        return self.merged is None and self.order == tuple(range(self.source.r))

    def apply(self, p: HuaPoint) -> HuaPoint:
        check_point(self.source, p)
        z = p.z
        if self.merged is not None:
            z = np.concatenate([z, p.w[self.merged]])
        return HuaPoint(z.copy(), tuple(p.w[i].copy() for i in self.order))

    def invert(self, q: HuaPoint) -> HuaPoint:
        check_point(self.target, q)
        blocks = [None] * self.source.r
        for new, old in enumerate(self.order):
            blocks[old] = q.w[new]
        d = self.source.base_dim
        if self.merged is not None:
            blocks[self.merged] = q.z[d:]
        return HuaPoint(q.z[:d].copy(), tuple(b.copy() for b in blocks))

    def block_map(self) -> dict:
        """Original 1-based block index -> new 1-based index (0 = merged into base)."""
        out = {old + 1: new + 1 for new, old in enumerate(self.order)}
        if self.merged is not None:
            out[self.merged + 1] = 0
        return out


def standardize(spec: HuaSpec) -> tuple[HuaSpec, Relabeling]:
    """Bring a Hua domain to standard form.

    Rank-one bases are rewritten as the unit ball (same coordinates). Over a
    ball a block with exponent 1 is merged into the base; over a base of rank
    at least two it is moved to slot 1. Other blocks keep their order.
    """
    ones = [k for k, p in enumerate(spec.exponents) if p == 1.0]
    if len(ones) > 1:
        raise InvalidSpecError(f"{spec} has {len(ones)} exponents equal to 1; at most one is allowed")
    base = spec.base
    rest = [k for k in range(spec.r) if k not in ones]
    if cartan.is_ball_like(base):
        d = cartan.ambient_dim(base)
        if ones:
            k = ones[0]
            new = HuaSpec(
                CartanSpec.ball(d + spec.fiber_dims[k]),
                tuple(spec.fiber_dims[i] for i in rest),
                tuple(spec.exponents[i] for i in rest),
            )
            return new, Relabeling(spec, new, tuple(rest), k)
        new = HuaSpec(CartanSpec.ball(d), spec.fiber_dims, spec.exponents)
        return new, Relabeling(spec, new, tuple(range(spec.r)))
    order = tuple(ones + rest)
    new = HuaSpec(base, tuple(spec.fiber_dims[i] for i in order), tuple(spec.exponents[i] for i in order))
    return new, Relabeling(spec, new, order)


# ---------------------------------------------------------------- membership


def hua_margin(spec: HuaSpec, p: HuaPoint) -> float:
    """N(z, z) - sum ||w_j||^(2 p_j); positive exactly on the interior."""
    check_point(spec, p)
    mb = cartan.base_margin(spec.base, p.z)
    if mb < cartan.CLOSED_MARGIN:
        raise DomainError(f"base point outside the closed base domain (margin {mb:.3e})", value=mb)
    return cartan.diagonal_norm(spec.base, p.z, check=False) - fiber_sum(spec.exponents, p.w)


def contains(spec: HuaSpec, p: HuaPoint) -> bool:
    check_point(spec, p)
    if cartan.base_margin(spec.base, p.z) <= 0:
        return False
    return hua_margin(spec, p) > 0


def exhaustion(spec: HuaSpec, p: HuaPoint) -> float:
    """max{N / (N - S), 1 / N}, the plurisubharmonic exhaustion."""
    m = hua_margin(spec, p)
    if m <= 0:
        raise DomainError("exhaustion is only defined on the interior", value=m)
    n = cartan.diagonal_norm(spec.base, p.z, check=False)
    return max(n / m, 1.0 / n)


# ---------------------------------------------------------------- strata

INTERIOR = "Interior"
EXTERIOR = "Exterior"
B0 = "B0"
B1 = "B1"
BASE_EDGE = "BaseEdge"


@dataclass(frozen=True)
class BoundaryStratum:
    tag: str
    witness: int | None = None

    def __str__(self):
        return f"B1({self.witness})" if self.tag == B1 else self.tag


def classify_boundary(spec: HuaSpec, p: HuaPoint, tol: float = DEFAULT_TOL) -> BoundaryStratum:
    if not is_standard(spec):
        raise NonStandardSpecError(f"{spec} is not in standard form; call standardize first")
    check_point(spec, p)
    mb = cartan.base_margin(spec.base, p.z)
    if mb < -tol:
        return BoundaryStratum(EXTERIOR)
    m = cartan.diagonal_norm(spec.base, p.z, check=False) - fiber_sum(spec.exponents, p.w)
    if m > tol:
        return BoundaryStratum(INTERIOR)
    if m < -tol:
        return BoundaryStratum(EXTERIOR)
    norms = [float(np.linalg.norm(b)) for b in p.w]
    if all(x <= tol for x in norms) and mb <= tol:
        # with no fibers a rank-one base is the ball, whose boundary is smooth
        if spec.r == 0 and cartan.is_ball_like(spec.base):
            return BoundaryStratum(B0)
        return BoundaryStratum(BASE_EDGE)
    for j in range(spec.delta, spec.r):
        if norms[j] <= tol:
            return BoundaryStratum(B1, j + 1)
    return BoundaryStratum(B0)


# ---------------------------------------------------------------- sampling helpers


def _solve_scale(exponents, dir_norms, target) -> float:
    """Unique s > 0 with sum (s * a_j)^(2 p_j) = target."""
    pairs = [(a, p) for a, p in zip(dir_norms, exponents) if a > 0]
    if not pairs:
        raise DomainError("all fiber directions are zero")

    def f(s):
        return sum((s * a) ** (2 * p) for a, p in pairs) - target

    hi = 1.0
    while f(hi) < 0:
        hi *= 2.0
    lo = 0.0
    s = brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    # polish: brentq may stop one ulp short of the best residual
    best, best_res = s, abs(f(s))
    for cand in (np.nextafter(s, 0), np.nextafter(s, np.inf)):
        r = abs(f(cand))
        if r < best_res:
            best, best_res = cand, r
    return float(best)


def project_to_boundary(spec: HuaSpec, z, directions) -> HuaPoint:
    """Scale a bundle of fiber directions onto the boundary over interior z."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    if len(directions) != spec.r:
        raise DimensionError(f"expected {spec.r} fiber directions")
    mb = cartan.base_margin(spec.base, z)
    if mb <= 0:
        raise DomainError("base point must be strictly interior", value=mb)
    dirs = [np.asarray(v, dtype=complex).reshape(-1) for v in directions]
    nval = cartan.diagonal_norm(spec.base, z, check=False)
    s = _solve_scale(spec.exponents, [float(np.linalg.norm(v)) for v in dirs], nval)
    p = HuaPoint(z.copy(), tuple(s * v for v in dirs))
    check_point(spec, p)
    return p


def ray_scale(spec: HuaSpec, p: HuaPoint, t: float) -> HuaPoint:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if hua_margin(spec, p) <= 0:
        raise DomainError("ray_scale needs an interior point")
    q = p.scaled(t)
    m = hua_margin(spec, q)
    assert m > 0, f"starlikeness violated: margin {m}"
    return q


def pr_j(spec: HuaSpec, p: HuaPoint, j: int) -> HuaPoint:
    """Zero fiber block ``j`` (1-based)."""
    check_point(spec, p)
    if not 1 <= j <= spec.r:
        raise IndexError(f"block index {j} out of range 1..{spec.r}")
    blocks = list(p.w)
    blocks[j - 1] = np.zeros_like(blocks[j - 1])
    return HuaPoint(p.z.copy(), tuple(b.copy() for b in blocks))


def random_fiber_directions(spec, rng, zero_blocks=()):
    out = []
    for j, n in enumerate(spec.fiber_dims, start=1):
        if j in zero_blocks:
            out.append(np.zeros(n, complex))
        else:
            out.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return out


def random_interior_point(spec: HuaSpec, rng, max_fraction: float = 0.95) -> HuaPoint:
    z = cartan.random_interior(spec.base, rng, max_fraction)
    if spec.r == 0:
        return HuaPoint(z, ())
    q = project_to_boundary(spec, z, random_fiber_directions(spec, rng))
    t = rng.uniform(0.0, max_fraction)
    return HuaPoint(z, tuple(t * b for b in q.w))


def random_boundary_point(spec: HuaSpec, rng, zero_blocks=(), max_fraction: float = 0.9) -> HuaPoint:
    """Boundary point over a random interior base point.

    Blocks listed in ``zero_blocks`` (1-based) are set to zero, which produces
    b1 points when the index is at least 1 + delta.
    """
    if spec.r == 0:
        return HuaPoint(cartan.project_to_base_boundary(spec.base, cartan.random_direction(spec.base, rng)), ())
    z = cartan.random_interior(spec.base, rng, max_fraction)
    return project_to_boundary(spec, z, random_fiber_directions(spec, rng, zero_blocks))


# ---------------------------------------------------------------- ellipsoids


def split_blocks(dims, v) -> list:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != sum(dims):
        raise DimensionError(f"expected {sum(dims)} coordinates, got {v.size}")
    out, start = [], 0
    for n in dims:
        out.append(v[start : start + n])
        start += n
    return out


def ellipsoid_margin(spec: EllipsoidSpec, zeta) -> float:
    return 1.0 - fiber_sum(spec.exponents, split_blocks(spec.fiber_dims, zeta))


def classify_ellipsoid_boundary(spec: EllipsoidSpec, zeta, tol: float = DEFAULT_TOL) -> BoundaryStratum:
    blocks = split_blocks(spec.fiber_dims, zeta)
    m = 1.0 - fiber_sum(spec.exponents, blocks)
    if m > tol:
        return BoundaryStratum(INTERIOR)
    if m < -tol:
        return BoundaryStratum(EXTERIOR)
    for j in range(spec.delta, spec.r):
        if np.linalg.norm(blocks[j]) <= tol:
            return BoundaryStratum(B1, j + 1)
    return BoundaryStratum(B0)


def project_to_ellipsoid_boundary(spec: EllipsoidSpec, directions) -> np.ndarray:
    dirs = [np.asarray(v, dtype=complex).reshape(-1) for v in directions]
    s = _solve_scale(spec.exponents, [float(np.linalg.norm(v)) for v in dirs], 1.0)
    return np.concatenate([s * v for v in dirs])


def random_ellipsoid_interior(spec: EllipsoidSpec, rng, max_fraction: float = 0.95) -> np.ndarray:
    dirs = random_fiber_directions(spec, rng)
    return rng.uniform(0.0, max_fraction) * project_to_ellipsoid_boundary(spec, dirs)


def random_ellipsoid_boundary(spec: EllipsoidSpec, rng, zero_blocks=()) -> np.ndarray:
    return project_to_ellipsoid_boundary(spec, random_fiber_directions(spec, rng, zero_blocks))


def as_hua(spec: EllipsoidSpec) -> HuaSpec:
    """Sigma((n1, n'); (1, p')) is the Hua domain over the ball B^{n1}."""
    if spec.delta != 1:
        raise InvalidSpecError("only ellipsoids with p_1 = 1 are Hua domains over a ball")
    return HuaSpec(CartanSpec.ball(spec.fiber_dims[0]), spec.fiber_dims[1:], spec.exponents[1:])
