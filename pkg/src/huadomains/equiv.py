"""Equivalence deciders and block-structure recovery.

Linear maps act on row vectors: ``h(zeta) = zeta @ L``. For block sizes
``n`` (input) and ``m`` (output), block ``D[i][j]`` of ``L`` is the
``n_i x m_j`` piece sending input block ``i`` to output block ``j``.
Permutations are 1-based tuples with ``n[sigma(i)] = m[i]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import cartan, hua
from .cartan import CartanSpec
from .errors import DimensionError, NonStandardSpecError, PreconditionError, UndeterminedEquivalence
from .hua import EllipsoidSpec, HuaPoint, HuaSpec
from .linalg import matrix_rank, null_space, rng_from, unitary_residual

SOLVABILITY_TRIALS = 200
RECOVER_TOL = 1e-8
BOUNDARY_TOL = 1e-8
MAX_ORACLE_R = 8

# pairs of distinct classical domains that are linearly equivalent in low dimension
COINCIDENCES = (
    (CartanSpec.type_iv(3), CartanSpec.type_iii(2)),
    (CartanSpec.type_iv(4), CartanSpec.type_i(2, 2)),
    (CartanSpec.type_iv(6), CartanSpec.type_ii(4)),
)


def _offsets(dims):
    return np.concatenate([[0], np.cumsum(dims)]).astype(int)


def blocks_of(l: np.ndarray, row_dims, col_dims) -> list:
    ro, co = _offsets(row_dims), _offsets(col_dims)
    return [[l[ro[i] : ro[i + 1], co[j] : co[j + 1]] for j in range(len(col_dims))] for i in range(len(row_dims))]


# ---------------------------------------------------------------- block solvability

UNIQUE = "UniqueNonzeroBlock"
EXISTS = "FullyNonzeroSolutionExists"


@dataclass
class SolvabilityVerdict:
    tag: str
    witness: list | None = None
    index: int | None = None

    def __str__(self):
        return f"{UNIQUE}({self.index})" if self.tag == UNIQUE else EXISTS


def block_solvability(blocks, tol: float = 1e-10, seed: int = 0) -> SolvabilityVerdict:
    """Decide whether sum_j zeta_j D_j = 0 has a solution with every zeta_j != 0.

    ``blocks`` are the ``n_j x m`` matrices D_j with ``n_j >= m`` and the
    stacked matrix of full column rank. The null space of the stacked system
    contains such a solution exactly when its projection onto every block is
    nonzero (a vector space is never a finite union of proper subspaces);
    otherwise exactly one D_j is nonzero and it is square and invertible.
    """
    ds = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks]
    if not ds:
        raise PreconditionError("need at least one block")
    m = ds[0].shape[1]
    if any(d.shape[1] != m for d in ds):
        raise DimensionError("all blocks need the same number of columns")
    dims = [d.shape[0] for d in ds]
    if any(n < m for n in dims):
        raise PreconditionError(f"every block needs at least m = {m} rows, got {dims}")
    stacked = np.vstack(ds)
    if matrix_rank(stacked, tol) < m:
        raise PreconditionError("stacked matrix must have full column rank")
    basis = null_space(stacked, tol)
    off = _offsets(dims)
    if basis:
        nb = np.array(basis)
        proj = [np.linalg.norm(nb[:, off[j] : off[j + 1]]) for j in range(len(ds))]
    else:
        proj = [0.0] * len(ds)
    if min(proj) > tol:
        rng = rng_from(seed)
        nb = np.array(basis)
        best, best_min = None, -1.0
        for _ in range(SOLVABILITY_TRIALS):
            c = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
            x = c @ nb
            x /= np.linalg.norm(x)
            mn = min(np.linalg.norm(x[off[j] : off[j + 1]]) for j in range(len(ds)))
            if mn > best_min:
                best, best_min = x, mn
            if mn > 1e3 * tol:
                break
        return SolvabilityVerdict(EXISTS, [best[off[j] : off[j + 1]].copy() for j in range(len(ds))])
    nonzero = [j for j, d in enumerate(ds) if np.linalg.norm(d) > tol]
    j0 = nonzero[0]
    # the dichotomy: with n_j >= m nothing else can happen
    assert len(nonzero) == 1 and dims[j0] == m, f"unexpected block pattern {nonzero} for dims {dims}"
    assert abs(np.linalg.det(ds[j0])) > tol
    return SolvabilityVerdict(UNIQUE, index=j0 + 1)


# ---------------------------------------------------------------- linear isomorphisms of ellipsoids


@dataclass
class VerifyResult:
    ok: bool
    max_residual: float
    failure: str | None = None

    def __bool__(self):
        return self.ok


def _boundary_samples(spec: EllipsoidSpec, rng, count):
    out = []
    for k in range(count):
        zero = ()
        # every third sample zeroes one admissible block to probe b1
        if k % 3 == 2 and spec.r > spec.delta:
            zero = (int(rng.integers(spec.delta + 1, spec.r + 1)),)
            if spec.r == 1:
                zero = ()
        out.append(hua.random_ellipsoid_boundary(spec, rng, zero))
    return out


def _check_direction(l, src, dst, rng, samples, label):
    worst = 0.0
    for _ in range(samples):
        x = hua.random_ellipsoid_interior(src, rng)
        mg = hua.ellipsoid_margin(dst, x @ l)
        if mg <= 0:
            return VerifyResult(False, worst, f"{label}: interior point mapped outside (margin {mg:.3e})")
    for x in _boundary_samples(src, rng, samples):
        y = x @ l
        res = abs(hua.ellipsoid_margin(dst, y))
        worst = max(worst, res)
        if res > BOUNDARY_TOL:
            return VerifyResult(False, worst, f"{label}: boundary point mapped off the boundary (|rho| = {res:.3e})")
        a = hua.classify_ellipsoid_boundary(src, x).tag
        b = hua.classify_ellipsoid_boundary(dst, y, BOUNDARY_TOL).tag
        if a != b:
            return VerifyResult(False, worst, f"{label}: stratum {a} mapped to {b}")
    return VerifyResult(True, worst)


def verify_linear_isomorphism(l, in_spec: EllipsoidSpec, out_spec: EllipsoidSpec, samples: int = 200, seed: int = 0) -> VerifyResult:
    """Sample check that zeta -> zeta @ l maps in_spec onto out_spec, strata included."""
    l = np.asarray(l, dtype=complex)
    if l.shape != (in_spec.dim, out_spec.dim):
        raise DimensionError(f"L must be {in_spec.dim}x{out_spec.dim}, got {l.shape}")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if in_spec.dim != out_spec.dim or matrix_rank(l, 1e-12) < in_spec.dim:
        return VerifyResult(False, float("inf"), "L is not invertible")
    rng = rng_from(seed)
    fwd = _check_direction(l, in_spec, out_spec, rng, samples, "forward")
    if not fwd:
        return fwd
    back = _check_direction(np.linalg.inv(l), out_spec, in_spec, rng, samples, "inverse")
    if not back:
        return back
    return VerifyResult(True, max(fwd.max_residual, back.max_residual))


@dataclass
class Recovery:
    accepted: bool
    sigma: tuple | None = None
    unitaries: list | None = None
    offending: list = field(default_factory=list)
    reason: str = ""
    residual: float | None = None


def assemble(sigma, unitaries, in_dims) -> np.ndarray:
    """Matrix of zeta -> (zeta_sigma(1) U_1, ..., zeta_sigma(r) U_r)."""
    n = sum(in_dims)
    l = np.zeros((n, n), complex)
    ro = _offsets(in_dims)
    out_dims = [u.shape[1] for u in unitaries]
    co = _offsets(out_dims)
    for j, (s, u) in enumerate(zip(sigma, unitaries)):
        l[ro[s - 1] : ro[s], co[j] : co[j + 1]] = u
    return l


def recover_block_structure(
    l, in_spec: EllipsoidSpec, out_spec: EllipsoidSpec, tol: float = RECOVER_TOL, verify: bool = True, samples: int = 50, seed: int = 0
) -> Recovery:
    """Read (sigma, U) off a linear map in block-permuted unitary form, or reject."""
    l = np.asarray(l, dtype=complex)
    if l.shape != (in_spec.dim, out_spec.dim) or in_spec.dim != out_spec.dim:
        raise DimensionError(f"L must be square of size {in_spec.dim}, got {l.shape}")
    if in_spec.r != out_spec.r:
        return Recovery(False, reason=f"block counts differ ({in_spec.r} vs {out_spec.r})")
    thresh = tol * max(np.linalg.norm(l), 1e-300)
    bl = blocks_of(l, in_spec.fiber_dims, out_spec.fiber_dims)
    r = in_spec.r
    nz = np.array([[np.linalg.norm(bl[i][j]) > thresh for j in range(r)] for i in range(r)], dtype=bool)
    bad_rows = [i + 1 for i in range(r) if nz[i].sum() != 1]
    bad_cols = [j + 1 for j in range(r) if nz[:, j].sum() != 1]
    if bad_rows or bad_cols:
        offending = [(i + 1, j + 1) for i in range(r) for j in range(r) if nz[i, j] and (i + 1 in bad_rows or j + 1 in bad_cols)]
        return Recovery(False, offending=offending, reason=f"block rows {bad_rows} / columns {bad_cols} do not have exactly one nonzero block")
    sigma = tuple(int(np.flatnonzero(nz[:, j])[0]) + 1 for j in range(r))
    us = []
    for j, s in enumerate(sigma):
        u = bl[s - 1][j]
        if u.shape[0] != u.shape[1]:
            return Recovery(False, offending=[(s, j + 1)], reason=f"block ({s},{j + 1}) is not square")
        if unitary_residual(u) > tol:
            return Recovery(False, offending=[(s, j + 1)], reason=f"block ({s},{j + 1}) is not unitary")
        if in_spec.exponents[s - 1] != out_spec.exponents[j]:
            return Recovery(False, offending=[(s, j + 1)], reason=f"exponents {in_spec.exponents[s - 1]:g} and {out_spec.exponents[j]:g} differ")
        us.append(u.copy())
    residual = float(np.linalg.norm(assemble(sigma, us, in_spec.fiber_dims) - l))
    if verify:
        res = verify_linear_isomorphism(l, in_spec, out_spec, samples, seed)
        if not res:
            raise PreconditionError(f"L is not an isomorphism of the given ellipsoids: {res.failure}")
    return Recovery(True, sigma, us, residual=residual)


# ---------------------------------------------------------------- deciders


def _pairs(spec):
    return list(zip(spec.fiber_dims, spec.exponents))


def _match(a, b, p_tol):
    return a[0] == b[0] and (a[1] == b[1] if p_tol == 0 else abs(a[1] - b[1]) <= p_tol)


def match_signatures(src_pairs, dst_pairs, p_tol: float = 0.0):
    """sigma with src[sigma(j)] matching dst[j], or None."""
    r = len(src_pairs)
    if r != len(dst_pairs):
        return None
    if r == 0:
        return ()
    if p_tol == 0:
        pool: dict = {}
        for i, key in enumerate(src_pairs):
            pool.setdefault(key, []).append(i + 1)
        sigma = []
        for key in dst_pairs:
            if not pool.get(key):
                return None
            sigma.append(pool[key].pop(0))
        return tuple(sigma)
    big = 1e9
    cost = np.array([[abs(i - j) if _match(src_pairs[i], dst_pairs[j], p_tol) else big for i in range(r)] for j in range(r)], float)
    rows, cols = linear_sum_assignment(cost)
    if cost[rows, cols].max() >= big:
        return None
    return tuple(int(c) + 1 for c in cols)


def ellipsoid_equivalent(spec1: EllipsoidSpec, spec2: EllipsoidSpec, p_tol: float = 0.0):
    """Permutation sigma with n[sigma(j)] = m[j] and p[sigma(j)] = q[j], or None."""
    return match_signatures(_pairs(spec1), _pairs(spec2), p_tol)


def brute_force_equiv_oracle(spec1, spec2, p_tol: float = 0.0):
    """Exhaustive search over all permutations (r <= 8)."""
    a, b = _pairs(spec1), _pairs(spec2)
    if len(a) > MAX_ORACLE_R or len(b) > MAX_ORACLE_R:
        raise ValueError(f"brute force limited to r <= {MAX_ORACLE_R}")
    if len(a) != len(b):
        return None
    for perm in itertools.permutations(range(len(a))):
        if all(_match(a[perm[j]], b[j], p_tol) for j in range(len(b))):
            return tuple(i + 1 for i in perm)
    return None


@dataclass
class EquivWitness:
    """Normal form (z, w) -> (A z, U_1 w_sigma(1), ..., U_r w_sigma(r)) between standard forms.

    ``pre``/``post`` relabelings transport points when the inputs were not in
    standard form.
    """

    source: HuaSpec
    target: HuaSpec
    sigma: tuple
    base_map: str
    matrix: np.ndarray
    unitaries: list
    pre: hua.Relabeling | None = None
    post: hua.Relabeling | None = None

    def apply(self, p: HuaPoint) -> HuaPoint:
        if self.pre is not None:
            p = self.pre.apply(p)
        z = self.matrix @ p.z
        w = tuple(u @ p.w[s - 1] for u, s in zip(self.unitaries, self.sigma))
        q = HuaPoint(z, w)
        if self.post is not None:
            q = self.post.invert(q)
        return q

    def to_json(self) -> dict:
        return {"equivalent": True, "sigma": list(self.sigma), "base_map": self.base_map}


def transpose_permutation(m: int, n: int) -> np.ndarray:
    """Coordinate matrix of Z -> Z^T from row-major I(m, n) to row-major I(n, m)."""
    p = np.zeros((m * n, m * n))
    for a in range(m):
        for b in range(n):
            p[b * m + a, a * n + b] = 1.0
    return p


def base_relation(b1: CartanSpec, b2: CartanSpec):
    """'identity', 'transpose', 'undetermined' or None."""
    if b1 == b2:
        return "identity"
    if b1.kind == b2.kind == "I" and (b1.m, b1.n) == (b2.n, b2.m):
        return "transpose"
    if (b1, b2) in COINCIDENCES or (b2, b1) in COINCIDENCES:
        return "undetermined"
    return None


def hua_equivalent(spec1: HuaSpec, spec2: HuaSpec, p_tol: float = 0.0, auto_standardize: bool = False):
    """EquivWitness when the two Hua domains are biholomorphic, otherwise None.

    Raises :class:`UndeterminedEquivalence` when the fibers match but the bases
    are a known low-dimensional coincidence of different kinds.
    """
    pre = post = None
    if not (hua.is_standard(spec1) and hua.is_standard(spec2)):
        if not auto_standardize:
            raise NonStandardSpecError("hua_equivalent needs standard-form specs; call standardize first")
    if auto_standardize:
        spec1, pre = hua.standardize(spec1)
        spec2, post = hua.standardize(spec2)
    if spec1.dim != spec2.dim:
        return None
    sigma = match_signatures(_pairs(spec1), _pairs(spec2), p_tol)
    if sigma is None:
        return None
    rel = base_relation(spec1.base, spec2.base)
    if rel is None:
        return None
    if rel == "undetermined":
        raise UndeterminedEquivalence(f"{spec1.base} and {spec2.base} are linearly equivalent only through a coincidence not constructed here")
    d = spec1.base_dim
    mat = np.eye(d) if rel == "identity" else transpose_permutation(spec1.base.m, spec1.base.n)
    us = [np.eye(n, dtype=complex) for n in spec2.fiber_dims]
    return EquivWitness(spec1, spec2, sigma, rel, mat.astype(complex), us, pre, post)
