import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from huadomains import aut, cartan, equiv, hua, io
from huadomains.cartan import CartanSpec
from huadomains.hua import EllipsoidSpec, HuaPoint, HuaSpec
from huadomains.linalg import random_unitary

SETTINGS = settings(max_examples=60, deadline=None)

bases = st.sampled_from(
    [CartanSpec.type_i(2, 3), CartanSpec.type_i(1, 2), CartanSpec.type_ii(4), CartanSpec.type_iii(2), CartanSpec.type_iv(3), CartanSpec.ball(2)]
)
exps = st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0])
fibers = st.lists(st.tuples(st.integers(1, 3), exps), min_size=0, max_size=4).filter(lambda fs: sum(p == 1.0 for _, p in fs) <= 1)
seeds = st.integers(0, 2**32 - 1)


@st.composite
def hua_specs(draw):
    fs = draw(fibers)
    return HuaSpec(draw(bases), tuple(n for n, _ in fs), tuple(p for _, p in fs))


@st.composite
def ellipsoid_specs(draw, r=None):
    r = draw(st.integers(1, 6)) if r is None else r
    dims = tuple(draw(st.lists(st.integers(1, 3), min_size=r, max_size=r)))
    ps = draw(st.lists(st.sampled_from([2.0, 3.0, 0.5]), min_size=r, max_size=r))
    if draw(st.booleans()):
        ps[0] = 1.0
    return EllipsoidSpec(dims, tuple(ps))


@SETTINGS
@given(hua_specs(), seeds)
def test_standardize_preserves_membership(spec, seed):
    std, rel = hua.standardize(spec)
    assert hua.is_standard(std)
    assert hua.standardize(std)[0] == std
    rng = np.random.default_rng(seed)
    p = hua.random_interior_point(spec, rng)
    p = HuaPoint(p.z, tuple(rng.uniform(0.5, 2) * b for b in p.w))
    q = rel.apply(p)
    assert rel.invert(q).allclose(p, 0)
    assert hua.contains(spec, p) == hua.contains(std, q)


@SETTINGS
@given(hua_specs(), seeds, st.floats(0, 1))
def test_ray_monotone(spec, seed, t):
    p = hua.random_interior_point(spec, np.random.default_rng(seed))
    assert hua.hua_margin(spec, hua.ray_scale(spec, p, t)) >= hua.hua_margin(spec, p) - 1e-12


@SETTINGS
@given(hua_specs(), seeds)
def test_boundary_sampler_lands_on_boundary(spec, seed):
    spec = hua.standardize(spec)[0]
    p = hua.random_boundary_point(spec, np.random.default_rng(seed))
    assert abs(hua.hua_margin(spec, p)) < 1e-10
    assert hua.classify_boundary(spec, p).tag in (hua.B0, hua.B1, hua.BASE_EDGE)


@SETTINGS
@given(bases, seeds)
def test_norm_symmetry(spec, seed):
    rng = np.random.default_rng(seed)
    z, x = cartan.random_interior(spec, rng), cartan.random_interior(spec, rng)
    assert abs(cartan.generic_norm(spec, z, x) - np.conj(cartan.generic_norm(spec, x, z))) < 1e-12
    lg = cartan.log_generic_norm(spec, z, x)
    assert abs(np.exp(lg) - cartan.generic_norm(spec, z, x)) < 1e-12


@SETTINGS
@given(ellipsoid_specs(), st.data())
def test_decider_matches_oracle(a, data):
    if data.draw(st.booleans()):
        perm = data.draw(st.permutations(range(a.r)))
        if a.delta and perm[0] != 0:
            perm = [0] + [i for i in perm if i != 0]
        b = EllipsoidSpec(tuple(a.fiber_dims[i] for i in perm), tuple(a.exponents[i] for i in perm))
    else:
        b = data.draw(ellipsoid_specs(a.r))
    assert (equiv.ellipsoid_equivalent(a, b) is None) == (equiv.brute_force_equiv_oracle(a, b) is None)


@SETTINGS
@given(st.lists(st.integers(1, 3), min_size=1, max_size=4), seeds, st.data())
def test_recover_assembled_maps(dims, seed, data):
    r = len(dims)
    sigma = tuple(i + 1 for i in data.draw(st.permutations(range(r))))
    spec_in = EllipsoidSpec(tuple(dims), tuple(2.0 + k for k in range(r)))
    spec_out = EllipsoidSpec(tuple(dims[s - 1] for s in sigma), tuple(spec_in.exponents[s - 1] for s in sigma))
    us = [random_unitary(dims[s - 1], seed + j) for j, s in enumerate(sigma)]
    l = equiv.assemble(sigma, us, dims)
    rec = equiv.recover_block_structure(l, spec_in, spec_out, samples=5, seed=seed)
    assert rec.accepted and rec.sigma == sigma
    assert rec.residual < 1e-10


@SETTINGS
@given(hua_specs(), seeds)
def test_gamma_preserves_margin_sign(spec, seed):
    rng = np.random.default_rng(seed)
    g = aut.random_gamma(spec, rng)
    p = hua.random_interior_point(spec, rng)
    p = HuaPoint(p.z, tuple(rng.uniform(0.5, 2) * b for b in p.w))
    m0, m1 = hua.hua_margin(spec, p), hua.hua_margin(spec, g(p))
    assert abs(m0) < 1e-9 or np.sign(m0) == np.sign(m1)


@SETTINGS
@given(hua_specs(), seeds)
def test_io_round_trip(spec, seed):
    assert io.spec_from_json(io.spec_to_json(spec)) == spec
    rng = np.random.default_rng(seed)
    p = hua.random_interior_point(spec, rng)
    assert io.point_from_json(io.point_to_json(p)).allclose(p, 0)
    g = aut.random_gamma(spec, rng)
    h = io.gamma_from_json(io.gamma_to_json(g))
    assert h(p).allclose(g(p), 1e-12)
