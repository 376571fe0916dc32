import numpy as np
import pytest

from huadomains import cartan, hua
from huadomains.cartan import CartanSpec
from huadomains.errors import DomainError, InvalidSpecError, NonStandardSpecError
from huadomains.hua import B0, B1, BASE_EDGE, EXTERIOR, INTERIOR, EllipsoidSpec, HuaPoint, HuaSpec

I22 = CartanSpec.type_i(2, 2)
FIXTURES = [
    HuaSpec(I22, (2, 2), (1.0, 2.0)),
    HuaSpec(CartanSpec.type_ii(4), (1, 2), (2.0, 3.0)),
    HuaSpec(CartanSpec.type_iii(2), (2,), (2.5,)),
    HuaSpec(CartanSpec.type_iv(3), (1, 1), (1.0, 0.5)),
    HuaSpec(CartanSpec.ball(2), (2, 3), (2.0, 3.0)),
]


def pt(z, *w):
    return HuaPoint(np.asarray(z, complex), tuple(np.asarray(b, complex) for b in w))


def test_standardize_merges_into_ball():
    spec = HuaSpec(CartanSpec.ball(2), (2, 2), (1.0, 2.0))
    std, rel = hua.standardize(spec)
    assert std == HuaSpec(CartanSpec.ball(4), (2,), (2.0,))
    assert rel.merged == 0
    assert rel.block_map() == {1: 0, 2: 1}


def test_standardize_identity():
    spec = FIXTURES[0]
    std, rel = hua.standardize(spec)
    assert std == spec
    assert rel.is_identity


def test_standardize_moves_one_to_slot_one():
    spec = HuaSpec(I22, (3, 2), (2.0, 1.0))
    std, rel = hua.standardize(spec)
    assert std == HuaSpec(I22, (2, 3), (1.0, 2.0))
    assert rel.order == (1, 0)
    rng = np.random.default_rng(0)
    for _ in range(100):
        p = hua.random_interior_point(spec, rng)
        q = rel.apply(p)
        assert abs(hua.hua_margin(spec, p) - hua.hua_margin(std, q)) < 1e-12
        assert rel.invert(q).allclose(p, 0.0)


def test_standardize_rank_one_bases():
    for base in (CartanSpec.type_i(1, 3), CartanSpec.type_ii(3), CartanSpec.type_i(3, 1)):
        spec = HuaSpec(base, (2,), (2.0,))
        std, rel = hua.standardize(spec)
        assert std.base == CartanSpec.ball(3)
        rng = np.random.default_rng(1)
        for _ in range(50):
            p = hua.random_interior_point(spec, rng)
            assert abs(hua.hua_margin(spec, p) - hua.hua_margin(std, rel.apply(p))) < 1e-12


def test_standardize_rejects_two_ones():
    with pytest.raises(InvalidSpecError):
        hua.standardize(HuaSpec(I22, (1, 1), (1.0, 1.0)))


def test_standardization_soundness():
    rng = np.random.default_rng(2)
    for spec in (
        HuaSpec(CartanSpec.ball(2), (2, 1, 3), (2.0, 1.0, 0.5)),
        HuaSpec(CartanSpec.type_iii(2), (1, 2), (3.0, 1.0)),
    ):
        std, rel = hua.standardize(spec)
        assert hua.is_standard(std)
        for _ in range(200):
            p = hua.random_interior_point(spec, rng, 1.0)
            p = HuaPoint(p.z, tuple(rng.uniform(0.5, 1.5) * b for b in p.w))
            assert abs(hua.hua_margin(spec, p) - hua.hua_margin(std, rel.apply(p))) < 1e-12


def test_margin_examples():
    for spec in FIXTURES:
        assert hua.hua_margin(spec, hua.origin(spec)) == 1
    spec = HuaSpec(CartanSpec.ball(1), (2,), (2.0,))
    assert hua.hua_margin(spec, pt([0], [0.5, 0.5])) == pytest.approx(0.75)
    spec = HuaSpec(CartanSpec.type_i(1, 1), (1,), (2.0,))
    assert hua.hua_margin(spec, pt([0], [1])) == 0


def test_margin_rejects_base_outside():
    spec = HuaSpec(CartanSpec.ball(1), (1,), (2.0,))
    with pytest.raises(DomainError):
        hua.hua_margin(spec, pt([2.0], [0]))


def test_exhaustion_examples():
    spec = HuaSpec(CartanSpec.ball(1), (1,), (1.5,))
    assert hua.exhaustion(spec, hua.origin(spec)) == 1
    z = np.sqrt(0.5)
    s = (0.5 - 1e-3) ** (1 / 3.0)
    p = pt([z], [s])
    assert hua.exhaustion(spec, p) == pytest.approx(500, rel=1e-9)
    assert hua.exhaustion(spec, pt([np.sqrt(0.75)], [0])) == pytest.approx(4)
    with pytest.raises(DomainError):
        hua.exhaustion(spec, pt([0], [1]))


def test_exhaustion_blows_up():
    spec = FIXTURES[1]
    rng = np.random.default_rng(3)
    b = hua.random_boundary_point(spec, rng)
    ts = 1 - np.logspace(-1, -12, 40)
    vals = [hua.exhaustion(spec, b.scaled(t)) for t in ts]
    assert all(x <= y for x, y in zip(vals[-10:], vals[-9:]))
    for t, v in zip(ts, vals):
        m = hua.hua_margin(spec, b.scaled(t))
        if m < 1e-9:
            assert v > 1e9


def test_classify_examples():
    spec = FIXTURES[0]
    assert spec.delta == 1
    z = np.zeros(4)
    w1 = np.array([1.0, 0.0])
    assert hua.classify_boundary(spec, pt(z, w1, [0, 0])) == hua.BoundaryStratum(B1, 2)
    a = np.sqrt(0.5)
    w2 = np.array([0.5 ** 0.25, 0])
    st = hua.classify_boundary(spec, pt(z, [a, 0], w2))
    assert st.tag == B0
    assert hua.classify_boundary(spec, pt([1, 0, 0, 0.3], [0, 0], [0, 0])).tag == BASE_EDGE
    assert hua.classify_boundary(spec, hua.origin(spec)).tag == INTERIOR
    assert hua.classify_boundary(spec, pt(z, [2, 0], [0, 0])).tag == EXTERIOR


def test_classify_needs_standard_form():
    with pytest.raises(NonStandardSpecError):
        hua.classify_boundary(HuaSpec(I22, (2, 2), (2.0, 1.0)), hua.origin(HuaSpec(I22, (2, 2), (2.0, 1.0))))


def test_pure_ball_boundary_is_b0():
    spec = HuaSpec(CartanSpec.ball(3))
    rng = np.random.default_rng(4)
    for _ in range(20):
        assert hua.classify_boundary(spec, hua.random_boundary_point(spec, rng)).tag == B0


@pytest.mark.parametrize("spec", FIXTURES, ids=str)
def test_stratum_partition(spec):
    rng = np.random.default_rng(5)
    for k in range(100):
        zero = (spec.r,) if k % 2 and spec.r > max(1, spec.delta) else ()
        p = hua.random_boundary_point(spec, rng, zero)
        assert abs(hua.hua_margin(spec, p)) < 1e-12
        assert hua.classify_boundary(spec, p).tag in (B0, B1, BASE_EDGE)


def test_project_examples():
    spec = HuaSpec(CartanSpec.ball(1), (1,), (2.0,))
    p = hua.project_to_boundary(spec, [0], [[1.0]])
    assert p.w[0][0] == pytest.approx(1.0)
    spec = HuaSpec(CartanSpec.ball(1), (1,), (1.0,))
    p = hua.project_to_boundary(spec, [np.sqrt(0.75)], [[1.0]])
    assert p.w[0][0] == pytest.approx(0.5)
    with pytest.raises(DomainError):
        hua.project_to_boundary(spec, [0], [[0.0]])


def test_ray_scale():
    rng = np.random.default_rng(6)
    for spec in FIXTURES:
        for _ in range(40):
            p = hua.random_interior_point(spec, rng)
            assert hua.hua_margin(spec, hua.ray_scale(spec, p, 0.0)) == 1
            assert hua.ray_scale(spec, p, 1.0).allclose(p, 0.0)
            assert hua.hua_margin(spec, hua.ray_scale(spec, p, 0.5)) >= hua.hua_margin(spec, p) - 1e-12
    with pytest.raises(ValueError):
        hua.ray_scale(FIXTURES[0], hua.origin(FIXTURES[0]), 1.5)


def test_pr_j():
    spec = FIXTURES[0]
    rng = np.random.default_rng(7)
    for _ in range(200):
        p = hua.random_interior_point(spec, rng)
        for j in (1, 2):
            assert hua.hua_margin(spec, hua.pr_j(spec, p, j)) >= hua.hua_margin(spec, p)
        q = p
        for j in range(1 + spec.delta, spec.r + 1):
            q = hua.pr_j(spec, q, j)
        q = hua.pr_j(spec, q, 1)
        assert not any(np.any(b) for b in q.w)
    z = hua.pr_j(spec, hua.origin(spec), 2)
    assert z.allclose(hua.origin(spec), 0.0)
    with pytest.raises(IndexError):
        hua.pr_j(spec, hua.origin(spec), 3)


def test_ellipsoid_spec_convention():
    with pytest.raises(InvalidSpecError):
        EllipsoidSpec((2, 2), (2.0, 1.0))
    e = EllipsoidSpec((2, 3), (1.0, 2.0))
    assert e.delta == 1
    assert hua.as_hua(e) == HuaSpec(CartanSpec.ball(2), (3,), (2.0,))


def test_ellipsoid_boundary():
    spec = EllipsoidSpec((2, 3), (2.0, 3.0))
    rng = np.random.default_rng(8)
    for _ in range(50):
        x = hua.random_ellipsoid_boundary(spec, rng)
        assert abs(hua.ellipsoid_margin(spec, x)) < 1e-12
        assert hua.classify_ellipsoid_boundary(spec, x).tag == B0
        y = hua.random_ellipsoid_boundary(spec, rng, zero_blocks=(1,))
        assert hua.classify_ellipsoid_boundary(spec, y) == hua.BoundaryStratum(B1, 1)
        assert hua.ellipsoid_margin(spec, hua.random_ellipsoid_interior(spec, rng)) > 0


def test_sampled_interior_is_interior():
    rng = np.random.default_rng(9)
    for spec in FIXTURES:
        for _ in range(100):
            assert hua.contains(spec, hua.random_interior_point(spec, rng))
            assert cartan.base_margin(spec.base, hua.random_interior_point(spec, rng).z) > 0
