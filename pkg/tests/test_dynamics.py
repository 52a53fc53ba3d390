import math

import numpy as np
import pytest
from hypothesis import given

from opmetric.ball import BallAutomorphism
from opmetric.checks import phase_rotation_group
from opmetric.chk import ClosedOperator, distance, hat
from opmetric.dynamics import (
    HBiholomorphicMap,
    IsometryGroup,
    apply_map,
    compose_maps,
    conjugate,
    find_fixed_point,
    is_orbit_bounded,
    orbit,
    residual,
)
from opmetric.errors import DimensionMismatch, NoConvergence, UnboundedOrbitSuspected
from opmetric.linalg import op_norm
from opmetric.oracles import InstanceFactory

from .strategies import seeds

HALF = math.atanh(0.5)


def _random_map(f, m, n):
    return HBiholomorphicMap.from_params(*f.automorphism_params(m, n))


def _translation_group():
    return IsometryGroup((HBiholomorphicMap.from_params([[0.5]], [[1.0]], [[1.0]]),))


def test_apply_map_examples(factory):
    t = factory.operator(3, 2)
    assert op_norm(apply_map(HBiholomorphicMap.identity(3, 2), t).mat - t.mat) <= 1e-12
    rot = HBiholomorphicMap(BallAutomorphism.rotation(factory.unitary(3), factory.unitary(2)))
    assert op_norm(rot(ClosedOperator.zeros(3, 2)).mat) == 0.0
    g = HBiholomorphicMap.from_params([[0.3]], [[1.0]], [[1.0]])
    out = g(ClosedOperator([[0.0]]))
    assert hat(out).mat[0, 0] == pytest.approx(0.3, abs=1e-15)
    assert out.mat[0, 0] == pytest.approx(0.3 / math.sqrt(0.91), abs=1e-15)
    assert out.mat[0, 0] == pytest.approx(0.31448545101657880, abs=1e-14)


def test_apply_map_shape_check(factory):
    g = _random_map(factory, 3, 2)
    assert g.operator_shape == (2, 3)
    with pytest.raises(DimensionMismatch):
        g(ClosedOperator.zeros(2, 3))


@given(seeds)
def test_hbi_isometry_and_hat_commutation(seed):
    f = InstanceFactory(seed)
    m, n = f.dims()
    g = _random_map(f, m, n)
    t, s = f.operator(m, n), f.operator(m, n, 0.8)
    assert abs(distance(g(t), g(s)) - distance(t, s)) <= 1e-9
    assert op_norm(hat(g(s)).mat - g.auto(hat(s)).mat) <= 1e-10


def test_inverse_and_composition(factory):
    g, h = _random_map(factory, 2, 2), _random_map(factory, 2, 2)
    t = factory.operator(2, 2)
    assert distance(g.inverse()(g(t)), t) <= 1e-9
    assert distance(compose_maps(g, h)(t), g(h(t))) <= 1e-9


def test_group_validation(factory):
    with pytest.raises(ValueError):
        IsometryGroup(())
    with pytest.raises(DimensionMismatch):
        IsometryGroup((_random_map(factory, 2, 1), _random_map(factory, 3, 1)))
    g = IsometryGroup((_random_map(factory, 2, 1),))
    assert len(g.letters) == 2


def test_identity_orbit():
    g = IsometryGroup((HBiholomorphicMap.identity(2, 1),))
    t0 = ClosedOperator([[0.3, -0.2j]])
    o = orbit(g, t0, 3)
    assert len(o.hats) == 1 and o.diameter_by_depth == [0.0] * 4
    res = find_fixed_point(g, t0)
    assert res.residual == 0.0 and op_norm(res.point.mat - t0.mat) <= 1e-9


def test_rotation_orbit_bounded(factory):
    for m, n in [(1, 1), (4, 2)]:
        t0 = factory.operator(m, n)
        g = phase_rotation_group(m, n)
        o = orbit(g, t0, 6)
        bound = 2 * distance(t0, ClosedOperator.zeros(m, n)) + 1e-8
        assert all(d <= bound for d in o.diameter_by_depth)
        assert all(b >= a for a, b in zip(o.diameter_by_depth, o.diameter_by_depth[1:]))
        # orders 5 and 3 generate the cyclic group of order 15
        assert len(o.hats) == 15
        assert is_orbit_bounded(g, t0)


def test_translation_orbit_grows_linearly():
    o = orbit(_translation_group(), [[0.0]], 6)
    np.testing.assert_allclose(o.radius_by_depth, [k * HALF for k in range(7)], atol=1e-9)
    # both directions are reached, so the diameter grows twice as fast
    np.testing.assert_allclose(o.diameter_by_depth, [2 * k * HALF for k in range(7)], atol=1e-9)
    assert abs(o.growth_per_step() - HALF) <= 1e-9
    assert not is_orbit_bounded(_translation_group(), [[0.0]])


def test_orbit_cap_and_depth_validation(factory):
    f = InstanceFactory(5)
    g = IsometryGroup((_random_map(f, 2, 1), _random_map(f, 2, 1)))
    t0 = ClosedOperator.zeros(2, 1)
    o = orbit(g, t0, 3, cap=20)
    assert o.truncated and len(o.hats) == 20
    with pytest.raises(ValueError):
        orbit(g, t0, 0)
    with pytest.raises(ValueError):
        is_orbit_bounded(g, t0, depth=3)


def test_orbit_deduplicates(factory):
    # an involution: the generator equals its inverse
    g = IsometryGroup((HBiholomorphicMap(BallAutomorphism.rotation(-np.eye(2), np.eye(1))),))
    o = orbit(g, factory.operator(2, 1), 4)
    assert len(o.hats) == 2


def test_conjugated_group_bounded(factory):
    h = HBiholomorphicMap(BallAutomorphism.translation(hat(factory.operator(3, 2, 0.8))))
    g = phase_rotation_group(3, 2).conjugated(h)
    assert is_orbit_bounded(g, factory.operator(3, 2))


def test_conjugation_covariance(factory):
    g = IsometryGroup((_random_map(factory, 3, 2), _random_map(factory, 3, 2)))
    h = _random_map(factory, 3, 2)
    p = factory.operator(3, 2)
    assert abs(residual(g.conjugated(h), h(p)) - residual(g, p)) <= 1e-8


def test_fixed_point_rotation(factory):
    res = find_fixed_point(phase_rotation_group(4, 3), factory.operator(4, 3))
    assert res.converged and res.orbit_bounded
    assert res.residual <= 1e-6 and op_norm(hat(res.point).mat) <= 1e-6


def test_fixed_point_conjugated(factory):
    p0 = factory.operator(3, 2, 0.8)
    h = HBiholomorphicMap(BallAutomorphism.translation(hat(p0)))
    g = phase_rotation_group(3, 2).conjugated(h)
    assert residual(g, p0) <= 1e-9
    res = find_fixed_point(g, factory.operator(3, 2))
    assert res.converged and distance(res.point, p0) <= 1e-5


def test_fixed_point_translation_flags():
    res = find_fixed_point(_translation_group(), [[0.0]], max_iter=5)
    assert not res.converged and not res.orbit_bounded
    with pytest.raises(UnboundedOrbitSuspected) as info:
        find_fixed_point(_translation_group(), [[0.0]], max_iter=5, strict=True)
    assert info.value.result is not None


def test_fixed_point_strict_no_convergence(factory):
    g = phase_rotation_group(2, 1, orders=(7,))
    with pytest.raises(NoConvergence):
        find_fixed_point(g, factory.operator(2, 1), tol=1e-15, max_iter=1, strict=True)


def test_conjugate_fixes_image():
    f = InstanceFactory(3)
    p = f.operator(2, 2, 0.6)
    r = HBiholomorphicMap(BallAutomorphism.rotation(1j * np.eye(2), np.eye(2)))
    h = _random_map(f, 2, 2)
    c = conjugate(h, r)
    assert distance(c(h(ClosedOperator.zeros(2, 2))), h(ClosedOperator.zeros(2, 2))) <= 1e-9
    assert distance(c(p), p) > 1e-3
