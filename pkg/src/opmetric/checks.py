"""Seeded property suite behind ``opmetric check``.

Each property draws its own instances from a stream keyed by ``(seed, name)``,
so results do not depend on which other properties run. A property reports
the worst violation it saw next to its tolerance.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ball import (
    BallAutomorphism,
    BallPoint,
    kobayashi,
    moebius_apply,
    moebius_compose,
    moebius_inverse,
)
from .chk import (
    ClosedOperator,
    barycenter,
    distance,
    distance_lr,
    geodesic_point,
    hat,
    psi,
    symmetrize,
    unhat,
)
from .convexity import chebyshev_center, diameter, find_nondiametral, hat_ball_radius
from .dynamics import (
    HBiholomorphicMap,
    IsometryGroup,
    apply_map,
    find_fixed_point,
    orbit,
    residual,
)
from .linalg import op_norm
from .oracles import InstanceFactory, diagonal_distance, scalar_distance

SUITES = ("metric", "ball", "convexity", "dynamics")


@dataclass(frozen=True)
class PropertyResult:
    suite: str
    name: str
    worst: float
    tolerance: float
    samples: int

    @property
    def passed(self) -> bool:
        return math.isfinite(self.worst) and self.worst <= self.tolerance


def _factory(seed: int, name: str) -> InstanceFactory:
    return InstanceFactory(seed * 2**32 + zlib.crc32(name.encode()))


def _zero_like(t: ClosedOperator) -> ClosedOperator:
    return ClosedOperator.zeros(t.dim_h, t.dim_k)


def _pair(f: InstanceFactory):
    m, n = f.dims()
    return f.operator(m, n), f.operator(m, n)


# metric


def _symmetry(f, k):
    worst = 0.0
    for _ in range(k):
        t, s = _pair(f)
        worst = max(worst, abs(distance(t, s) - distance(s, t)))
    return worst


def _identity(f, k):
    worst = 0.0
    for _ in range(k):
        t, _s = _pair(f)
        worst = max(worst, distance(t, t))
    return worst


def _triangle(f, k):
    worst = 0.0
    for _ in range(k):
        m, n = f.dims()
        a, b, c = (f.operator(m, n) for _ in range(3))
        worst = max(worst, distance(a, c) - distance(a, b) - distance(b, c))
    return worst


def _formula_equivalence(f, k):
    worst = 0.0
    for _ in range(k):
        t, s = _pair(f)
        worst = max(worst, abs(distance_lr(t, s)[0] - kobayashi(hat(t), hat(s))))
    return worst


def _scalar_oracle(f, k):
    worst = 0.0
    for _ in range(k):
        a, b = f.scalar(), f.scalar()
        worst = max(worst, abs(distance([[a]], [[b]]) - scalar_distance(a, b)))
    return worst


def _diagonal_oracle(f, k):
    worst = 0.0
    for _ in range(k):
        size = int(f.rng.integers(1, 4))
        a, b = f.diagonal(size), f.diagonal(size)
        worst = max(worst, abs(distance(np.diag(a), np.diag(b)) - diagonal_distance(a, b)))
    return worst


def _doubling(f, k):
    worst = 0.0
    for _ in range(k):
        x, _s = _pair(f)
        worst = max(worst, abs(distance(x, -x) - 2 * distance(x, _zero_like(x))))
    return worst


def _ball_radius_law(f, k):
    bad = 0
    for i in range(k):
        r = (0.25, 0.5, 1.0)[i % 3]
        m, n = f.dims()
        # hat norms straddling tanh(r), away from the boundary by 1e-7
        side = 1.0 if f.rng.random() < 0.5 else -1.0
        target = math.tanh(r) * (1.0 + side * (1e-7 + 0.2 * f.rng.random()))
        g = f.gaussian(m, n)
        t = unhat(target * g / np.linalg.norm(g, 2))
        if (distance(t, _zero_like(t)) <= r) != (op_norm(hat(t).mat) <= hat_ball_radius(r)):
            bad += 1
    return float(bad)


# ball


def _moebius_isometry(f, k):
    worst = 0.0
    for _ in range(k):
        m, n = f.dims()
        g = BallAutomorphism(BallPoint(f.ball_matrix(m, n, 0.9)), f.unitary(m), f.unitary(n))
        x, y = f.ball_matrix(m, n), f.ball_matrix(m, n)
        worst = max(worst, abs(kobayashi(g(x), g(y)) - kobayashi(x, y)))
    return worst


def _moebius_inverse(f, k):
    worst = 0.0
    for _ in range(k):
        m, n = f.dims()
        g = BallAutomorphism(BallPoint(f.ball_matrix(m, n, 0.9)), f.unitary(m), f.unitary(n))
        z = f.ball_matrix(m, n)
        worst = max(worst, op_norm(moebius_apply(moebius_inverse(g), g(z)).mat - z))
    return worst


def _moebius_compose(f, k):
    worst = 0.0
    for _ in range(k):
        m, n = f.dims()
        g1, g2 = (
            BallAutomorphism(BallPoint(f.ball_matrix(m, n, 0.8)), f.unitary(m), f.unitary(n))
            for _ in range(2)
        )
        z = f.ball_matrix(m, n)
        worst = max(worst, op_norm(moebius_compose(g1, g2)(z).mat - g1(g2(z)).mat))
    return worst


def _psi_identities(f, k):
    worst = 0.0
    for _ in range(k):
        t, _s = _pair(f)
        th = hat(t)
        z = f.ball_matrix(*th.shape)
        worst = max(
            worst,
            op_norm(psi(t, th).mat),
            op_norm(psi(t, BallPoint.zeros(*th.shape)).mat + th.mat),
            op_norm(psi(-t, psi(t, z)).mat - z),
        )
    return worst


# convexity


def _geodesic(f, k):
    worst = 0.0
    for _ in range(k):
        t, s = _pair(f)
        d = distance(t, s)
        for frac in (0.25, 0.5, 0.75):
            worst = max(worst, abs(distance(t, geodesic_point(t, s, frac)) - frac * d))
    return worst


def _symmetrize(f, k):
    worst = 0.0
    for _ in range(k):
        t, s = _pair(f)
        phi = symmetrize(t, s)
        worst = max(worst, op_norm(phi(hat(t)).mat + phi(hat(s)).mat))
    return worst


def _barycenter_inequality(f, k):
    worst = -math.inf
    for i in range(k):
        size = (2, 4, 8)[i % 3]
        m, n = f.dims()
        pts = [f.operator(m, n) for _ in range(size)]
        q = barycenter(pts)
        x = f.operator(m, n)
        worst = max(worst, distance(q, x) - sum(distance(p, x) for p in pts) / size)
    return worst


def _nondiametral(f, k):
    # worst of (-margin) and (radius - 0.999 diameter); both must stay below 0
    worst = -math.inf
    done = 0
    while done < k:
        m, n = f.dims()
        size = int(f.rng.integers(2, 7))
        pts = [f.operator(m, n) for _ in range(size)]
        if diameter(pts) < 0.1:
            continue
        w = find_nondiametral(pts)
        worst = max(worst, -w.margin, w.radius - 0.999 * w.diameter)
        done += 1
    return worst


def _two_point_radius(f, k):
    worst = 0.0
    for _ in range(k):
        t, s = _pair(f)
        worst = max(worst, abs(chebyshev_center([t, s]).radius - distance(t, s) / 2))
    return worst


# dynamics


def _random_map(f, m, n) -> HBiholomorphicMap:
    return HBiholomorphicMap(
        BallAutomorphism(BallPoint(f.ball_matrix(m, n, 0.9)), f.unitary(m), f.unitary(n))
    )


def _hbi_isometry(f, k):
    worst = 0.0
    for _ in range(k):
        m, n = f.dims()
        g = _random_map(f, m, n)
        t, s = f.operator(m, n), f.operator(m, n)
        worst = max(worst, abs(distance(g(t), g(s)) - distance(t, s)))
    return worst


def _hbi_hat(f, k):
    worst = 0.0
    for _ in range(k):
        m, n = f.dims()
        g = _random_map(f, m, n)
        t = f.operator(m, n, 0.8)
        worst = max(worst, op_norm(hat(apply_map(g, t)).mat - g.auto(hat(t)).mat))
    return worst


def phase_rotation_group(m: int, n: int, orders=(5, 3)) -> IsometryGroup:
    """Cyclic scalar-phase rotations ``Z -> exp(2 pi i / q) Z``; 0 is their only fixed point."""
    gens = tuple(
        HBiholomorphicMap(
            BallAutomorphism.rotation(np.exp(2j * np.pi / q) * np.eye(m), np.eye(n))
        )
        for q in orders
    )
    return IsometryGroup(gens)


def _rotation_orbit(f, k):
    worst = -math.inf
    for _ in range(max(1, k // 10)):
        m, n = f.dims()
        t0 = f.operator(m, n)
        o = orbit(phase_rotation_group(m, n), t0, 6)
        worst = max(worst, max(o.diameter_by_depth) - 2 * distance(t0, _zero_like(t0)))
    return worst


def _conjugation_covariance(f, k):
    worst = 0.0
    for _ in range(max(1, k // 5)):
        m, n = f.dims()
        g = IsometryGroup((_random_map(f, m, n), _random_map(f, m, n)))
        h = _random_map(f, m, n)
        p = f.operator(m, n, 0.8)
        worst = max(worst, abs(residual(g.conjugated(h), h(p)) - residual(g, p)))
    return worst


def _rotation_fixed_point(f, k):
    worst = 0.0
    for _ in range(max(1, k // 10)):
        m, n = f.dims()
        res = find_fixed_point(phase_rotation_group(m, n), f.operator(m, n))
        worst = max(worst, res.residual, op_norm(hat(res.point).mat))
    return worst


_PROPERTIES: dict[str, list[tuple[str, Callable, float]]] = {
    "metric": [
        ("symmetry", _symmetry, 1e-9),
        ("identity", _identity, 1e-9),
        ("triangle", _triangle, 1e-9),
        ("formula_equivalence", _formula_equivalence, 1e-9),
        ("scalar_oracle", _scalar_oracle, 1e-10),
        ("diagonal_oracle", _diagonal_oracle, 1e-9),
        ("doubling", _doubling, 1e-9),
        ("ball_radius_law", _ball_radius_law, 0.0),
    ],
    "ball": [
        ("moebius_isometry", _moebius_isometry, 1e-9),
        ("moebius_inverse", _moebius_inverse, 1e-9),
        ("moebius_compose", _moebius_compose, 1e-8),
        ("psi_identities", _psi_identities, 1e-9),
    ],
    "convexity": [
        ("geodesic", _geodesic, 1e-8),
        ("symmetrize", _symmetrize, 1e-8),
        ("barycenter_inequality", _barycenter_inequality, 1e-8),
        ("nondiametral", _nondiametral, 0.0),
        ("two_point_radius", _two_point_radius, 1e-6),
    ],
    "dynamics": [
        ("hbi_isometry", _hbi_isometry, 1e-9),
        ("hbi_hat", _hbi_hat, 1e-10),
        ("rotation_orbit", _rotation_orbit, 1e-8),
        ("conjugation_covariance", _conjugation_covariance, 1e-8),
        ("rotation_fixed_point", _rotation_fixed_point, 1e-6),
    ],
}

# how many instances a property draws per requested sample
_SCALE = {"nondiametral": 0.2, "barycenter_inequality": 0.5, "two_point_radius": 0.5}


def property_names(suite: str = "all") -> list[str]:
    return [name for s in _suites(suite) for name, _, _ in _PROPERTIES[s]]


def _suites(suite: str) -> tuple[str, ...]:
    if suite == "all":
        return SUITES
    if suite not in _PROPERTIES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    return (suite,)


def run_suite(suite: str = "all", samples: int = 50, seed: int = 0) -> list[PropertyResult]:
    """Run the named suite; results come back in a fixed order."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    out = []
    for s in _suites(suite):
        for name, fn, tol in _PROPERTIES[s]:
            k = max(1, int(samples * _SCALE.get(name, 1.0)))
            worst = float(fn(_factory(seed, name), k))
            out.append(PropertyResult(s, name, worst, tol, k))
    return out


__all__ = ["PropertyResult", "SUITES", "phase_rotation_group", "property_names", "run_suite"]
