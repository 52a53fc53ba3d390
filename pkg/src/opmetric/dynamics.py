"""h-biholomorphic maps, finitely generated isometry groups, orbits and fixed points.

A map ``phi`` of C(H, K) is h-biholomorphic when ``hat(phi(X)) = auto(hat(X))``
for a ball automorphism ``auto``; such maps preserve ``d``. Orbits are sampled
breadth-first over generator words and all heavy work runs in hat coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .ball import (
    NORM_MARGIN,
    BallAutomorphism,
    BallPoint,
    kobayashi_cross,
    moebius_compose,
    moebius_inverse,
)
from .chk import ClosedOperator, hat, unhat
from .convexity import chebyshev_center
from .errors import DimensionMismatch, NoConvergence, SingularResolvent, UnboundedOrbitSuspected

DEDUP_TOL = 1e-8
ORBIT_CAP = 5000
DEFAULT_DEPTH = 6
SEED_SAMPLE = 256


@dataclass(frozen=True, eq=False)
class HBiholomorphicMap:
    """``phi(X) = unhat(auto(hat X))`` for a ball automorphism ``auto``."""

    auto: BallAutomorphism

    def __post_init__(self):
        if not isinstance(self.auto, BallAutomorphism):
            raise TypeError("auto must be a BallAutomorphism")

    @classmethod
    def from_params(cls, a, u, v) -> "HBiholomorphicMap":
        return cls(BallAutomorphism(BallPoint(a), u, v))

    @classmethod
    def identity(cls, dim_h: int, dim_k: int) -> "HBiholomorphicMap":
        return cls(BallAutomorphism.identity(dim_h, dim_k))

    @property
    def operator_shape(self) -> tuple[int, int]:
        """Shape ``(dim_k, dim_h)`` of the operators it acts on."""
        m, n = self.auto.shape
        return n, m

    def inverse(self) -> "HBiholomorphicMap":
        return HBiholomorphicMap(moebius_inverse(self.auto))

    def __call__(self, t) -> ClosedOperator:
        return apply_map(self, t)


def apply_map(g: HBiholomorphicMap, t) -> ClosedOperator:
    t = t if isinstance(t, ClosedOperator) else ClosedOperator(t)
    if t.shape != g.operator_shape:
        raise DimensionMismatch(f"operator of shape {t.shape} for a map on {g.operator_shape}")
    return unhat(g.auto(hat(t)))


def compose_maps(f: HBiholomorphicMap, g: HBiholomorphicMap) -> HBiholomorphicMap:
    """``f o g``."""
    return HBiholomorphicMap(moebius_compose(f.auto, g.auto))


def conjugate(h: HBiholomorphicMap, g: HBiholomorphicMap) -> HBiholomorphicMap:
    """``h o g o h^(-1)``; fixes ``h(P)`` whenever ``g`` fixes ``P``."""
    return compose_maps(h, compose_maps(g, h.inverse()))


@dataclass(frozen=True, eq=False)
class IsometryGroup:
    """Group generated by finitely many h-biholomorphic maps; inverses are adjoined."""

    generators: tuple[HBiholomorphicMap, ...]
    letters: tuple[HBiholomorphicMap, ...] = field(init=False, repr=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ValueError("an isometry group needs at least one generator")
        if len({g.operator_shape for g in gens}) != 1:
            raise DimensionMismatch("generators act on operators of different shapes")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "letters", gens + tuple(g.inverse() for g in gens))

    @property
    def operator_shape(self) -> tuple[int, int]:
        return self.generators[0].operator_shape

    def conjugated(self, h: HBiholomorphicMap) -> "IsometryGroup":
        return IsometryGroup(tuple(conjugate(h, g) for g in self.generators))


def _apply_auto_many(g: BallAutomorphism, zs: np.ndarray) -> np.ndarray:
    """``eta_A(U z V)`` for a stack of ball matrices; raises if points reach the boundary."""
    w = g.U @ zs @ g.V
    out = kernels.eta_batch(np.broadcast_to(g.A.mat, w.shape), w)
    norms = np.linalg.norm(out, 2, axis=(1, 2)) if len(out) else np.zeros(0)
    if not np.all(np.isfinite(norms)) or np.any(norms > 1.0 - NORM_MARGIN):
        raise SingularResolvent("orbit points escape to the boundary of the ball")
    return out


def _flat(hats: np.ndarray) -> np.ndarray:
    # Frobenius distance of complex matrices = Euclidean distance of (re, im) vectors
    flat = hats.reshape(len(hats), -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


@dataclass
class OrbitResult:
    """Orbit sample of ``T0``.

    ``diameter_by_depth[k]`` is the diameter of all words of length at most
    ``k`` and ``radius_by_depth[k]`` their largest distance from ``T0``; index
    0 is the start point alone. ``truncated`` is set once the point cap is hit,
    after which later depths add no points.
    """

    hats: np.ndarray
    depth_of: np.ndarray
    diameter_by_depth: list[float]
    radius_by_depth: list[float]
    truncated: bool

    @property
    def points(self) -> list[ClosedOperator]:
        return [unhat(h) for h in self.hats]

    def growth_per_step(self) -> float:
        """Mean increase of ``radius_by_depth`` per word length over the last quarter."""
        return _tail_slope(self.radius_by_depth)


def _tail_slope(values: Sequence[float]) -> float:
    depth = len(values) - 1
    if depth < 1:
        return 0.0
    q = max(1, depth // 4)
    return (values[-1] - values[-1 - q]) / q


def orbit(g: IsometryGroup, t0, depth: int = DEFAULT_DEPTH, cap: int = ORBIT_CAP) -> OrbitResult:
    """Breadth-first orbit sample over words of length at most ``depth``."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    t0 = t0 if isinstance(t0, ClosedOperator) else ClosedOperator(t0)
    if t0.shape != g.operator_shape:
        raise DimensionMismatch(f"start point of shape {t0.shape} for a group on {g.operator_shape}")
    start = hat(t0).mat[None]
    hats = start
    depth_of = [0]
    frontier = start
    diam = [0.0]
    radius = [0.0]
    truncated = False
    for k in range(1, depth + 1):
        new = np.zeros((0,) + start.shape[1:], dtype=np.complex128)
        if len(frontier) and not truncated:
            cand = np.concatenate([_apply_auto_many(letter.auto, frontier) for letter in g.letters])
            cand = _dedup(cand, hats)
            room = cap - len(hats)
            if len(cand) > room:
                cand, truncated = cand[:room], True
            new = cand
        if len(new):
            d_new = kobayashi_cross(new, np.concatenate([hats, new]))
            diam.append(max(diam[-1], float(d_new.max())))
            radius.append(max(radius[-1], float(d_new[:, 0].max())))
            hats = np.concatenate([hats, new])
            depth_of.extend([k] * len(new))
        else:
            diam.append(diam[-1])
            radius.append(radius[-1])
        frontier = new
    return OrbitResult(hats, np.array(depth_of), diam, radius, truncated)


def _dedup(cand: np.ndarray, known: np.ndarray) -> np.ndarray:
    """Drop candidates within ``DEDUP_TOL`` of a known point or of an earlier candidate."""
    if not len(cand):
        return cand
    fc = _flat(cand)
    dist, _ = cKDTree(_flat(known)).query(fc, distance_upper_bound=DEDUP_TOL)
    keep_idx = np.flatnonzero(~np.isfinite(dist) | (dist > DEDUP_TOL))
    fc = fc[keep_idx]
    tree = cKDTree(fc)
    kept = []
    dropped = np.zeros(len(fc), dtype=bool)
    for i in range(len(fc)):
        if dropped[i]:
            continue
        kept.append(i)
        for j in tree.query_ball_point(fc[i], DEDUP_TOL):
            if j > i:
                dropped[j] = True
    return cand[keep_idx[kept]]


def is_orbit_bounded(
    g: IsometryGroup, t0, depth: int = DEFAULT_DEPTH, growth_tol: float | None = None
) -> bool:
    """Heuristic plateau test on the orbit diameter.

    True when the diameter grew by less than ``growth_tol`` over the last
    quarter of the depths (default ``1e-3 (1 + diameter)``). This is evidence,
    not a decision procedure: slowly growing orbits can look bounded.
    """
    if depth < 4:
        raise ValueError("depth must be at least 4")
    return _plateaued(orbit(g, t0, depth).diameter_by_depth, growth_tol)


def _plateaued(diam: Sequence[float], growth_tol: float | None) -> bool:
    q = max(1, (len(diam) - 1) // 4)
    tol = 1e-3 * (1.0 + diam[-1]) if growth_tol is None else growth_tol
    return diam[-1] - diam[-1 - q] < tol


def residual(g: IsometryGroup, p) -> float:
    """``max_i d(g_i P, P)`` over the generators."""
    ph = hat(p).mat
    images = np.stack([_apply_auto_many(gen.auto, ph[None])[0] for gen in g.generators])
    return float(kobayashi_cross(ph[None], images).max())


@dataclass
class FixedPointResult:
    point: ClosedOperator
    residual: float
    iterations: int
    converged: bool
    orbit_bounded: bool
    history: list[float] = field(default_factory=list, repr=False)


def find_fixed_point(
    g: IsometryGroup,
    t0,
    tol: float = 1e-6,
    max_iter: int = 200,
    depth: int = 4,
    strict: bool = False,
) -> FixedPointResult:
    """Common fixed point of the generators by iterated Chebyshev centres.

    The seed is the Chebyshev centre of a depth-limited orbit sample of
    ``t0``; each step replaces ``P`` with the Chebyshev centre of
    ``{P} + {g_i P} + {g_i^(-1) P}``. The inner centre tolerance shrinks with
    the residual. Convergence is empirical, not guaranteed.

    Returns a result with ``converged`` and ``orbit_bounded`` flags. With
    ``strict=True`` failures raise :class:`NoConvergence` or
    :class:`UnboundedOrbitSuspected`, each carrying the result.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    t0 = t0 if isinstance(t0, ClosedOperator) else ClosedOperator(t0)
    orb = orbit(g, t0, max(depth, 4))
    bounded = _plateaued(orb.diameter_by_depth, None)

    seed_pts = [unhat(h) for h in orb.hats[:SEED_SAMPLE]]
    p = chebyshev_center(seed_pts).center
    res = residual(g, p)
    history = [res]
    best, best_res = p, res
    k = 0
    while best_res > tol and k < max_iter:
        ph = hat(p).mat
        imgs = [_apply_auto_many(letter.auto, ph[None])[0] for letter in g.letters]
        cfg = [p] + [unhat(z) for z in imgs]
        inner = max(min(1e-6, 1e-3 * res), 1e-13)
        p = chebyshev_center(cfg, tol=inner, max_iter=20000).center
        res = residual(g, p)
        history.append(res)
        k += 1
        if res < best_res:
            best, best_res = p, res
    result = FixedPointResult(best, best_res, k, best_res <= tol, bounded, history)
    if strict and not bounded:
        raise UnboundedOrbitSuspected("orbit diameter keeps growing", result)
    if strict and not result.converged:
        raise NoConvergence(f"residual {best_res:.3e} above {tol:g} after {k} steps", result)
    return result


__all__ = [
    "FixedPointResult",
    "HBiholomorphicMap",
    "IsometryGroup",
    "OrbitResult",
    "apply_map",
    "compose_maps",
    "conjugate",
    "find_fixed_point",
    "is_orbit_bounded",
    "orbit",
    "residual",
]
