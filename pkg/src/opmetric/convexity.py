"""Admissible sets, radius functionals and Chebyshev centres of finite configurations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ball import geodesic, kobayashi_cross
from .chk import ClosedOperator, barycenter_hat, distance, hat_many, unhat
from .errors import DegenerateConfiguration, DimensionMismatch, NoConvergence

CONTAINS_SLACK = 1e-9
DEGENERATE_DIAMETER = 1e-9
STALL_STEPS = 10


@dataclass(frozen=True)
class ClosedBall:
    center: ClosedOperator
    radius: float

    def __post_init__(self):
        if not isinstance(self.center, ClosedOperator):
            object.__setattr__(self, "center", ClosedOperator(self.center))
        if not math.isfinite(self.radius) or self.radius < 0:
            raise ValueError(f"ball radius must be finite and nonnegative, got {self.radius}")


@dataclass(frozen=True)
class AdmissibleSet:
    """Intersection of finitely many closed balls."""

    balls: tuple[ClosedBall, ...]

    def __post_init__(self):
        balls = tuple(self.balls)
        if not balls:
            raise ValueError("an admissible set needs at least one ball")
        if len({b.center.shape for b in balls}) != 1:
            raise DimensionMismatch("ball centres have different shapes")
        object.__setattr__(self, "balls", balls)

    def with_ball(self, ball: ClosedBall) -> "AdmissibleSet":
        return AdmissibleSet(self.balls + (ball,))


@dataclass(frozen=True)
class FiniteConfiguration:
    points: tuple[ClosedOperator, ...]

    def __post_init__(self):
        pts = tuple(p if isinstance(p, ClosedOperator) else ClosedOperator(p) for p in self.points)
        if not pts:
            raise ValueError("a configuration needs at least one point")
        if len({p.shape for p in pts}) != 1:
            raise DimensionMismatch("configuration points have different shapes")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def hats(self) -> np.ndarray:
        return hat_many(self.points)


def _config(f) -> FiniteConfiguration:
    return f if isinstance(f, FiniteConfiguration) else FiniteConfiguration(tuple(f))


def contains(d: AdmissibleSet, x) -> bool:
    return all(distance(x, b.center) <= b.radius + CONTAINS_SLACK for b in d.balls)


def hat_ball_radius(r: float) -> float:
    """Hat-norm radius of the distance ball ``{T : d(T, 0) <= r}``, i.e. ``tanh r``."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return math.tanh(r)


def distances_to(a, f) -> np.ndarray:
    """Distances from ``a`` to every point of ``f``, in hat coordinates."""
    f = _config(f)
    return kobayashi_cross(hat_many([a]), f.hats())[0]


def radius_at(a, f) -> float:
    """``max_x d(a, x)`` over the configuration."""
    return float(distances_to(a, f).max())


def pairwise_distances(f) -> np.ndarray:
    h = _config(f).hats()
    dm = kobayashi_cross(h, h)
    np.fill_diagonal(dm, 0.0)
    return np.maximum(dm, dm.T)


def diameter(f) -> float:
    f = _config(f)
    if len(f) == 1:
        return 0.0
    return float(pairwise_distances(f).max())


@dataclass
class ChebyshevResult:
    center: ClosedOperator
    radius: float
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list, repr=False)


def chebyshev_center(
    f, tol: float = 1e-6, max_iter: int = 5000, strict: bool = False
) -> ChebyshevResult:
    """Approximate minimiser of ``radius_at`` over the configuration.

    Farthest-point descent along geodesics: start from the barycenter, then
    at step ``k`` move a fraction ``1/(k+2)`` of the way towards the
    farthest point (lowest index on ties). The best centre seen is kept.
    Stops once the best radius has improved by less than ``tol`` over
    ``STALL_STEPS`` consecutive steps. The iteration runs in hat coordinates.

    The error of this scheme decays like ``1/sqrt(k)``, so tolerances much
    below the default need a correspondingly larger ``max_iter``.

    If ``max_iter`` runs out first the result has ``converged=False``; with
    ``strict=True`` a :class:`NoConvergence` carrying the result is raised.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    f = _config(f)
    hats = f.hats()
    best = center = barycenter_hat(hats)
    best_radius = float(kobayashi_cross(center[None], hats)[0].max())
    history = [best_radius]
    if len(f) == 1 or best_radius == 0.0:
        return ChebyshevResult(unhat(best), best_radius, 0, True, history)

    anchor = best_radius
    dists = kobayashi_cross(center[None], hats)[0]
    stalled = 0
    k = 0
    converged = False
    while k < max_iter:
        far = int(np.argmax(dists))
        center = geodesic(center, hats[far], 1.0 / (k + 2))
        k += 1
        dists = kobayashi_cross(center[None], hats)[0]
        r = float(dists.max())
        history.append(r)
        if r < best_radius:
            best, best_radius = center, r
        if anchor - best_radius >= tol:
            anchor = best_radius
            stalled = 0
        else:
            stalled += 1
        if stalled >= STALL_STEPS:
            converged = True
            break
    result = ChebyshevResult(unhat(best), best_radius, k, converged, history)
    if strict and not converged:
        raise NoConvergence(f"no convergence after {max_iter} steps", result)
    return result


@dataclass
class NonDiametralWitness:
    point: ClosedOperator
    margin: float
    radius: float
    diameter: float
    converged: bool


def find_nondiametral(f, tol: float = 1e-6, max_iter: int = 5000) -> NonDiametralWitness:
    """Point of the configuration's hull whose radius falls short of the diameter.

    ``margin = diameter - radius_at(point)``; a positive margin witnesses
    normal structure for this configuration.
    """
    f = _config(f)
    diam = diameter(f)
    if diam <= DEGENERATE_DIAMETER:
        raise DegenerateConfiguration(f"configuration diameter {diam:.3e} is too small")
    res = chebyshev_center(f, tol=tol, max_iter=max_iter)
    return NonDiametralWitness(res.center, diam - res.radius, res.radius, diam, res.converged)


__all__ = [
    "AdmissibleSet",
    "ChebyshevResult",
    "ClosedBall",
    "FiniteConfiguration",
    "NonDiametralWitness",
    "chebyshev_center",
    "contains",
    "diameter",
    "distances_to",
    "find_nondiametral",
    "hat_ball_radius",
    "pairwise_distances",
    "radius_at",
]
