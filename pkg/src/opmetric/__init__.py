"""Hyperbolic metric on closed operators at matrix scale.

Closed operators ``T: H -> K`` (``n x m`` matrices) are carried to the open
unit ball of L(K, H) by the bounded transform ``hat``; the distance is the
Kobayashi distance of the images. The package provides the metric, operator
Moebius maps, geodesics and barycenters, Chebyshev centres, and fixed points
of finitely generated isometry groups.
"""
from .ball import BallAutomorphism, BallPoint, kobayashi, moebius_apply, moebius_compose, moebius_inverse
from .chk import (
    ClosedOperator,
    barycenter,
    distance,
    geodesic_point,
    hat,
    midpoint,
    psi,
    symmetrize,
    unhat,
)
from .convexity import FiniteConfiguration, chebyshev_center, diameter, find_nondiametral
from .dynamics import HBiholomorphicMap, IsometryGroup, apply_map, find_fixed_point, is_orbit_bounded, orbit
from .errors import (
    InputError,
    NoConvergence,
    NumericalError,
    OpMetricError,
    UnboundedOrbitSuspected,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BallAutomorphism",
    "BallPoint",
    "ClosedOperator",
    "FiniteConfiguration",
    "HBiholomorphicMap",
    "InputError",
    "IsometryGroup",
    "NoConvergence",
    "NumericalError",
    "OpMetricError",
    "UnboundedOrbitSuspected",
    "apply_map",
    "barycenter",
    "chebyshev_center",
    "diameter",
    "distance",
    "find_fixed_point",
    "find_nondiametral",
    "geodesic_point",
    "hat",
    "is_orbit_bounded",
    "kobayashi",
    "midpoint",
    "moebius_apply",
    "moebius_compose",
    "moebius_inverse",
    "orbit",
    "psi",
    "symmetrize",
    "unhat",
]
