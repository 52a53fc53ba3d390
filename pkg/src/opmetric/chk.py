"""The metric space of closed operators H -> K at matrix scale.

A :class:`ClosedOperator` is an ``n x m`` matrix (``n = dim K``, ``m = dim H``).
The bounded transform ``hat`` identifies these with points of the open ball
of L(K, H), and the distance is the Kobayashi distance of the images.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .ball import (
    BallAutomorphism,
    BallPoint,
    atanh_clamped,
    eta,
    geodesic,
    kobayashi,
    moebius_apply,
    moebius_compose,
    moebius_inverse,
    radial_scale,
)
from .errors import DimensionMismatch, SingularResolvent
from .linalg import adjoint, as_matrix, inv_sqrtm_pd, op_norm, sqrtm_psd

# beyond this condition number of R_S(T) the distance is taken in hat coordinates
LR_MAX_COND = 1e10


@dataclass(frozen=True, eq=False)
class ClosedOperator:
    """An operator H -> K stored as an ``dim_k x dim_h`` complex matrix."""

    mat: np.ndarray

    def __post_init__(self):
        mat = as_matrix(self.mat)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def dim_h(self) -> int:
        return self.mat.shape[1]

    @property
    def dim_k(self) -> int:
        return self.mat.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.mat.shape

    def __neg__(self) -> "ClosedOperator":
        return ClosedOperator(-self.mat)

    @classmethod
    def zeros(cls, dim_h: int, dim_k: int) -> "ClosedOperator":
        return cls(np.zeros((dim_k, dim_h), dtype=np.complex128))


def _op(t) -> ClosedOperator:
    return t if isinstance(t, ClosedOperator) else ClosedOperator(t)


def _same_shape(*ops: ClosedOperator) -> None:
    shapes = {op.shape for op in ops}
    if len(shapes) != 1:
        raise DimensionMismatch(f"operators have different shapes: {sorted(shapes)}")


def hat(t) -> BallPoint:
    """Bounded transform ``(I + T* T)^(-1/2) T*``, evaluated as ``T* (I + T T*)^(-1/2)``."""
    t = _op(t)
    return BallPoint(kernels.hat_batch(t.mat[None])[0])


def hat_many(ops: Sequence[ClosedOperator]) -> np.ndarray:
    """Stack of hat matrices, shape ``(k, dim_h, dim_k)``; no margin check."""
    return kernels.hat_batch(np.stack([_op(t).mat for t in ops]))


def unhat(a) -> ClosedOperator:
    """Inverse transform ``(I - A* A)^(-1/2) A*``."""
    # BallPoint raises NormTooCloseToOne inside the boundary margin
    am = (a if isinstance(a, BallPoint) else BallPoint(a)).mat
    n = am.shape[1]
    return ClosedOperator(inv_sqrtm_pd(np.eye(n) - adjoint(am) @ am) @ adjoint(am))


def l_map(t, x) -> np.ndarray:
    """``L_T(X) = (I + T* T)^(1/2) X* - T* (I + X X*)^(1/2)``, an ``m x n`` matrix."""
    t, x = _op(t), _op(x)
    _same_shape(t, x)
    tm, xm = t.mat, x.mat
    return sqrtm_psd(np.eye(t.dim_h) + adjoint(tm) @ tm) @ adjoint(xm) - adjoint(tm) @ sqrtm_psd(
        np.eye(t.dim_k) + xm @ adjoint(xm)
    )


def r_map(t, x) -> np.ndarray:
    """``R_T(X) = (I + X X*)^(1/2) (I + T T*)^(1/2) - X T*``, an ``n x n`` matrix."""
    t, x = _op(t), _op(x)
    _same_shape(t, x)
    tm, xm = t.mat, x.mat
    n = t.dim_k
    return sqrtm_psd(np.eye(n) + xm @ adjoint(xm)) @ sqrtm_psd(np.eye(n) + tm @ adjoint(tm)) - xm @ adjoint(tm)


def distance_lr(t, s) -> tuple[float, float]:
    """``atanh ||L_T(S) R_S(T)^(-1)||`` and the condition number of ``R_S(T)``."""
    t, s = _op(t), _op(s)
    lt = l_map(t, s)
    r = r_map(s, t)
    sv = np.linalg.svd(r, compute_uv=False)
    cond = np.inf if sv[-1] == 0 else sv[0] / sv[-1]
    if not np.isfinite(cond):
        raise SingularResolvent("R_S(T) is singular")
    q = np.linalg.solve(r.T, lt.T).T
    return atanh_clamped(op_norm(q)), float(cond)


def distance(t, s) -> float:
    """The metric ``d(T, S)``.

    Evaluated as ``atanh ||L_T(S) R_S(T)^(-1)||``; when ``R_S(T)`` has condition
    number above ``LR_MAX_COND`` it falls back to the Kobayashi distance of
    the hat images, which is the same quantity.
    """
    t, s = _op(t), _op(s)
    _same_shape(t, s)
    try:
        d, cond = distance_lr(t, s)
    except SingularResolvent:
        return kobayashi(hat(t), hat(s))
    if cond > LR_MAX_COND:
        return kobayashi(hat(t), hat(s))
    return d


def psi_automorphism(t) -> BallAutomorphism:
    """``psi_T`` as a ball automorphism: the Moebius map with parameter ``-hat(T)``."""
    return BallAutomorphism.translation(-hat(t))


def psi(t, x) -> BallPoint:
    """``psi_T(X) = (I - T^ T^*)^(-1/2) (X - T^) (I - T^* X)^(-1) (I - T^* T^)^(1/2)``."""
    t = _op(t)
    x = x if isinstance(x, BallPoint) else BallPoint(x)
    if x.shape != (t.dim_h, t.dim_k):
        raise DimensionMismatch(f"ball point {x.shape} does not match operator {t.shape}")
    return BallPoint(eta(-hat(t).mat, x.mat))


def psi_lr(t, x) -> BallPoint:
    """``psi_T(X) = L_T(Y) R_Y(T)^(-1)`` with ``Y = unhat(X)``; the defining form of psi."""
    t = _op(t)
    y = unhat(x)
    return BallPoint(np.linalg.solve(r_map(y, t).T, l_map(t, y).T).T)


def geodesic_point(t, s, frac: float) -> ClosedOperator:
    """Point at fraction ``frac`` of the way from ``T`` to ``S``.

    Moves ``S`` to ``B = psi_T(hat S)`` (so ``T`` sits at 0), writes
    ``B = V |B|`` and scales the radial part, ``V tanh(frac atanh |B|)``,
    before moving back with ``psi_{-T}``.
    """
    t, s = _op(t), _op(s)
    _same_shape(t, s)
    if not 0.0 <= frac <= 1.0:
        raise ValueError(f"geodesic fraction must lie in [0, 1], got {frac}")
    return unhat(geodesic(hat(t).mat, hat(s).mat, frac))


def midpoint(t, s) -> ClosedOperator:
    return geodesic_point(t, s, 0.5)


def symmetrize(t, s) -> BallAutomorphism:
    """A ball automorphism ``phi`` with ``phi(hat T) = -phi(hat S)``.

    ``B = psi_{-T}(-hat S) = V |B|``, ``A = V tanh(atanh(|B|) / 2)`` and
    ``phi = psi_{A0} o (X -> psi_{-T}(-X))`` where ``hat(A0) = A``.
    """
    t, s = _op(t), _op(s)
    _same_shape(t, s)
    a = radial_scale(psi(-t, -hat(s)).mat, 0.5)
    m, n = a.shape
    # psi_{A0} = eta_{-A}; X -> psi_{-T}(-X) = eta_{hat T}(-X)
    outer = BallAutomorphism.translation(BallPoint(-a))
    inner = BallAutomorphism(hat(t), -np.eye(m), np.eye(n))
    return moebius_compose(outer, inner)


def midpoint_by_symmetry(t, s) -> ClosedOperator:
    """Midpoint through ``symmetrize``: ``Q = unhat(phi^(-1)(0))``.

    Independent of :func:`geodesic_point`; used as a cross-check.
    """
    t, s = _op(t), _op(s)
    phi = symmetrize(t, s)
    q = moebius_apply(moebius_inverse(phi), BallPoint.zeros(*phi.shape))
    return unhat(q)


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def pad_cyclic(points: Sequence) -> list:
    """Repeat ``points`` cyclically up to the next power of two."""
    points = list(points)
    size = _next_pow2(len(points))
    return [points[i % len(points)] for i in range(size)]


def barycenter(points: Sequence) -> ClosedOperator:
    """Recursive pairwise midpoints of adjacent entries.

    Lists whose length is not a power of two are first padded cyclically,
    so the averaging inequality holds for the padded multiset.
    """
    ops = [_op(p) for p in points]
    if not ops:
        raise ValueError("barycenter of an empty sequence")
    _same_shape(*ops)
    return unhat(barycenter_hat(hat_many(ops)))


def barycenter_hat(hats: np.ndarray) -> np.ndarray:
    """:func:`barycenter` on a stack of hat matrices; returns a hat matrix."""
    level = pad_cyclic(list(hats))
    while len(level) > 1:
        level = [geodesic(level[i], level[i + 1], 0.5) for i in range(0, len(level), 2)]
    return level[0]


__all__ = [
    "ClosedOperator",
    "barycenter",
    "barycenter_hat",
    "distance",
    "distance_lr",
    "geodesic_point",
    "hat",
    "hat_many",
    "l_map",
    "midpoint",
    "midpoint_by_symmetry",
    "pad_cyclic",
    "psi",
    "psi_automorphism",
    "psi_lr",
    "r_map",
    "symmetrize",
    "unhat",
]
