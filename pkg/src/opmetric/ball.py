"""The open unit ball of L(K, H), its Moebius automorphisms and the Kobayashi distance.

A ball point is an ``m x n`` matrix (``m = dim H``, ``n = dim K``) of operator
norm below one. Automorphisms are stored in the normal form
``Z -> eta_A(U Z V)`` with

    eta_A(Z) = (I - A A*)^(-1/2) (Z + A) (I + A* Z)^(-1) (I - A* A)^(1/2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DimensionMismatch,
    NormalFormFailure,
    NormTooCloseToOne,
    OutsideDisc,
    SingularResolvent,
)
from .linalg import (
    adjoint,
    as_matrix,
    op_norm,
)

NORM_MARGIN = 1e-8
UNITARY_TOL = 1e-10
RESOLVENT_MAX_COND = 1e12
ATANH_CLAMP = 1.0 - 1e-15
COMPOSE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BallPoint:
    """A point of the open operator ball; ``mat`` maps K to H."""

    mat: np.ndarray

    def __post_init__(self):
        mat = as_matrix(self.mat)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        if op_norm(mat) > 1.0 - NORM_MARGIN:
            raise NormTooCloseToOne(
                f"ball point norm {op_norm(mat):.17g} exceeds 1 - {NORM_MARGIN:g}"
            )

    @property
    def dim_h(self) -> int:
        return self.mat.shape[0]

    @property
    def dim_k(self) -> int:
        return self.mat.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.mat.shape

    def __neg__(self) -> "BallPoint":
        return BallPoint(-self.mat)

    @classmethod
    def zeros(cls, dim_h: int, dim_k: int) -> "BallPoint":
        return cls(np.zeros((dim_h, dim_k), dtype=np.complex128))


def _as_ball_matrix(z) -> np.ndarray:
    return z.mat if isinstance(z, BallPoint) else BallPoint(z).mat


def _check_unitary(u: np.ndarray, what: str) -> np.ndarray:
    u = as_matrix(u)
    k = u.shape[0]
    if u.shape != (k, k) or op_norm(adjoint(u) @ u - np.eye(k)) > UNITARY_TOL:
        raise DimensionMismatch(f"{what} is not a square unitary matrix")
    u.setflags(write=False)
    return u


@dataclass(frozen=True, eq=False)
class BallAutomorphism:
    """The map ``Z -> eta_A(U Z V)`` with ``U`` unitary m x m and ``V`` unitary n x n."""

    A: BallPoint
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        a = self.A if isinstance(self.A, BallPoint) else BallPoint(self.A)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "U", _check_unitary(self.U, "U"))
        object.__setattr__(self, "V", _check_unitary(self.V, "V"))
        m, n = a.shape
        if self.U.shape != (m, m) or self.V.shape != (n, n):
            raise DimensionMismatch(
                f"U {self.U.shape} / V {self.V.shape} do not fit a parameter of shape {a.shape}"
            )

    @classmethod
    def identity(cls, dim_h: int, dim_k: int) -> "BallAutomorphism":
        return cls(BallPoint.zeros(dim_h, dim_k), np.eye(dim_h), np.eye(dim_k))

    @classmethod
    def translation(cls, a) -> "BallAutomorphism":
        """``eta_a`` alone (``U = I``, ``V = I``)."""
        a = a if isinstance(a, BallPoint) else BallPoint(a)
        return cls(a, np.eye(a.dim_h), np.eye(a.dim_k))

    @classmethod
    def rotation(cls, u, v) -> "BallAutomorphism":
        """The linear isometry ``Z -> U Z V``."""
        u, v = as_matrix(u), as_matrix(v)
        return cls(BallPoint.zeros(u.shape[0], v.shape[0]), u, v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def __call__(self, z) -> BallPoint:
        return moebius_apply(self, z)


def poincare(a: complex, b: complex) -> float:
    """Poincare distance on the unit disc, ``atanh(|a - b| / |1 - conj(a) b|)``."""
    if abs(a) >= 1 or abs(b) >= 1:
        raise OutsideDisc(f"points {a!r}, {b!r} must lie in the open unit disc")
    return float(np.arctanh(abs(a - b) / abs(1 - np.conj(a) * b)))


def _check_resolvent(a: np.ndarray, z: np.ndarray) -> None:
    r = np.eye(a.shape[1]) + adjoint(a) @ z
    sv = np.linalg.svd(r, compute_uv=False)
    if not sv[-1] > 0 or sv[0] / sv[-1] > RESOLVENT_MAX_COND:
        raise SingularResolvent("resolvent (I + A* Z) is too ill-conditioned")


def eta(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Raw Moebius map ``eta_a(z)`` on arrays; no margin check on the result.

    Only ``n x n`` spectra are needed, see :func:`opmetric.kernels.eta_batch`.
    """
    a, z = as_matrix(a), as_matrix(z)
    if a.shape != z.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {z.shape} differ")
    _check_resolvent(a, z)
    return kernels.eta_batch(a[None], z[None])[0]


def radial_scale(b: np.ndarray, frac: float) -> np.ndarray:
    """``V tanh(frac atanh |B|)`` for the polar decomposition ``B = V |B|``.

    Both factors come from one compact SVD ``B = W S Q*``: ``V = W Q*`` and
    ``|B| = Q S Q*``, so the result is ``W tanh(frac atanh S) Q*``.
    """
    w, sv, qh = np.linalg.svd(b, full_matrices=False)
    if sv.size and sv[0] >= 1.0:
        raise NormTooCloseToOne(f"polar factor of norm {sv[0]:.17g} is not below 1")
    return (w * np.tanh(frac * np.arctanh(np.minimum(sv, ATANH_CLAMP)))) @ qh


def geodesic(x: np.ndarray, y: np.ndarray, frac: float) -> np.ndarray:
    """Point at fraction ``frac`` along the ball geodesic from ``x`` to ``y``.

    ``y`` is moved to ``B = M_x(y)``, its radial part is rescaled and the
    result moved back with ``eta_x``. Works on raw arrays.
    """
    return eta(x, radial_scale(eta(-x, y), frac))


def moebius_apply(g: BallAutomorphism, z) -> BallPoint:
    zm = _as_ball_matrix(z)
    if zm.shape != g.shape:
        raise DimensionMismatch(f"point of shape {zm.shape} for automorphism of shape {g.shape}")
    return BallPoint(eta(g.A.mat, g.U @ zm @ g.V))


def moebius_inverse(g: BallAutomorphism) -> BallAutomorphism:
    """Closed form ``(-U* A V*, U*, V*)``; uses ``U* eta_B(W) V* = eta_{U* B V*}(U* W V*)``."""
    uh, vh = adjoint(g.U), adjoint(g.V)
    return BallAutomorphism(BallPoint(-(uh @ g.A.mat @ vh)), uh, vh)


def _nearest_unitary(x: np.ndarray) -> np.ndarray:
    u, _, wh = np.linalg.svd(x)
    return u @ wh


def _probe_points(m: int, n: int, count: int) -> list[np.ndarray]:
    rng = np.random.default_rng(20140403)
    out = []
    for _ in range(count):
        z = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
        out.append(0.7 * z / op_norm(z))
    return out


def moebius_compose(g1: BallAutomorphism, g2: BallAutomorphism) -> BallAutomorphism:
    """Normal form of ``g1 o g2``.

    ``A' = g1(g2(0))``; the remaining map ``eta_{-A'} o g1 o g2`` fixes 0 and is
    linear, ``Z -> U' Z V'``. Its values on a scaled matrix-unit frame give a
    rank-one rearrangement ``vec(U') vec(V')^T``; the leading singular pair,
    projected onto the unitaries, recovers ``(U', V')``. The free unit phase is
    chosen to align ``V'`` with ``V2 V1``.
    """
    if g1.shape != g2.shape:
        raise DimensionMismatch(f"shapes {g1.shape} and {g2.shape} differ")
    m, n = g1.shape

    def both(z):
        return eta(g1.A.mat, g1.U @ eta(g2.A.mat, g2.U @ z @ g2.V) @ g1.V)

    a_new = both(np.zeros((m, n), dtype=np.complex128))
    if op_norm(a_new) > 1.0 - NORM_MARGIN:
        raise NormalFormFailure("composite parameter violates the ball margin")

    s = 0.5
    frame = np.empty((m, n, m, n), dtype=np.complex128)
    for i in range(m):
        for j in range(n):
            e = np.zeros((m, n), dtype=np.complex128)
            e[i, j] = s
            frame[i, j] = eta(-a_new, both(e)) / s
    # frame[i, j, a, b] = U[a, i] V[j, b]
    r = frame.transpose(2, 0, 1, 3).reshape(m * m, n * n)
    p, sig, qh = np.linalg.svd(r)
    u = _nearest_unitary(p[:, 0].reshape(m, m))
    v = _nearest_unitary(sig[0] * qh[0].reshape(n, n))
    model = np.einsum("ai,jb->ijab", u, v)
    c = np.vdot(model.ravel(), frame.ravel())
    if abs(c) == 0:
        raise NormalFormFailure("could not recover the linear part")
    u = u * (c / abs(c))
    tr = np.trace(adjoint(v) @ (g2.V @ g1.V))
    if abs(tr) > 1e-8:
        ph = tr / abs(tr)
        u, v = u / ph, v * ph

    out = BallAutomorphism(BallPoint(a_new), _reunitarize(u), _reunitarize(v))
    for z in _probe_points(m, n, 3):
        err = op_norm(eta(out.A.mat, out.U @ z @ out.V) - both(z))
        if err > COMPOSE_TOL * 10:
            raise NormalFormFailure(f"normal form mismatch {err:.3e} on a probe point")
    return out


def _reunitarize(u: np.ndarray) -> np.ndarray:
    """Re-orthonormalise a matrix that is unitary up to rounding."""
    if op_norm(adjoint(u) @ u - np.eye(u.shape[0])) > 1e-13:
        return _nearest_unitary(u)
    return u


def transport(x, z) -> BallPoint:
    """``M_x(z) = eta_{-x}(z)``, the Moebius map sending ``x`` to 0."""
    xm, zm = _as_ball_matrix(x), _as_ball_matrix(z)
    return BallPoint(eta(-xm, zm))


def atanh_clamped(v: float) -> float:
    if not np.isfinite(v) or v >= 1.0:
        raise SingularResolvent(f"transport norm {v!r} is not below 1")
    return float(np.arctanh(min(v, ATANH_CLAMP)))


def kobayashi(x, y) -> float:
    """Kobayashi distance ``atanh ||M_x(y)||`` between two ball points."""
    xm, ym = _as_ball_matrix(x), _as_ball_matrix(y)
    if xm.shape != ym.shape:
        raise DimensionMismatch(f"shapes {xm.shape} and {ym.shape} differ")
    v = kernels.kob_norm_pairs(xm[None], ym[None])[0]
    return atanh_clamped(v)


def kobayashi_cross(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """All pairwise distances between two stacks of ball matrices."""
    v = kernels.kob_norm_cross(xs, ys)
    if not np.all(np.isfinite(v)) or np.any(v >= 1.0):
        raise SingularResolvent("transport norm is not below 1")
    return np.arctanh(np.minimum(v, ATANH_CLAMP))


__all__ = [
    "BallAutomorphism",
    "BallPoint",
    "NORM_MARGIN",
    "atanh_clamped",
    "eta",
    "geodesic",
    "kobayashi",
    "kobayashi_cross",
    "moebius_apply",
    "moebius_compose",
    "moebius_inverse",
    "poincare",
    "radial_scale",
    "transport",
]
