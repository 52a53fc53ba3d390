"""Dense complex-matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Everything here
is a pure function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonFiniteEntry, NotHermitian, SpectrumOutOfDomain

HERM_TOL = 1e-10
CLIP_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-D ``complex128`` array."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteEntry("matrix has NaN or infinite entries")
    return m


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermitize(p: np.ndarray) -> np.ndarray:
    return 0.5 * (p + adjoint(p))


def op_norm(m) -> float:
    """Operator (spectral) norm: the largest singular value."""
    m = np.asarray(m, dtype=np.complex128)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def eigh_sorted(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian eigendecomposition with a reproducible ordering.

    Eigenvalues come back descending; ties are ordered by the index of the
    canonical basis vector each eigenvector overlaps most. Each eigenvector
    is rotated so that its largest component is real and positive.
    """
    lam, w = np.linalg.eigh(p)
    lead = np.argmax(np.abs(w), axis=0)
    order = np.lexsort((lead, -lam))
    lam, w, lead = lam[order], w[:, order], lead[order]
    phase = w[lead, np.arange(w.shape[1])]
    phase = np.where(np.abs(phase) > 0, phase / np.abs(phase), 1.0)
    return lam, w / phase


@dataclass(frozen=True)
class ScalarFunction:
    """A real function together with the interval it is defined on.

    ``lo``/``hi`` are the domain ends; ``lo_open``/``hi_open`` mark them as
    excluded. Eigenvalues that fall just below a closed lower end of 0 are
    clipped onto it before evaluation.
    """

    func: Callable[[np.ndarray], np.ndarray]
    lo: float = -np.inf
    hi: float = np.inf
    lo_open: bool = False
    hi_open: bool = False
    name: str = "f"

    def __call__(self, x):
        return self.func(x)

    def in_domain(self, x: np.ndarray) -> np.ndarray:
        ok_lo = x > self.lo if self.lo_open else x >= self.lo
        ok_hi = x < self.hi if self.hi_open else x <= self.hi
        return ok_lo & ok_hi


IDENTITY = ScalarFunction(lambda x: x, name="identity")
SQRT = ScalarFunction(np.sqrt, lo=0.0, name="sqrt")
INV_SQRT = ScalarFunction(lambda x: 1.0 / np.sqrt(x), lo=0.0, lo_open=True, name="inv_sqrt")
ATANH = ScalarFunction(np.arctanh, lo=0.0, hi=1.0, hi_open=True, name="atanh")
TANH = ScalarFunction(np.tanh, name="tanh")


def _as_scalar_function(f) -> ScalarFunction:
    if isinstance(f, ScalarFunction):
        return f
    if callable(f):
        return ScalarFunction(f)
    raise TypeError(f"expected a ScalarFunction or callable, got {type(f).__name__}")


def herm_fun(p, f, *, herm_tol: float = HERM_TOL) -> np.ndarray:
    """Apply ``f`` to a Hermitian matrix through its eigendecomposition.

    Parameters
    ----------
    p : (k, k) array_like
        Hermitian within ``herm_tol * (1 + ||p||)``. Callers holding a product
        that is Hermitian only up to rounding should pass ``hermitize(p)``.
    f : ScalarFunction or callable
        Applied to the eigenvalues. Eigenvalues up to ``1e-10 * (1 + ||p||)``
        below a closed domain end at 0 are clipped to 0.

    Returns
    -------
    ndarray
        ``W f(diag(lam)) W*``, Hermitian.

    Raises
    ------
    NotHermitian
        If ``p`` is not square or fails the Hermitian tolerance.
    SpectrumOutOfDomain
        If an eigenvalue lies outside the domain of ``f`` after clipping.
    """
    p = np.asarray(p, dtype=np.complex128)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {p.shape}")
    f = _as_scalar_function(f)
    scale = 1.0 + op_norm(p)
    if op_norm(p - adjoint(p)) > herm_tol * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    lam, w = eigh_sorted(hermitize(p))
    if f.lo == 0.0 and not f.lo_open:
        lam = np.where((lam < 0) & (lam >= -CLIP_TOL * scale), 0.0, lam)
    bad = ~f.in_domain(lam)
    if np.any(bad):
        raise SpectrumOutOfDomain(
            f"eigenvalue {lam[bad][0]!r} outside the domain of {f.name}"
        )
    fl = np.asarray(f(lam), dtype=np.complex128)
    return hermitize((w * fl) @ adjoint(w))


def sqrtm_psd(p) -> np.ndarray:
    return herm_fun(hermitize(np.asarray(p, dtype=np.complex128)), SQRT)


def inv_sqrtm_pd(p) -> np.ndarray:
    return herm_fun(hermitize(np.asarray(p, dtype=np.complex128)), INV_SQRT)


def polar(b) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``b = v @ p`` with ``p = (b* b)^(1/2)``.

    ``v`` is the partial isometry built from the compact SVD: it agrees with
    ``u1 @ w1*`` on the range of ``p`` and vanishes on its kernel. Singular
    values below ``max(m, n) * eps * sigma_max`` count as zero.
    """
    b = np.asarray(b, dtype=np.complex128)
    u, s, wh = np.linalg.svd(b, full_matrices=False)
    cutoff = max(b.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    keep = s > cutoff
    u1, s1, wh1 = u[:, keep], s[keep], wh[keep, :]
    v = u1 @ wh1
    p = hermitize((adjoint(wh1) * s1) @ wh1)
    if not np.any(keep):
        v = np.zeros_like(b)
        p = np.zeros((b.shape[1], b.shape[1]), dtype=np.complex128)
    return v, p


def solve_checked(a: np.ndarray, b: np.ndarray, max_cond: float, exc, what: str) -> np.ndarray:
    """Solve ``a x = b`` after checking the 2-norm condition number of ``a``."""
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] == 0 or s[0] / s[-1] > max_cond:
        raise exc(f"{what} is numerically singular")
    return np.linalg.solve(a, b)
