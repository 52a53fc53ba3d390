"""Pure numpy implementation of the batched hot kernels.

Mirrors the API of the compiled ``_ckernels`` module. All inputs are stacks
of matrices, shape ``(k, rows, cols)``, dtype ``complex128``.

The transport norm uses only ``n x n`` Hermitian work (``n`` = dim K), via

    M_x(y)* M_x(y) = W* W + (x* W)* (I - x* x)^(-1) (x* W),
    W = (y - x) (I - x* y)^(-1) (I - x* x)^(1/2),

which follows from ``(I - x x*)^(-1) = I + x (I - x* x)^(-1) x*``.
"""
import numpy as np


def _adj(a):
    return np.conj(np.swapaxes(a, -1, -2))


def _eye_like(k, n):
    return np.broadcast_to(np.eye(n, dtype=np.complex128), (k, n, n))


def hat_batch(t):
    """``T* (I + T T*)^(-1/2)`` for a stack of ``n x m`` operators."""
    t = np.ascontiguousarray(t, dtype=np.complex128)
    k, n, _ = t.shape
    g = _eye_like(k, n) + t @ _adj(t)
    lam, w = np.linalg.eigh(0.5 * (g + _adj(g)))
    inv_sqrt = (w / np.sqrt(lam)[:, None, :]) @ _adj(w)
    return _adj(t) @ inv_sqrt


def _transport_norm_sq(x, y):
    k, _, n = x.shape
    eye = _eye_like(k, n)
    xh = _adj(x)
    p = eye - xh @ x
    lam, w = np.linalg.eigh(0.5 * (p + _adj(p)))
    lam = np.maximum(lam, np.finfo(float).tiny)
    p_half = (w * np.sqrt(lam)[:, None, :]) @ _adj(w)
    p_inv = (w / lam[:, None, :]) @ _adj(w)
    z = np.linalg.solve(eye - xh @ y, p_half)
    wm = (y - x) @ z
    xw = xh @ wm
    g = _adj(wm) @ wm + _adj(xw) @ p_inv @ xw
    top = np.linalg.eigvalsh(0.5 * (g + _adj(g)))[:, -1]
    return np.maximum(top, 0.0)


def kob_norm_pairs(x, y):
    """``||M_x(y)||`` for matching stacks ``x[i], y[i]``; returns shape ``(k,)``."""
    x = np.ascontiguousarray(x, dtype=np.complex128)
    y = np.ascontiguousarray(y, dtype=np.complex128)
    if x.shape[0] == 0:
        return np.zeros(0)
    return np.sqrt(_transport_norm_sq(x, y))


def kob_norm_cross(x, y):
    """``||M_{x[i]}(y[j])||`` for all pairs; returns shape ``(k, l)``."""
    x = np.ascontiguousarray(x, dtype=np.complex128)
    y = np.ascontiguousarray(y, dtype=np.complex128)
    k, l = x.shape[0], y.shape[0]
    if k == 0 or l == 0:
        return np.zeros((k, l))
    xx = np.repeat(x, l, axis=0)
    yy = np.tile(y, (k, 1, 1))
    return kob_norm_pairs(xx, yy).reshape(k, l)


def eta_batch(a, z):
    """Moebius map ``eta_a(z)`` for matching stacks, using only ``n x n`` spectra.

    ``(I - a a*)^(-1/2) = I + a g(a* a) a*`` with ``g(x) = 1 / (s (1 + s))``,
    ``s = sqrt(1 - x)``, so

        eta_a(z) = N + a g(a* a) a* N,   N = (z + a) (I + a* z)^(-1) (I - a* a)^(1/2).
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    z = np.ascontiguousarray(z, dtype=np.complex128)
    k, _, n = a.shape
    if k == 0:
        return np.zeros_like(z)
    eye = _eye_like(k, n)
    ah = _adj(a)
    g = ah @ a
    mu, w = np.linalg.eigh(0.5 * (g + _adj(g)))
    s = np.sqrt(np.maximum(1.0 - mu, 0.0))
    p_half = (w * s[:, None, :]) @ _adj(w)
    gm = (w / (s * (1.0 + s))[:, None, :]) @ _adj(w)
    y = np.linalg.solve(eye + ah @ z, p_half)
    nm = (z + a) @ y
    return nm + a @ (gm @ (ah @ nm))
