# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batched hot kernels.

Same API and algebra as ``_pykernels``; each matrix pair is handled with
direct LAPACK calls on small column-major scratch buffers instead of
numpy's batched dispatch.
"""
import numpy as np

from libc.math cimport sqrt
from libc.stdlib cimport free, malloc
from scipy.linalg.cython_lapack cimport zgesv, zheev

ctypedef double complex z

cdef int LWORK_FACTOR = 64


cdef struct Work:
    int m
    int n
    int lwork
    z *p
    z *e
    z *ph
    z *ph0
    z *pinv
    z *q
    z *wm
    z *xw
    z *t1
    z *g
    z *work
    double *lam
    double *rwork
    int *ipiv


cdef int _work_alloc(Work *w, int m, int n) except -1:
    cdef int nn = n * n
    w.m = m
    w.n = n
    w.lwork = LWORK_FACTOR * n
    w.p = <z *> malloc(nn * sizeof(z))
    w.e = <z *> malloc(nn * sizeof(z))
    w.ph = <z *> malloc(nn * sizeof(z))
    w.ph0 = <z *> malloc(nn * sizeof(z))
    w.pinv = <z *> malloc(nn * sizeof(z))
    w.q = <z *> malloc(nn * sizeof(z))
    w.wm = <z *> malloc(m * n * sizeof(z))
    w.xw = <z *> malloc(nn * sizeof(z))
    w.t1 = <z *> malloc(nn * sizeof(z))
    w.g = <z *> malloc(nn * sizeof(z))
    w.work = <z *> malloc(w.lwork * sizeof(z))
    w.lam = <double *> malloc(n * sizeof(double))
    w.rwork = <double *> malloc((3 * n + 1) * sizeof(double))
    w.ipiv = <int *> malloc(n * sizeof(int))
    if (w.p == NULL or w.e == NULL or w.ph == NULL or w.ph0 == NULL or w.pinv == NULL
            or w.q == NULL or w.wm == NULL or w.xw == NULL or w.t1 == NULL
            or w.g == NULL or w.work == NULL or w.lam == NULL
            or w.rwork == NULL or w.ipiv == NULL):
        _work_free(w)
        raise MemoryError()
    return 0


cdef void _work_free(Work *w) noexcept nogil:
    free(w.p); free(w.e); free(w.ph); free(w.ph0); free(w.pinv); free(w.q); free(w.wm)
    free(w.xw); free(w.t1); free(w.g); free(w.work); free(w.lam)
    free(w.rwork); free(w.ipiv)


cdef inline z _conj(z a) noexcept nogil:
    return a.real - 1j * a.imag


cdef int _heev(Work *w, char jobz, z *a) noexcept nogil:
    # eigenvalues ascending in w.lam; with jobz 'V' the columns of a are eigenvectors
    cdef int info = 0
    cdef int n = w.n
    cdef char uplo = b'L'
    zheev(&jobz, &uplo, &n, a, &n, w.lam, w.work, &w.lwork, w.rwork, &info)
    return info


cdef int _hermitize(z *a, int n) noexcept nogil:
    cdef int i, j
    cdef z s
    for j in range(n):
        a[j + j * n] = a[j + j * n].real
        for i in range(j + 1, n):
            s = 0.5 * (a[i + j * n] + _conj(a[j + i * n]))
            a[i + j * n] = s
            a[j + i * n] = _conj(s)
    return 0


cdef int _prepare_x(const z[:, :, ::1] x, Py_ssize_t ix, Work *w) noexcept nogil:
    # P^(1/2) into ph0 and P^(-1) into pinv, P = I - x* x
    cdef int m = w.m
    cdef int n = w.n
    cdef int i, j, l, a, info
    cdef z s
    cdef double lam_l, tiny = 2.2250738585072014e-308

    for j in range(n):
        for i in range(n):
            s = 1.0 if i == j else 0.0
            for a in range(m):
                s = s - _conj(x[ix, a, i]) * x[ix, a, j]
            w.e[i + j * n] = s
    _hermitize(w.e, n)
    info = _heev(w, b'V', w.e)
    if info != 0:
        return info
    for j in range(n):
        for i in range(n):
            w.ph0[i + j * n] = 0
            w.pinv[i + j * n] = 0
    for l in range(n):
        lam_l = w.lam[l]
        if lam_l < tiny:
            lam_l = tiny
        for j in range(n):
            for i in range(n):
                s = w.e[i + l * n] * _conj(w.e[j + l * n])
                w.ph0[i + j * n] = w.ph0[i + j * n] + sqrt(lam_l) * s
                w.pinv[i + j * n] = w.pinv[i + j * n] + s / lam_l
    return 0


cdef double _transport_norm_sq(const z[:, :, ::1] x, Py_ssize_t ix,
                               const z[:, :, ::1] y, Py_ssize_t iy,
                               Work *w) noexcept nogil:
    # expects _prepare_x(x, ix) to have filled ph0 and pinv
    cdef int m = w.m
    cdef int n = w.n
    cdef int i, j, l, a, info
    cdef z s
    cdef double top

    for i in range(n * n):
        w.ph[i] = w.ph0[i]

    # Q = I - x* y, solve Q Z = P^(1/2) (Z overwrites ph)
    for j in range(n):
        for i in range(n):
            s = 1.0 if i == j else 0.0
            for a in range(m):
                s = s - _conj(x[ix, a, i]) * y[iy, a, j]
            w.q[i + j * n] = s
    zgesv(&n, &n, w.q, &n, w.ipiv, w.ph, &n, &info)
    if info != 0:
        return -1.0

    # Wm = (y - x) Z, m x n
    for j in range(n):
        for a in range(m):
            s = 0
            for l in range(n):
                s = s + (y[iy, a, l] - x[ix, a, l]) * w.ph[l + j * n]
            w.wm[a + j * m] = s

    # XW = x* Wm, T1 = P^(-1) XW
    for j in range(n):
        for i in range(n):
            s = 0
            for a in range(m):
                s = s + _conj(x[ix, a, i]) * w.wm[a + j * m]
            w.xw[i + j * n] = s
    for j in range(n):
        for i in range(n):
            s = 0
            for l in range(n):
                s = s + w.pinv[i + l * n] * w.xw[l + j * n]
            w.t1[i + j * n] = s

    # G = Wm* Wm + XW* T1
    for j in range(n):
        for i in range(n):
            s = 0
            for a in range(m):
                s = s + _conj(w.wm[a + i * m]) * w.wm[a + j * m]
            for l in range(n):
                s = s + _conj(w.xw[l + i * n]) * w.t1[l + j * n]
            w.g[i + j * n] = s
    _hermitize(w.g, n)
    info = _heev(w, b'N', w.g)
    if info != 0:
        return -1.0
    top = w.lam[n - 1]
    return top if top > 0.0 else 0.0


def kob_norm_pairs(x, y):
    """``||M_x(y)||`` for matching stacks ``x[i], y[i]``; returns shape ``(k,)``."""
    cdef const z[:, :, ::1] xv = np.ascontiguousarray(x, dtype=np.complex128)
    cdef const z[:, :, ::1] yv = np.ascontiguousarray(y, dtype=np.complex128)
    cdef Py_ssize_t k = xv.shape[0], p
    cdef Work w
    cdef double v
    cdef bint failed = False
    out = np.empty(k, dtype=np.float64)
    cdef double[::1] ov = out
    if yv.shape[0] != k or yv.shape[1] != xv.shape[1] or yv.shape[2] != xv.shape[2]:
        raise ValueError("stack shapes differ")
    if k == 0:
        return out
    _work_alloc(&w, <int> xv.shape[1], <int> xv.shape[2])
    with nogil:
        for p in range(k):
            if _prepare_x(xv, p, &w) != 0:
                failed = True
                break
            v = _transport_norm_sq(xv, p, yv, p, &w)
            if v < 0.0:
                failed = True
                break
            ov[p] = sqrt(v)
    _work_free(&w)
    if failed:
        raise np.linalg.LinAlgError("LAPACK failure in transport norm")
    return out


def kob_norm_cross(x, y):
    """``||M_{x[i]}(y[j])||`` for all pairs; returns shape ``(k, l)``."""
    cdef const z[:, :, ::1] xv = np.ascontiguousarray(x, dtype=np.complex128)
    cdef const z[:, :, ::1] yv = np.ascontiguousarray(y, dtype=np.complex128)
    cdef Py_ssize_t k = xv.shape[0], l = yv.shape[0], p, q
    cdef Work w
    cdef double v
    cdef bint failed = False
    out = np.empty((k, l), dtype=np.float64)
    cdef double[:, ::1] ov = out
    if yv.shape[1] != xv.shape[1] or yv.shape[2] != xv.shape[2]:
        raise ValueError("stack shapes differ")
    if k == 0 or l == 0:
        return out
    _work_alloc(&w, <int> xv.shape[1], <int> xv.shape[2])
    with nogil:
        for p in range(k):
            if _prepare_x(xv, p, &w) != 0:
                failed = True
                break
            for q in range(l):
                v = _transport_norm_sq(xv, p, yv, q, &w)
                if v < 0.0:
                    failed = True
                    break
                ov[p, q] = sqrt(v)
            if failed:
                break
    _work_free(&w)
    if failed:
        raise np.linalg.LinAlgError("LAPACK failure in transport norm")
    return out


def hat_batch(t):
    """``T* (I + T T*)^(-1/2)`` for a stack of ``n x m`` operators."""
    cdef const z[:, :, ::1] tv = np.ascontiguousarray(t, dtype=np.complex128)
    cdef Py_ssize_t k = tv.shape[0], p
    cdef int n = <int> tv.shape[1], m = <int> tv.shape[2]
    cdef int i, j, l, a, info = 0
    cdef z s
    cdef Work w
    out = np.empty((k, m, n), dtype=np.complex128)
    cdef z[:, :, ::1] ov = out
    if k == 0:
        return out
    _work_alloc(&w, m, n)
    with nogil:
        for p in range(k):
            # G = I + T T*
            for j in range(n):
                for i in range(n):
                    s = 1.0 if i == j else 0.0
                    for a in range(m):
                        s = s + tv[p, i, a] * _conj(tv[p, j, a])
                    w.e[i + j * n] = s
            _hermitize(w.e, n)
            info = _heev(&w, b'V', w.e)
            if info != 0:
                break
            # S = G^(-1/2)
            for j in range(n):
                for i in range(n):
                    s = 0
                    for l in range(n):
                        s = s + w.e[i + l * n] * _conj(w.e[j + l * n]) / sqrt(w.lam[l])
                    w.p[i + j * n] = s
            for a in range(m):
                for j in range(n):
                    s = 0
                    for i in range(n):
                        s = s + _conj(tv[p, i, a]) * w.p[i + j * n]
                    ov[p, a, j] = s
    _work_free(&w)
    if info != 0:
        raise np.linalg.LinAlgError("LAPACK failure in hat transform")
    return out


cdef int _eta_one(const z[:, :, ::1] a, const z[:, :, ::1] zz, Py_ssize_t p,
                  z[:, :, ::1] out, Work *w) noexcept nogil:
    cdef int m = w.m
    cdef int n = w.n
    cdef int i, j, l, b, info
    cdef z acc
    cdef double sl

    # a* a, eigendecomposed in place in w.e
    for j in range(n):
        for i in range(n):
            acc = 0
            for b in range(m):
                acc = acc + _conj(a[p, b, i]) * a[p, b, j]
            w.e[i + j * n] = acc
    _hermitize(w.e, n)
    info = _heev(w, b'V', w.e)
    if info != 0:
        return info

    # ph = (I - a* a)^(1/2), pinv = g(a* a) with g(x) = 1 / (s (1 + s))
    for j in range(n):
        for i in range(n):
            w.ph[i + j * n] = 0
            w.pinv[i + j * n] = 0
    for l in range(n):
        sl = 1.0 - w.lam[l]
        sl = sqrt(sl) if sl > 0.0 else 0.0
        for j in range(n):
            for i in range(n):
                acc = w.e[i + l * n] * _conj(w.e[j + l * n])
                w.ph[i + j * n] = w.ph[i + j * n] + sl * acc
                w.pinv[i + j * n] = w.pinv[i + j * n] + acc / (sl * (1.0 + sl))

    # solve (I + a* z) Y = ph; Y overwrites ph
    for j in range(n):
        for i in range(n):
            acc = 1.0 if i == j else 0.0
            for b in range(m):
                acc = acc + _conj(a[p, b, i]) * zz[p, b, j]
            w.q[i + j * n] = acc
    zgesv(&n, &n, w.q, &n, w.ipiv, w.ph, &n, &info)
    if info != 0:
        return info

    # N = (z + a) Y in wm
    for j in range(n):
        for b in range(m):
            acc = 0
            for l in range(n):
                acc = acc + (zz[p, b, l] + a[p, b, l]) * w.ph[l + j * n]
            w.wm[b + j * m] = acc
    # xw = a* N, t1 = g xw
    for j in range(n):
        for i in range(n):
            acc = 0
            for b in range(m):
                acc = acc + _conj(a[p, b, i]) * w.wm[b + j * m]
            w.xw[i + j * n] = acc
    for j in range(n):
        for i in range(n):
            acc = 0
            for l in range(n):
                acc = acc + w.pinv[i + l * n] * w.xw[l + j * n]
            w.t1[i + j * n] = acc
    # out = N + a t1
    for b in range(m):
        for j in range(n):
            acc = w.wm[b + j * m]
            for l in range(n):
                acc = acc + a[p, b, l] * w.t1[l + j * n]
            out[p, b, j] = acc
    return 0


def eta_batch(a, w_in):
    """Moebius map ``eta_a(w_in)`` for matching stacks; see ``_pykernels.eta_batch``."""
    cdef const z[:, :, ::1] av = np.ascontiguousarray(a, dtype=np.complex128)
    cdef const z[:, :, ::1] zv = np.ascontiguousarray(w_in, dtype=np.complex128)
    cdef Py_ssize_t k = av.shape[0], p
    cdef int info = 0
    cdef Work w
    if zv.shape[0] != k or zv.shape[1] != av.shape[1] or zv.shape[2] != av.shape[2]:
        raise ValueError("stack shapes differ")
    out = np.empty((k, av.shape[1], av.shape[2]), dtype=np.complex128)
    cdef z[:, :, ::1] ov = out
    if k == 0:
        return out
    _work_alloc(&w, <int> av.shape[1], <int> av.shape[2])
    with nogil:
        for p in range(k):
            info = _eta_one(av, zv, p, ov, &w)
            if info != 0:
                break
    _work_free(&w)
    if info != 0:
        raise np.linalg.LinAlgError("LAPACK failure in Moebius map")
    return out
