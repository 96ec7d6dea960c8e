# Compiled hot loop: Jacobi-preconditioned conjugate gradient on the
# 4-connected grid system diag(mask) + lam * (diag(s) - W).
# Mirrors _solve_np.solve_pcg; selected at import when built.

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


cdef double _apply_system(
    double[:, ::1] out,
    double[:, ::1] v,
    double[:, ::1] diag,
    double[:, ::1] wh,
    double[:, ::1] wv,
    double lam,
    Py_ssize_t h,
    Py_ssize_t w,
) noexcept nogil:
    # out = (diag(mask) + lam*(diag(s) - W)) v; returns dot(v, out)
    cdef Py_ssize_t r, c
    cdef double acc, dot = 0.0
    for r in range(h):
        for c in range(w):
            acc = diag[r, c] * v[r, c]
            if c > 0:
                acc -= lam * wh[r, c - 1] * v[r, c - 1]
            if c < w - 1:
                acc -= lam * wh[r, c] * v[r, c + 1]
            if r > 0:
                acc -= lam * wv[r - 1, c] * v[r - 1, c]
            if r < h - 1:
                acc -= lam * wv[r, c] * v[r + 1, c]
            out[r, c] = acc
            dot += v[r, c] * acc
    return dot


def solve_pcg(mask, b, wh, wv, double lam, double tol, int max_iter):
    """Solve (diag(mask) + lam*(diag(s) - W)) y = b on an H x W grid.

    Same contract as sizedepth.crf._solve_np.solve_pcg: convergence on
    the relative residual max|Ay - b| / max|b|; returns (y, residual,
    iterations).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] mask_a = np.ascontiguousarray(mask, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] b_a = np.ascontiguousarray(b, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] wh_a = np.ascontiguousarray(wh, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] wv_a = np.ascontiguousarray(wv, dtype=np.float64)

    cdef Py_ssize_t h = b_a.shape[0]
    cdef Py_ssize_t w = b_a.shape[1]

    cdef cnp.ndarray[cnp.float64_t, ndim=2] x_a = np.zeros((h, w))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] r_a = b_a.copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=2] z_a = np.empty((h, w))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p_a = np.empty((h, w))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ap_a = np.empty((h, w))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] diag_a = np.empty((h, w))

    cdef double[:, ::1] mv = mask_a
    cdef double[:, ::1] bv = b_a
    cdef double[:, ::1] whv = wh_a
    cdef double[:, ::1] wvv = wv_a
    cdef double[:, ::1] xv = x_a
    cdef double[:, ::1] rv = r_a
    cdef double[:, ::1] zv = z_a
    cdef double[:, ::1] pv = p_a
    cdef double[:, ::1] apv = ap_a
    cdef double[:, ::1] diagv = diag_a

    cdef Py_ssize_t i, j
    cdef int k, iterations = 0
    cdef double bnorm = 0.0, deg, rz = 0.0, rz_next, alpha, beta_cg, pap
    cdef double residual, rmax, a

    with nogil:
        for i in range(h):
            for j in range(w):
                a = bv[i, j]
                if a < 0.0:
                    a = -a
                if a > bnorm:
                    bnorm = a
                deg = 0.0
                if j > 0:
                    deg += whv[i, j - 1]
                if j < w - 1:
                    deg += whv[i, j]
                if i > 0:
                    deg += wvv[i - 1, j]
                if i < h - 1:
                    deg += wvv[i, j]
                diagv[i, j] = mv[i, j] + lam * deg

    if bnorm == 0.0:
        return x_a, 0.0, 0

    with nogil:
        for i in range(h):
            for j in range(w):
                zv[i, j] = rv[i, j] / diagv[i, j]
                pv[i, j] = zv[i, j]
                rz += rv[i, j] * zv[i, j]

    residual = 1.0
    for k in range(1, max_iter + 1):
        with nogil:
            pap = _apply_system(apv, pv, diagv, whv, wvv, lam, h, w)
            alpha = rz / pap
            rmax = 0.0
            for i in range(h):
                for j in range(w):
                    xv[i, j] += alpha * pv[i, j]
                    rv[i, j] -= alpha * apv[i, j]
                    a = rv[i, j]
                    if a < 0.0:
                        a = -a
                    if a > rmax:
                        rmax = a
            residual = rmax / bnorm
        iterations = k
        if residual <= tol:
            break
        with nogil:
            rz_next = 0.0
            for i in range(h):
                for j in range(w):
                    zv[i, j] = rv[i, j] / diagv[i, j]
                    rz_next += rv[i, j] * zv[i, j]
            beta_cg = rz_next / rz
            for i in range(h):
                for j in range(w):
                    pv[i, j] = zv[i, j] + beta_cg * pv[i, j]
            rz = rz_next
    return x_a, residual, iterations
