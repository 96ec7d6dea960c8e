"""Pure-numpy fallback kernel: Jacobi-preconditioned conjugate gradient
on the 4-connected grid system diag(mask) + lam * (diag(s) - W).

Same algorithm as the compiled kernel in _core.pyx; selected at import
time when the extension is unavailable.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def _matvec(out, v, mask, deg, wh, wv, lam):
    np.multiply(mask + lam * deg, v, out=out)
    out[:, :-1] -= lam * wh * v[:, 1:]
    out[:, 1:] -= lam * wh * v[:, :-1]
    out[:-1, :] -= lam * wv * v[1:, :]
    out[1:, :] -= lam * wv * v[:-1, :]


def solve_pcg(mask, b, wh, wv, lam, tol, max_iter):
    """Solve (diag(mask) + lam*(diag(s) - W)) y = b on an H x W grid.

    mask, b: (H, W) float64; wh: (H, W-1); wv: (H-1, W) edge weights.
    Convergence is on the relative residual max|Ay - b| / max|b|.
    Returns (y, relative_residual, iterations).
    """
    mask = np.ascontiguousarray(mask, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    deg = np.zeros_like(b)
    deg[:, :-1] += wh
    deg[:, 1:] += wh
    deg[:-1, :] += wv
    deg[1:, :] += wv

    bnorm = np.abs(b).max()
    if bnorm == 0.0:
        return np.zeros_like(b), 0.0, 0

    diag = mask + lam * deg  # Jacobi preconditioner; > 0 for any valid system
    x = np.zeros_like(b)
    r = b.copy()
    z = r / diag
    p = z.copy()
    rz = float((r * z).sum())
    ap = np.empty_like(b)

    residual = np.abs(r).max() / bnorm
    iterations = 0
    for k in range(1, max_iter + 1):
        _matvec(ap, p, mask, deg, wh, wv, lam)
        alpha = rz / float((p * ap).sum())
        x += alpha * p
        r -= alpha * ap
        residual = np.abs(r).max() / bnorm
        iterations = k
        if residual <= tol:
            break
        z = r / diag
        rz_next = float((r * z).sum())
        p *= rz_next / rz
        p += z
        rz = rz_next
    return x, float(residual), iterations
