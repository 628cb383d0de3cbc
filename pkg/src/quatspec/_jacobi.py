"""One-sided (Hestenes) Jacobi SVD for dense complex matrices.

Columns of a working copy ``G`` of the input are orthogonalized pairwise by
complex plane rotations until every pair satisfies
``|g_p^H g_q| <= tol * ||g_p|| ||g_q||``. Singular values are the final
column norms; they come out with high relative accuracy.
"""

from __future__ import annotations

import numba
import numpy as np

_EPS = np.finfo(float).eps


@numba.njit(cache=True)
def _sweeps(G, V, want_v, tol, max_sweeps):
    m, n = G.shape
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0 + 0.0j
                for r in range(m):
                    gp = G[r, p]
                    gq = G[r, q]
                    alpha += gp.real * gp.real + gp.imag * gp.imag
                    beta += gq.real * gq.real + gq.imag * gq.imag
                    gamma += gp.conjugate() * gq
                g_abs = abs(gamma)
                if g_abs == 0.0 or g_abs <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = gamma / g_abs
                zeta = (beta - alpha) / (2.0 * g_abs)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + np.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                # column q is first rotated by conj(phase) so that g_p^H g_q is real
                for r in range(m):
                    gp = G[r, p]
                    gq = G[r, q] * phase.conjugate()
                    G[r, p] = c * gp - s * gq
                    G[r, q] = s * gp + c * gq
                if want_v:
                    for r in range(V.shape[0]):
                        vp = V[r, p]
                        vq = V[r, q] * phase.conjugate()
                        V[r, p] = c * vp - s * vq
                        V[r, q] = s * vp + c * vq
        if not rotated:
            return sweep + 1
    return max_sweeps


def jacobi_svd(a, compute_uv: bool = True, tol: float | None = None, max_sweeps: int = 80):
    """Singular value decomposition ``a = U diag(s) V^H`` by one-sided Jacobi.

    Returns ``s`` (descending) when ``compute_uv`` is false, else
    ``(U, s, Vh)`` in the reduced form (``k = min(m, n)`` columns).
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("jacobi_svd expects a 2D matrix")
    m, n = a.shape
    if m < n:
        out = jacobi_svd(a.conj().T, compute_uv=compute_uv, tol=tol, max_sweeps=max_sweeps)
        if not compute_uv:
            return out
        u, s, vh = out
        return vh.conj().T, s, u.conj().T
    if n == 0:
        return np.zeros(0) if not compute_uv else (np.zeros((m, 0)), np.zeros(0), np.zeros((0, 0)))
    if tol is None:
        tol = m * _EPS
    G = np.array(a, dtype=np.complex128, order="C")
    V = np.eye(n, dtype=np.complex128) if compute_uv else np.zeros((1, 1), dtype=np.complex128)
    _sweeps(G, V, compute_uv, tol, max_sweeps)
    s = np.sqrt(np.einsum("ij,ij->j", G.real, G.real) + np.einsum("ij,ij->j", G.imag, G.imag))
    order = np.argsort(-s, kind="stable")
    s = s[order]
    if not compute_uv:
        return s
    G = G[:, order]
    V = V[:, order]
    U = np.zeros((m, n), dtype=np.complex128)
    nz = s > 0
    U[:, nz] = G[:, nz] / s[nz]
    return U, s, V.conj().T
