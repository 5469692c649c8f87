"""Dense numeric kernels with a numba fast path and a numpy fallback.

Three kernel families live here because they dominate runtime everywhere
else in the package:

* LU factorization / triangular solves with partial pivoting (value
  vectors, the LCP reduction, every interior-point iteration),
* cyclic Jacobi eigenvalue sweeps for symmetric matrices,
* the exhaustive principal-minor scan used by P-matrix certification.

Backend selection happens once at import time.  The numba path is used when
numba imports cleanly and neither ``GAMELCP_FORCE_NUMPY`` nor numba's own
``NUMBA_DISABLE_JIT`` is set to a non-"0" value; otherwise the vectorized
numpy implementations are bound.  Both backends implement the same pivoting
and rotation decisions, so results agree to rounding.  ``IMPLS`` exposes
both families for equivalence tests and for ``benchmarks/kernel_bench.py``.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "HAS_NUMBA",
    "IMPLS",
    "SingularMatrixError",
    "jacobi_eigenvalues",
    "lu_factor",
    "lu_solve",
    "principal_minors_positive",
    "solve",
]

#: pivot is declared singular when |pivot| < PIVOT_RTOL * inf-norm of its row
PIVOT_RTOL = 1e-13


class SingularMatrixError(ArithmeticError):
    """A linear solve hit a pivot below the singularity threshold."""


def _numba_wanted() -> bool:
    for var in ("GAMELCP_FORCE_NUMPY", "NUMBA_DISABLE_JIT"):
        value = os.environ.get(var)
        if value is not None and value.strip() not in ("", "0"):
            return False
    return True


# ---------------------------------------------------------------------------
# numpy implementations


def _lu_factor_np(a, tol=PIVOT_RTOL):
    lu = np.array(a, dtype=np.float64, copy=True)
    n = lu.shape[0]
    piv = np.arange(n, dtype=np.int64)
    scale = np.abs(lu).max(axis=1)
    scale[scale == 0.0] = 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        piv[k] = p
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            scale[[k, p]] = scale[[p, k]]
        if abs(lu[k, k]) < tol * scale[k]:
            return lu, piv, False
        lu[k + 1 :, k] /= lu[k, k]
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, piv, True


def _lu_solve_np(lu, piv, b):
    x = np.array(b, dtype=np.float64, copy=True)
    n = lu.shape[0]
    for k in range(n):
        p = int(piv[k])
        if p != k:
            x[[k, p]] = x[[p, k]]
    for k in range(1, n):
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1 :] @ x[k + 1 :]) / lu[k, k]
    return x


def _jacobi_np(a, rel_tol=1e-12, max_sweeps=100):
    A = np.array(a, dtype=np.float64, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    thresh = rel_tol * np.sqrt((A * A).sum())
    converged = False
    for _ in range(max_sweeps):
        strict = np.triu(A, 1)
        if np.sqrt(2.0 * (strict * strict).sum()) <= thresh:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    return np.diag(A).copy(), V, converged


def _minors_np(m, tol_factor=1e-12):
    M = np.asarray(m, dtype=np.float64)
    n = M.shape[0]
    ok = True
    bad_mask = 0
    min_scaled = np.inf
    for mask in range(1, 1 << n):
        idx = [i for i in range(n) if (mask >> i) & 1]
        sub = M[np.ix_(idx, idx)]
        rmax = np.abs(sub).max(axis=1)
        rmax[rmax == 0.0] = 1.0
        scale = float(np.prod(rmax))
        det = float(np.linalg.det(sub))
        scaled = det / scale
        if scaled < min_scaled:
            min_scaled = scaled
        if det <= tol_factor * scale:
            ok = False
            bad_mask = mask
            break
    return ok, bad_mask, min_scaled


_NUMPY_IMPL = {
    "lu_factor": _lu_factor_np,
    "lu_solve": _lu_solve_np,
    "jacobi": _jacobi_np,
    "minors": _minors_np,
}


# ---------------------------------------------------------------------------
# numba implementations (loop bodies; same decisions as above)

HAS_NUMBA = False
_NUMBA_IMPL = None

if _numba_wanted():
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:
        njit = None

if HAS_NUMBA:

    @njit(cache=True)
    def _lu_factor_nb(a, tol):
        n = a.shape[0]
        lu = a.copy()
        piv = np.arange(n)
        scale = np.empty(n)
        for i in range(n):
            rmax = 0.0
            for j in range(n):
                v = abs(lu[i, j])
                if v > rmax:
                    rmax = v
            scale[i] = rmax if rmax > 0.0 else 1.0
        for k in range(n):
            p = k
            best = abs(lu[k, k])
            for i in range(k + 1, n):
                v = abs(lu[i, k])
                if v > best:
                    best = v
                    p = i
            piv[k] = p
            if p != k:
                for j in range(n):
                    tmp = lu[k, j]
                    lu[k, j] = lu[p, j]
                    lu[p, j] = tmp
                tmp = scale[k]
                scale[k] = scale[p]
                scale[p] = tmp
            if abs(lu[k, k]) < tol * scale[k]:
                return lu, piv, False
            inv = 1.0 / lu[k, k]
            for i in range(k + 1, n):
                f = lu[i, k] * inv
                lu[i, k] = f
                for j in range(k + 1, n):
                    lu[i, j] -= f * lu[k, j]
        return lu, piv, True

    @njit(cache=True)
    def _lu_solve1_nb(lu, piv, b):
        n = lu.shape[0]
        x = b.copy()
        for k in range(n):
            p = piv[k]
            if p != k:
                tmp = x[k]
                x[k] = x[p]
                x[p] = tmp
        for k in range(1, n):
            s = x[k]
            for j in range(k):
                s -= lu[k, j] * x[j]
            x[k] = s
        for k in range(n - 1, -1, -1):
            s = x[k]
            for j in range(k + 1, n):
                s -= lu[k, j] * x[j]
            x[k] = s / lu[k, k]
        return x

    @njit(cache=True)
    def _lu_solve2_nb(lu, piv, b):
        n = lu.shape[0]
        m = b.shape[1]
        x = b.copy()
        for k in range(n):
            p = piv[k]
            if p != k:
                for j in range(m):
                    tmp = x[k, j]
                    x[k, j] = x[p, j]
                    x[p, j] = tmp
        for k in range(1, n):
            for j in range(m):
                s = x[k, j]
                for i in range(k):
                    s -= lu[k, i] * x[i, j]
                x[k, j] = s
        for k in range(n - 1, -1, -1):
            inv = 1.0 / lu[k, k]
            for j in range(m):
                s = x[k, j]
                for i in range(k + 1, n):
                    s -= lu[k, i] * x[i, j]
                x[k, j] = s * inv
        return x

    @njit(cache=True)
    def _jacobi_nb(a, rel_tol, max_sweeps):
        n = a.shape[0]
        A = a.copy()
        V = np.eye(n)
        total = 0.0
        for i in range(n):
            for j in range(n):
                total += A[i, j] * A[i, j]
        thresh = rel_tol * np.sqrt(total)
        converged = False
        for _ in range(max_sweeps):
            off = 0.0
            for i in range(n):
                for j in range(i + 1, n):
                    off += 2.0 * A[i, j] * A[i, j]
            if np.sqrt(off) <= thresh:
                converged = True
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    if apq == 0.0:
                        continue
                    tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                    if tau >= 0.0:
                        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = t * c
                    for k in range(n):
                        akp = A[k, p]
                        akq = A[k, q]
                        A[k, p] = c * akp - s * akq
                        A[k, q] = s * akp + c * akq
                    for k in range(n):
                        apk = A[p, k]
                        aqk = A[q, k]
                        A[p, k] = c * apk - s * aqk
                        A[q, k] = s * apk + c * aqk
                    for k in range(n):
                        vkp = V[k, p]
                        vkq = V[k, q]
                        V[k, p] = c * vkp - s * vkq
                        V[k, q] = s * vkp + c * vkq
        vals = np.empty(n)
        for i in range(n):
            vals[i] = A[i, i]
        return vals, V, converged

    @njit(cache=True)
    def _minors_nb(m, tol_factor):
        n = m.shape[0]
        total = np.int64(1) << np.int64(n)
        work = np.empty((n, n))
        idx = np.empty(n, np.int64)
        ok = True
        bad_mask = np.int64(0)
        min_scaled = np.inf
        for mask in range(1, total):
            k = 0
            for i in range(n):
                if (mask >> i) & 1:
                    idx[k] = i
                    k += 1
            scale = 1.0
            for i in range(k):
                rmax = 0.0
                for j in range(k):
                    v = m[idx[i], idx[j]]
                    work[i, j] = v
                    av = abs(v)
                    if av > rmax:
                        rmax = av
                scale *= rmax if rmax > 0.0 else 1.0
            det = 1.0
            sign = 1.0
            for col in range(k):
                p = col
                best = abs(work[col, col])
                for r in range(col + 1, k):
                    v = abs(work[r, col])
                    if v > best:
                        best = v
                        p = r
                if best == 0.0:
                    det = 0.0
                    break
                if p != col:
                    sign = -sign
                    for j in range(col, k):
                        tmp = work[col, j]
                        work[col, j] = work[p, j]
                        work[p, j] = tmp
                pivval = work[col, col]
                det *= pivval
                inv = 1.0 / pivval
                for r in range(col + 1, k):
                    f = work[r, col] * inv
                    work[r, col] = 0.0
                    for j in range(col + 1, k):
                        work[r, j] -= f * work[col, j]
            det *= sign
            scaled = det / scale
            if scaled < min_scaled:
                min_scaled = scaled
            if det <= tol_factor * scale:
                ok = False
                bad_mask = np.int64(mask)
                break
        return ok, bad_mask, min_scaled

    def _lu_factor_jit(a, tol=PIVOT_RTOL):
        a = np.ascontiguousarray(a, dtype=np.float64)
        return _lu_factor_nb(a, float(tol))

    def _lu_solve_jit(lu, piv, b):
        b = np.ascontiguousarray(b, dtype=np.float64)
        if b.ndim == 1:
            return _lu_solve1_nb(lu, piv, b)
        return _lu_solve2_nb(lu, piv, b)

    def _jacobi_jit(a, rel_tol=1e-12, max_sweeps=100):
        a = np.ascontiguousarray(a, dtype=np.float64)
        return _jacobi_nb(a, float(rel_tol), int(max_sweeps))

    def _minors_jit(m, tol_factor=1e-12):
        m = np.ascontiguousarray(m, dtype=np.float64)
        ok, bad_mask, min_scaled = _minors_nb(m, float(tol_factor))
        return bool(ok), int(bad_mask), float(min_scaled)

    _NUMBA_IMPL = {
        "lu_factor": _lu_factor_jit,
        "lu_solve": _lu_solve_jit,
        "jacobi": _jacobi_jit,
        "minors": _minors_jit,
    }

IMPLS = {"numpy": _NUMPY_IMPL, "numba": _NUMBA_IMPL}

if _NUMBA_IMPL is not None:
    BACKEND = "numba"
    _ACTIVE = _NUMBA_IMPL
else:
    BACKEND = "numpy"
    _ACTIVE = _NUMPY_IMPL

lu_factor = _ACTIVE["lu_factor"]
lu_solve = _ACTIVE["lu_solve"]
jacobi_eigenvalues = _ACTIVE["jacobi"]
principal_minors_positive = _ACTIVE["minors"]


def solve(a, b):
    """Solve ``a @ x = b`` by LU with partial pivoting.

    ``b`` may be a vector or a matrix of stacked right-hand-side columns.
    Raises :class:`SingularMatrixError` when a pivot falls below
    ``PIVOT_RTOL`` times the row scale.
    """
    lu, piv, ok = lu_factor(np.asarray(a, dtype=np.float64))
    if not ok:
        raise SingularMatrixError("pivot below 1e-13 * row norm")
    return lu_solve(lu, piv, np.asarray(b, dtype=np.float64))
