"""Complex-double kernels for the float evaluation path.

Every kernel exists twice: a numba ``@njit`` version with explicit loops and a
vectorised numpy version.  ``GRASSTAU_DISABLE_NUMBA=1`` (or a missing numba)
selects the numpy versions; both are importable directly through
:data:`NUMBA` and :data:`NUMPY` so they can be compared against each other.
"""

from types import SimpleNamespace

import numpy as np

from ._config import numba_disabled

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None

# Pade(13) scaling-and-squaring constants (Higham 2005).
_PADE13 = np.array(
    [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ]
)
_THETA13 = 5.371920351148152


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _det_np(a):
    if a.shape[0] == 0:
        return 1.0 + 0.0j
    return complex(np.linalg.det(a))


def _det_batch_np(stack):
    if stack.shape[1] == 0:
        return np.ones(stack.shape[0], dtype=np.complex128)
    return np.linalg.det(stack).astype(np.complex128)


def _minors_np(w, idx):
    if idx.shape[1] == 0:
        return np.ones(idx.shape[0], dtype=np.complex128)
    return np.linalg.det(w[idx]).astype(np.complex128)


def _expm_np(a):
    n = a.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    norm1 = np.abs(a).sum(axis=0).max() if n else 0.0
    s = 0
    if norm1 > _THETA13:
        s = int(np.ceil(np.log2(norm1 / _THETA13)))
    a = a / (2.0**s)
    b = _PADE13
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * eye)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    return r


def _soliton_grid_np(x, lam, mu, times):
    # times: (P, M) flow times; phases xi(p) = sum_i t_i p^i
    powers = np.arange(1, times.shape[1] + 1)
    xi_lam = times @ (lam[:, None] ** powers[None, :]).T
    xi_mu = times @ (mu[:, None] ** powers[None, :]).T
    mats = x[None, :, :] * np.exp(xi_lam)[:, None, :]
    n = x.shape[0]
    diag = np.arange(n)
    mats[:, diag, diag] += np.exp(xi_mu)
    return _det_batch_np(mats)


NUMPY = SimpleNamespace(
    det=_det_np,
    det_batch=_det_batch_np,
    minors=_minors_np,
    expm=_expm_np,
    soliton_grid=_soliton_grid_np,
)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


def _lu_det_loop(a):
    m = a.copy()
    n = m.shape[0]
    det = 1.0 + 0.0j
    for j in range(n):
        p = j
        best = abs(m[j, j])
        for i in range(j + 1, n):
            mag = abs(m[i, j])
            if mag > best:
                best = mag
                p = i
        if best == 0.0:
            return 0.0 + 0.0j
        if p != j:
            for c in range(n):
                tmp = m[j, c]
                m[j, c] = m[p, c]
                m[p, c] = tmp
            det = -det
        piv = m[j, j]
        det *= piv
        for i in range(j + 1, n):
            f = m[i, j] / piv
            if f != 0.0:
                for c in range(j + 1, n):
                    m[i, c] -= f * m[j, c]
    return det


def _make_numba_kernels():
    njit = numba.njit(cache=True)
    lu_det = njit(_lu_det_loop)

    @njit
    def det_batch(stack):
        out = np.empty(stack.shape[0], dtype=np.complex128)
        for q in range(stack.shape[0]):
            out[q] = lu_det(stack[q])
        return out

    @njit
    def minors(w, idx):
        c, k = idx.shape
        out = np.empty(c, dtype=np.complex128)
        sub = np.empty((k, k), dtype=np.complex128)
        for q in range(c):
            for r in range(k):
                for col in range(k):
                    sub[r, col] = w[idx[q, r], col]
            out[q] = lu_det(sub)
        return out

    @njit
    def expm(a):
        n = a.shape[0]
        eye = np.eye(n).astype(np.complex128)
        norm1 = 0.0
        for col in range(n):
            acc = 0.0
            for r in range(n):
                acc += abs(a[r, col])
            if acc > norm1:
                norm1 = acc
        s = 0
        if norm1 > _THETA13:
            s = int(np.ceil(np.log2(norm1 / _THETA13)))
        a = a / (2.0**s)
        b = _PADE13
        a2 = a @ a
        a4 = a2 @ a2
        a6 = a4 @ a2
        inner_u = a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * eye
        u = a @ inner_u
        v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye
        r = np.ascontiguousarray(np.linalg.solve(v - u, v + u))
        for _ in range(s):
            r = r @ r
        return r

    @njit
    def soliton_grid(x, lam, mu, times):
        n = x.shape[0]
        npts, nt = times.shape
        out = np.empty(npts, dtype=np.complex128)
        mat = np.empty((n, n), dtype=np.complex128)
        for q in range(npts):
            for col in range(n):
                xl = 0.0 + 0.0j
                xm = 0.0 + 0.0j
                pl = 1.0 + 0.0j
                pm = 1.0 + 0.0j
                for i in range(nt):
                    pl *= lam[col]
                    pm *= mu[col]
                    xl += times[q, i] * pl
                    xm += times[q, i] * pm
                el = np.exp(xl)
                for r in range(n):
                    mat[r, col] = x[r, col] * el
                mat[col, col] += np.exp(xm)
            out[q] = lu_det(mat)
        return out

    def det(a):
        if a.shape[0] == 0:
            return 1.0 + 0.0j
        return complex(lu_det(np.ascontiguousarray(a, dtype=np.complex128)))

    return SimpleNamespace(
        det=det,
        det_batch=lambda stack: det_batch(np.ascontiguousarray(stack, dtype=np.complex128)),
        minors=lambda w, idx: minors(
            np.ascontiguousarray(w, dtype=np.complex128), np.ascontiguousarray(idx, dtype=np.int64)
        ),
        expm=lambda a: expm(np.ascontiguousarray(a, dtype=np.complex128)),
        soliton_grid=lambda x, lam, mu, times: soliton_grid(
            np.ascontiguousarray(x, dtype=np.complex128),
            np.ascontiguousarray(lam, dtype=np.complex128),
            np.ascontiguousarray(mu, dtype=np.complex128),
            np.ascontiguousarray(times, dtype=np.complex128),
        ),
    )


NUMBA = _make_numba_kernels() if HAVE_NUMBA else None

USE_NUMBA = HAVE_NUMBA and not numba_disabled()
ACTIVE = NUMBA if USE_NUMBA else NUMPY


def det(a):
    return ACTIVE.det(a)


def det_batch(stack):
    return ACTIVE.det_batch(stack)


def minors(w, idx):
    return ACTIVE.minors(w, idx)


def expm(a):
    return ACTIVE.expm(a)


def soliton_grid(x, lam, mu, times):
    return ACTIVE.soliton_grid(x, lam, mu, times)
