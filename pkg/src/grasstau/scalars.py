"""Field elements and the dense linear algebra both fields need.

Two fields are supported.  Exact rationals are :class:`fractions.Fraction`
values stored in numpy ``object`` arrays; floating values are ``complex128``
arrays.  An array's dtype decides which route every routine below takes.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from numbers import Integral, Number
from typing import Any, Iterable, Sequence

import numpy as np

from . import _kernels

Scalar = Any  # Fraction | complex


class UnsupportedModeError(ValueError):
    """Exact arithmetic was requested for something only floats can do."""


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------


def is_exact_scalar(x) -> bool:
    return isinstance(x, (Fraction, Integral)) and not isinstance(x, bool)


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def to_complex(x) -> complex:
    if isinstance(x, Fraction):
        return complex(float(x))
    return complex(x)


def is_zero(x, tol: float = 0.0) -> bool:
    if isinstance(x, Fraction) or (isinstance(x, Integral) and tol == 0):
        return x == 0
    return abs(x) <= tol


def format_rational(x: Fraction) -> str:
    """``"p/q"``, or just ``"p"`` for integers."""
    return str(Fraction(x))


# ---------------------------------------------------------------------------
# arrays
# ---------------------------------------------------------------------------


def exact_array(data) -> np.ndarray:
    """Object array of Fractions from nested data (ints, Fractions, "p/q")."""
    raw = np.array(data, dtype=object)
    out = np.empty(raw.shape, dtype=object)
    for pos, value in np.ndenumerate(raw):
        out[pos] = to_fraction(value)
    return out


def complex_array(data) -> np.ndarray:
    raw = np.array(data, dtype=object)
    out = np.empty(raw.shape, dtype=np.complex128)
    for pos, value in np.ndenumerate(raw):
        out[pos] = to_complex(value)
    return out


def is_exact(a) -> bool:
    if isinstance(a, np.ndarray):
        return a.dtype == object
    return is_exact_scalar(a)


def as_field_array(data, exact: bool | None = None) -> np.ndarray:
    """Coerce ``data`` into one of the two supported array kinds.

    With ``exact=None`` the field is inferred: all-rational input stays exact,
    anything containing floats or complex numbers becomes ``complex128``.
    """
    if isinstance(data, np.ndarray) and exact is None:
        if data.dtype == object:
            if all(is_exact_scalar(v) for v in data.flat):
                return exact_array(data)
            return complex_array(data)
        if np.issubdtype(data.dtype, np.integer):
            return exact_array(data)
        return data.astype(np.complex128)
    if exact is None:
        raw = np.array(data, dtype=object)
        exact = all(is_exact_scalar(v) or isinstance(v, str) for v in raw.flat)
    return exact_array(data) if exact else complex_array(data)


def same_field(*arrays: np.ndarray) -> list[np.ndarray]:
    """Return the arrays converted to a common field (complex if any is)."""
    if all(is_exact(a) for a in arrays):
        return list(arrays)
    return [a if not is_exact(a) else complex_array(a) for a in arrays]


def scalars_field(values: Iterable, exact: bool) -> list:
    return [to_fraction(v) if exact else to_complex(v) for v in values]


def identity(n: int, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty((n, n), dtype=object)
        out[...] = Fraction(0)
        for i in range(n):
            out[i, i] = Fraction(1)
        return out
    return np.eye(n, dtype=np.complex128)


def zeros(shape, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out[...] = Fraction(0)
        return out
    return np.zeros(shape, dtype=np.complex128)


def matrix_power(a: np.ndarray, p: int) -> np.ndarray:
    out = identity(a.shape[0], is_exact(a))
    for _ in range(p):
        out = out @ a
    return out


def is_nilpotent(a: np.ndarray, tol: float = 0.0) -> bool:
    n = a.shape[0]
    power = matrix_power(a, n)
    if is_exact(a):
        return all(v == 0 for v in power.flat)
    scale = max(1.0, float(np.abs(a).max(initial=0.0))) ** n
    return bool(np.abs(power).max(initial=0.0) <= tol * scale)


# ---------------------------------------------------------------------------
# determinants
# ---------------------------------------------------------------------------


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        row_k = m[k]
        for i in range(k + 1, n):
            row_i = m[i]
            lead = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (pivot * row_i[j] - lead * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def _det_exact(a: np.ndarray) -> Fraction:
    n = a.shape[0]
    if n == 0:
        return Fraction(1)
    if n == 1:
        return a[0, 0]
    if n == 2:
        return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    rows = []
    scale = 1
    for r in range(n):
        d = lcm(*(v.denominator for v in a[r]))
        scale *= d
        rows.append([v.numerator * (d // v.denominator) for v in a[r]])
    return Fraction(bareiss_det(rows), scale)


def det(a: np.ndarray) -> Scalar:
    """Determinant: Bareiss over rationals, pivoted LU over complex doubles."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"determinant needs a square matrix, got shape {a.shape}")
    if is_exact(a):
        return _det_exact(a)
    return _kernels.det(a)


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------


def _row_reduce_exact(a: np.ndarray):
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: np.ndarray, tol: float = 1e-9) -> int:
    """Matrix rank.

    Exact input: Gaussian elimination.  Complex input: number of singular
    values above ``tol`` times the largest one.
    """
    if a.size == 0:
        return 0
    if is_exact(a):
        return len(_row_reduce_exact(a)[1])
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def pivot_rows(a: np.ndarray) -> list[int]:
    """Indices of rows forming a basis of the row space (greedy, top-down)."""
    if is_exact(a):
        return _row_reduce_exact(a.T)[1]
    chosen: list[int] = []
    for i in range(a.shape[0]):
        trial = a[chosen + [i]]
        if rank(trial) == len(chosen) + 1:
            chosen.append(i)
    return chosen


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if not is_exact(a) or not is_exact(b):
        a, b = same_field(a, b)
        return np.linalg.solve(a, b)
    n = a.shape[0]
    b2 = b.reshape(n, -1)
    aug = np.concatenate([a, b2], axis=1)
    m, pivots = _row_reduce_exact(aug)
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix")
    out = np.empty((n, b2.shape[1]), dtype=object)
    for i in range(n):
        out[i] = m[i][n:]
    return out.reshape(b.shape)


def inverse(a: np.ndarray) -> np.ndarray:
    return solve(a, identity(a.shape[0], is_exact(a)))


def adjugate(a: np.ndarray) -> np.ndarray:
    """Classical adjoint, so ``a @ adjugate(a) == det(a) * I`` even if singular."""
    n = a.shape[0]
    out = zeros((n, n), is_exact(a))
    if n == 1:
        out[0, 0] = 1 if not is_exact(a) else Fraction(1)
        return out
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(a, j, axis=0), i, axis=1)
            out[i, j] = (-1) ** (i + j) * det(minor)
    return out


def is_lower_triangular(a: np.ndarray, tol: float = 0.0) -> bool:
    upper = np.triu(np.ones(a.shape, dtype=bool), 1)
    vals = a[upper]
    return all(is_zero(v, tol) for v in vals)


def max_abs(values: Iterable[Number]) -> float:
    return max((abs(complex(v)) for v in values), default=0.0)
