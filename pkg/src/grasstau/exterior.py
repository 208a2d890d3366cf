"""Finite exterior algebra: Plücker coordinates, Plücker relations and the
linear maps that send Grassmann cones into Grassmann cones.

Basis vectors of C^n carry the labels ``k-n, ..., k-1`` where ``k`` is the
wedge degree, so the "ground state" ``e_0 ^ ... ^ e_{k-1}`` always has index
``(0, 1, ..., k-1)``.  Internally row ``r`` of a frame is label ``k - n + r``.
Note that the same row of C^n gets a different label in a different degree;
maps that change the degree (:func:`dual`, :func:`wedge`,
:func:`intersection_map`) work on row positions and relabel their output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .scalars import (
    as_field_array,
    complex_array,
    det,
    identity,
    inverse,
    is_exact,
    is_exact_scalar,
    is_zero,
    pivot_rows,
    rank,
    to_complex,
    to_fraction,
)

MultiIndex = tuple


def labels(k: int, n: int) -> range:
    return range(k - n, k)


def index_set(k: int, n: int) -> list[MultiIndex]:
    """All strictly increasing k-tuples of labels, in lexicographic order."""
    return list(combinations(labels(k, n), k))


def sort_with_sign(seq: Iterable[int]) -> tuple[MultiIndex, int]:
    """Sort ``seq`` and return the permutation sign; sign 0 on a repeat."""
    items = list(seq)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b:
            return tuple(items), 0
    return tuple(items), sign


def _check_context(k: int, n: int) -> None:
    if n < 1 or not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n and n >= 1, got k={k}, n={n}")


@dataclass(frozen=True)
class PluckerVector:
    """Sparse element of the k-th exterior power of C^n.

    ``coords`` maps increasing label tuples to scalars; zero entries are
    dropped.  A vector is exact when every stored coordinate is a Fraction.
    """

    k: int
    n: int
    coords: Mapping[MultiIndex, object] = field(default_factory=dict)

    def __post_init__(self):
        _check_context(self.k, self.n)
        lo, hi = self.k - self.n, self.k - 1
        values = list(self.coords.values())
        exact = all(is_exact_scalar(v) for v in values)
        conv = to_fraction if exact else to_complex
        clean = {}
        for key, value in self.coords.items():
            key = tuple(int(i) for i in key)
            if len(key) != self.k or any(b <= a for a, b in zip(key, key[1:])):
                raise ValueError(f"index {key} is not a strictly increasing {self.k}-tuple")
            if key and (key[0] < lo or key[-1] > hi):
                raise ValueError(f"index {key} outside labels [{lo}, {hi}]")
            value = conv(value)
            if value != 0:
                clean[key] = value
        object.__setattr__(self, "coords", dict(sorted(clean.items())))

    @classmethod
    def basis(cls, k: int, n: int, index: Sequence[int]) -> "PluckerVector":
        key, sign = sort_with_sign(index)
        if sign == 0:
            return cls(k, n, {})
        return cls(k, n, {key: Fraction(sign)})

    @classmethod
    def from_dense(cls, k: int, n: int, values: Sequence) -> "PluckerVector":
        return cls(k, n, dict(zip(index_set(k, n), values)))

    @classmethod
    def from_vector(cls, vector: Sequence) -> "PluckerVector":
        """Degree-one element from an n-vector given in row order."""
        n = len(vector)
        return cls(1, n, {(r + 1 - n,): v for r, v in enumerate(vector)})

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.coords.values())

    def __getitem__(self, index: Sequence[int]):
        """Coordinate with skew-symmetric handling of unsorted indices."""
        key, sign = sort_with_sign(index)
        if sign == 0:
            return Fraction(0) if self.exact else 0j
        value = self.coords.get(key)
        if value is None:
            return Fraction(0) if self.exact else 0j
        return value if sign > 0 else -value

    def dense(self) -> list:
        zero = Fraction(0) if self.exact else 0j
        return [self.coords.get(key, zero) for key in index_set(self.k, self.n)]

    def _check_same_space(self, other: "PluckerVector") -> None:
        if (self.k, self.n) != (other.k, other.n):
            raise ValueError(f"space mismatch: ({self.k},{self.n}) vs ({other.k},{other.n})")

    def __add__(self, other: "PluckerVector") -> "PluckerVector":
        self._check_same_space(other)
        out = dict(self.coords)
        for key, value in other.coords.items():
            out[key] = out.get(key, 0) + value
        return PluckerVector(self.k, self.n, out)

    def __neg__(self) -> "PluckerVector":
        return PluckerVector(self.k, self.n, {key: -v for key, v in self.coords.items()})

    def __sub__(self, other: "PluckerVector") -> "PluckerVector":
        return self + (-other)

    def scale(self, c) -> "PluckerVector":
        return PluckerVector(self.k, self.n, {key: c * v for key, v in self.coords.items()})

    __rmul__ = scale

    def allclose(self, other: "PluckerVector", tol: float = 1e-9) -> bool:
        self._check_same_space(other)
        keys = set(self.coords) | set(other.coords)
        return all(abs(to_complex(self[key]) - to_complex(other[key])) <= tol for key in keys)


@dataclass(frozen=True)
class Frame:
    """n x k matrix whose columns span a subspace; row r is label k - n + r."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_field_array(self.matrix)
        if m.ndim != 2:
            raise ValueError(f"frame matrix must be 2-D, got shape {m.shape}")
        _check_context(m.shape[1], m.shape[0])
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    @property
    def exact(self) -> bool:
        return is_exact(self.matrix)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "Frame":
        return cls(np.array(columns, dtype=object).T)

    @classmethod
    def basis(cls, n: int, column_labels: Sequence[int]) -> "Frame":
        """Frame whose columns are the basis vectors with the given labels."""
        k = len(column_labels)
        m = np.empty((n, k), dtype=object)
        m[...] = Fraction(0)
        for c, lab in enumerate(column_labels):
            m[lab - (k - n), c] = Fraction(1)
        return cls(m)

    def row(self, label: int) -> np.ndarray:
        return self.matrix[label - (self.k - self.n)]


def _rows(index: Sequence[int], k: int, n: int) -> list[int]:
    off = k - n
    return [i - off for i in index]


def plucker_coordinates(frame: Frame) -> PluckerVector:
    """Maximal minors of ``frame``: coordinate I is the det of the rows in I."""
    k, n = frame.k, frame.n
    keys = index_set(k, n)
    if frame.exact:
        m = frame.matrix
        coords = {key: det(m[_rows(key, k, n)]) for key in keys}
    else:
        idx = np.array([_rows(key, k, n) for key in keys], dtype=np.int64).reshape(len(keys), k)
        vals = _kernels.minors(frame.matrix, idx)
        coords = {key: complex(v) for key, v in zip(keys, vals)}
    return PluckerVector(k, n, coords)


def plucker_residuals(pv: PluckerVector) -> list[tuple[MultiIndex, MultiIndex, object]]:
    """Quadratic Plücker relations evaluated at ``pv``.

    One entry per pair (I, J) of increasing label tuples of sizes k-1 and k+1.
    The sign convention makes the pair ((-2,), (-1, 0, 1)) of the k=2, n=4
    case equal to ``pi[-2,-1] pi[0,1] - pi[-2,0] pi[-1,1] + pi[-2,1] pi[-1,0]``.
    """
    k, n = pv.k, pv.n
    if k < 1 or k + 1 > n:
        return []
    labs = labels(k, n)
    zero = Fraction(0) if pv.exact else 0j
    out = []
    for small in combinations(labs, k - 1):
        for big in combinations(labs, k + 1):
            total = zero
            for l, j in enumerate(big):
                left = pv[small + (j,)]
                if left == 0:
                    continue
                right = pv[big[:l] + big[l + 1 :]]
                if right == 0:
                    continue
                term = left * right
                total = total + term if l % 2 == 0 else total - term
            out.append((small, big, total))
    return out


def gr24_residual(pv: PluckerVector):
    """The single relation cutting out the decomposable cone in degree 2 of C^4."""
    if (pv.k, pv.n) != (2, 4):
        raise ValueError("gr24_residual needs a point of the (2, 4) wedge space")
    return pv[-2, -1] * pv[0, 1] - pv[-2, 0] * pv[-1, 1] + pv[-2, 1] * pv[-1, 0]


def is_decomposable(pv: PluckerVector, tol: float = 0.0) -> bool:
    if pv.exact and tol != 0:
        raise ValueError("exact points are tested with tol=0")
    return all(is_zero(r, tol) for _, _, r in plucker_residuals(pv))


def induced_map(m, pv: PluckerVector) -> PluckerVector:
    """Action of an n' x n matrix on the k-th wedge power (Cauchy-Binet)."""
    m = as_field_array(m)
    n_out, n_in = m.shape
    if n_in != pv.n:
        raise ValueError(f"matrix has {n_in} columns but the point lives in C^{pv.n}")
    k = pv.k
    if k > n_out:
        raise ValueError(f"cannot map degree {k} into C^{n_out}")
    if not pv.exact or not is_exact(m):
        m = m if not is_exact(m) else complex_array(m)
    src = [(_rows(key, k, pv.n), value) for key, value in pv.coords.items()]
    coords = {}
    for key in index_set(k, n_out):
        rows = _rows(key, k, n_out)
        sub = m[rows]
        total = 0
        for cols, value in src:
            d = det(sub[:, cols])
            if d != 0:
                total = total + d * value
        coords[key] = total
    return PluckerVector(k, n_out, coords)


def projection_map(pv: PluckerVector, kept_labels: Iterable[int]) -> PluckerVector:
    """Map induced by the coordinate projection onto ``kept_labels``."""
    kept = set(kept_labels)
    bad = kept - set(labels(pv.k, pv.n))
    if bad:
        raise ValueError(f"labels {sorted(bad)} are not basis labels")
    return PluckerVector(pv.k, pv.n, {key: v for key, v in pv.coords.items() if kept.issuperset(key)})


def intersection_map(pv: PluckerVector, u_basis: Sequence[Sequence], complement=None) -> PluckerVector:
    """Contract ``pv`` against the subspace U spanned by ``u_basis``.

    ``v_1 ^ ... ^ v_{k-p} ^ u_1 ^ ... ^ u_p`` goes to the wedge of the
    projections of the v's onto a complement V (along U); points whose part
    in the top power of U vanishes go to zero.  V defaults to the span of the
    basis vectors outside a set of pivot rows of U.  The result lives in the
    (k - p)-th power of V, with V's coordinates ordered as its basis.
    """
    k, n = pv.k, pv.n
    u = as_field_array(np.array(u_basis, dtype=object).T.reshape(n, -1))
    p = u.shape[1]
    if p > k:
        raise ValueError(f"U has dimension {p} > k = {k}")
    if rank(u) < p:
        raise ValueError("u_basis is linearly dependent")
    if complement is None:
        piv = set(pivot_rows(u))
        comp = identity(n, is_exact(u))[:, [r for r in range(n) if r not in piv]]
    else:
        comp = as_field_array(complement)
        if comp.shape != (n, n - p):
            raise ValueError(f"complement must be {n} x {n - p}")
    if not is_exact(u) or not is_exact(comp):
        u, comp = complex_array(u), complex_array(comp)
    basis = np.concatenate([comp, u], axis=1)
    if rank(basis) < n:
        raise ValueError("complement and U do not span C^n")
    moved = induced_map(inverse(basis), pv)
    tail = tuple(range(n - p + (k - n), k))  # labels of the U positions
    out = {}
    for key, value in moved.coords.items():
        if key[len(key) - p :] == tail:
            out[key[: len(key) - p]] = value
    return PluckerVector(k - p, n - p, out)


def dual(pv: PluckerVector) -> PluckerVector:
    """Orthogonal-complement isomorphism from degree k to degree n - k.

    Coordinate J of the image is the determinant of the columns
    ``e_J | v_1 | ... | v_k`` of ``(I | v_1 | ... | v_k)``, extended linearly;
    on basis wedges that is the shuffle sign times the complementary
    coordinate.  Applying it twice multiplies by ``(-1)^(k (n - k))``.
    """
    k, n = pv.k, pv.n
    out_k = n - k
    coords = {}
    for key, value in pv.coords.items():
        rows = set(_rows(key, k, n))
        comp = [r for r in range(n) if r not in rows]
        sign = -1 if sum(r - a for a, r in enumerate(comp)) % 2 else 1
        coords[tuple(r + out_k - n for r in comp)] = sign * value
    return PluckerVector(out_k, n, coords)


def wedge(pv1: PluckerVector, pv2: PluckerVector) -> PluckerVector:
    """Exterior product; inputs are matched on row positions of C^n."""
    if pv1.n != pv2.n:
        raise ValueError(f"dimension mismatch: C^{pv1.n} vs C^{pv2.n}")
    n = pv1.n
    k = pv1.k + pv2.k
    if k > n:
        raise ValueError(f"degree {k} exceeds n = {n}")
    out: dict = {}
    for key1, a in pv1.coords.items():
        rows1 = _rows(key1, pv1.k, n)
        for key2, b in pv2.coords.items():
            rows, sign = sort_with_sign(rows1 + _rows(key2, pv2.k, n))
            if sign == 0:
                continue
            key = tuple(r + k - n for r in rows)
            out[key] = out.get(key, 0) + sign * a * b
    return PluckerVector(k, n, out)
