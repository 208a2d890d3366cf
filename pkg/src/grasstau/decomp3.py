"""Decomposability of a k-vector from one parameterised 3-term relation.

A point of the k-th wedge power of C^n is pushed through ``L = M P G``:

* G is lower-triangular Toeplitz, ones on the diagonal, alpha_d on the
  d-th subdiagonal;
* P keeps the k + 2 coordinates with labels >= -2;
* M undoes the generalised Vandermonde block matrix ((V1 0); (V2 I)) whose
  column c < 4 is ((-1)^c (-lam_c)^r)_r.

The image lies in the wedge power of C^(k+2), and the point is decomposable
exactly when the 3-term relation on six of its coordinates vanishes for all
parameter values.  Everything is scaled to integers so sampling stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .exterior import PluckerVector
from .scalars import adjugate, bareiss_det, det, is_zero, to_complex

SAMPLE_BOUND = 10**6
FLOAT_REL_TOL = 1e-9


def residual_degree(k: int) -> int:
    """Total degree bound of the residual as a polynomial in (alpha, lam).

    Entries of adj(V1) have degree <= 6 in lam, those of V2 adj(V1) degree
    <= k + 7, and G contributes degree 1 in alpha; so every entry of L has
    degree <= k + 8, each k x k minor degree <= k(k + 8), and the quadratic
    residual degree <= 2k(k + 8).
    """
    return 2 * k * (k + 8)


@dataclass(frozen=True)
class ParamPoint:
    alpha: tuple
    lams: tuple

    def __post_init__(self):
        if len(self.lams) != 4:
            raise ValueError("a parameter point carries exactly four lambdas")
        if len(set(self.lams)) != 4:
            raise ValueError("lambdas must be pairwise distinct")

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, bound: int = SAMPLE_BOUND) -> "ParamPoint":
        alpha = tuple(int(v) for v in rng.integers(-bound, bound + 1, size=n - 1))
        while True:
            lams = tuple(int(v) for v in rng.integers(-bound, bound + 1, size=4))
            if len(set(lams)) == 4:
                return cls(alpha, lams)

    @classmethod
    def random_float(cls, rng: np.random.Generator, n: int) -> "ParamPoint":
        """Parameters of unit size; integer magnitudes would overflow doubles."""
        alpha = tuple(float(v) for v in rng.uniform(-1, 1, size=n - 1))
        lams = tuple(float(v) for v in rng.uniform(-1, 1, size=4))
        return cls(alpha, lams)

    def to_json(self) -> dict:
        return {"alpha": [str(a) for a in self.alpha], "lambda": [str(v) for v in self.lams]}


@dataclass(frozen=True)
class ThreeTermResidual:
    value: object
    params: ParamPoint


def _vandermonde_block(lams: Sequence, size: int) -> list[list]:
    """N with N[r][c] = (-1)^c (-lam_c)^r for c < 4 and the identity beyond."""
    rows = []
    for r in range(size):
        row = [(-1) ** c * (-lams[c]) ** r for c in range(4)]
        row += [1 if r == c else 0 for c in range(4, size)]
        rows.append(row)
    return rows


def _m_matrix(lams: Sequence, size: int) -> np.ndarray:
    """det(V1) times the inverse of N: ((adj V1, 0); (-V2 adj V1, det V1 I))."""
    exact = all(isinstance(v, (int, Fraction)) for v in lams)
    dtype = object if exact else np.complex128
    nmat = np.array(_vandermonde_block(lams, size), dtype=dtype)
    if exact:
        nmat = np.vectorize(Fraction, otypes=[object])(nmat)
    v1, v2 = nmat[:4, :4], nmat[4:, :4]
    adj = adjugate(v1)
    d1 = det(v1)
    out = np.zeros((size, size), dtype=dtype)
    out[:4, :4] = adj
    out[4:, :4] = -(v2 @ adj)
    for r in range(4, size):
        out[r, r] = d1
    return out


def _toeplitz(alpha: Sequence, n: int) -> np.ndarray:
    g = np.zeros((n, n), dtype=object)
    for r in range(n):
        g[r, r] = 1
        for d in range(1, r + 1):
            g[r, r - d] = alpha[d - 1]
    return g


def build_L(params: ParamPoint, k: int, n: int) -> np.ndarray:
    """The (k+2) x n matrix M P G; integer-valued for integer parameters."""
    if len(params.alpha) != n - 1:
        raise ValueError(f"expected {n - 1} alphas, got {len(params.alpha)}")
    if n < k + 2:
        raise ValueError("the projection needs n >= k + 2")
    lams = [v if isinstance(v, (int, Fraction)) else to_complex(v) for v in params.lams]
    m = _m_matrix(lams, k + 2)
    if all(is_zero(v) for v in m[:4, :4].flat):
        raise ValueError("V1 is singular; the lambdas must be distinct")
    g = _toeplitz(params.alpha, n)
    return m @ g[n - k - 2 :]


def _relation_keys(k: int) -> dict:
    """Positions (0-based in C^(k+2)) of the six coordinates in the relation."""
    tail = tuple(range(4, k + 2))
    return {(i, j): (i, j) + tail for i in range(4) for j in range(i + 1, 4)}


def _integer_coords(pv: PluckerVector):
    scale = lcm(*(v.denominator for v in pv.coords.values())) if pv.coords else 1
    return {key: int(v * scale) for key, v in pv.coords.items()}


def three_term_residual(pv: PluckerVector, params: ParamPoint) -> ThreeTermResidual:
    """pi01 pi23 - pi02 pi13 + pi03 pi12 for the image of pv under build_L.

    Indices 0..3 stand for the labels -2..1 and every coordinate also contains
    the labels 2..k-1.  Exact input is scaled to integers first, so the value
    is an integer multiple of the true residual.
    """
    k, n = pv.k, pv.n
    if k < 2 or n < k + 2:
        zero = 0 if pv.exact else 0j
        return ThreeTermResidual(zero, params)
    lmat = build_L(params, k, n)
    off = k - n
    exact = pv.exact and all(isinstance(v, (int, Fraction)) for v in lmat.flat)
    coords = _integer_coords(pv) if exact else {key: to_complex(v) for key, v in pv.coords.items()}
    cols = {key: [l - off for l in key] for key in coords}
    hat = {}
    for name, rows in _relation_keys(k).items():
        total = 0
        sub_rows = lmat[list(rows)]
        for key, value in coords.items():
            block = sub_rows[:, cols[key]]
            if exact:
                minor = bareiss_det([[int(v) for v in r] for r in block])
            else:
                minor = det(np.array(block, dtype=np.complex128))
            total += minor * value
        hat[name] = total
    value = hat[0, 1] * hat[2, 3] - hat[0, 2] * hat[1, 3] + hat[0, 3] * hat[1, 2]
    if not exact:
        scale = abs(hat[0, 1] * hat[2, 3]) + abs(hat[0, 2] * hat[1, 3]) + abs(hat[0, 3] * hat[1, 2])
        value = complex(value)
        if scale > 0 and abs(value) <= FLOAT_REL_TOL * scale:
            value = 0j
    return ThreeTermResidual(value, params)


@dataclass(frozen=True)
class Verdict:
    decomposable: bool
    trials: int
    seed: int
    first_failing_params: ParamPoint | None = None

    def to_json(self) -> dict:
        out = {"decomposable": self.decomposable, "trials": self.trials, "seed": self.seed}
        if self.first_failing_params is not None:
            out["first_failing_params"] = self.first_failing_params.to_json()
        return out


def decide_3term(pv: PluckerVector, trials: int = 20, seed: int = 0) -> Verdict:
    """Sample integer parameters and stop at the first nonzero residual.

    Float points sample parameters uniformly from [-1, 1] instead and treat
    relative residuals below ``FLOAT_REL_TOL`` as zero.

    A nonzero residual certifies non-decomposability.  If every sample
    vanishes, a non-decomposable point slipped through with probability at
    most ``(residual_degree(k) / (2 * SAMPLE_BOUND + 1)) ** trials``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        params = ParamPoint.random(rng, pv.n) if pv.exact else ParamPoint.random_float(rng, pv.n)
        if three_term_residual(pv, params).value != 0:
            return Verdict(False, trials, seed, params)
    return Verdict(True, trials, seed)


def is_decomposable_3term(pv: PluckerVector, trials: int = 20, seed: int = 0) -> bool:
    return decide_3term(pv, trials, seed).decomposable
