"""Tau-functions of flows generated by an arbitrary finite matrix S.

A :class:`Generator` is an n x n matrix with a split index m: rows and
columns ``0..m-1`` form the H- block (labels < 0) and the remaining
``k = n - m`` form the H+ block.  For a frame W (n x k) the tau-function is
the determinant of the H+ rows of ``E(t) W`` with ``E(t) = exp(sum t_i S^i)``.
Miwa shifts always enter as operator factors ``(I + x S)``.

S generates KP tau-functions exactly when its lower-left block S+- has rank
at most one; most routines here either exploit or probe that condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb, factorial
from typing import Sequence

import numpy as np

from . import _kernels
from .exterior import Frame, PluckerVector, index_set
from .scalars import (
    UnsupportedModeError,
    adjugate,
    as_field_array,
    complex_array,
    det,
    identity,
    inverse,
    is_exact,
    is_exact_scalar,
    is_lower_triangular,
    is_nilpotent,
    is_zero,
    rank,
    scalars_field,
    to_complex,
    zeros,
)

RESIDUAL_REL_TOL = 1e-9
WITNESS_REL_TOL = 1e-6


@dataclass(frozen=True)
class Generator:
    """Flow generator S together with the H-/H+ split index."""

    matrix: np.ndarray
    split: int

    def __post_init__(self):
        m = as_field_array(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"generator must be square, got shape {m.shape}")
        if not 0 < self.split < m.shape[0]:
            raise ValueError(f"split must lie strictly between 0 and n={m.shape[0]}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def shift(cls, n: int, split: int) -> "Generator":
        """Truncated shift operator, e_i -> e_{i+1}."""
        m = zeros((n, n), True)
        for r in range(n - 1):
            m[r + 1, r] = Fraction(1)
        return cls(m, split)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def k(self) -> int:
        return self.n - self.split

    @property
    def exact(self) -> bool:
        return is_exact(self.matrix)

    @cached_property
    def nilpotent(self) -> bool:
        return is_nilpotent(self.matrix, tol=1e-12)

    def as_complex(self) -> "Generator":
        return self if not self.exact else Generator(complex_array(self.matrix), self.split)


# ---------------------------------------------------------------------------
# blocks and the rank-one condition
# ---------------------------------------------------------------------------


def blocks(g: Generator):
    """(S--, S-+, S+-, S++) with respect to the split."""
    m, s = g.split, g.matrix
    return s[:m, :m], s[:m, m:], s[m:, :m], s[m:, m:]


def rank_s_plus_minus(g: Generator, tol: float = 1e-9) -> int:
    return rank(blocks(g)[2], tol)


def rank_one_factors(g: Generator, tol: float = 1e-9):
    """Vectors u (length k), v (length m) with S+- = u v^T.

    u is a nonzero column of S+- (the largest one on the float path) and v
    holds the ratios of the other columns to it.  Raises if S+- has rank > 1.
    """
    pm = blocks(g)[2]
    exact = is_exact(pm)
    if rank(pm, tol) > 1:
        raise ValueError("S+- has rank greater than one")
    if exact:
        nonzero = [(i, j) for j in range(pm.shape[1]) for i in range(pm.shape[0]) if pm[i, j] != 0]
        if not nonzero:
            return zeros(pm.shape[0], True), zeros(pm.shape[1], True)
        i0, j0 = nonzero[0]
    else:
        if not np.abs(pm).max(initial=0.0) > 0:
            return zeros(pm.shape[0], False), zeros(pm.shape[1], False)
        j0 = int(np.argmax(np.abs(pm).sum(axis=0)))
        i0 = int(np.argmax(np.abs(pm[:, j0])))
    u = pm[:, j0].copy()
    v = pm[i0, :] / pm[i0, j0]
    return u, v


# ---------------------------------------------------------------------------
# tau evaluation
# ---------------------------------------------------------------------------


def _all_exact(values) -> bool:
    return all(is_exact_scalar(v) for v in values)


def _prepare(g: Generator, frame: Frame, *seqs):
    """Common field for (S, frame, scalar lists); exact only if all inputs are."""
    if (frame.n, frame.k) != (g.n, g.k):
        raise ValueError(
            f"frame is {frame.n}x{frame.k} but the generator needs {g.n}x{g.k} (k = n - split)"
        )
    exact = g.exact and frame.exact and all(_all_exact(s) for s in seqs)
    if exact:
        s, w = g.matrix, frame.matrix
    else:
        s, w = complex_array(g.matrix), complex_array(frame.matrix)
    return exact, s, w, [scalars_field(seq, exact) for seq in seqs]


def _series_exp(a: np.ndarray) -> np.ndarray:
    """exp(a) for nilpotent a as a terminating sum."""
    n = a.shape[0]
    out = identity(n, True)
    term = identity(n, True)
    for j in range(1, n + 1):
        term = (term @ a) / j
        if all(v == 0 for v in term.flat):
            break
        out = out + term
    return out


def flow_matrix(s: np.ndarray, t: Sequence, exact: bool, nilpotent: bool | None = None) -> np.ndarray:
    """E(t) = exp(sum_i t_i S^i)."""
    n = s.shape[0]
    if exact:
        if nilpotent is None:
            nilpotent = is_nilpotent(s)
        if not nilpotent:
            raise UnsupportedModeError(
                "exact time flows need a nilpotent generator; pass float data to use the matrix exponential"
            )
    a = zeros((n, n), exact)
    power = identity(n, exact)
    for ti in t:
        power = power @ s
        if ti != 0:
            a = a + ti * power
    if exact:
        return _series_exp(a)
    if not np.any(a):
        return np.eye(n, dtype=np.complex128)
    return _kernels.expm(a)


def _apply_miwa(s: np.ndarray, w: np.ndarray, xs: Sequence) -> np.ndarray:
    for x in xs:
        w = w + x * (s @ w)
    return w


def _tau_of(g: Generator, w: np.ndarray):
    return det(w[g.split :])


def _flowed(g: Generator, frame: Frame, t=(), xs=()):
    exact, s, w, (t, xs) = _prepare(g, frame, t, xs)
    if any(v != 0 for v in t):
        nil = g.nilpotent if exact else None
        w = flow_matrix(s, t, exact, nilpotent=nil) @ w
    return _apply_miwa(s, w, xs)


def miwa_tau(g: Generator, frame: Frame, xs: Sequence = ()):
    """tau(⟦x_1⟧ + ... + ⟦x_r⟧): det of the H+ rows of prod(I + x_j S) W."""
    return _tau_of(g, _flowed(g, frame, (), xs))


def time_tau(g: Generator, frame: Frame, t: Sequence = ()):
    return _tau_of(g, _flowed(g, frame, t, ()))


def tau_shifted(g: Generator, frame: Frame, t: Sequence = (), xs: Sequence = ()):
    """tau(t + ⟦x_1⟧ + ... ): Miwa factors applied after the time flow."""
    return _tau_of(g, _flowed(g, frame, t, xs))


def miwa_times(x, length: int) -> list:
    """Components of the time vector ⟦x⟧ up to ``length``: t_i = -(-x)^i / i."""
    return [-((-x) ** i) / i for i in range(1, length + 1)]


def add_times(*ts: Sequence) -> list:
    size = max((len(t) for t in ts), default=0)
    out = [0] * size
    for t in ts:
        for i, v in enumerate(t):
            out[i] = out[i] + v
    return out


# ---------------------------------------------------------------------------
# HBDE and the hat-L map
# ---------------------------------------------------------------------------


def hbde_terms(tau, lams: Sequence):
    """The three Vandermonde-weighted products of the HBDE.

    ``tau`` maps a list of Miwa shift parameters to a scalar.  The residual
    is ``a - b + c``.
    """
    l1, l2, l3, l4 = lams
    a = (l2 - l1) * (l4 - l3) * tau([l1, l2]) * tau([l3, l4])
    b = (l3 - l1) * (l4 - l2) * tau([l1, l3]) * tau([l2, l4])
    c = (l4 - l1) * (l3 - l2) * tau([l1, l4]) * tau([l2, l3])
    return a, b, c


def relative_residual(terms) -> float:
    a, b, c = (to_complex(v) for v in terms)
    scale = abs(a) + abs(b) + abs(c)
    if scale == 0:
        return 0.0
    return abs(a - b + c) / scale


def hbde_residual(g: Generator, frame: Frame, t: Sequence, lams: Sequence):
    if len(lams) != 4:
        raise ValueError("the HBDE takes four shift parameters")
    a, b, c = hbde_terms(lambda xs: tau_shifted(g, frame, t, xs), lams)
    return a - b + c


def hbde_relative_residual(g: Generator, frame: Frame, t: Sequence, lams: Sequence) -> float:
    return relative_residual(hbde_terms(lambda xs: tau_shifted(g, frame, t, xs), lams))


def vandermonde(xs: Sequence):
    """Delta(x_1..x_r) = det(x_i^(j-1)) = prod_{a<b} (x_b - x_a)."""
    out = Fraction(1) if _all_exact(xs) else 1.0 + 0j
    for a, b in combinations(range(len(xs)), 2):
        out = out * (xs[b] - xs[a])
    return out


def _require_distinct(xs: Sequence, what: str = "shift parameters") -> None:
    for a, b in combinations(range(len(xs)), 2):
        if xs[a] == xs[b]:
            raise ValueError(f"{what} must be pairwise distinct; got a repeat of {xs[a]!r}")


def hat_L(g: Generator, frame: Frame, t: Sequence, lams: Sequence, k: int) -> PluckerVector:
    """Image point in the k-th wedge power of C^N, N = len(lams).

    Coordinate with labels ``(i_1 + k - N - 1, ...)`` (1-based positions
    i_1 < ... < i_k) is ``Delta(lam_i...) * tau(t + ⟦lam_i1⟧ + ... + ⟦lam_ik⟧)``;
    position 1 carries the lowest label k - N.  For k=2, N=4 its single
    Plücker relation is the HBDE.
    """
    big_n = len(lams)
    if not 0 < k < big_n:
        raise ValueError(f"need 0 < k < N, got k={k}, N={big_n}")
    _require_distinct(lams)
    coords = {}
    for pos in combinations(range(big_n), k):
        sel = [lams[p] for p in pos]
        coords[tuple(p + k - big_n for p in pos)] = vandermonde(sel) * tau_shifted(g, frame, t, sel)
    return PluckerVector(k, big_n, coords)


GCPImage = PluckerVector


# ---------------------------------------------------------------------------
# product (determinant) formula
# ---------------------------------------------------------------------------


def _f_column(spp: np.ndarray, u: np.ndarray, x, r: int, exact: bool) -> list:
    kdim = spp.shape[0]
    mx = identity(kdim, exact) + x * spp
    p0 = det(mx)
    top = [p0 * (-x) ** j for j in range(r)]
    bottom = list(((-x) ** r) * (adjugate(mx) @ u))
    return top + bottom


def _a_matrix(s: np.ndarray, split: int, v: np.ndarray, r: int, exact: bool) -> np.ndarray:
    """((V- V+); (0 I)) with rows v^T (S^(r-j))- for j = 1..r on top."""
    n = s.shape[0]
    kdim = n - split
    powers = [identity(n, exact)]
    for _ in range(r):
        powers.append(powers[-1] @ s)
    top = [v @ powers[r - j][:split] for j in range(1, r + 1)]
    bottom = np.concatenate([zeros((kdim, split), exact), identity(kdim, exact)], axis=1)
    if not top:
        return bottom
    return np.concatenate([np.array(top, dtype=bottom.dtype).reshape(r, n), bottom], axis=0)


def _check_formula_inputs(g: Generator, exact: bool, tol: float) -> None:
    if rank_s_plus_minus(g, tol) > 1:
        raise ValueError("the product formula needs rank(S+-) <= 1")
    spp = blocks(g)[3]
    if not is_lower_triangular(spp, 0.0 if exact else tol):
        raise ValueError("S++ must be lower triangular; conjugate the generator first")


def tau_product_formula(g: Generator, frame: Frame, xs: Sequence, tol: float = 1e-9):
    """tau(⟦x_1⟧ + ... + ⟦x_r⟧) from the rank-one factorisation of S+-.

    Evaluates ``det(f(x_1) | ... | f(x_r) | A W) / Delta(-x_1, ..., -x_r)``
    where ``f(x) = (p0, -x p0, ..., (-x)^(r-1) p0, (-x)^r p0 (I + x S++)^-1 u)``
    with ``p0 = det(I + x S++)`` and ``S+- = u v^T``.
    """
    exact, s, w, (xs,) = _prepare(g, frame, xs)
    _check_formula_inputs(g, exact, tol)
    _require_distinct(xs)
    if any(x == 0 for x in xs):
        raise ValueError("shift parameters must be nonzero")
    gg = g if exact else g.as_complex()
    u, v = rank_one_factors(gg, tol)
    spp = s[g.split :, g.split :]
    r = len(xs)
    cols = [_f_column(spp, u, x, r, exact) for x in xs]
    aw = _a_matrix(s, g.split, v, r, exact) @ w
    if cols:
        f = np.array(cols, dtype=aw.dtype).T
        big = np.concatenate([f, aw], axis=1)
    else:
        big = aw
    return det(big) / vandermonde([-x for x in xs])


# ---------------------------------------------------------------------------
# Schur expansion for the shift generator
# ---------------------------------------------------------------------------


def schur_f(js: Sequence[int], xs: Sequence):
    """det(x_a^(j_b + r)) / det(x_a^(b-1)) for r = len(xs) shift parameters."""
    r = len(xs)
    if len(js) != r:
        raise ValueError("need one excluded integer per shift parameter")
    if any(b <= a for a, b in zip(js, js[1:])) or (js and js[0] < -r):
        raise ValueError(f"excluded integers must increase and be >= {-r}")
    _require_distinct(xs)
    exact = _all_exact(xs)
    xs = scalars_field(xs, exact)
    num = np.empty((r, r), dtype=object if exact else np.complex128)
    for a in range(r):
        for b in range(r):
            num[a, b] = xs[a] ** (js[b] + r)
    return det(num) / vandermonde(xs)


def schur_coefficient(index: Sequence[int], xs: Sequence, k: int):
    """Weight of basis coordinate ``index`` (degree k) in tau(⟦x_1⟧+...+⟦x_r⟧)."""
    r = len(xs)
    if index and min(index) < -r:
        return Fraction(0) if _all_exact(xs) else 0j
    excluded = sorted(set(range(-r, k)) - set(index))
    return schur_f(excluded, xs)


def tau_schur_expansion_residual(frame: Frame, xs: Sequence):
    """miwa_tau for the shift generator minus its Schur-function expansion."""
    from .exterior import plucker_coordinates

    g = Generator.shift(frame.n, frame.n - frame.k)
    pv = plucker_coordinates(frame)
    total = miwa_tau(g, frame, xs)
    for key, value in pv.coords.items():
        total = total - value * schur_coefficient(key, xs, frame.k)
    return total


# ---------------------------------------------------------------------------
# conjugation, violations, faithfulness
# ---------------------------------------------------------------------------


def conjugate_generator(g: Generator, gmat) -> tuple[Generator, object]:
    """(G S G^-1, det C) for G = ((A B); (0 C)) block upper triangular."""
    gmat = as_field_array(gmat)
    if gmat.shape != g.matrix.shape:
        raise ValueError("G must have the generator's shape")
    s = g.matrix
    if is_exact(s) != is_exact(gmat):
        s, gmat = complex_array(s), complex_array(gmat)
    m = g.split
    if not all(is_zero(v, 0.0) for v in gmat[m:, :m].flat):
        raise ValueError("G must be block upper triangular with respect to the split")
    det_c = det(gmat[m:, m:])
    if is_zero(det_c, 0.0) or is_zero(det(gmat[:m, :m]), 0.0):
        raise ValueError("G is singular")
    return Generator(gmat @ s @ inverse(gmat), m), det_c


@dataclass(frozen=True)
class Witness:
    frame: Frame
    lams: tuple
    residual: object
    trial: int


def _random_int_frame(rng: np.random.Generator, n: int, k: int, bound: int = 4) -> Frame:
    while True:
        m = rng.integers(-bound, bound + 1, size=(n, k))
        f = Frame(m.astype(object))
        if rank(f.matrix) == k:
            return f


def _random_distinct_ints(rng: np.random.Generator, count: int, bound: int) -> list[int]:
    vals = rng.choice(np.arange(-bound, bound + 1), size=count, replace=False)
    return [int(v) for v in vals]


def find_hbde_violation(g: Generator, seed: int = 0, budget: int = 500) -> Witness | None:
    """Random search for a decomposable frame and shifts breaking the HBDE.

    Frames and shifts are drawn with small integer entries; the first trial
    with a nonzero residual (exactly nonzero, or relative residual above
    ``WITNESS_REL_TOL`` on the float path) is returned.  A rank <= 1
    generator cannot have a witness, so it returns None without searching.

    If the random search ever fails, a deterministic witness follows the
    classical construction: with S++ lower triangular and S+- containing two
    independent rows, take ``W = (mu (w1 e_i1^T + w2 e_i2^T); I)`` with
    ``v1.w2 = 0`` and shifts ``lam_j = -1 / (s_ij + mu d_j)``, ``lam_4 = 0``,
    generic ``lam_3`` and large mu.
    """
    if rank_s_plus_minus(g) <= 1:
        return None
    rng = np.random.default_rng(seed)
    for trial in range(budget):
        frame = _random_int_frame(rng, g.n, g.k)
        lams = _random_distinct_ints(rng, 4, 12)
        if g.exact:
            res = hbde_residual(g, frame, (), lams)
            if res != 0:
                return Witness(frame, tuple(Fraction(v) for v in lams), res, trial)
        else:
            terms = hbde_terms(lambda xs: miwa_tau(g, frame, xs), lams)
            if relative_residual(terms) > WITNESS_REL_TOL:
                return Witness(frame, tuple(lams), terms[0] - terms[1] + terms[2], trial)
    return None


def basis_tau_row(g: Generator, xs: Sequence) -> list:
    """tau of every basis wedge e_I at the Miwa point ⟦x_1⟧ + ... (fixed order)."""
    exact = g.exact and _all_exact(xs)
    s = g.matrix if exact else complex_array(g.matrix)
    n, k = g.n, g.k
    t = _apply_miwa(s, identity(n, exact), scalars_field(xs, exact))[g.split :]
    off = k - n
    return [det(t[:, [i - off for i in key]]) for key in index_set(k, n)]


def is_kn_faithful(g: Generator, k: int, n: int, samples: int | None = None, seed: int = 0) -> bool:
    """Sampled test that no nonzero coefficient vector has vanishing hat-L image.

    Each sample evaluates every tau_{e_I} at ``n - 1 + k`` integer Miwa shifts
    drawn from [-1000, 1000]; that many factors reach every time flow plus the
    k shifts of hat-L.  The result is True iff the stacked C(n, k)-column
    system has full column rank.  False is certain; True holds up to the
    usual polynomial-identity-testing error.
    """
    if (g.n, g.k) != (n, k):
        raise ValueError(f"generator is for ({g.k}, {g.n}) frames, not ({k}, {n})")
    if rank_s_plus_minus(g) > 1:
        raise ValueError("faithfulness is defined for generators with rank(S+-) <= 1")
    cols = comb(n, k)
    if samples is None:
        samples = cols + 8
    rng = np.random.default_rng(seed)
    rows = [
        basis_tau_row(g, [int(x) for x in rng.integers(-1000, 1001, size=n - 1 + k)]) for _ in range(samples)
    ]
    mat = np.array(rows, dtype=object if g.exact else np.complex128).reshape(samples, cols)
    return rank(mat) == cols


def escape_time(g: Generator, v: Sequence, bound: int | None = None) -> int | None:
    """Least m <= bound with S^m v having a nonzero H+ part (v in H-)."""
    exact = g.exact and _all_exact(v)
    s = g.matrix if exact else complex_array(g.matrix)
    vec = np.array(scalars_field(v, exact), dtype=s.dtype)
    if vec.shape != (g.n,):
        raise ValueError(f"vector must have length {g.n}")
    tol = 0.0 if exact else 1e-12
    if not all(is_zero(c, tol) for c in vec[g.split :]):
        raise ValueError("vector must be supported on the H- rows")
    if bound is None:
        bound = g.n
    for m in range(1, bound + 1):
        vec = s @ vec
        if not all(is_zero(c, tol) for c in vec[g.split :]):
            return m
    return None


# ---------------------------------------------------------------------------
# symmetries and singularities
# ---------------------------------------------------------------------------


def scaled_times(t: Sequence, lam) -> list:
    return [lam ** (i + 1) * ti for i, ti in enumerate(t)]


def translated_times(t: Sequence, lam) -> list:
    """t'_j = sum_{i>=0} C(i+j, i) lam^i t_{i+j}."""
    size = len(t)
    return [sum(comb(i + j, i) * lam**i * t[i + j - 1] for i in range(size - j + 1)) for j in range(1, size + 1)]


def symmetry_residuals(g: Generator, frame: Frame, t: Sequence, lam):
    """(scale, translate) residuals of the two one-parameter symmetries.

    scale:     tau^{lam S}(t) - tau^S(lam t),  (lam t)_i = lam^i t_i.
    translate: tau^{S + lam I}(t) exp(-k sum_i lam^i t_i) - tau^S(t').

    The translated generator contributes the scalar factor
    ``exp(k sum lam^i t_i)`` (a gauge factor; k = dim H+), which is divided
    out.  On the exact path S must be nilpotent: ``sum t_i ((S + lam I)^i -
    lam^i I)`` is then nilpotent, so the left side is computed exactly from
    actual powers of ``S + lam I``, independently of the t' formula.
    """
    exact, s, w, (t, (lam,)) = _prepare(g, frame, t, [lam])
    n = g.n
    if exact and not g.nilpotent:
        raise UnsupportedModeError("exact symmetry checks need a nilpotent generator")
    g_here = Generator(s, g.split)

    scaled = Generator(lam * s, g.split)
    scale_res = time_tau(scaled, Frame(w), t) - time_tau(g_here, Frame(w), scaled_times(t, lam))

    st = s + lam * identity(n, exact)
    a = zeros((n, n), exact)
    power = identity(n, exact)
    for i, ti in enumerate(t, start=1):
        power = power @ st
        a = a + ti * (power - lam**i * identity(n, exact))
    if exact:
        lhs = _tau_of(g, _series_exp(a) @ w)
    else:
        gauge = sum(lam ** (i + 1) * ti for i, ti in enumerate(t))
        full = flow_matrix(st, t, False)
        lhs = _tau_of(g, full @ w) * np.exp(-g.k * gauge)
    translate_res = lhs - time_tau(g_here, Frame(w), translated_times(t, lam))
    return scale_res, translate_res


def miwa_symmetry_residuals(g: Generator, frame: Frame, xs: Sequence, lam):
    """Miwa-point form of the symmetries, exact for any rational S.

    scale:     tau^{lam S}(sum ⟦x⟧) - tau^S(sum ⟦lam x⟧)
    translate: tau^{S + lam I}(sum ⟦x⟧) - prod(1 + lam x)^k tau^S(sum ⟦x / (1 + lam x)⟧)
    """
    exact, s, w, (xs, (lam,)) = _prepare(g, frame, xs, [lam])
    fw = Frame(w)
    k = g.k
    scale_res = miwa_tau(Generator(lam * s, g.split), fw, xs) - miwa_tau(Generator(s, g.split), fw, [lam * x for x in xs])
    if any(1 + lam * x == 0 for x in xs):
        raise ValueError("translation sends a shift parameter to infinity (1 + lam x = 0)")
    factor = Fraction(1) if exact else 1.0 + 0j
    for x in xs:
        factor = factor * (1 + lam * x) ** k
    shifted = Generator(s + lam * identity(g.n, exact), g.split)
    translate_res = miwa_tau(shifted, fw, xs) - factor * miwa_tau(Generator(s, g.split), fw, [x / (1 + lam * x) for x in xs])
    return scale_res, translate_res


def in_gamma(frame: Frame, k_neg: int, split: int, tol: float = 0.0) -> bool:
    """First ``k_neg`` columns supported on the H- rows."""
    if k_neg > frame.k:
        return False
    block = frame.matrix[split:, :k_neg]
    return all(is_zero(v, tol) for v in block.flat)


def singularity_vanishing_check(g: Generator, frame: Frame, k_neg: int, xs: Sequence):
    """tau at k_neg - 1 Miwa shifts for a frame in Gamma_{k_neg}; zero when rank(S+-) <= 1."""
    if k_neg < 1:
        raise ValueError("k_neg must be positive")
    if len(xs) != k_neg - 1:
        raise ValueError(f"expected {k_neg - 1} shift parameters, got {len(xs)}")
    if not in_gamma(frame, k_neg, g.split):
        raise ValueError(f"frame is not in Gamma_{k_neg}: its first {k_neg} columns leave H-")
    if rank_s_plus_minus(g) > 1:
        raise ValueError("the vanishing theorem needs rank(S+-) <= 1")
    return miwa_tau(g, frame, xs)


def exact_factorial_normalization(k: int) -> int:
    """prod_{j<k} j!, relating raw derivative columns to the confluent limit."""
    out = 1
    for j in range(k):
        out *= factorial(j)
    return out
