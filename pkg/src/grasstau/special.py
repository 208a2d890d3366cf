"""Explicit tau-functions: solitons, Calogero-Moser, discrete KP, and the KP field.

Each factory comes with the rank-one generator and frame that produce it, so
the closed forms can be cross-checked against the general flow evaluation in
:mod:`grasstau.kp_flow`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .exterior import Frame
from .kp_flow import (
    Generator,
    _a_matrix,
    _check_formula_inputs,
    _f_column,
    _flowed,
    _prepare,
    rank_one_factors,
    tau_shifted,
)
from .scalars import (
    as_field_array,
    complex_array,
    det,
    identity,
    is_exact,
    rank,
    scalars_field,
    solve,
    zeros,
)

# ---------------------------------------------------------------------------
# solitons
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolitonData:
    """4n complex parameters; X_ij = alpha_i / (beta_j (lam_j - mu_i))."""

    mu: tuple
    lam: tuple
    alpha: tuple
    beta: tuple

    def __post_init__(self):
        fields = {}
        for name in ("mu", "lam", "alpha", "beta"):
            fields[name] = tuple(complex(v) for v in getattr(self, name))
            object.__setattr__(self, name, fields[name])
        n = len(self.mu)
        if n == 0 or any(len(v) != n for v in fields.values()):
            raise ValueError("mu, lambda, alpha and beta need the same positive length")
        if any(m == l for m in self.mu for l in self.lam):
            raise ValueError("parameter collision: some mu_i equals some lambda_j")
        if any(b == 0 for b in self.beta):
            raise ValueError("beta entries must be nonzero")

    @property
    def n(self) -> int:
        return len(self.mu)

    def x_matrix(self) -> np.ndarray:
        a = np.array(self.alpha)[:, None]
        b = np.array(self.beta)[None, :]
        lam = np.array(self.lam)[None, :]
        mu = np.array(self.mu)[:, None]
        return a / (b * (lam - mu))

    @classmethod
    def random(cls, rng: np.random.Generator, n: int) -> "SolitonData":
        """Moderate real spectral data, which keeps the exponentials in range."""
        lam = rng.uniform(0.3, 1.2, n) * rng.choice([-1, 1], n)
        mu = rng.uniform(0.3, 1.2, n) * rng.choice([-1, 1], n)
        # push mu away from lam to keep X moderate
        mu = np.where(np.abs(mu[:, None] - lam[None, :]).min(axis=1) < 0.2, mu + 0.5, mu)
        alpha = rng.uniform(0.5, 2.0, n)
        beta = rng.uniform(0.5, 2.0, n)
        return cls(tuple(mu), tuple(lam), tuple(alpha), tuple(beta))


def _times_array(t: Sequence) -> np.ndarray:
    return np.array([complex(v) for v in t], dtype=np.complex128).reshape(1, -1)


def soliton_tau(d: SolitonData, t: Sequence) -> complex:
    """det(X exp(sum t_i Z^i) + exp(sum t_i Y^i)).

    The diagonal exponential multiplies the columns of X; this ordering is the
    one realised by :func:`soliton_generator` with normalization one.
    """
    times = _times_array(t) if len(t) else np.zeros((1, 1), dtype=np.complex128)
    return complex(_kernels.soliton_grid(d.x_matrix(), np.array(d.lam), np.array(d.mu), times)[0])


def soliton_tau_shifted(d: SolitonData, t: Sequence, xs: Sequence) -> complex:
    """soliton_tau at t + ⟦x_1⟧ + ...: each shift scales exp(xi(p)) by (1 + x p)."""
    lam, mu = np.array(d.lam), np.array(d.mu)
    fl = np.ones(d.n, dtype=np.complex128)
    fm = np.ones(d.n, dtype=np.complex128)
    for x in xs:
        fl *= 1 + complex(x) * lam
        fm *= 1 + complex(x) * mu
    powers = np.arange(1, len(t) + 1)
    tv = np.array([complex(v) for v in t], dtype=np.complex128)
    el = np.exp((lam[:, None] ** powers[None, :]) @ tv) if len(t) else np.ones(d.n, dtype=np.complex128)
    em = np.exp((mu[:, None] ** powers[None, :]) @ tv) if len(t) else np.ones(d.n, dtype=np.complex128)
    return _kernels.det(d.x_matrix() * (el * fl)[None, :] + np.diag(em * fm))


def soliton_tau_batch(d: SolitonData) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised soliton_tau over a (P, M) array of time vectors."""
    x, lam, mu = d.x_matrix(), np.array(d.lam), np.array(d.mu)
    return lambda times: _kernels.soliton_grid(x, lam, mu, np.asarray(times, dtype=np.complex128))


def soliton_generator(d: SolitonData) -> tuple[Generator, Frame]:
    """S = ((Z 0); (XZ - YX  Y)) with frame columns from (I; I + X)."""
    n = d.n
    x = d.x_matrix()
    z = np.diag(np.array(d.lam))
    y = np.diag(np.array(d.mu))
    s = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    s[:n, :n] = z
    s[n:, :n] = x @ z - y @ x
    s[n:, n:] = y
    frame = np.concatenate([np.eye(n), np.eye(n) + x], axis=0)
    return Generator(s, n), Frame(frame)


def soliton_rank(d: SolitonData, tol: float = 1e-9) -> int:
    x = d.x_matrix()
    return rank(x @ np.diag(np.array(d.lam)) - np.diag(np.array(d.mu)) @ x, tol)


# ---------------------------------------------------------------------------
# Calogero-Moser
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CMData:
    """Matrices with rank(XZ - ZX + I) = 1."""

    x: np.ndarray
    z: np.ndarray
    tol: float = 1e-9

    def __post_init__(self):
        x, z = as_field_array(self.x), as_field_array(self.z)
        if is_exact(x) != is_exact(z):
            x, z = complex_array(x), complex_array(z)
        if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape != z.shape:
            raise ValueError("X and Z must be square matrices of the same size")
        r = rank(self.commutator_of(x, z), self.tol)
        if r != 1:
            raise ValueError(f"rank(XZ - ZX + I) must be 1, got {r}")
        x.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @staticmethod
    def commutator_of(x: np.ndarray, z: np.ndarray) -> np.ndarray:
        return x @ z - z @ x + identity(x.shape[0], is_exact(x))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.x)

    def commutator(self) -> np.ndarray:
        return self.commutator_of(self.x, self.z)

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, conjugate: bool = True, bound: int = 6) -> "CMData":
        """Exact admissible data: Z = diag(z), X_ij = 1/(z_j - z_i) off the diagonal.

        Then XZ - ZX + I is the all-ones matrix.  With ``conjugate`` both are
        moved by a random unimodular-ish integer matrix, which preserves the
        rank condition and hides the diagonal structure.
        """
        zs = [Fraction(int(v)) for v in rng.choice(np.arange(-bound, bound + 1), size=n, replace=False)]
        x = zeros((n, n), True)
        z = zeros((n, n), True)
        for i in range(n):
            z[i, i] = zs[i]
            x[i, i] = Fraction(int(rng.integers(-bound, bound + 1)))
            for j in range(n):
                if i != j:
                    x[i, j] = 1 / (zs[j] - zs[i])
        if conjugate and n > 1:
            while True:
                p = as_field_array(rng.integers(-2, 3, size=(n, n)))
                if det(p) != 0:
                    break
            pinv = solve(p, identity(n, True))
            x, z = p @ x @ pinv, p @ z @ pinv
        return cls(x, z)


def cm_tau(d: CMData, t: Sequence):
    """det(X + sum_i i t_i Z^(i-1)); exact for rational data and times."""
    exact = d.exact and all(isinstance(v, (int, Fraction)) for v in t)
    x = d.x if exact else complex_array(d.x)
    z = d.z if exact else complex_array(d.z)
    t = scalars_field(t, exact)
    acc = x.copy()
    power = identity(d.n, exact)
    for i, ti in enumerate(t, start=1):
        if ti != 0:
            acc = acc + (i * ti) * power
        power = power @ z
    return det(acc)


def cm_tau_shifted(d: CMData, t: Sequence, xs: Sequence):
    """cm_tau at t + ⟦x_1⟧ + ...: each shift adds x (I + x Z)^-1 inside the determinant."""
    exact = d.exact and all(isinstance(v, (int, Fraction)) for v in (*t, *xs))
    x = d.x if exact else complex_array(d.x)
    z = d.z if exact else complex_array(d.z)
    t, xs = scalars_field(t, exact), scalars_field(xs, exact)
    eye = identity(d.n, exact)
    acc = x.copy()
    power = eye
    for i, ti in enumerate(t, start=1):
        if ti != 0:
            acc = acc + (i * ti) * power
        power = power @ z
    for s in xs:
        shifted = eye + s * z
        if det(shifted) == 0:
            raise ValueError(f"shift {s} hits a pole: I + x Z is singular")
        acc = acc + s * solve(shifted, eye)
    return det(acc)


def cm_generator(d: CMData) -> Generator:
    """S = ((Z 0); (XZ - ZX + I  Z)), split n."""
    n = d.n
    s = zeros((2 * n, 2 * n), d.exact)
    s[:n, :n] = d.z
    s[n:, :n] = d.commutator()
    s[n:, n:] = d.z
    return Generator(s, n)


def cm_frame(d: CMData) -> Frame:
    """Frame (I; X); its flow under cm_generator gives cm_tau times a gauge factor."""
    return Frame(np.concatenate([identity(d.n, d.exact), d.x], axis=0))


def cm_gauge_exponent(d: CMData, t: Sequence):
    """sum_i t_i tr(Z^i): time_tau(cm_generator, cm_frame) = exp(this) * cm_tau."""
    z = d.z if d.exact else complex_array(d.z)
    power = identity(d.n, d.exact)
    out = 0
    for ti in t:
        power = power @ z
        out = out + ti * np.trace(power)
    return out


# ---------------------------------------------------------------------------
# discrete KP
# ---------------------------------------------------------------------------


def dkp_tau(g: Generator, frame: Frame, k: int, t: Sequence = ()):
    """det(((I + S)^k E(t) W)+)."""
    if k < 0:
        raise ValueError("the discrete variable k must be non-negative")
    return tau_shifted(g, frame, t, [1] * k)


def wronskian_normalization(k: int) -> Fraction:
    """Constant c_k with dkp_tau = c_k * dkp_wronskian_tau.

    The confluent limit of det(f(x_1)|...|f(x_k)|...) / Delta(-x) at x_j -> 1
    divides by prod_{j<k} j! and picks up the sign (-1)^(k(k-1)/2) from
    Delta(-x) = (-1)^(k(k-1)/2) Delta(x).
    """
    denom = 1
    for j in range(k):
        denom *= factorial(j)
    return Fraction((-1) ** (k * (k - 1) // 2), denom)


def _poly_coefficients(values: list, exact: bool) -> list:
    """Coefficients of the polynomial through (j, values[j]), j = 0..D."""
    size = len(values)
    vand = np.empty((size, size), dtype=object if exact else np.complex128)
    for a in range(size):
        for b in range(size):
            vand[a, b] = Fraction(a) ** b if exact else complex(a) ** b
    rhs = np.array(values, dtype=vand.dtype)
    return list(solve(vand, rhs))


def _derivatives_at_one(coeffs: list, count: int) -> list:
    """[p(1), p'(1), ..., p^(count-1)(1)] from ascending coefficients."""
    out = []
    c = list(coeffs)
    for _ in range(count):
        out.append(sum(c))
        c = [i * c[i] for i in range(1, len(c))]
    return out


def dkp_wronskian_tau(g: Generator, frame: Frame, k: int, t: Sequence = ()):
    """det(f(1) | f'(1) | ... | f^(k-1)(1) | A E(t) W).

    ``f`` is the column vector of the product formula for k shifts.  Its
    entries are polynomials in x of degree at most k + dim H+, recovered
    exactly by interpolation and differentiated coefficientwise.
    """
    if k < 0:
        raise ValueError("the discrete variable k must be non-negative")
    exact, s, _, (t,) = _prepare(g, frame, t)
    _check_formula_inputs(g, exact, 1e-9)
    gg = g if exact else g.as_complex()
    u, v = rank_one_factors(gg)
    spp = s[g.split :, g.split :]
    w = _flowed(g, frame, t, ())
    aw = _a_matrix(s, g.split, v, k, exact) @ w
    if k == 0:
        return det(aw)
    degree = k + g.k
    one = Fraction(1) if exact else 1.0 + 0j
    samples = [_f_column(spp, u, j * one, k, exact) for j in range(degree + 1)]
    rows = len(samples[0])
    cols = np.empty((rows, k), dtype=aw.dtype)
    for r in range(rows):
        coeffs = _poly_coefficients([samples[j][r] for j in range(degree + 1)], exact)
        cols[r, :] = _derivatives_at_one(coeffs, k)
    return det(np.concatenate([cols, aw], axis=1))


# ---------------------------------------------------------------------------
# the KP field u = 2 d^2/dx^2 log tau
# ---------------------------------------------------------------------------

SINGULAR_REL_TOL = 1e-10


class FieldSingularityError(ArithmeticError):
    """tau vanishes (or changes sign) within the difference stencil."""


def _stencil_singular(vals: np.ndarray) -> np.ndarray:
    """Rows of three tau values that straddle or touch a zero."""
    mag = np.abs(vals)
    scale = mag.max(axis=-1)
    tiny = mag.min(axis=-1) <= SINGULAR_REL_TOL * np.where(scale > 0, scale, 1.0)
    real = np.abs(vals.imag) <= 1e-12 * np.where(scale > 0, scale, 1.0)[..., None]
    re = vals.real
    flips = np.all(real, axis=-1) & ((np.sign(re[..., 0]) != np.sign(re[..., 1])) | (np.sign(re[..., 1]) != np.sign(re[..., 2])))
    return tiny | flips | (scale == 0)


def _u_from_stencil(vals: np.ndarray, h: float) -> np.ndarray:
    logs = np.log(np.abs(vals))
    return 2.0 * (logs[..., 2] - 2.0 * logs[..., 1] + logs[..., 0]) / (h * h)


def field_u(tau: Callable[[list], complex], x: float, y: float = 0.0, tt: float = 0.0, h: float = 1e-3) -> float:
    """Central second difference of 2 log|tau| in t1 = x, with t2 = y, t3 = tt."""
    vals = np.array([[complex(tau([x + d, y, tt])) for d in (-h, 0.0, h)]])
    if _stencil_singular(vals)[0]:
        raise FieldSingularityError(f"tau vanishes near x={x}, y={y}, t={tt}")
    return float(_u_from_stencil(vals, h)[0])


@dataclass(frozen=True)
class GridSpec:
    x: tuple
    y: tuple
    t: tuple

    @staticmethod
    def _axis(text: str) -> tuple:
        parts = text.split(":")
        if len(parts) == 1:
            v = float(parts[0])
            return (v, v, 1.0)
        if len(parts) != 3:
            raise ValueError(f"axis must be 'start:stop:step', got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"axis {text!r} needs step > 0 and stop >= start")
        return (start, stop, step)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        axes = text.split(",")
        if len(axes) != 3:
            raise ValueError("grid must have three comma-separated axes x,y,t")
        return cls(*(cls._axis(a.strip()) for a in axes))

    @staticmethod
    def _points(axis: tuple) -> np.ndarray:
        start, stop, step = axis
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return start + step * np.arange(count)

    def points(self) -> np.ndarray:
        """(P, 3) array, x fastest-varying last: ordered by t, then y, then x."""
        xs, ys, ts = (self._points(a) for a in (self.x, self.y, self.t))
        tt, yy, xx = np.meshgrid(ts, ys, xs, indexing="ij")
        return np.stack([xx.ravel(), yy.ravel(), tt.ravel()], axis=1)


@dataclass(frozen=True)
class FieldGrid:
    spec: GridSpec
    points: np.ndarray
    u: np.ndarray
    singular: np.ndarray

    def to_csv(self) -> str:
        lines = ["x,y,t,u,singular"]
        for (x, y, t), u, s in zip(self.points, self.u, self.singular):
            uval = "nan" if s else f"{u:.12e}"
            lines.append(f"{x:.12g},{y:.12g},{t:.12g},{uval},{int(s)}")
        return "\n".join(lines) + "\n"


def sample_field(tau, spec: GridSpec, h: float = 1e-3, batch: Callable | None = None) -> FieldGrid:
    """field_u over a grid; singular samples carry u = nan.

    ``batch`` maps a (P, 3) array of times to P tau values and, when given,
    replaces the pointwise ``tau`` callable.
    """
    pts = spec.points()
    offsets = np.array([-h, 0.0, h])
    stencil = np.repeat(pts[:, None, :], 3, axis=1)
    stencil[:, :, 0] += offsets[None, :]
    flat = stencil.reshape(-1, 3)
    if batch is not None:
        vals = np.asarray(batch(flat), dtype=np.complex128)
    else:
        vals = np.array([complex(tau(list(p))) for p in flat], dtype=np.complex128)
    vals = vals.reshape(-1, 3)
    singular = _stencil_singular(vals)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = _u_from_stencil(vals, h)
    u = np.where(singular, np.nan, u)
    return FieldGrid(spec, pts, u, singular)
