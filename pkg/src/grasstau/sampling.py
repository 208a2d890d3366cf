"""Random test instances shared by the campaigns, the CLI and the test-suite."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exterior import Frame
from .kp_flow import Generator
from .scalars import exact_array, rank


def derived_seed(seed: int, trial: int) -> int:
    """Independent per-trial seed, stable across runs and platforms."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1)[0])


def rational(rng: np.random.Generator, bound: int = 5, den: int = 3) -> Fraction:
    return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, den + 1)))


def rational_matrix(rng: np.random.Generator, shape, bound: int = 5, den: int = 3) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    for pos in np.ndindex(*shape):
        out[pos] = rational(rng, bound, den)
    return out


def complex_matrix(rng: np.random.Generator, shape, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def frame(rng: np.random.Generator, n: int, k: int, exact: bool = True) -> Frame:
    """Full-rank n x k frame."""
    while True:
        m = rational_matrix(rng, (n, k)) if exact else complex_matrix(rng, (n, k))
        if rank(m) == k:
            return Frame(m)


def distinct_values(rng: np.random.Generator, count: int, exact: bool = True, avoid=(0,)) -> list:
    """Pairwise distinct rationals (or complex numbers of modulus about 1)."""
    out: list = []
    while len(out) < count:
        v = rational(rng, 9, 4) if exact else complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if v not in out and v not in avoid:
            out.append(v)
    return out


def times(rng: np.random.Generator, length: int, exact: bool = True, scale: float = 0.3) -> list:
    if exact:
        return [rational(rng, 3, 3) for _ in range(length)]
    return [complex(v) for v in scale * rng.standard_normal(length)]


def _with_lower_left(rng, n: int, split: int, block: np.ndarray, exact: bool, lower_pp: bool) -> Generator:
    s = rational_matrix(rng, (n, n)) if exact else complex_matrix(rng, (n, n))
    s[split:, :split] = block
    if lower_pp:
        pp = s[split:, split:]
        pp[np.triu_indices(n - split, 1)] = Fraction(0) if exact else 0
    return Generator(s, split)


def rank_one_generator(
    rng: np.random.Generator, n: int, split: int, exact: bool = True, lower_pp: bool = False, scale: float = 1.0
) -> Generator:
    """Random S whose block S+- = u v^T has rank exactly one."""
    k = n - split
    while True:
        if exact:
            u, v = rational_matrix(rng, (k, 1)), rational_matrix(rng, (1, split))
        else:
            u, v = complex_matrix(rng, (k, 1)), complex_matrix(rng, (1, split))
        if rank(u @ v) == 1:
            break
    g = _with_lower_left(rng, n, split, u @ v, exact, lower_pp)
    if not exact and scale != 1.0:
        g = Generator(scale * g.matrix, split)
    return g


def rank_two_generator(rng: np.random.Generator, n: int, split: int, exact: bool = True) -> Generator:
    k = n - split
    if min(k, split) < 2:
        raise ValueError("rank two needs both blocks of size at least two")
    while True:
        block = rational_matrix(rng, (k, 2)) @ rational_matrix(rng, (2, split))
        if rank(block) == 2:
            return _with_lower_left(rng, n, split, block, exact, False)


def nilpotent_rank_one_generator(rng: np.random.Generator, n: int, split: int) -> Generator:
    """Strictly lower-triangular rational S (nilpotent) with rank(S+-) <= 1."""
    k = n - split
    s = rational_matrix(rng, (n, n))
    s[np.triu_indices(n)] = Fraction(0)
    u, v = rational_matrix(rng, (k, 1)), rational_matrix(rng, (1, split))
    s[split:, :split] = u @ v
    return Generator(exact_array(s), split)
