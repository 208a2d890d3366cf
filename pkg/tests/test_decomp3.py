from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grasstau import sampling
from grasstau.decomp3 import (
    ParamPoint,
    _m_matrix,
    _vandermonde_block,
    build_L,
    decide_3term,
    is_decomposable_3term,
    residual_degree,
    three_term_residual,
)
from grasstau.exterior import Frame, PluckerVector, is_decomposable, plucker_coordinates
from grasstau.scalars import det, exact_array, identity

NONDECOMP = PluckerVector(2, 4, {(-2, -1): 1, (0, 1): 1})
ORACLE_PARAMS = ParamPoint((2, -1, 3), (1, 2, -3, 5))


def test_frozen_residual_against_sympy():
    # sympy gives 1/1920 for the true residual with det V1 = 1920; integer
    # scaling multiplies by det(V1)^(2k) = 1920^4
    assert three_term_residual(NONDECOMP, ORACLE_PARAMS).value == 1920**3


def test_lambdas_must_be_distinct():
    with pytest.raises(ValueError):
        ParamPoint((0, 0, 0), (1, 1, 2, 3))
    with pytest.raises(ValueError):
        ParamPoint((0,), (1, 2, 3))


def test_build_L_shape_and_alpha_zero():
    params = ParamPoint((0,) * 5, (1, -2, 3, 7))
    lmat = build_L(params, 3, 6)
    assert lmat.shape == (5, 6)
    # alpha = 0: L = M P, so the first n - k - 2 columns vanish
    m = _m_matrix(list(params.lams), 5)
    assert np.all(lmat[:, :1] == 0)
    assert np.all(lmat[:, 1:] == m)


def test_build_L_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        build_L(ParamPoint((0, 0), (1, 2, 3, 4)), 2, 4)
    with pytest.raises(ValueError):
        build_L(ParamPoint((0, 0), (1, 2, 3, 4)), 2, 3)


def test_m_inverts_block_matrix_exactly():
    for lams in [(1, 2, 3, 4), (F(1, 2), -3, F(7, 5), 11)]:
        size = 6
        nmat = exact_array(np.array(_vandermonde_block(lams, size), dtype=object))
        m = _m_matrix(list(lams), size)
        d1 = det(nmat[:4, :4])
        assert d1 != 0
        assert np.all(m @ nmat == d1 * identity(size, True))


def test_zero_and_small_points():
    params = ParamPoint.random(np.random.default_rng(0), 4)
    assert three_term_residual(PluckerVector(2, 4, {}), params).value == 0
    # k = 1 and n < k + 2 are always decomposable
    assert three_term_residual(PluckerVector.from_vector([1, 2, 3]), ParamPoint((0, 0), (1, 2, 3, 4))).value == 0


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(2, 4), (2, 5), (3, 5), (3, 6)]), st.integers(0, 2**32 - 1))
def test_decomposable_points_vanish_everywhere(shape, seed):
    k, n = shape
    rng = np.random.default_rng(seed)
    pv = plucker_coordinates(sampling.frame(rng, n, k))
    assert three_term_residual(pv, ParamPoint.random(rng, n)).value == 0


def test_nondecomposable_rejected_quickly():
    verdict = decide_3term(NONDECOMP, trials=3, seed=0)
    assert not verdict.decomposable
    assert verdict.first_failing_params is not None
    assert three_term_residual(NONDECOMP, verdict.first_failing_params).value != 0


def test_verdict_json():
    out = decide_3term(NONDECOMP, trials=5, seed=1).to_json()
    assert out["decomposable"] is False and out["trials"] == 5 and out["seed"] == 1
    assert len(out["first_failing_params"]["lambda"]) == 4
    assert "first_failing_params" not in decide_3term(PluckerVector.basis(2, 4, (0, 1))).to_json()


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        decide_3term(NONDECOMP, trials=0)


def test_residual_degree_bound():
    assert residual_degree(2) == 40
    assert residual_degree(3) == 66


def test_float_points():
    rng = np.random.default_rng(3)
    w = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
    assert is_decomposable_3term(plucker_coordinates(Frame(w)))
    pv = PluckerVector(2, 4, {(-2, -1): 1.0 + 0j, (0, 1): 1.0 + 0j})
    assert not is_decomposable_3term(pv)


def mixed_point(rng, k, n, decomposable):
    if decomposable:
        return plucker_coordinates(sampling.frame(rng, n, k))
    # sum of two generic decomposables is off the cone for these shapes
    a = plucker_coordinates(sampling.frame(rng, n, k))
    b = plucker_coordinates(sampling.frame(rng, n, k))
    return a + b


@pytest.mark.parametrize("k,n", [(2, 5), (3, 6)])
def test_agrees_with_plucker_test(k, n):
    rng = np.random.default_rng(k * 10 + n)
    for i in range(10):
        pv = mixed_point(rng, k, n, i % 2 == 0)
        assert is_decomposable_3term(pv, trials=5, seed=i) == is_decomposable(pv)
