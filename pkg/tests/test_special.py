import math
from fractions import Fraction as F

import numpy as np
import pytest

from grasstau import sampling
from grasstau.exterior import Frame
from grasstau.kp_flow import (
    Generator,
    add_times,
    conjugate_generator,
    hbde_terms,
    miwa_times,
    rank_s_plus_minus,
    relative_residual,
    tau_shifted,
    time_tau,
)
from grasstau.scalars import det, identity, rank
from grasstau.special import (
    CMData,
    FieldSingularityError,
    GridSpec,
    SolitonData,
    cm_frame,
    cm_gauge_exponent,
    cm_generator,
    cm_tau,
    cm_tau_shifted,
    dkp_tau,
    dkp_wronskian_tau,
    field_u,
    sample_field,
    soliton_generator,
    soliton_rank,
    soliton_tau,
    soliton_tau_batch,
    soliton_tau_shifted,
    wronskian_normalization,
)

ONE_SOLITON = SolitonData([0], [1], [1], [1])
# mpmath oracle (tests/oracles/compute_oracles.py), 40 digits
SOLITON2 = SolitonData([0.3, -0.7], [1.1, 0.5], [1, 2], [1.5, 0.5])
SOLITON2_TAU = -1.72638449809624534348756


# --------------------------------------------------------------------------- solitons


def test_one_soliton_value():
    assert soliton_tau(ONE_SOLITON, [1]) == pytest.approx(math.e + 1, rel=1e-15)
    assert soliton_tau(ONE_SOLITON, []) == pytest.approx(2)


def test_two_soliton_oracle():
    assert soliton_tau(SOLITON2, [0.4, -0.2, 0.1]).real == pytest.approx(SOLITON2_TAU, rel=1e-13)


def test_soliton_t0_is_det_x_plus_i():
    d = SolitonData.random(np.random.default_rng(0), 3)
    assert soliton_tau(d, [0, 0]) == pytest.approx(np.linalg.det(d.x_matrix() + np.eye(3)), rel=1e-12)


def test_soliton_collision_rejected():
    with pytest.raises(ValueError):
        SolitonData([1.0], [1.0], [1.0], [1.0])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_soliton_generator_cross_oracle(n):
    rng = np.random.default_rng(n)
    d = SolitonData.random(rng, n)
    g, fr = soliton_generator(d)
    assert soliton_rank(d) == 1 == rank_s_plus_minus(g)
    for _ in range(5):
        t = list(rng.uniform(-0.5, 0.5, 3))
        ref = soliton_tau(d, t)
        assert abs(time_tau(g, fr, t) - ref) <= 1e-9 * abs(ref)


def test_one_soliton_generator_entries():
    g, fr = soliton_generator(ONE_SOLITON)
    # Z = 1, Y = 0, X = 1: S = [[1, 0], [1, 0]], frame rows (1, 2)
    np.testing.assert_allclose(g.matrix, [[1, 0], [1, 0]])
    np.testing.assert_allclose(fr.matrix, [[1], [2]])


def test_soliton_miwa_closed_form_matches_flow():
    d = SolitonData.random(np.random.default_rng(4), 2)
    g, fr = soliton_generator(d)
    t = [0.2, -0.1, 0.05]
    for xs in ([0.3], [0.3, -0.2]):
        ref = soliton_tau_shifted(d, t, xs)
        assert abs(tau_shifted(g, fr, t, xs) - ref) <= 1e-10 * abs(ref)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_soliton_hbde(n):
    rng = np.random.default_rng(10 + n)
    d = SolitonData.random(rng, n)
    for _ in range(10):
        t = sampling.times(rng, 3, exact=False)
        lams = sampling.distinct_values(rng, 4, exact=False)
        assert relative_residual(hbde_terms(lambda xs: soliton_tau_shifted(d, t, xs), lams)) <= 1e-8


def test_soliton_batch_matches_pointwise():
    d = SolitonData.random(np.random.default_rng(5), 2)
    times = np.array([[0.1, 0.2, 0.3], [-1.0, 0.5, 0.0]])
    batch = soliton_tau_batch(d)(times)
    np.testing.assert_allclose(batch, [soliton_tau(d, list(t)) for t in times], rtol=1e-13)


# --------------------------------------------------------------------------- Calogero-Moser


def test_cm_scalar_closed_form():
    d = CMData([[5]], [[2]])
    assert cm_tau(d, [F(1), F(1)]) == 10
    for t1, t2 in [(F(3), F(-2)), (F(1, 3), F(5, 7))]:
        assert cm_tau(d, [t1, t2]) == 5 + t1 + 4 * t2


def test_cm_t0_is_det_x():
    d = CMData.random(np.random.default_rng(0), 3)
    assert cm_tau(d, []) == det(d.x)


def test_cm_rank_condition_enforced():
    with pytest.raises(ValueError):
        CMData(np.diag([1, 2]), np.diag([3, 4]))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cm_generator_rank_and_gauge(n):
    rng = np.random.default_rng(n)
    d = CMData.random(rng, n)
    assert rank(d.commutator()) == 1
    g = cm_generator(d)
    assert rank_s_plus_minus(g) == 1
    t = [0.1, -0.05, 0.02]
    ref = np.exp(complex(cm_gauge_exponent(d, t))) * complex(cm_tau(d, t))
    assert abs(time_tau(g.as_complex(), cm_frame(d), t) - ref) <= 1e-9 * abs(ref)


def test_cm_rank_invariant_under_conjugation():
    rng = np.random.default_rng(3)
    g = cm_generator(CMData.random(rng, 2))
    gmat = identity(4, True)
    gmat[0, 1], gmat[2, 3], gmat[1, 3] = F(3), F(-2), F(5)
    assert rank_s_plus_minus(conjugate_generator(g, gmat)[0]) == 1


def test_cm_shift_closed_form():
    d = CMData.random(np.random.default_rng(6), 2)
    t = [F(1), F(-1, 2)]
    x = F(1, 5)
    # truncated Miwa time series vs the resolvent closed form
    dc = CMData(np.array(d.x, dtype=complex), np.array(d.z, dtype=complex))
    approx = complex(cm_tau(dc, add_times(t, miwa_times(0.2, 60))))
    assert abs(complex(cm_tau_shifted(d, t, [x])) - approx) <= 1e-9 * abs(approx)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cm_hbde_exact(n):
    rng = np.random.default_rng(20 + n)
    d = CMData.random(rng, n)
    for _ in range(5):
        t = sampling.times(rng, 3)
        while True:
            lams = sampling.distinct_values(rng, 4)
            try:
                a, b, c = hbde_terms(lambda xs: cm_tau_shifted(d, t, xs), lams)
                break
            except ValueError:
                continue
        assert a - b + c == 0


def test_cm_degree_in_t1():
    d = CMData.random(np.random.default_rng(7), 3, conjugate=False)
    # tau(t1) = det(X + t1 I) is monic of degree n: n-th finite difference is n!
    vals = [cm_tau(d, [F(j)]) for j in range(5)]
    diffs = vals
    for _ in range(3):
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    assert diffs == [6, 6]


# --------------------------------------------------------------------------- dKP


def test_dkp_k0_and_ground():
    g = Generator.shift(5, 3)
    fr = sampling.frame(np.random.default_rng(0), 5, 2)
    assert dkp_tau(g, fr, 0, [F(1)]) == time_tau(g, fr, [F(1)])
    assert dkp_tau(g, Frame.basis(5, (0, 1)), 3, [F(2)]) == 1
    with pytest.raises(ValueError):
        dkp_tau(g, fr, -1)


def test_dkp_is_time_shift_by_k_units():
    rng = np.random.default_rng(1)
    g = Generator.shift(6, 3)
    for k in range(5):
        fr = sampling.frame(rng, 6, 3)
        t = sampling.times(rng, 3)
        shift = add_times(t, *[miwa_times(F(1), 6)] * k)
        assert dkp_tau(g, fr, k, t) == time_tau(g, fr, shift)


def test_dkp_wronskian_matches():
    rng = np.random.default_rng(2)
    for k in range(5):
        g = Generator.shift(6, 3) if k % 2 else sampling.nilpotent_rank_one_generator(rng, 5, 2)
        fr = sampling.frame(rng, g.n, g.k)
        t = sampling.times(rng, 2)
        assert wronskian_normalization(k) * dkp_wronskian_tau(g, fr, k, t) == dkp_tau(g, fr, k, t)


def test_dkp_wronskian_k0_is_det_of_flowed_frame():
    g = Generator.shift(5, 3)
    fr = sampling.frame(np.random.default_rng(3), 5, 2)
    assert dkp_wronskian_tau(g, fr, 0, [F(1, 2)]) == time_tau(g, fr, [F(1, 2)])


def test_dkp_wronskian_frame_mismatch():
    with pytest.raises(ValueError):
        dkp_wronskian_tau(Generator.shift(5, 3), Frame([[1], [0], [0], [0], [0]]), 2)


def test_wronskian_normalization_values():
    assert [wronskian_normalization(k) for k in range(5)] == [1, 1, -1, F(-1, 2), F(1, 12)]


# --------------------------------------------------------------------------- field


def test_one_soliton_field_profile():
    tau = lambda t: soliton_tau(ONE_SOLITON, t)
    assert field_u(tau, 0.0) == pytest.approx(0.5, abs=1e-5)
    for x in np.linspace(-10, 10, 41):
        exact = 2 * math.exp(x) / (1 + math.exp(x)) ** 2
        assert abs(field_u(tau, float(x)) - exact) <= 1e-5


def test_constant_tau_field_is_zero():
    assert field_u(lambda t: 1.0, 0.3, 0.1, 0.2) == 0.0


def test_cm_pole_is_flagged():
    d = CMData([[5]], [[2]])
    # tau = 5 + x near x = -5: u = -2/(x+5)^2 away from the pole
    assert field_u(lambda t: cm_tau(d, t), -3.0) == pytest.approx(-2 / 4, rel=1e-5)
    with pytest.raises(FieldSingularityError):
        field_u(lambda t: cm_tau(d, t), -5.0005)


def test_grid_single_point_matches_field_u():
    tau = lambda t: soliton_tau(ONE_SOLITON, t)
    grid = sample_field(tau, GridSpec.parse("0.7,0,0"))
    assert grid.u.shape == (1,)
    assert grid.u[0] == field_u(tau, 0.7)


def test_grid_y_independent_without_t2_dependence():
    # tau independent of t2, so every y row is the same
    grid = sample_field(lambda t: 1 + math.exp(t[0]), GridSpec.parse("-1:1:0.5,0:2:1,0"))
    u = grid.u.reshape(3, 5)
    assert np.all(u == u[0])


def test_grid_deterministic_and_batch_equivalent():
    spec = GridSpec.parse("-2:2:0.5,0:0.5:0.25,0")
    d = SolitonData.random(np.random.default_rng(8), 2)
    a = sample_field(lambda t: soliton_tau(d, t), spec)
    b = sample_field(None, spec, batch=soliton_tau_batch(d))
    assert a.to_csv() == sample_field(lambda t: soliton_tau(d, t), spec).to_csv()
    np.testing.assert_allclose(a.u, b.u, rtol=1e-9)


def test_grid_csv_header_and_sentinel():
    d = CMData([[5]], [[2]])
    csv = sample_field(lambda t: cm_tau(d, t), GridSpec.parse("-5:-4:1,0,0")).to_csv()
    lines = csv.splitlines()
    assert lines[0] == "x,y,t,u,singular"
    assert lines[1].endswith(",nan,1") and lines[2].endswith(",0")


def test_grid_parse_errors():
    with pytest.raises(ValueError):
        GridSpec.parse("0:1:0.1,0")
    with pytest.raises(ValueError):
        GridSpec.parse("1:0:0.1,0,0")
