import math

import numpy as np
import pytest

from qig.asymptotics import (
    classical_flatness_det,
    coefficient_C,
    first_order_classical,
    fit_exponent,
    gap_gradient,
    low_temp_expansion,
    lowT_numerator,
    predict_R_lowT,
    zero_T_constraints,
    zero_T_cubic,
    zero_T_quantum_metric,
)
from qig.errors import DegeneracyError, ValidationError
from qig.expfamily import ExpFamilyModel, ModelPoint
from qig.geometry import curvature, metric_spectral
from qig.tfim import C_0d, Tfim0dParams, tfim0d_model, tfim0d_point
from qig.verify import random_family


def test_gq0_is_hessian_of_ground_level(family):
    model, point = family
    from qig.expfamily import eigen_data

    def e0(theta):
        return eigen_data(model, ModelPoint(theta)).decomp.eigenvalues[0]

    h = 1e-4
    th = np.array(point.theta)
    hess = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            ei, ej = np.eye(2)[i] * h, np.eye(2)[j] * h
            hess[i, j] = (e0(th + ei + ej) - e0(th + ei - ej) - e0(th - ei + ej) + e0(th - ei - ej)) / (4 * h * h)
    assert np.allclose(zero_T_quantum_metric(model, point), hess, atol=1e-6)


def test_gq0_homogeneous_degree_minus_one(family):
    model, point = family
    g1 = zero_T_quantum_metric(model, point)
    g3 = zero_T_quantum_metric(model, ModelPoint(tuple(3 * t for t in point.theta)))
    assert np.allclose(g3, g1 / 3)


def test_gap_gradient_and_classical_pieces():
    p = Tfim0dParams(1.0, 0.6, 0.8)
    d = gap_gradient(tfim0d_model(), tfim0d_point(p))
    assert np.allclose(d, [1.2, 1.6])
    gc1, psic1 = first_order_classical(tfim0d_model(), tfim0d_point(p))
    assert np.allclose(gc1, np.outer(d, d))
    assert np.allclose(psic1, -np.einsum("i,j,k->ijk", d, d, d))


def test_classical_correction_matches_metric_at_low_T():
    # g - gq0 approaches gc1 * eps as beta Delta grows
    model = tfim0d_model()
    for r in (6.0, 9.0):
        point = ModelPoint((0.6 * r, 0.8 * r))
        exp = low_temp_expansion(model, point)
        g = metric_spectral(model, point).g
        resid = (g - exp.gq0) / exp.epsilon
        assert np.allclose(resid, exp.gc1, rtol=5 / r, atol=0.5)


@pytest.mark.parametrize("h,gamma", [(0.8, 0.6), (0.1, 1.7), (1.3, 0.05)])
def test_C_0d_assembly(h, gamma):
    exp = low_temp_expansion(tfim0d_model(), tfim0d_point(Tfim0dParams(1.0, gamma, h)))
    assert exp.C == pytest.approx(C_0d(h, gamma), rel=1e-8)


def test_dropped_term_is_order_one_over_beta_delta():
    exp = low_temp_expansion(tfim0d_model(), ModelPoint((6.0, 8.0)))
    base = lowT_numerator(exp)
    extra = lowT_numerator(exp, include_dropped_term=True) - base
    assert extra / base == pytest.approx(-1 / exp.beta_delta, rel=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_ratio_to_asymptote_increases_toward_one(seed):
    # beta Delta is degree-1 homogeneous in theta; stay below ~20 where the
    # finite-difference cubic still resolves the eps-sized classical part
    model, point = random_family(np.random.default_rng(seed))
    unit = np.array(point.theta) / np.linalg.norm(point.theta)
    bd1 = low_temp_expansion(model, ModelPoint(tuple(unit))).beta_delta
    ratios = []
    for target in (6.0, 10.0, 15.0, 20.0):
        pt = ModelPoint(tuple(unit * target / bd1))
        exp = low_temp_expansion(model, pt)
        _, _, rep = curvature(model, pt)
        ratios.append(rep.scalar / (exp.C * math.exp(exp.beta_delta)))
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert 0.5 < ratios[0] < ratios[-1] < 1.0


def test_0d_prediction_over_approaches():
    model = tfim0d_model()
    devs = []
    for bd in (5.0, 8.0, 12.0):
        pt = ModelPoint((0.3 * bd, 0.4 * bd))
        exp = low_temp_expansion(model, pt)
        _, _, rep = curvature(model, pt)
        pred = predict_R_lowT(exp.C, exp.beta, exp.delta)
        assert pred.beta_delta == pytest.approx(bd)
        devs.append(pred.value / rep.scalar - 1)
    assert all(d > 0 for d in devs)
    assert devs[0] > devs[1] > devs[2]


def test_classical_flatness(family):
    exp = low_temp_expansion(*family)
    scale = np.abs(exp.gc1).max() * np.abs(exp.psic1).max() ** 2
    assert abs(classical_flatness_det(exp)) < 1e-14 * scale


def test_constraints(family):
    rep = zero_T_constraints(*family)
    assert rep.offdiag_residual < 1e-10
    assert rep.euler_residual < 1e-6


def test_zero_T_cubic_euler_identity(family):
    model, point = family
    t = zero_T_cubic(model, point)
    g = zero_T_quantum_metric(model, point)
    assert np.allclose(np.tensordot(t, point.theta, axes=([2], [0])), -g, atol=1e-6)


def test_degenerate_ground_state():
    model = ExpFamilyModel((np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 0.0, 1.0])))
    with pytest.raises(DegeneracyError):
        low_temp_expansion(model, ModelPoint((1.0, 0.0)))


def test_n_must_be_two():
    model, point = random_family(np.random.default_rng(1), 3, 3)
    with pytest.raises(ValidationError):
        low_temp_expansion(model, point)


def test_predict_overflow_guard():
    pred = predict_R_lowT(0.25, 1.0, 1000.0)
    assert pred.value is None
    assert pred.log_value == pytest.approx(math.log(0.25) + 1000)
    assert predict_R_lowT(0.25, 1.0, 2.0).value == pytest.approx(0.25 * math.e ** 2)
    assert not predict_R_lowT(1.0, 1.0, 2.0).valid
    assert predict_R_lowT(0.25, 3.0, 0.0).value == 0.25


def test_fit_exponent_recovers_power_law():
    x = np.geomspace(0.01, 1, 8)
    fit = fit_exponent(list(zip(x, 3.0 * x ** -1.5)))
    assert fit.exponent == pytest.approx(1.5, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.window == pytest.approx((0.01, 1.0))


@pytest.mark.parametrize("samples", [[(1, 1)] * 4, [(1, 1), (2, -1), (3, 1), (4, 1), (5, 1)]])
def test_fit_exponent_validation(samples):
    with pytest.raises(ValidationError):
        fit_exponent(samples)


def test_coefficient_C_units():
    pt = tfim0d_point(Tfim0dParams(2.0, 0.6, 0.8))
    exp = low_temp_expansion(tfim0d_model(), pt)
    assert coefficient_C(exp) == pytest.approx(C_0d(0.8, 0.6), rel=1e-8)
