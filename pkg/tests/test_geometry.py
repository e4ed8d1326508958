import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qig.errors import DegenerateMetricError, DomainError, ValidationError
from qig.expfamily import ExpFamilyModel, ModelPoint
from qig.geometry import (
    CubicTensor,
    MetricTensor,
    christoffel,
    cubic_fd,
    cubic_from_metric,
    curvature,
    metric_integral,
    metric_spectral,
    riemann,
    scalar_curvature,
)
from qig.tfim import Tfim0dParams, curvature_0d, riemann_0d_closed, tfim0d_model, tfim0d_point
from qig.verify import random_family


def _psi_hessian(model, point, h=1e-4):
    from qig.expfamily import log_partition

    n = model.n
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            f = lambda a, b: log_partition(model, point.shifted(i, a).shifted(j, b)).psi_massieu
            out[i, j] = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)
    return out


def test_metric_is_hessian_of_psi(family):
    model, point = family
    assert np.allclose(metric_spectral(model, point).g, _psi_hessian(model, point), atol=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 5), st.integers(1, 3))
def test_spectral_matches_integral(seed, dim, n):
    model, point = random_family(np.random.default_rng(seed), dim, n)
    a = metric_spectral(model, point).g
    b = metric_integral(model, point).g
    assert np.max(np.abs(a - b)) < 1e-9


def test_metric_positive_definite_and_split(family):
    m = metric_spectral(*family)
    assert np.all(np.linalg.eigvalsh(m.g) > 0)
    assert np.allclose(m.g, m.g_classical + m.g_quantum)
    assert np.all(np.linalg.eigvalsh(m.g_quantum) >= -1e-14)


def test_degenerate_levels_use_limit():
    # theta = 0: fully degenerate spectrum, metric is the plain covariance
    model = tfim0d_model()
    m = metric_spectral(model, ModelPoint((0.0, 0.0)))
    assert m.degenerate_spectrum
    assert np.allclose(m.g, np.eye(2))


def test_commuting_family_is_classical():
    model = ExpFamilyModel((np.diag([1.0, 0.0, -1.0]), np.diag([0.0, 1.0, 2.0])))
    m = metric_spectral(model, ModelPoint((0.3, -0.2)))
    assert np.allclose(m.g_quantum, 0.0)


def test_scaled_convention():
    model, point = tfim0d_model(), ModelPoint((0.6, 0.8), beta=4.0)
    gm = metric_spectral(model, point).g
    gs = metric_spectral(model, point, "scaled").g
    assert np.allclose(gs, gm / 4.0)
    _, _, rm = curvature(model, point)
    _, _, rs = curvature(model, point, "scaled")
    assert rs.scalar == pytest.approx(4.0 * rm.scalar, rel=1e-10)


def test_cubic_is_symmetric(family):
    c = cubic_fd(*family)
    t = c.psi3
    for perm in [(1, 0, 2), (0, 2, 1), (2, 1, 0)]:
        assert np.allclose(t, t.transpose(perm))
    assert c.symmetry_residual < 1e-6


def test_richardson_improves_cubic():
    p = Tfim0dParams(1.0, 0.6, 0.8)
    from qig.tfim import cubic_0d_closed

    ref = cubic_0d_closed(p).psi3
    plain = cubic_fd(tfim0d_model(), tfim0d_point(p)).psi3
    rich = cubic_fd(tfim0d_model(), tfim0d_point(p), richardson=True).psi3
    assert np.max(np.abs(rich - ref)) < 1e-8
    assert np.max(np.abs(plain - ref)) < 1e-8


def test_cubic_stencil_leaving_domain():
    def g(theta):
        if theta[0] < 1.0:
            raise DomainError("outside")
        return np.eye(1)

    with pytest.raises(DomainError, match="stencil"):
        cubic_from_metric(g, (1.0,))


def test_flat_metric_has_zero_curvature():
    metric = MetricTensor(np.eye(3))
    cubic = CubicTensor(np.zeros((3, 3, 3)))
    assert np.allclose(riemann(metric, cubic), 0.0)
    assert scalar_curvature(metric, cubic).scalar == 0.0
    assert np.allclose(christoffel(cubic), 0.0)


def test_riemann_symmetries(family):
    metric, cubic, _ = curvature(*family)
    r = riemann(metric, cubic)
    assert np.allclose(r, -r.transpose(1, 0, 2, 3))
    assert np.allclose(r, -r.transpose(0, 1, 3, 2))
    assert np.allclose(r, r.transpose(2, 3, 0, 1))


def test_two_curvature_routes_agree(family):
    _, _, rep = curvature(*family)
    assert rep.scalar == pytest.approx(rep.contraction, rel=1e-10)
    assert rep.scalar == pytest.approx(2 * rep.R1212 / rep.detg, rel=1e-10)


def test_general_n_contraction(rng):
    model, point = random_family(rng, dim=4, n=3)
    _, _, rep = curvature(model, point)
    assert np.isnan(rep.F)
    assert np.isfinite(rep.scalar) and rep.scalar == rep.contraction


def test_0d_values_at_unit_radius():
    p = Tfim0dParams(1.0, 0.6, 0.8)
    _, _, rep = curvature(tfim0d_model(), tfim0d_point(p))
    assert rep.scalar == pytest.approx(curvature_0d(p), rel=1e-8)
    assert rep.R1212 == pytest.approx(riemann_0d_closed(p), rel=1e-8)
    assert rep.scalar == pytest.approx(0.5738857, abs=1e-7)
    assert rep.R1212 == pytest.approx(0.0917787, abs=1e-7)


def test_degenerate_metric_raises():
    metric = MetricTensor(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(DegenerateMetricError) as info:
        scalar_curvature(metric, CubicTensor(np.zeros((2, 2, 2))))
    assert info.value.det == pytest.approx(0.0)


def test_convention_mismatch():
    with pytest.raises(ValidationError):
        riemann(MetricTensor(np.eye(2), "massieu"), CubicTensor(np.zeros((2, 2, 2)), "scaled"))
