"""Zero- and one-dimensional transverse-field Ising models.

0D: ``-beta H = x sigma^x + z sigma^z`` with ``x = beta Gamma``, ``z = beta h``.
1D: ``-beta H = theta sum sz_i sz_i+1 + x sum sx_i`` with ``theta = beta J``,
``x = beta Gamma``; the thermodynamic-limit potential per site is a
quadrature over the fermion momentum ``k``.

Unless noted, functions take ``convention="massieu"`` (``ln Z``) or
``"scaled"`` (``ln Z / beta``). Curvatures in the scaled convention carry
units of inverse energy and equal ``beta`` times the Massieu value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import reduce
from typing import Optional

import numpy as np

from .asymptotics import LowTempExpansion, coefficient_C
from .errors import DivergenceError, DomainError, SingularLocusError, ValidationError
from .expfamily import ExpFamilyModel, ModelPoint, check_convention, log_partition
from .geometry import (
    CubicTensor,
    CurvatureReport,
    MetricTensor,
    cubic_fd,
    cubic_from_metric,
    metric_spectral,
    scalar_curvature,
)
from .special import elliptic_KE, integrate

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])

# Taylor coefficients of the 0D Massieu curvature in r^2
_R0D_SERIES = (4 / 9, 16 / 135, 16 / 1575, 32 / 42525, 464 / 49116375)
_R0D_SERIES_RADIUS = 0.02


def _scale(convention: str, beta: float) -> float:
    return 1.0 if check_convention(convention) == "massieu" else 1.0 / beta


def ln2cosh(w):
    """``ln(2 cosh w)`` without overflow."""
    w = np.abs(w)
    return w + np.log1p(np.exp(-2.0 * w))


# ---------------------------------------------------------------- 0D model


@dataclass(frozen=True)
class Tfim0dParams:
    beta: float
    Gamma: float
    h: float = 0.0

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValidationError(f"beta must be positive, got {self.beta}")
        if self.Gamma < 0 or self.h < 0:
            raise ValidationError("Gamma and h must be non-negative")

    @property
    def x(self) -> float:
        return self.beta * self.Gamma

    @property
    def z(self) -> float:
        return self.beta * self.h

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.z)


def tfim0d_model() -> ExpFamilyModel:
    return ExpFamilyModel((SIGMA_X, SIGMA_Z), ("x", "z"))


def tfim0d_point(p: Tfim0dParams) -> ModelPoint:
    return ModelPoint((p.x, p.z), p.beta)


def psi_0d(p: Tfim0dParams, convention: str = "massieu") -> float:
    return float(ln2cosh(p.r)) * _scale(convention, p.beta)


def metric_0d_closed(p: Tfim0dParams, convention: str = "massieu") -> MetricTensor:
    """Closed-form 0D metric, split into the ``sech^2`` (classical) and ``tanh`` (quantum) parts."""
    s = _scale(convention, p.beta)
    x, z, r = p.x, p.z, p.r
    if r == 0.0:
        return MetricTensor(s * np.eye(2), convention, np.zeros((2, 2)), s * np.eye(2))
    t = math.tanh(r)
    sech2 = 1.0 / math.cosh(r) ** 2 if r < 350 else 0.0
    unit = np.array([x, z]) / r
    perp = np.array([[z * z, -x * z], [-x * z, x * x]]) / r ** 3
    gc = sech2 * np.outer(unit, unit)
    gq = t * perp
    return MetricTensor(s * (gc + gq), convention, s * gc, s * gq)


def cubic_0d_closed(p: Tfim0dParams, convention: str = "massieu") -> CubicTensor:
    s = _scale(convention, p.beta)
    x, z, r = p.x, p.z, p.r
    out = np.zeros((2, 2, 2))
    if r == 0.0:
        return CubicTensor(out, convention)
    t = math.tanh(r)
    sech2 = 1.0 / math.cosh(r) ** 2 if r < 350 else 0.0
    xxx = -3 * z * z * x * r ** -5 * t + x * r ** -4 * (3 * z * z - 2 * x * x * r * t) * sech2
    xxz = -z * r ** -5 * (r * r - 3 * x * x) * t + z * r ** -4 * (r * r - 3 * x * x - 2 * x * x * r * t) * sech2
    xzz = -x * r ** -5 * (r * r - 3 * z * z) * t + x * r ** -4 * (r * r - 3 * z * z - 2 * z * z * r * t) * sech2
    zzz = -3 * x * x * z * r ** -5 * t + z * r ** -4 * (3 * x * x - 2 * z * z * r * t) * sech2
    out[0, 0, 0] = xxx
    out[0, 0, 1] = out[0, 1, 0] = out[1, 0, 0] = xxz
    out[0, 1, 1] = out[1, 0, 1] = out[1, 1, 0] = xzz
    out[1, 1, 1] = zzz
    return CubicTensor(s * out, convention)


def detg_0d_closed(p: Tfim0dParams, convention: str = "massieu") -> float:
    r = p.r
    s = _scale(convention, p.beta)
    if r == 0.0:
        return s * s
    return s * s * math.tanh(r) / (r * math.cosh(r) ** 2)


def curvature_0d(p: Tfim0dParams, convention: str = "scaled") -> float:
    """Closed-form scalar curvature of the 0D model (scaled convention by default).

    A Taylor series replaces the closed form for small ``r``, where the two
    terms cancel to leading order; ``r = 0`` gives the limit 0.
    """
    r = p.r
    if r < _R0D_SERIES_RADIUS:
        r2 = r * r
        value = sum(c * r2 ** (k + 1) for k, c in enumerate(_R0D_SERIES))
    else:
        t = math.tanh(r)
        value = (2 * r - t) / (2 * r * r * t) * math.cosh(r) ** 2 - (1 + t * t) / (2 * t * t)
    return value / _scale(convention, p.beta)


def riemann_0d_closed(p: Tfim0dParams, convention: str = "scaled") -> float:
    """Closed-form ``R_xzxz`` of the 0D model."""
    r = p.r
    if r == 0.0:
        return 0.0
    t = math.tanh(r)
    value = (2 * r - t) / (4 * r ** 3) - (1 + t * t) / (4 * r * t * math.cosh(r) ** 2)
    return value * _scale(convention, p.beta)


def C_0d(h: float, Gamma: float) -> float:
    return 1.0 / (4.0 * math.hypot(h, Gamma))


def susceptibility_0d(p: Tfim0dParams) -> float:
    """Longitudinal susceptibility at ``h = 0``: ``tanh(beta Gamma) / Gamma``."""
    if p.h != 0.0:
        raise ValidationError("the susceptibility closed form holds at h = 0 only")
    if p.Gamma == 0.0:
        raise DivergenceError("susceptibility diverges at the critical point Gamma = 0")
    return math.tanh(p.x) / p.Gamma


# ---------------------------------------------------------------- 1D model


@dataclass(frozen=True)
class Tfim1dParams:
    beta: float
    J: float
    Gamma: float

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValidationError(f"beta must be positive, got {self.beta}")
        if not (self.J > 0 and self.Gamma > 0):
            raise ValidationError("J and Gamma must be positive")

    @property
    def theta(self) -> float:
        return self.beta * self.J

    @property
    def x(self) -> float:
        return self.beta * self.Gamma

    @property
    def g_ratio(self) -> float:
        return self.Gamma / self.J

    @property
    def m(self) -> float:
        return 4.0 * self.theta * self.x / (self.theta + self.x) ** 2

    @property
    def beta_delta(self) -> float:
        return 2.0 * abs(self.theta - self.x)

    @property
    def eps1d(self) -> float:
        return math.exp(-self.beta_delta)

    @classmethod
    def from_canonical(cls, theta: float, x: float, beta: float = 1.0) -> Tfim1dParams:
        return cls(beta, theta / beta, x / beta)


def _omega(theta, x, k):
    return np.sqrt(np.maximum(theta * theta + x * x + 2.0 * theta * x * np.cos(k), 0.0))


def psi_1d(p: Tfim1dParams, quad_tol: float = 1e-10, convention: str = "massieu") -> float:
    """Thermodynamic-limit potential per site, ``(1/pi) int_0^pi ln 2cosh(omega_k) dk``."""
    theta, x = p.theta, p.x
    res = integrate(lambda k: ln2cosh(_omega(theta, x, k)) / np.pi, 0.0, np.pi, tol=quad_tol)
    return float(res.value) * _scale(convention, p.beta)


def metric_1d(theta: float, x: float, quad_tol: float = 1e-12) -> np.ndarray:
    """Massieu metric per site in ``(theta, x)`` from the differentiated integrand.

    With ``omega_k`` the mode energy, the integrand of ``d_i d_j psi`` is
    ``sech^2(omega) omega_i omega_j + tanh(omega) omega_ij``, and
    ``omega_ij = S_ij sin^2 k / omega^3`` with ``S = [[x^2, -theta x], [-theta x, theta^2]]``.
    """
    if not (theta > 0 and x > 0):
        raise DomainError(f"1D canonical parameters must be positive, got ({theta}, {x})")

    def integrand(k):
        w = _omega(theta, x, k)
        c = np.cos(k)
        wt = (theta + x * c) / w
        wx = (x + theta * c) / w
        e2 = np.exp(-2.0 * w)
        sech2 = 4.0 * e2 / (1.0 + e2) ** 2
        tanh_over_w = np.where(w > 1e-8, np.tanh(w) / np.where(w > 1e-8, w, 1.0), 1.0)
        curv = tanh_over_w * np.sin(k) ** 2 / (w * w)
        return np.stack([
            sech2 * wt * wt + curv * x * x,
            sech2 * wt * wx - curv * theta * x,
            sech2 * wx * wx + curv * theta * theta,
        ]) / np.pi

    res = integrate(integrand, 0.0, np.pi, tol=quad_tol)
    gtt, gtx, gxx = res.value
    return np.array([[gtt, gtx], [gtx, gxx]])


def geometry_1d(p: Tfim1dParams, quad_tol: float = 1e-12, convention: str = "massieu",
                richardson: bool = False) -> tuple[MetricTensor, CubicTensor, CurvatureReport]:
    """Metric, cubic tensor (FD of the quadrature metric) and curvature of the 1D chain."""
    s = _scale(convention, p.beta)
    metric = MetricTensor(s * metric_1d(p.theta, p.x, quad_tol), convention)
    cubic = cubic_from_metric(lambda t: s * metric_1d(t[0], t[1], quad_tol), (p.theta, p.x),
                              convention, richardson=richardson)
    return metric, cubic, scalar_curvature(metric, cubic)


def _elliptic_parts(theta: float, x: float):
    if theta == x:
        raise SingularLocusError("the zero-temperature elliptic forms are singular on the critical line theta = x")
    m = 4.0 * theta * x / (theta + x) ** 2
    pair = elliptic_KE(m)
    return pair.K, pair.E


def zero_T_metric_1d(theta: float, x: float) -> np.ndarray:
    """Zero-temperature quantum metric ``gq0`` of the 1D chain (Massieu, per site)."""
    K, E = _elliptic_parts(theta, x)
    a = ((x * x + theta * theta) * K - (x + theta) ** 2 * E) / (math.pi * (x + theta))
    return a * np.array([[1 / theta ** 2, -1 / (theta * x)], [-1 / (theta * x), 1 / x ** 2]])


def zero_T_cubic_1d(theta: float, x: float) -> np.ndarray:
    """``d_k gq0_ij`` of the 1D chain from the elliptic closed forms."""
    K, E = _elliptic_parts(theta, x)
    pi = math.pi
    ttt = (2 * x * x - theta ** 2) * E / (pi * theta ** 3 * (x - theta)) - (2 * x * x + theta ** 2) * K / (pi * theta ** 3 * (x + theta))
    ttx = x * K / (pi * theta ** 2 * (theta + x)) + x * E / (pi * theta ** 2 * (theta - x))
    txx = theta * K / (pi * x ** 2 * (theta + x)) + theta * E / (pi * x ** 2 * (x - theta))
    xxx = (2 * theta ** 2 - x * x) * E / (pi * x ** 3 * (theta - x)) - (2 * theta ** 2 + x * x) * K / (pi * x ** 3 * (x + theta))
    out = np.empty((2, 2, 2))
    out[0, 0, 0] = ttt
    out[0, 0, 1] = out[0, 1, 0] = out[1, 0, 0] = ttx
    out[0, 1, 1] = out[1, 0, 1] = out[1, 1, 0] = txx
    out[1, 1, 1] = xxx
    return out


def zero_T_elliptic_1d(p: Tfim1dParams) -> LowTempExpansion:
    """Low-temperature expansion of the 1D chain from the elliptic closed forms.

    The gap gradient is ``d = 2 sign(theta - x) (1, -1)``, giving
    ``gc1 = [[4, -4], [-4, 4]]``; on the disordered side (``x > theta``)
    the classical cubic entries are ``(+8, -8, +8, -8)``.
    """
    theta, x = p.theta, p.x
    gq0 = zero_T_metric_1d(theta, x)
    psiq0 = zero_T_cubic_1d(theta, x)
    d = 2.0 * math.copysign(1.0, theta - x) * np.array([1.0, -1.0])
    exp = LowTempExpansion(
        delta=2.0 * abs(p.J - p.Gamma),
        epsilon=p.eps1d,
        gq0=gq0,
        gc1=np.einsum("i,j->ij", d, d),
        psiq0=psiq0,
        psic1=-np.einsum("i,j,k->ijk", d, d, d),
        beta=p.beta,
    )
    return replace(exp, C=coefficient_C(exp))


def C_1d(J: float, g: float) -> float:
    if g == 1.0:
        raise DivergenceError("C_1D diverges at the critical point g = 1")
    return 1.0 / (4.0 * J * abs(1.0 - g))


def detg_lowT_1d(p: Tfim1dParams, convention: str = "scaled") -> float:
    """Leading low-temperature determinant of the 1D metric (scaled convention by default)."""
    theta, x = p.theta, p.x
    K, E = _elliptic_parts(theta, x)
    a = ((x * x + theta * theta) * K - (x + theta) ** 2 * E) / (math.pi * theta ** 2 * x ** 2 * (x + theta))
    massieu = 4.0 * a * (x - theta) ** 2 * p.eps1d
    s = _scale(convention, p.beta)
    return massieu * s * s


@dataclass(frozen=True)
class LowTCurvature1d:
    leading: float
    with_extra_term: float
    ratio: float
    beta_delta: float


def curvature_lowT_1d(p: Tfim1dParams, convention: str = "scaled") -> LowTCurvature1d:
    """Asymptotic 1D curvature, with and without the ``-1`` correction in the numerator.

    ``leading = exp(2|theta-x|) / (4|J - Gamma|)``; the alternative keeps
    the subleading determinant and equals
    ``beta (2|theta-x| - 1) / (8 |theta-x|^2) exp(2|theta-x|)``.
    """
    gap = abs(p.theta - p.x)
    if gap == 0.0:
        raise SingularLocusError("low-temperature curvature is singular on the critical line theta = x")
    s = 1.0 if check_convention(convention) == "scaled" else 1.0 / p.beta
    growth = math.exp(2.0 * gap)
    leading = s * p.beta * growth / (4.0 * gap)
    alt = s * p.beta * (2.0 * gap - 1.0) / (8.0 * gap * gap) * growth
    return LowTCurvature1d(leading, alt, alt / leading, 2.0 * gap)


# ---------------------------------------------------------------- finite chain


def _site_op(n_sites: int, site: int, op: np.ndarray) -> np.ndarray:
    eye = np.eye(2)
    return reduce(np.kron, [op if j == site else eye for j in range(n_sites)])


def tfim1d_chain_model(n_sites: int) -> ExpFamilyModel:
    """Periodic chain with observables ``sum sz_i sz_i+1`` and ``sum sx_i``."""
    if not (2 <= n_sites <= 12):
        raise ValidationError(f"finite chain needs 2 <= N <= 12, got {n_sites}")
    zz = sum(_site_op(n_sites, i, SIGMA_Z) @ _site_op(n_sites, (i + 1) % n_sites, SIGMA_Z) for i in range(n_sites))
    xs = sum(_site_op(n_sites, i, SIGMA_X) for i in range(n_sites))
    return ExpFamilyModel((zz, xs), ("theta", "x"))


@dataclass(frozen=True)
class FiniteChainResult:
    n_sites: int
    model: ExpFamilyModel
    point: ModelPoint
    psi_per_site: float
    metric: Optional[MetricTensor] = None
    cubic: Optional[CubicTensor] = None
    curvature: Optional[CurvatureReport] = None


def finite_chain_oracle(n_sites: int, p: Tfim1dParams, geometry: bool = False,
                        convention: str = "massieu") -> FiniteChainResult:
    """Exact diagonalisation of a periodic ``N``-site chain, per-site quantities.

    With ``geometry`` the metric and cubic tensor of ``ln Z / N`` and the
    resulting curvature are evaluated through the generic pipeline.
    """
    model = tfim1d_chain_model(n_sites)
    point = ModelPoint((p.theta, p.x), p.beta)
    s = _scale(convention, p.beta)
    psi = log_partition(model, point).psi_massieu / n_sites * s
    if not geometry:
        return FiniteChainResult(n_sites, model, point, psi)
    full = metric_spectral(model, point, convention)
    metric = MetricTensor(full.g / n_sites, convention, full.g_classical / n_sites, full.g_quantum / n_sites,
                          full.degenerate_spectrum)
    raw = cubic_fd(model, point, convention)
    cubic = CubicTensor(raw.psi3 / n_sites, convention, raw.fd_step, raw.symmetry_residual / n_sites)
    return FiniteChainResult(n_sites, model, point, psi, metric, cubic, scalar_curvature(metric, cubic))
