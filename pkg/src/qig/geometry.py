"""BKM metric, cubic tensor, Christoffel symbols and curvature of Hessian metrics.

The metric of an exponential family in canonical coordinates is the Hessian
of its potential, so the Christoffel symbols are half the third derivatives
and the Riemann tensor needs no fourth derivatives. Curvature signs follow
the convention in which a sphere has negative scalar curvature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import DegenerateMetricError, DomainError, ValidationError
from .expfamily import ExpFamilyModel, ModelPoint, check_convention, eigen_data
from .special import integrate

FD_SCALE = np.finfo(float).eps ** (1.0 / 3.0)
DET_RTOL = 1e-14


@dataclass(frozen=True)
class MetricTensor:
    """Symmetric metric with optional classical/quantum split.

    ``g_classical`` and ``g_quantum`` are ``None`` for metrics computed
    without an energy eigenbasis (u-integral oracle, 1D quadrature).
    """

    g: np.ndarray
    convention: str = "massieu"
    g_classical: Optional[np.ndarray] = None
    g_quantum: Optional[np.ndarray] = None
    degenerate_spectrum: bool = False

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.g))


@dataclass(frozen=True)
class CubicTensor:
    psi3: np.ndarray
    convention: str = "massieu"
    fd_step: Optional[np.ndarray] = None
    symmetry_residual: float = 0.0

    @property
    def n(self) -> int:
        return self.psi3.shape[0]


@dataclass(frozen=True)
class CurvatureReport:
    R1212: float
    F: float
    detg: float
    scalar: float
    convention: str
    fd_step: Optional[np.ndarray] = None
    contraction: float = float("nan")


def _bkm_kernel(levels: np.ndarray, p: np.ndarray, degenerate: np.ndarray) -> np.ndarray:
    """``(p_n - p_m) / (E_n - E_m)`` with the limit ``p_n`` on degenerate pairs."""
    diff = levels[:, None] - levels[None, :]
    top = np.maximum(p[:, None], p[None, :])
    gap = np.abs(diff)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = top * (-np.expm1(-gap)) / gap
    limit = 0.5 * (p[:, None] + p[None, :])
    return np.where(degenerate, limit, k)


def metric_spectral(model: ExpFamilyModel, point: ModelPoint, convention: str = "massieu") -> MetricTensor:
    """BKM metric from the energy eigenbasis, split into classical and quantum parts."""
    check_convention(convention)
    data = eigen_data(model, point)
    levels = data.decomp.eigenvalues
    p = data.weights.probabilities
    ops = data.elements
    diag = np.real(np.diagonal(ops, axis1=1, axis2=2))
    mean = diag @ p
    gc = (diag * p[None, :]) @ diag.T - np.outer(mean, mean)
    kernel = _bkm_kernel(levels, p, data.decomp.degeneracy_mask())
    np.fill_diagonal(kernel, 0.0)
    n = model.n
    gq = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            gq[i, j] = gq[j, i] = np.sum(kernel * np.real(ops[i] * ops[j].conj()))
    gc = 0.5 * (gc + gc.T)
    scale = 1.0 if convention == "massieu" else 1.0 / point.beta
    return MetricTensor(scale * (gc + gq), convention, scale * gc, scale * gq, data.decomp.degenerate)


def metric_integral(model: ExpFamilyModel, point: ModelPoint, quad_tol: float = 1e-12,
                    convention: str = "massieu") -> MetricTensor:
    """BKM metric from the u-integral of the canonical correlation.

    Uses matrix exponentials only (no eigenbasis), so it is an independent
    check on :func:`metric_spectral`.
    """
    check_convention(convention)
    if not quad_tol > 0:
        raise DomainError("quad_tol must be positive")
    a = model.exponent(point.theta).entries
    a = a - np.max(np.sum(np.abs(a), axis=1)) * np.eye(model.dim)
    ops = np.stack([o.entries for o in model.observables])
    full = scipy.linalg.expm(a)
    z = np.trace(full).real
    mean = np.real(np.einsum("ab,iba->i", full, ops)) / z
    centred = ops - mean[:, None, None] * np.eye(model.dim)[None]
    n = model.n
    iu = np.triu_indices(n)

    def integrand(us):
        out = np.empty((len(iu[0]), len(us)))
        for col, u in enumerate(us):
            left = scipy.linalg.expm((1.0 - u) * a)
            right = scipy.linalg.expm(u * a)
            lo = np.einsum("ab,ibc->iac", left, centred)
            ro = np.einsum("ab,ibc->iac", right, centred)
            tr = np.real(np.einsum("iab,jba->ij", lo, ro)) / z
            out[:, col] = tr[iu]
        return out

    res = integrate(integrand, 0.0, 1.0, tol=quad_tol)
    g = np.zeros((n, n))
    g[iu] = res.value
    g = g + np.triu(g, 1).T
    scale = 1.0 if convention == "massieu" else 1.0 / point.beta
    return MetricTensor(scale * g, convention)


def default_step(theta_k: float) -> float:
    return FD_SCALE * max(1.0, abs(theta_k))


def symmetrize3(t: np.ndarray) -> np.ndarray:
    return sum(np.transpose(t, perm) for perm in itertools.permutations(range(3))) / 6.0


def cubic_from_metric(metric_fn: Callable[[np.ndarray], np.ndarray], theta, convention: str = "massieu",
                      step: Callable[[float], float] = default_step, richardson: bool = False) -> CubicTensor:
    """Third derivatives ``psi_ijk = d_k g_ij`` by central differences of a metric.

    ``metric_fn`` maps a parameter vector to an ``n x n`` metric. With
    ``richardson`` one extrapolation level (steps h and h/2) is applied.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.shape[0]
    raw = np.empty((n, n, n))
    steps = np.array([step(t) for t in theta])

    def at(shift):
        try:
            g = np.asarray(metric_fn(theta + shift), dtype=float)
        except DomainError as exc:
            raise DomainError(f"finite-difference stencil left the domain at {theta + shift}: {exc}") from exc
        if not np.all(np.isfinite(g)):
            raise DomainError(f"finite-difference stencil left the domain at {theta + shift}")
        return g

    for k in range(n):
        e = np.zeros(n)
        e[k] = steps[k]
        d1 = (at(e) - at(-e)) / (2.0 * steps[k])
        if richardson:
            d2 = (at(e / 2) - at(-e / 2)) / steps[k]
            d1 = (4.0 * d2 - d1) / 3.0
        raw[:, :, k] = d1
    sym = symmetrize3(raw)
    return CubicTensor(sym, convention, steps, float(np.max(np.abs(raw - sym))))


def cubic_fd(model: ExpFamilyModel, point: ModelPoint, convention: str = "massieu",
             step: Callable[[float], float] = default_step, richardson: bool = False) -> CubicTensor:
    """Cubic tensor of the potential by differencing :func:`metric_spectral`."""
    check_convention(convention)

    def g_of(theta):
        return metric_spectral(model, ModelPoint(tuple(theta), point.beta), convention).g

    return cubic_from_metric(g_of, point.theta, convention, step, richardson)


def christoffel(cubic: CubicTensor) -> np.ndarray:
    """Christoffel symbols of the first kind, ``Gamma_{ij;k} = psi_ijk / 2``."""
    return 0.5 * cubic.psi3


def _inverse(metric: MetricTensor) -> np.ndarray:
    g = metric.g
    det = metric.det
    scale = float(np.max(np.abs(g))) ** g.shape[0]
    if not abs(det) > DET_RTOL * scale:
        raise DegenerateMetricError(
            f"metric is numerically degenerate (det g = {det:.3e}); use the low-temperature expansion", det=det
        )
    return np.linalg.inv(g)


def _check_pair(metric: MetricTensor, cubic: CubicTensor) -> None:
    if metric.n != cubic.n:
        raise ValidationError(f"metric has n={metric.n} but cubic tensor has n={cubic.n}")
    if metric.convention != cubic.convention:
        raise ValidationError(f"convention mismatch: metric {metric.convention}, cubic {cubic.convention}")


def riemann(metric: MetricTensor, cubic: CubicTensor) -> np.ndarray:
    """``R_ijkl = 1/4 g^ab (psi_aik psi_bjl - psi_ail psi_bjk)``."""
    _check_pair(metric, cubic)
    ginv = _inverse(metric)
    t = cubic.psi3
    first = np.einsum("ab,aik,bjl->ijkl", ginv, t, t)
    return 0.25 * (first - first.transpose(0, 1, 3, 2))


def scalar_curvature(metric: MetricTensor, cubic: CubicTensor) -> CurvatureReport:
    """Scalar curvature ``g^ik g^jl R_ijkl``; for n = 2 also ``F / (2 det g^2)``.

    For two parameters ``F`` is the 3x3 determinant with rows
    ``(g11, g12, g22)``, ``(psi111, psi112, psi122)``, ``(psi112, psi122, psi222)``
    and ``scalar`` is taken from it; ``contraction`` holds the independent
    ``2 R_1212 / det g`` value.
    """
    _check_pair(metric, cubic)
    ginv = _inverse(metric)
    riem = riemann(metric, cubic)
    contraction = float(np.einsum("ik,jl,ijkl->", ginv, ginv, riem))
    det = metric.det
    if metric.n == 2:
        g, t = metric.g, cubic.psi3
        F = float(np.linalg.det(np.array([
            [g[0, 0], g[0, 1], g[1, 1]],
            [t[0, 0, 0], t[0, 0, 1], t[0, 1, 1]],
            [t[0, 0, 1], t[0, 1, 1], t[1, 1, 1]],
        ])))
        scalar = F / (2.0 * det * det)
        r1212 = float(riem[0, 1, 0, 1])
    else:
        F = float("nan")
        scalar = contraction
        r1212 = float(riem[0, 1, 0, 1]) if metric.n > 1 else 0.0
    return CurvatureReport(r1212, F, det, scalar, metric.convention, cubic.fd_step, contraction)


def curvature(model: ExpFamilyModel, point: ModelPoint, convention: str = "massieu",
              richardson: bool = False) -> tuple[MetricTensor, CubicTensor, CurvatureReport]:
    """Metric, cubic tensor and curvature of ``model`` at ``point`` in one call."""
    metric = metric_spectral(model, point, convention)
    cubic = cubic_fd(model, point, convention, richardson=richardson)
    return metric, cubic, scalar_curvature(metric, cubic)
