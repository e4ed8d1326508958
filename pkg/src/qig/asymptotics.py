"""Low-temperature expansion of the BKM curvature and critical-exponent fits.

Quantities here live in canonical coordinates with the Massieu potential
(dimensionless). Near zero temperature the metric behaves as

    g_ij ~ gq0_ij + gc1_ij * eps,      psi_ijk ~ psiq0_ijk + psic1_ijk * eps,

with ``eps = exp(-beta * Delta)``. ``gq0`` is the Hessian of the ground
level and is homogeneous of degree -1 in theta; multiply it by ``beta`` to
get the energy-unit zero-temperature quantum metric. ``gc1 = d d`` and
``psic1 = -d d d`` where ``d_i = (O_i)_00 - (O_i)_11`` is the gradient of
``beta * Delta``; the minus sign comes from differentiating ``eps``.
The curvature then diverges as ``R ~ C exp(beta * Delta)`` with ``C`` in
units of inverse energy (scaled-potential convention).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import DegeneracyError, IndeterminateError, ValidationError
from .expfamily import ExpFamilyModel, ModelPoint, eigen_data
from .geometry import cubic_from_metric, default_step

LOWT_VALID_BETA_DELTA = 5.0
OVERFLOW_BETA_DELTA = 700.0


@dataclass(frozen=True)
class LowTempExpansion:
    delta: float
    epsilon: float
    gq0: np.ndarray
    gc1: np.ndarray
    psiq0: np.ndarray
    psic1: np.ndarray
    beta: float
    C: float = float("nan")

    @property
    def beta_delta(self) -> float:
        return self.beta * self.delta

    @property
    def valid(self) -> bool:
        """Whether ``beta * Delta`` is large enough for the expansion to be trusted."""
        return self.beta_delta >= LOWT_VALID_BETA_DELTA


@dataclass(frozen=True)
class LowTPrediction:
    value: Optional[float]
    log_value: float
    beta_delta: float
    valid: bool


@dataclass(frozen=True)
class ConstraintReport:
    offdiag_residual: float
    euler_residual: float


@dataclass(frozen=True)
class CriticalFit:
    exponent: float
    intercept: float
    r_squared: float
    window: tuple


def _ground_data(model: ExpFamilyModel, point: ModelPoint, levels: int = 1):
    data = eigen_data(model, point)
    e = data.decomp.eigenvalues
    tol = data.decomp.degeneracy_tol
    for n in range(min(levels, len(e) - 1)):
        if abs(e[n] - e[n + 1]) < tol:
            which = "ground state" if n == 0 else f"level {n}"
            raise DegeneracyError(f"{which} is degenerate (E_{n} - E_{n + 1} = {e[n] - e[n + 1]:.3e})")
    return data


def zero_T_quantum_metric(model: ExpFamilyModel, point: ModelPoint) -> np.ndarray:
    """``sum_{n>0} 2 Re (O_i)_n0 (O_j)_0n / (E_0 - E_n)`` in dimensionless levels."""
    data = _ground_data(model, point)
    e = data.decomp.eigenvalues
    col = data.elements[:, 1:, 0]  # (O_i)_n0 for n > 0
    w = 1.0 / (e[0] - e[1:])
    g = 2.0 * np.real((col * w[None, :]) @ col.conj().T)
    return 0.5 * (g + g.T)


def gap_gradient(model: ExpFamilyModel, point: ModelPoint) -> np.ndarray:
    """``d_i = (O_i)_00 - (O_i)_11``, the gradient of ``beta * Delta``."""
    data = _ground_data(model, point, levels=2)
    return np.real(data.elements[:, 0, 0] - data.elements[:, 1, 1])


def first_order_classical(model: ExpFamilyModel, point: ModelPoint) -> tuple[np.ndarray, np.ndarray]:
    """First-order classical corrections ``(gc1, psic1)`` to the metric and cubic tensor."""
    d = gap_gradient(model, point)
    return np.einsum("i,j->ij", d, d), -np.einsum("i,j,k->ijk", d, d, d)


def zero_T_cubic(model: ExpFamilyModel, point: ModelPoint) -> np.ndarray:
    """``d_k gq0_ij`` by central differences of :func:`zero_T_quantum_metric`."""

    def g0(theta):
        return zero_T_quantum_metric(model, ModelPoint(tuple(theta), point.beta))

    return cubic_from_metric(g0, point.theta, step=default_step).psi3


def low_temp_expansion(model: ExpFamilyModel, point: ModelPoint) -> LowTempExpansion:
    """Assemble the low-temperature data and the coefficient ``C`` at ``point``."""
    if model.n != 2:
        raise ValidationError(f"the low-temperature coefficient is defined for two parameters, got {model.n}")
    data = _ground_data(model, point, levels=2)
    e = data.decomp.eigenvalues
    beta_delta = e[0] - e[1]
    gc1, psic1 = first_order_classical(model, point)
    exp = LowTempExpansion(
        delta=beta_delta / point.beta,
        epsilon=math.exp(-beta_delta),
        gq0=zero_T_quantum_metric(model, point),
        gc1=gc1,
        psiq0=zero_T_cubic(model, point),
        psic1=psic1,
        beta=point.beta,
    )
    return replace(exp, C=coefficient_C(exp))


def _rows(g, t):
    return [g[0, 0], g[0, 1], g[1, 1]], [t[0, 0, 0], t[0, 0, 1], t[0, 1, 1]], [t[0, 0, 1], t[0, 1, 1], t[1, 1, 1]]


def lowT_numerator(exp: LowTempExpansion, include_dropped_term: bool = False) -> float:
    """Leading coefficient of ``F / eps`` (Massieu convention).

    The usual leading order keeps the two determinants that pair ``gq0``
    with one classical and one quantum cubic row. The third determinant
    (``gc1`` row with two quantum cubic rows) is smaller by ``1/(beta Delta)``
    and is added when ``include_dropped_term`` is set.
    """
    g_row, q_lo, q_hi = _rows(exp.gq0, exp.psiq0)
    c_row, c_lo, c_hi = _rows(exp.gc1, exp.psic1)
    total = np.linalg.det(np.array([g_row, c_lo, q_hi])) + np.linalg.det(np.array([g_row, q_lo, c_hi]))
    if include_dropped_term:
        total += np.linalg.det(np.array([c_row, q_lo, q_hi]))
    return float(total)


def lowT_denominator(exp: LowTempExpansion) -> float:
    """Leading coefficient of ``det g / eps`` (Massieu convention)."""
    g0, g1 = exp.gq0, exp.gc1
    return float(np.linalg.det(np.array([[g1[0, 0], g0[0, 1]], [g1[1, 0], g0[1, 1]]]))
                 + np.linalg.det(np.array([[g0[0, 0], g1[0, 1]], [g0[1, 0], g1[1, 1]]])))


def coefficient_C(exp: LowTempExpansion, include_dropped_term: bool = False) -> float:
    """Prefactor ``C`` of ``R ~ C exp(beta Delta)`` in inverse-energy units."""
    den = lowT_denominator(exp)
    scale = float(np.max(np.abs(exp.gq0)) * np.max(np.abs(exp.gc1)))
    if not abs(den) > 1e-14 * scale:
        raise IndeterminateError(
            f"low-temperature denominator vanishes (det g / eps ~ {den:.3e}); F/eps may vanish identically"
        )
    return exp.beta * lowT_numerator(exp, include_dropped_term) / (2.0 * den * den)


def classical_flatness_det(exp: LowTempExpansion) -> float:
    """The all-classical 3x3 determinant, which vanishes identically (rank-1 rows)."""
    c_row, c_lo, c_hi = _rows(exp.gc1, exp.psic1)
    return float(np.linalg.det(np.array([c_row, c_lo, c_hi])))


def predict_R_lowT(C: float, beta: float, delta: float) -> LowTPrediction:
    """``C exp(beta Delta)`` (scaled convention); only the log is returned past overflow."""
    bd = beta * delta
    log_value = (math.log(abs(C)) if C != 0 else -math.inf) + bd
    value = C * math.exp(bd) if bd <= OVERFLOW_BETA_DELTA else None
    return LowTPrediction(value, log_value, bd, bd >= LOWT_VALID_BETA_DELTA)


def zero_T_constraints(model: ExpFamilyModel, point: ModelPoint) -> ConstraintReport:
    """Residuals of the two zero-temperature identities at ``point``.

    ``offdiag_residual`` is ``max_n>0 |theta^i (O_i)_0n|`` and
    ``euler_residual`` is ``max |(theta . d) gq0 + gq0|`` relative to
    ``max(1, max |gq0|)``.
    """
    data = _ground_data(model, point)
    theta = np.asarray(point.theta)
    row = np.tensordot(theta, data.elements[:, 0, 1:], axes=1)
    off = float(np.max(np.abs(row))) if row.size else 0.0
    g0 = zero_T_quantum_metric(model, point)
    dg = zero_T_cubic(model, point)
    euler = np.tensordot(dg, theta, axes=([2], [0])) + g0
    return ConstraintReport(off, float(np.max(np.abs(euler)) / max(1.0, float(np.max(np.abs(g0))))))


def fit_exponent(samples: Sequence[tuple[float, float]]) -> CriticalFit:
    """Least-squares power law ``value ~ control^(-exponent)`` on a log-log scale."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 5:
        raise ValidationError("fit_exponent needs at least 5 (control, value) pairs")
    if np.any(arr <= 0):
        raise ValidationError("controls and values must be positive for a log-log fit")
    lx, ly = np.log(arr[:, 0]), np.log(arr[:, 1])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return CriticalFit(float(-slope), float(intercept), min(1.0, max(0.0, r2)),
                       (float(arr[:, 0].min()), float(arr[:, 0].max())))
