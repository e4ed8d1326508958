"""Verification suites: pipeline against closed forms, asymptotics and oracles.

Each check returns a :class:`CheckResult` holding the measured numbers, the
tolerance it was judged against and the wall time. Suites group checks;
``run_suite("all")`` runs every one.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .asymptotics import classical_flatness_det, fit_exponent, low_temp_expansion, zero_T_constraints
from .errors import ValidationError
from .expfamily import ExpFamilyModel, ModelPoint
from .geometry import cubic_fd, curvature, metric_integral, metric_spectral
from .special import elliptic_KE
from .tfim import (
    C_0d,
    C_1d,
    Tfim0dParams,
    Tfim1dParams,
    cubic_0d_closed,
    curvature_0d,
    finite_chain_oracle,
    geometry_1d,
    metric_0d_closed,
    metric_1d,
    psi_1d,
    tfim0d_model,
    tfim0d_point,
    zero_T_elliptic_1d,
    zero_T_metric_1d,
)

SEED = 20240611


@dataclass
class CheckResult:
    id: str
    name: str
    passed: bool
    measured: dict
    tolerance: dict
    seconds: float = 0.0
    note: str = ""

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (a + a.conj().T)


def random_family(rng: np.random.Generator, dim: int = 3, n: int = 2, scale: float = 1.0):
    model = ExpFamilyModel(tuple(random_hermitian(rng, dim) for _ in range(n)))
    point = ModelPoint(tuple(scale * rng.normal(size=n)), 1.0)
    return model, point


def _timed(fn: Callable[[], CheckResult]) -> CheckResult:
    t0 = time.perf_counter()
    res = fn()
    res.seconds = time.perf_counter() - t0
    return res


# ------------------------------------------------------------------ checks


def check_0d_grid(n_grid: int = 20) -> CheckResult:
    """Pipeline curvature against the closed form on a grid ``(x, z) in [0.1, 3]^2`` at ``beta = 1``."""
    model = tfim0d_model()
    worst = 0.0
    t0 = time.perf_counter()
    axis = np.linspace(0.1, 3.0, n_grid)
    for x in axis:
        for z in axis:
            p = Tfim0dParams(1.0, x, z)
            _, _, rep = curvature(model, tfim0d_point(p))
            exact = curvature_0d(p, "massieu")
            worst = max(worst, abs(rep.scalar - exact) / abs(exact))
    elapsed = time.perf_counter() - t0
    return CheckResult("C1", "0D pipeline curvature vs closed form on 20x20 grid",
                       worst <= 1e-7 and elapsed < 1.0,
                       {"max_rel_error": worst, "grid_seconds": elapsed},
                       {"max_rel_error": 1e-7, "grid_seconds": 1.0})


def check_0d_tensors() -> CheckResult:
    """Pipeline metric and cubic tensor against the closed forms at a few points."""
    model = tfim0d_model()
    g_err = t_err = 0.0
    for beta, gamma, h in [(1.0, 0.6, 0.8), (2.0, 0.3, 1.1), (0.5, 2.0, 0.1), (1.0, 0.05, 0.02)]:
        p = Tfim0dParams(beta, gamma, h)
        pt = tfim0d_point(p)
        for conv in ("massieu", "scaled"):
            g = metric_spectral(model, pt, conv).g
            g_ref = metric_0d_closed(p, conv).g
            g_err = max(g_err, float(np.max(np.abs(g - g_ref)) / np.max(np.abs(g_ref))))
            t = cubic_fd(model, pt, conv).psi3
            t_ref = cubic_0d_closed(p, conv).psi3
            t_err = max(t_err, float(np.max(np.abs(t - t_ref)) / np.max(np.abs(t_ref))))
    return CheckResult("C1b", "0D metric and cubic tensor vs closed forms",
                       g_err <= 1e-12 and t_err <= 1e-7,
                       {"metric_rel_error": g_err, "cubic_rel_error": t_err},
                       {"metric_rel_error": 1e-12, "cubic_rel_error": 1e-7})


def check_small_r() -> CheckResult:
    """``R / (beta r^2)`` at ``r = 0.01`` within 1% of 4/9 (pipeline and closed form)."""
    p = Tfim0dParams(1.0, 0.006, 0.008)
    _, _, rep = curvature(tfim0d_model(), tfim0d_point(p), "scaled", richardson=True)
    target = 4.0 / 9.0
    pipe = rep.scalar / (p.beta * p.r ** 2)
    closed = curvature_0d(p) / (p.beta * p.r ** 2)
    dev = max(abs(pipe / target - 1), abs(closed / target - 1))
    return CheckResult("C2", "0D small-r curvature ratio to 4/9", dev <= 0.01,
                       {"pipeline_ratio": pipe, "closed_form_ratio": closed, "max_rel_dev": dev},
                       {"max_rel_dev": 0.01})


def check_0d_low_T() -> CheckResult:
    """Closed-form curvature at ``r = 10`` against ``beta e^{2r} / (4r)``."""
    p = Tfim0dParams(1.0, 10.0, 0.0)
    r = p.r
    asym = p.beta * math.exp(2 * r) / (4 * r)
    ratio = curvature_0d(p) / asym
    return CheckResult("C3", "0D low-T curvature ratio to beta e^(2r)/(4r) at r = 10",
                       abs(ratio - 1) <= 0.005,
                       {"ratio": ratio, "ratio_times_2r_over_2r_minus_1": ratio * 2 * r / (2 * r - 1)},
                       {"abs_ratio_minus_1": 0.005},
                       note="the exact ratio approaches 1 - 1/(2r)")


def check_C0d_assembly(count: int = 10) -> CheckResult:
    """Determinant-assembled ``C`` of the 0D model against ``1 / (4 sqrt(h^2 + Gamma^2))``."""
    rng = np.random.default_rng(SEED)
    model = tfim0d_model()
    worst = 0.0
    for _ in range(count):
        h, gamma = rng.uniform(0.1, 2.0, size=2)
        p = Tfim0dParams(1.0, gamma, h)
        c = low_temp_expansion(model, tfim0d_point(p)).C
        worst = max(worst, abs(c / C_0d(h, gamma) - 1))
    return CheckResult("C4", "0D coefficient C from determinant assembly", worst <= 1e-8,
                       {"max_rel_error": worst}, {"max_rel_error": 1e-8})


def check_1d_high_T() -> CheckResult:
    """1D quadrature curvature at ``theta = x`` against ``(4/9)(theta^2 + x^2)``."""
    ratios = {}
    t0 = time.perf_counter()
    for v in (0.05, 0.1):
        p = Tfim1dParams.from_canonical(v, v)
        _, _, rep = geometry_1d(p, convention="massieu", richardson=True)
        ratios[f"ratio_{v}"] = rep.scalar / (4.0 / 9.0 * 2 * v * v)
    elapsed = time.perf_counter() - t0
    dev = max(abs(r - 1) for r in ratios.values())
    return CheckResult("C5", "1D high-T curvature ratio to (4/9)(theta^2 + x^2)",
                       dev <= 0.02 and elapsed < 10.0,
                       {**ratios, "max_rel_dev": dev, "seconds_1d": elapsed},
                       {"max_rel_dev": 0.02, "seconds_1d": 10.0})


def check_1d_low_T() -> CheckResult:
    """Scaled 1D curvature at ``(theta, x) = (10, 15)``, ``beta = 10`` against ``e^{10}/2``."""
    p = Tfim1dParams.from_canonical(10.0, 15.0, beta=10.0)
    t0 = time.perf_counter()
    _, _, rep = geometry_1d(p, convention="scaled")
    elapsed = time.perf_counter() - t0
    target = math.exp(10.0) / 2.0
    ratio = rep.scalar / target
    return CheckResult("C6", "1D low-T curvature ratio to e^10/2 at (theta, x) = (10, 15)",
                       abs(ratio - 1) <= 0.02 and elapsed < 60.0,
                       {"R": rep.scalar, "target": target, "ratio": ratio, "seconds": elapsed},
                       {"abs_ratio_minus_1": 0.02, "seconds": 60.0},
                       note="quadrature confirms a finite-temperature prefactor missing from the asymptote")


def check_elliptic_gq0() -> CheckResult:
    """Elliptic ``gq0`` at ``(8, 12)`` against ``lambda g(lambda theta, lambda x)`` for large lambda."""
    theta, x = 8.0, 12.0
    g0 = zero_T_metric_1d(theta, x)
    history = {}
    for lam in (1.0, 2.0, 4.0, 8.0):
        g = lam * metric_1d(lam * theta, lam * x)
        history[f"lambda_{lam:g}"] = float(np.max(np.abs(g - g0)) / np.max(np.abs(g0)))
    err = history["lambda_8"]
    return CheckResult("C7", "1D elliptic zero-T metric vs rescaled quadrature", err <= 5e-3,
                       {**history, "rel_error": err}, {"rel_error": 5e-3})


def check_exponents(points: int = 10) -> CheckResult:
    """Critical exponents of ``C`` from log-spaced sweeps, both models."""
    t0 = time.perf_counter()
    model = tfim0d_model()
    gammas = np.geomspace(0.01, 0.1, points)
    s0 = [(g, low_temp_expansion(model, tfim0d_point(Tfim0dParams(1.0, g, 0.0))).C) for g in gammas]
    fit0 = fit_exponent(s0)
    s1 = []
    for g in np.geomspace(1.01, 1.2, points):
        c = zero_T_elliptic_1d(Tfim1dParams(1.0, 1.0, g)).C
        s1.append((g - 1.0, c))
    fit1 = fit_exponent(s1)
    sym = zero_T_elliptic_1d(Tfim1dParams.from_canonical(8.0, 12.0)).C
    sym_swap = zero_T_elliptic_1d(Tfim1dParams.from_canonical(12.0, 8.0)).C
    elapsed = time.perf_counter() - t0
    ok = (abs(fit0.exponent - 1) <= 1e-6 and abs(fit1.exponent - 1) <= 1e-6 and elapsed < 1.0
          and abs(sym / sym_swap - 1) <= 1e-10 and abs(sym / C_1d(8.0, 1.5) - 1) <= 1e-8)
    return CheckResult("C8", "critical exponents of C (0D and 1D)", ok,
                       {"exponent_0d": fit0.exponent, "exponent_1d": fit1.exponent,
                        "C_1d_8_12": sym, "C_1d_12_8": sym_swap, "seconds": elapsed},
                       {"abs_exponent_minus_1": 1e-6, "symmetry_rel": 1e-10, "seconds": 1.0})


def check_constraints(count: int = 10) -> CheckResult:
    """Zero-temperature off-diagonal and Euler identities."""
    rng = np.random.default_rng(SEED + 1)
    cases = [(tfim0d_model(), tfim0d_point(Tfim0dParams(1.0, 0.6, 0.8)))]
    cases += [random_family(rng) for _ in range(count)]
    off = euler = 0.0
    for model, point in cases:
        rep = zero_T_constraints(model, point)
        off, euler = max(off, rep.offdiag_residual), max(euler, rep.euler_residual)
    return CheckResult("C9", "zero-T constraint residuals", off <= 1e-10 and euler <= 1e-6,
                       {"offdiag_residual": off, "euler_residual": euler},
                       {"offdiag_residual": 1e-10, "euler_residual": 1e-6})


def check_metric_oracle(count: int = 20) -> CheckResult:
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(count):
        model, point = random_family(rng)
        diff = metric_spectral(model, point).g - metric_integral(model, point).g
        worst = max(worst, float(np.max(np.abs(diff))))
    return CheckResult("C10a", "spectral vs u-integral BKM metric", worst <= 1e-8,
                       {"max_abs_diff": worst}, {"max_abs_diff": 1e-8})


def check_legendre() -> CheckResult:
    worst = 0.0
    for m in np.linspace(0.05, 0.95, 19):
        a, b = elliptic_KE(m), elliptic_KE(1.0 - m)
        worst = max(worst, abs(a.E * b.K + b.E * a.K - a.K * b.K - math.pi / 2))
    return CheckResult("C10b", "Legendre relation for K and E", worst <= 1e-10,
                       {"max_abs_residual": worst}, {"max_abs_residual": 1e-10})


def check_classical_flatness(count: int = 5) -> CheckResult:
    """The 3x3 determinant built only from first-order classical pieces vanishes."""
    rng = np.random.default_rng(SEED + 3)
    exps = [low_temp_expansion(tfim0d_model(), tfim0d_point(Tfim0dParams(1.0, 0.6, 0.8))),
            zero_T_elliptic_1d(Tfim1dParams.from_canonical(8.0, 12.0))]
    exps += [low_temp_expansion(*random_family(rng)) for _ in range(count)]
    worst = 0.0
    for e in exps:
        scale = float(np.max(np.abs(e.gc1)) * np.max(np.abs(e.psic1)) ** 2)
        worst = max(worst, abs(classical_flatness_det(e)) / scale)
    return CheckResult("C10c", "classical-only determinant vanishes", worst <= 1e-14,
                       {"max_rel_det": worst}, {"max_rel_det": 1e-14})


def check_finite_chain(sizes=(4, 6, 8, 10)) -> CheckResult:
    p = Tfim1dParams.from_canonical(0.5, 0.5)
    ref = psi_1d(p, quad_tol=1e-13)
    errors = {f"N_{n}": abs(finite_chain_oracle(n, p).psi_per_site - ref) for n in sizes}
    vals = list(errors.values())
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    return CheckResult("C10d", "finite-chain psi per site approaches the thermodynamic limit", decreasing,
                       {**errors, "psi_1d": ref}, {"monotone_decrease": True})


SUITES: dict[str, tuple[Callable[[], CheckResult], ...]] = {
    "closed-forms": (check_0d_grid, check_0d_tensors),
    "asymptotics": (check_small_r, check_0d_low_T, check_C0d_assembly, check_1d_high_T, check_1d_low_T,
                    check_elliptic_gq0, check_exponents),
    "constraints": (check_constraints,),
    "oracles": (check_metric_oracle, check_legendre, check_classical_flatness, check_finite_chain),
}


@dataclass
class SuiteReport:
    suite: str
    results: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "seconds": self.seconds,
                "n_passed": sum(r.passed for r in self.results), "n_checks": len(self.results),
                "results": [r.to_dict() for r in self.results]}


def run_suite(name: str) -> SuiteReport:
    if name == "all":
        checks = [c for group in SUITES.values() for c in group]
    elif name in SUITES:
        checks = list(SUITES[name])
    else:
        raise ValidationError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    t0 = time.perf_counter()
    report = SuiteReport(name, [_timed(c) for c in checks])
    report.seconds = time.perf_counter() - t0
    return report
