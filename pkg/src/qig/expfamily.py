"""Quantum exponential families ``rho(theta) = exp(theta^i O_i - psi(theta))``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .hermitian import (
    GibbsWeights,
    HermitianOperator,
    SpectralDecomposition,
    eigenbasis_elements,
    gibbs_weights,
    spectral_decompose,
)

CONVENTIONS = ("massieu", "scaled")


def check_convention(convention: str) -> str:
    if convention not in CONVENTIONS:
        raise ValidationError(f"unknown potential convention {convention!r}; expected one of {CONVENTIONS}")
    return convention


@dataclass(frozen=True)
class ExpFamilyModel:
    observables: tuple
    labels: tuple = ()

    def __post_init__(self):
        obs = tuple(o if isinstance(o, HermitianOperator) else HermitianOperator(o) for o in self.observables)
        if not obs:
            raise ValidationError("an exponential family needs at least one observable")
        dims = {o.dim for o in obs}
        if len(dims) != 1:
            raise ValidationError(f"observables have inconsistent dimensions {sorted(dims)}")
        labels = tuple(self.labels) if self.labels else tuple(f"theta{i}" for i in range(len(obs)))
        if len(labels) != len(obs):
            raise ValidationError(f"{len(labels)} labels given for {len(obs)} observables")
        object.__setattr__(self, "observables", obs)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.observables)

    @property
    def dim(self) -> int:
        return self.observables[0].dim

    def exponent(self, theta: Sequence[float]) -> HermitianOperator:
        """``theta^i O_i`` as a Hermitian operator."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n,):
            raise ValidationError(f"expected {self.n} parameters, got shape {theta.shape}")
        a = np.tensordot(theta, np.stack([o.entries for o in self.observables]), axes=1)
        return HermitianOperator(a)


@dataclass(frozen=True)
class ModelPoint:
    """Canonical parameters ``theta`` (dimensionless) and inverse temperature ``beta``.

    ``beta`` only enters the scaled-potential convention and energy-unit
    conversions; the state itself depends on ``theta`` alone.
    """

    theta: tuple
    beta: float = 1.0

    def __post_init__(self):
        theta = tuple(float(t) for t in np.atleast_1d(np.asarray(self.theta, dtype=float)))
        if not all(np.isfinite(theta)):
            raise ValidationError(f"non-finite canonical parameter in {theta}")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValidationError(f"beta must be positive and finite, got {self.beta}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "beta", float(self.beta))

    def shifted(self, k: int, h: float) -> ModelPoint:
        t = list(self.theta)
        t[k] += h
        return ModelPoint(tuple(t), self.beta)


@dataclass(frozen=True)
class PotentialReport:
    psi_massieu: float
    psi_scaled: float
    expectations: np.ndarray


@dataclass(frozen=True)
class EigenData:
    """Decomposition of ``theta^i O_i`` plus observables in its eigenbasis."""

    decomp: SpectralDecomposition
    weights: GibbsWeights
    elements: np.ndarray  # (n, dim, dim)


def _check(model: ExpFamilyModel, point: ModelPoint) -> None:
    if len(point.theta) != model.n:
        raise ValidationError(f"model has {model.n} parameters but the point has {len(point.theta)}")


def eigen_data(model: ExpFamilyModel, point: ModelPoint) -> EigenData:
    _check(model, point)
    decomp = spectral_decompose(model.exponent(point.theta))
    elements = np.stack([eigenbasis_elements(o, decomp) for o in model.observables])
    return EigenData(decomp, gibbs_weights(decomp), elements)


def log_partition(model: ExpFamilyModel, point: ModelPoint) -> PotentialReport:
    """``psi = ln Tr exp(theta^i O_i)`` and the expectations ``<O_i>``."""
    data = eigen_data(model, point)
    p = data.weights.probabilities
    diag = np.real(np.diagonal(data.elements, axis1=1, axis2=2))
    psi = data.weights.logZ
    return PotentialReport(psi, psi / point.beta, diag @ p)


def density_matrix(model: ExpFamilyModel, point: ModelPoint) -> HermitianOperator:
    data = eigen_data(model, point)
    u = data.decomp.eigenvectors
    rho = (u * data.weights.probabilities[None, :]) @ u.conj().T
    return HermitianOperator(rho)
