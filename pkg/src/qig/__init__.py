"""BKM information geometry of quantum exponential families.

Core pipeline: :mod:`qig.hermitian` (eigensolver), :mod:`qig.expfamily`
(potentials), :mod:`qig.geometry` (metric, cubic tensor, curvature),
:mod:`qig.asymptotics` (low-temperature coefficient, exponent fits),
:mod:`qig.special` (elliptic integrals, quadrature) and :mod:`qig.tfim`
(transverse-field Ising models).
"""

from .asymptotics import (
    LowTempExpansion,
    coefficient_C,
    fit_exponent,
    low_temp_expansion,
    predict_R_lowT,
    zero_T_constraints,
)
from .errors import (
    DegeneracyError,
    DegenerateMetricError,
    DivergenceError,
    DomainError,
    IndeterminateError,
    NumericError,
    QigError,
    SingularLocusError,
    ValidationError,
)
from .expfamily import ExpFamilyModel, ModelPoint, density_matrix, log_partition
from .geometry import (
    CubicTensor,
    CurvatureReport,
    MetricTensor,
    christoffel,
    cubic_fd,
    curvature,
    metric_integral,
    metric_spectral,
    riemann,
    scalar_curvature,
)
from .hermitian import HermitianOperator, spectral_decompose
from .modelfile import load_generic_model
from .special import elliptic_K, elliptic_KE, integrate

__version__ = "0.1.0"
