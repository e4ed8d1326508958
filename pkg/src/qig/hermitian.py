"""Dense Hermitian linear algebra for small dimensions.

Everything here works with the exponent ``A = theta^i O_i = -beta H`` of a
Gibbs state, so eigenvalues are the dimensionless levels ``E_n = -beta E_n``
sorted descending (ground state first).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ValidationError

HERMITIAN_TOL = 1e-12
JACOBI_MAX_DIM = 64
MAX_DIM = 4096
DEGENERACY_RTOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class HermitianOperator:
    """Dense complex Hermitian matrix.

    Construction checks Hermiticity to ``HERMITIAN_TOL`` (scaled by the
    largest entry when that exceeds one) and stores the exactly symmetrised
    matrix.
    """

    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValidationError(f"operator {self.label!r} must be a non-empty square matrix, got shape {a.shape}")
        scale = max(1.0, float(np.max(np.abs(a))))
        err = float(np.max(np.abs(a - a.conj().T)))
        if err > HERMITIAN_TOL * scale:
            raise ValidationError(f"operator {self.label!r} is not Hermitian (max |A - A^H| = {err:.3e})")
        object.__setattr__(self, "entries", _frozen(0.5 * (a + a.conj().T)))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __add__(self, other: HermitianOperator) -> HermitianOperator:
        return HermitianOperator(self.entries + other.entries)

    def scaled(self, c: float) -> HermitianOperator:
        return HermitianOperator(c * self.entries, self.label)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-decomposition ``source = U diag(levels) U^H``.

    ``eigenvalues`` are sorted descending. ``degenerate`` is set when two
    levels are closer than ``degeneracy_tol``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: HermitianOperator
    degeneracy_tol: float = field(default=0.0)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def degenerate(self) -> bool:
        return bool(np.any(np.abs(np.diff(self.eigenvalues)) < self.degeneracy_tol))

    def is_degenerate_pair(self, n: int, m: int) -> bool:
        return bool(abs(self.eigenvalues[n] - self.eigenvalues[m]) < self.degeneracy_tol)

    def degeneracy_mask(self) -> np.ndarray:
        """Boolean matrix marking pairs (n, m) whose levels coincide within tolerance."""
        e = self.eigenvalues
        return np.abs(e[:, None] - e[None, :]) < self.degeneracy_tol


@dataclass(frozen=True)
class GibbsWeights:
    probabilities: np.ndarray
    logZ: float


def jacobi_eigh(a, tol: float = 1e-15, max_sweeps: int = 60):
    """Cyclic Jacobi diagonalisation of a complex Hermitian matrix.

    Returns ``(w, v)`` with unsorted eigenvalues and eigenvectors as columns.
    Each rotation first removes the phase of the pivot so that the remaining
    2x2 problem is real symmetric.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if n == 1:
        return a.real.diagonal().copy(), v
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(n), v
    for sweep in range(1, max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off <= tol * norm:
            return a.real.diagonal().copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300 or mag <= 1e-18 * norm:
                    a[p, q] = a[q, p] = 0.0
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                jpp, jpq = c, s
                jqp, jqq = -s * np.conj(phase), c * np.conj(phase)
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = cp * jpp + cq * jqp
                a[:, q] = cp * jpq + cq * jqq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = np.conj(jpp) * rp + np.conj(jqp) * rq
                a[q, :] = np.conj(jpq) * rp + np.conj(jqq) * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp * jpp + vq * jqp
                v[:, q] = vp * jpq + vq * jqq
    off = np.linalg.norm(a - np.diag(a.diagonal()))
    raise NumericError(
        f"Jacobi eigensolver did not converge after {max_sweeps} sweeps (off-norm {off:.3e})",
        iterations=max_sweeps,
    )


def _fix_phases(v: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(v), axis=0)
    piv = v[idx, np.arange(v.shape[1])]
    return v * (np.abs(piv) / piv)[None, :]


def spectral_decompose(op: HermitianOperator) -> SpectralDecomposition:
    """Eigenvalues (descending) and a unitary eigenbasis of ``op``.

    Jacobi rotations up to ``JACOBI_MAX_DIM``; LAPACK ``eigh`` above.
    Each eigenvector is rotated so its largest-magnitude component is real
    and positive.
    """
    if not isinstance(op, HermitianOperator):
        op = HermitianOperator(op)
    if op.dim > MAX_DIM:
        raise ValidationError(f"dimension {op.dim} exceeds the supported maximum {MAX_DIM}")
    if op.dim <= JACOBI_MAX_DIM:
        w, v = jacobi_eigh(op.entries)
    else:
        w, v = np.linalg.eigh(op.entries)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = _fix_phases(v[:, order])
    tol = DEGENERACY_RTOL * max(1.0, abs(w[0]))
    return SpectralDecomposition(_frozen(w), _frozen(v), op, tol)


def eigenbasis_elements(op: HermitianOperator, decomp: SpectralDecomposition) -> np.ndarray:
    """Matrix elements ``<n|op|m>`` in the eigenbasis of ``decomp``."""
    a = op.entries if isinstance(op, HermitianOperator) else np.asarray(op, dtype=complex)
    if a.shape != (decomp.dim, decomp.dim):
        raise ValidationError(f"dimension mismatch: operator {a.shape} vs decomposition dim {decomp.dim}")
    u = decomp.eigenvectors
    return u.conj().T @ a @ u


def gibbs_weights(decomp: SpectralDecomposition) -> GibbsWeights:
    """Gibbs probabilities ``exp(E_n - ln Z)`` with an overflow-safe ``ln Z``."""
    e = np.asarray(decomp.eigenvalues if isinstance(decomp, SpectralDecomposition) else decomp, dtype=float)
    top = e.max()
    w = np.exp(e - top)
    total = w.sum()
    return GibbsWeights(_frozen(w / total), float(top + np.log(total)))
