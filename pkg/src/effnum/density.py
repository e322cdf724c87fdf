"""Density matrices, their spectra, and the state content they carry.

The effective number of state components of an N x N density matrix is
the effective count of its spectrum with weights N * rho_i, a
basis-independent quantity.  For a bipartite pure state the same count
applied to a reduced density matrix measures entanglement; it is
symmetric between the two parts because both reductions share their
non-zero spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .counting import CountingFunction, WeightVector, effnum
from .errors import ConvergenceError, InvalidInput, InvariantViolation
from .states import PureState

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
NEGATIVE_EIGENVALUE_TOL = 1e-10
DEFAULT_DIM_CAP = 4096


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, trace-one, positive semidefinite complex matrix."""

    mat: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidInput(f"density matrix must be square, got shape {mat.shape}")
        n = mat.shape[0]
        if n > DEFAULT_DIM_CAP:
            raise InvalidInput(
                f"density matrix dimension {n} exceeds the supported cap {DEFAULT_DIM_CAP}"
            )
        herm_defect = float(np.max(np.abs(mat - mat.conj().T)))
        if herm_defect > HERMITICITY_TOL:
            raise InvariantViolation(
                f"matrix is not Hermitian: max |rho - rho^H| = {herm_defect:.3e}"
            )
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvariantViolation(f"trace must equal 1 within {TRACE_TOL:g}; got {trace!r}")
        smallest = float(np.min(np.linalg.eigvalsh(mat)))
        if smallest < -NEGATIVE_EIGENVALUE_TOL:
            raise InvariantViolation(
                f"matrix is not positive semidefinite: smallest eigenvalue {smallest:.3e}"
            )
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dim", int(n))

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityMatrix":
        return cls(np.outer(psi.amps, psi.amps.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)


@dataclass(frozen=True)
class Eigensystem:
    """Spectral decomposition with a deterministic ordering convention.

    Eigenvalues are sorted descending; tiny negatives (within the
    positivity tolerance) are clamped to zero and the spectrum is
    renormalized to sum to one.  Each eigenvector is phase-fixed so its
    first non-negligible component is real and positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float).copy()
        vecs = np.asarray(self.eigenvectors, dtype=complex).copy()
        vals.flags.writeable = False
        vecs.flags.writeable = False
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Rotate each column so its first component above threshold is real > 0."""
    out = vecs.copy()
    n = vecs.shape[0]
    for j in range(vecs.shape[1]):
        col = out[:, j]
        idx = 0
        for i in range(n):
            if abs(col[i]) > 1e-12:
                idx = i
                break
        pivot = col[idx]
        if abs(pivot) > 0.0:
            out[:, j] = col * (pivot.conjugate() / abs(pivot))
    return out


def hermitian_eigen(rho: DensityMatrix) -> Eigensystem:
    """Spectral decomposition of a density matrix.

    Delegates the diagonalization to LAPACK's Hermitian solver and then
    applies the ordering, clamping and phase conventions of
    :class:`Eigensystem`.  Raises :class:`ConvergenceError` if the solver
    fails to converge (pathological input).
    """
    try:
        vals, vecs = np.linalg.eigh(rho.mat)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc
    order = np.argsort(vals, kind="stable")[::-1]
    vals = vals[order]
    vecs = _fix_phases(vecs[:, order])
    vals = np.where((vals < 0.0) & (vals >= -NEGATIVE_EIGENVALUE_TOL), 0.0, vals)
    if np.any(vals < 0.0):
        raise InvariantViolation("spectrum has negativity beyond tolerance")
    total = math.fsum(vals.tolist())
    vals = vals / total
    return Eigensystem(eigenvalues=vals, eigenvectors=vecs)


def quantum_effnum(
    rho: DensityMatrix,
    c: CountingFunction,
    *,
    nominal: int | None = None,
) -> float:
    """Effective number of state components: sum_i c(n * rho_i).

    ``nominal`` overrides the weight scale n (default: the matrix
    dimension); entanglement measures use the smaller factor dimension so
    that both reductions of a bipartite state agree.
    """
    n = rho.dim if nominal is None else int(nominal)
    if n < 1:
        raise InvalidInput(f"nominal count must be positive, got {n}")
    spectrum = hermitian_eigen(rho).eigenvalues
    return effnum(WeightVector(n * spectrum, n=n), c)


def quantum_effnum_min(rho: DensityMatrix, *, nominal: int | None = None) -> float:
    """Smallest consistent state-component count: sum_i min{n rho_i, 1}."""
    return quantum_effnum(rho, CountingFunction.minimal(), nominal=nominal)


def quantum_mu_entropy(rho: DensityMatrix, c: CountingFunction) -> float:
    """log of the effective state-component count; in [0, log N]."""
    return math.log(quantum_effnum(rho, c))


def quantum_mu_entropy_min(rho: DensityMatrix) -> float:
    return math.log(quantum_effnum_min(rho))


def density_from_ensemble(states) -> DensityMatrix:
    """Mixture sum_j p_j |psi_j><psi_j| from (weight, PureState) pairs.

    The number of members is arbitrary (it may exceed the dimension) and
    members need not be orthogonal; no deduplication is attempted.
    """
    pairs = list(states)
    if not pairs:
        raise InvalidInput("ensemble must contain at least one state")
    weights = np.array([float(w) for w, _ in pairs])
    if np.any(weights < 0.0):
        raise InvalidInput("mixture weights must be non-negative")
    total = math.fsum(weights.tolist())
    if abs(total - 1.0) > 1e-12:
        raise InvalidInput(f"mixture weights must sum to 1; got {total!r}")
    dim = pairs[0][1].dim
    acc = np.zeros((dim, dim), dtype=complex)
    for w, psi in pairs:
        if psi.dim != dim:
            raise InvalidInput(f"ensemble states have mixed dimensions {dim} and {psi.dim}")
        acc += w * np.outer(psi.amps, psi.amps.conj())
    return DensityMatrix(acc)


@dataclass(frozen=True)
class BipartiteStructure:
    """Factorization N = dim_a * dim_b with row-major index a * dim_b + b."""

    dim_a: int
    dim_b: int

    def __post_init__(self):
        if int(self.dim_a) < 1 or int(self.dim_b) < 1:
            raise InvalidInput("factor dimensions must be positive")
        object.__setattr__(self, "dim_a", int(self.dim_a))
        object.__setattr__(self, "dim_b", int(self.dim_b))

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b


def partial_trace(rho: DensityMatrix, bp: BipartiteStructure, keep: str) -> DensityMatrix:
    """Trace out one factor; ``keep`` is "A" or "B" (row-major ordering)."""
    if bp.dim != rho.dim:
        raise InvalidInput(
            f"factorization {bp.dim_a}x{bp.dim_b} inconsistent with dimension {rho.dim}"
        )
    keep = keep.upper()
    four = rho.mat.reshape(bp.dim_a, bp.dim_b, bp.dim_a, bp.dim_b)
    if keep == "A":
        reduced = np.trace(four, axis1=1, axis2=3)
    elif keep == "B":
        reduced = np.trace(four, axis1=0, axis2=2)
    else:
        raise InvalidInput(f'keep must be "A" or "B", got {keep!r}')
    return DensityMatrix(reduced)


def mu_entanglement(
    psi: PureState,
    bp: BipartiteStructure,
    c: CountingFunction,
    side: str = "A",
) -> float:
    """State content shared across the bipartition: the effective
    component count of the reduced density matrix.

    The weight scale is min(dim_a, dim_b) -- the largest possible number
    of terms in the biorthogonal expansion -- which makes the value
    independent of the side kept even for unequal factor dimensions.
    Ranges from 1 (product state) to min(dim_a, dim_b) (maximal).
    """
    if bp.dim != psi.dim:
        raise InvalidInput(
            f"factorization {bp.dim_a}x{bp.dim_b} inconsistent with dimension {psi.dim}"
        )
    reduced = partial_trace(DensityMatrix.from_pure(psi), bp, keep=side)
    return quantum_effnum(reduced, c, nominal=min(bp.dim_a, bp.dim_b))


def mu_entanglement_min(psi: PureState, bp: BipartiteStructure, side: str = "A") -> float:
    return mu_entanglement(psi, bp, CountingFunction.minimal(), side=side)
