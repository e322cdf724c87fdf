"""Pure states, orthogonal decompositions and measurement uncertainties.

A measurement with M distinguishable outcomes partitions the Hilbert space
into M orthogonal subspaces.  The measure-type uncertainty of a state is
the effective number of outcomes: the counting weights are w_m = M * p_m
with p_m the collapse probability into subspace m.  The metric-type
uncertainty is the familiar spread of outcome labels on the spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .counting import CountingFunction, ProbabilityVector, effnum, weights_from_probs
from .errors import InvalidInput

STATE_NORM_TOL = 1e-12
BASIS_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class PureState:
    """Unit-norm complex amplitude vector."""

    amps: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        arr = np.asarray(self.amps, dtype=complex)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidInput(f"state amplitudes must be a non-empty vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr.view(float))):
            raise InvalidInput("state amplitudes contain non-finite entries")
        norm_sq = math.fsum((np.abs(arr) ** 2).tolist())
        if abs(norm_sq - 1.0) > STATE_NORM_TOL:
            raise InvalidInput(
                f"state norm^2 must equal 1 within {STATE_NORM_TOL:g}; got {norm_sq!r}"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "amps", arr)
        object.__setattr__(self, "dim", int(arr.size))

    @classmethod
    def basis_vector(cls, index: int, dim: int) -> "PureState":
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)


@dataclass(frozen=True)
class OrthonormalBasis:
    """Square complex matrix whose columns are the basis states."""

    vectors: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        mat = np.asarray(self.vectors, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidInput(f"basis must be a square matrix, got shape {mat.shape}")
        gram = mat.conj().T @ mat
        defect = float(np.max(np.abs(gram - np.eye(mat.shape[0]))))
        if defect > BASIS_ORTHO_TOL:
            raise InvalidInput(
                f"basis columns are not orthonormal: max |U^H U - I| = {defect:.3e}"
            )
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "vectors", mat)
        object.__setattr__(self, "dim", int(mat.shape[0]))

    @classmethod
    def identity(cls, dim: int) -> "OrthonormalBasis":
        return cls(np.eye(dim, dtype=complex))


@dataclass(frozen=True)
class OrthogonalDecomposition:
    """Partition of the basis-index set {0, ..., dim-1} into disjoint blocks.

    Each block models one orthogonal subspace; blocks with more than one
    index represent degenerate outcome sectors.  Indices are 0-based.
    """

    blocks: tuple[tuple[int, ...], ...]
    dim: int

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in block) for block in self.blocks)
        if not blocks or any(len(b) == 0 for b in blocks):
            raise InvalidInput("decomposition blocks must be non-empty")
        flat = [i for b in blocks for i in b]
        if sorted(flat) != list(range(self.dim)):
            raise InvalidInput(
                f"blocks must partition {{0,...,{self.dim - 1}}} into disjoint pieces"
            )
        object.__setattr__(self, "blocks", blocks)

    @property
    def m_count(self) -> int:
        return len(self.blocks)

    @classmethod
    def singletons(cls, dim: int) -> "OrthogonalDecomposition":
        return cls(tuple((i,) for i in range(dim)), dim)

    def merged(self, a: int, b: int) -> "OrthogonalDecomposition":
        """Coarsen by joining blocks a and b (order of remaining blocks kept)."""
        if a == b:
            raise InvalidInput("cannot merge a block with itself")
        a, b = sorted((a, b))
        new = list(self.blocks)
        new[a] = new[a] + new[b]
        del new[b]
        return OrthogonalDecomposition(tuple(new), self.dim)


def euclidean_metric(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.sqrt(np.sum((np.asarray(x, float) - np.asarray(y, float)) ** 2)))


@dataclass(frozen=True)
class MeasurementSetup:
    """Decomposition plus an outcome label (eigenvalue tuple) per subspace.

    The labels live in R^D; the metric on label space defaults to
    Euclidean and is only used by the metric uncertainty.
    """

    decomposition: OrthogonalDecomposition
    eigtuples: np.ndarray
    metric: Callable[[np.ndarray, np.ndarray], float] = euclidean_metric

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.eigtuples, dtype=float))
        if pts.shape[0] != self.decomposition.m_count:
            raise InvalidInput(
                f"need one eigenvalue tuple per subspace: got {pts.shape[0]} "
                f"for {self.decomposition.m_count} blocks"
            )
        for i in range(pts.shape[0]):
            for j in range(i + 1, pts.shape[0]):
                if np.array_equal(pts[i], pts[j]):
                    raise InvalidInput(f"eigenvalue tuples {i} and {j} coincide")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "eigtuples", pts)


def _amps_in_basis(psi: PureState, basis: OrthonormalBasis | None) -> np.ndarray:
    if basis is None:
        return psi.amps
    if basis.dim != psi.dim:
        raise InvalidInput(f"basis dimension {basis.dim} != state dimension {psi.dim}")
    return basis.vectors.conj().T @ psi.amps


def basis_change(psi: PureState, basis: OrthonormalBasis) -> PureState:
    """Coordinates of psi in the given basis: amplitude i is <i|psi>."""
    return PureState(_amps_in_basis(psi, basis))


def subspace_probs(
    psi: PureState,
    dec: OrthogonalDecomposition,
    basis: OrthonormalBasis | None = None,
) -> ProbabilityVector:
    """Collapse probabilities p_m = sum_{i in block m} |<i|psi>|^2."""
    if dec.dim != psi.dim:
        raise InvalidInput(f"decomposition dimension {dec.dim} != state dimension {psi.dim}")
    amps = _amps_in_basis(psi, basis)
    sq = np.abs(amps) ** 2
    probs = [math.fsum(sq[list(block)].tolist()) for block in dec.blocks]
    return ProbabilityVector(np.array(probs))


def mu_uncertainty(
    psi: PureState,
    dec: OrthogonalDecomposition,
    basis: OrthonormalBasis | None,
    c: CountingFunction,
) -> float:
    """Effective number of distinct outcomes for the decomposition; in [1, M]."""
    probs = subspace_probs(psi, dec, basis)
    return effnum(weights_from_probs(probs), c)


def mu_uncertainty_min(
    psi: PureState,
    dec: OrthogonalDecomposition,
    basis: OrthonormalBasis | None = None,
) -> float:
    """Smallest consistent outcome abundance; lower-bounds every kernel."""
    return mu_uncertainty(psi, dec, basis, CountingFunction.minimal())


def metric_uncertainty(
    psi: PureState,
    setup: MeasurementSetup,
    basis: OrthonormalBasis | None = None,
) -> float:
    """Probability-weighted spread of outcome labels around their mean.

    Returns sqrt(sum_m p_m * rho(lambda_m, mean)^2) with the componentwise
    mean of the labels; rho is the setup's metric.
    """
    probs = subspace_probs(psi, setup.decomposition, basis)
    pts = setup.eigtuples
    mean = probs.p @ pts
    dev_sq = [
        p * setup.metric(pts[m], mean) ** 2 for m, p in enumerate(probs.p.tolist())
    ]
    return math.sqrt(math.fsum(dev_sq))
