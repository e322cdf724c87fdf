"""Continuum limits: effective volumes, spectral-density fractions, and
refinement/extrapolation drivers.

Everything here is evaluated with midpoint-rule Riemann sums on hypercubic
grids: a cell contributes its midpoint sample times its volume.  That
single convention keeps the additivity identity for partitions of the
support exact at finite resolution and makes matched-sampling consistency
relations hold bit-for-bit.

The central quantity is the relative uncertainty fraction

    F[P, eta] = sum_cells  eta * c(P / eta) * cellvol      in (0, 1]

for a probability density P and a spectral density eta sharing a support.
Uniform eta = 1/V turns V * F into an effective volume, which is also
available directly for wave functions on grids and for plain regions
carrying a probability density (effective Jordan content).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .counting import CountingFunction, WeightVector, effnum
from .errors import InvalidInput

GRID_NORM_TOL = 1e-8
SUPPORT_RTOL = 1e-14
OFF_SUPPORT_TOL = 1e-12
MAX_GRID_DIM = 3


@dataclass(frozen=True)
class Grid:
    """Hypercubic cell grid in up to three dimensions.

    ``shape`` holds the cell counts per axis, ``spacing`` the cell edge
    lengths.  Cell midpoints are at origin + (index + 1/2) * spacing and
    cells are enumerated row-major.
    """

    shape: tuple[int, ...]
    spacing: tuple[float, ...]
    origin: tuple[float, ...] | None = None

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        spacing = tuple(float(s) for s in self.spacing)
        if not 1 <= len(shape) <= MAX_GRID_DIM:
            raise InvalidInput(
                f"grids support 1..{MAX_GRID_DIM} dimensions, got {len(shape)}; "
                "supply explicit cell volumes for higher dimensions"
            )
        if len(spacing) != len(shape):
            raise InvalidInput("shape and spacing must have the same length")
        if any(s < 1 for s in shape) or any(h <= 0.0 for h in spacing):
            raise InvalidInput("cell counts must be >= 1 and spacings positive")
        origin = (0.0,) * len(shape) if self.origin is None else tuple(float(x) for x in self.origin)
        if len(origin) != len(shape):
            raise InvalidInput("origin must have one coordinate per dimension")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)

    @property
    def d(self) -> int:
        return len(self.shape)

    @property
    def ncells(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def total_volume(self) -> float:
        return float(np.prod([n * h for n, h in zip(self.shape, self.spacing)]))

    def centers(self) -> np.ndarray:
        """Cell midpoints as an (ncells, d) array, row-major."""
        axes = [
            self.origin[k] + (np.arange(self.shape[k]) + 0.5) * self.spacing[k]
            for k in range(self.d)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


def riemann_sum(field: np.ndarray, grid: Grid) -> float:
    """Midpoint-rule integral of a per-cell field over the grid."""
    field = np.asarray(field, dtype=float)
    if field.size != grid.ncells:
        raise InvalidInput(f"field has {field.size} cells, grid has {grid.ncells}")
    return float(np.sum(field * grid.cell_volume))


@dataclass(frozen=True)
class GridWaveFunction:
    """Complex cell samples of a wave function, unit Riemann norm."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.size != self.grid.ncells:
            raise InvalidInput(
                f"wave function has {vals.size} samples, grid has {self.grid.ncells} cells"
            )
        vals = vals.ravel().copy()
        norm = float(np.sum(np.abs(vals) ** 2) * self.grid.cell_volume)
        if abs(norm - 1.0) > GRID_NORM_TOL:
            raise InvalidInput(
                f"Riemann norm must equal 1 within {GRID_NORM_TOL:g}; got {norm!r}"
            )
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray], *,
               normalize: bool = True) -> "GridWaveFunction":
        """Sample ``fn`` at the cell midpoints, optionally normalizing."""
        vals = np.asarray(fn(grid.centers()), dtype=complex).ravel()
        if vals.size != grid.ncells:
            raise InvalidInput("sampling callable returned the wrong number of values")
        if normalize:
            norm = float(np.sum(np.abs(vals) ** 2) * grid.cell_volume)
            if norm <= 0.0:
                raise InvalidInput("cannot normalize an identically-zero wave function")
            vals = vals / math.sqrt(norm)
        return cls(grid=grid, values=vals)


def effective_volume(psi: GridWaveFunction, c: CountingFunction) -> float:
    """Effective volume occupied by the state: integral of c(V |psi|^2)."""
    v = psi.grid.total_volume
    dens = v * np.abs(psi.values) ** 2
    return riemann_sum(c(dens), psi.grid)


def effective_volume_density(psi: GridWaveFunction) -> np.ndarray:
    """Per-cell minimal volume density min{V |psi|^2, 1}.

    Its Riemann sum equals ``effective_volume(psi, minimal)`` exactly.
    """
    v = psi.grid.total_volume
    return np.minimum(v * np.abs(psi.values) ** 2, 1.0)


def _as_cell_volumes(region: "Grid | np.ndarray | Sequence[float]") -> np.ndarray:
    if isinstance(region, Grid):
        return np.full(region.ncells, region.cell_volume)
    vols = np.asarray(region, dtype=float).ravel()
    if vols.size == 0 or np.any(vols <= 0.0):
        raise InvalidInput("cell volumes must be positive and non-empty")
    return vols


def effective_jordan_content(
    region: "Grid | np.ndarray | Sequence[float]",
    p: np.ndarray,
    c: CountingFunction,
) -> float:
    """Effective volume of a region weighted by a probability density.

    ``region`` is a grid or an explicit array of cell volumes; ``p`` holds
    midpoint samples of a density with unit Riemann integral.  Returns the
    integral of c(V * p) where V is the region's total volume; uniform p
    gives V back for every kernel.
    """
    vols = _as_cell_volumes(region)
    p = np.asarray(p, dtype=float).ravel()
    if p.size != vols.size:
        raise InvalidInput(f"density has {p.size} cells, region has {vols.size}")
    if np.any(p < 0.0):
        raise InvalidInput("density samples must be non-negative")
    total = float(np.sum(p * vols))
    if abs(total - 1.0) > GRID_NORM_TOL:
        raise InvalidInput(f"density must integrate to 1 within {GRID_NORM_TOL:g}; got {total!r}")
    v = float(np.sum(vols))
    return float(np.sum(c(v * p) * vols))


def _support_mask(eta: np.ndarray) -> np.ndarray:
    return eta >= SUPPORT_RTOL * float(np.max(eta))


def _check_pair(p: np.ndarray, eta: np.ndarray, vols: np.ndarray, *, what: str) -> None:
    if p.shape != eta.shape or p.size != vols.size:
        raise InvalidInput(f"{what}: density sample arrays must share the cell layout")
    if np.any(p < 0.0) or np.any(eta < 0.0):
        raise InvalidInput(f"{what}: density samples must be non-negative")
    off = ~_support_mask(eta)
    if np.any(p[off] > OFF_SUPPORT_TOL):
        raise InvalidInput(
            f"{what}: probability density is positive on cells outside the spectral support"
        )


def _relative_mu(
    p: np.ndarray, eta: np.ndarray, vols: np.ndarray, c: CountingFunction
) -> float:
    """Riemann sum of eta * c(p / eta) over the support cells."""
    mask = _support_mask(eta)
    ratio = p[mask] / eta[mask]
    return float(np.sum(eta[mask] * c(ratio) * vols[mask]))


@dataclass(frozen=True)
class SpectralDensityPair:
    """Matched midpoint samples of an outcome density P and a spectral
    density eta over a common cell layout; both integrate to one.

    The support is the set of cells with eta above 1e-14 of its maximum;
    P must vanish (within 1e-12) off the support.
    """

    p: np.ndarray
    eta: np.ndarray
    cell_volumes: np.ndarray
    grid: Grid | None = None

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float).ravel().copy()
        eta = np.asarray(self.eta, dtype=float).ravel().copy()
        vols = np.asarray(self.cell_volumes, dtype=float).ravel().copy()
        _check_pair(p, eta, vols, what="spectral density pair")
        for name, arr in (("P", p), ("eta", eta)):
            total = float(np.sum(arr * vols))
            if abs(total - 1.0) > GRID_NORM_TOL:
                raise InvalidInput(
                    f"{name} must integrate to 1 within {GRID_NORM_TOL:g}; got {total!r}"
                )
        for arr in (p, eta, vols):
            arr.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "cell_volumes", vols)

    @classmethod
    def from_grid(cls, grid: Grid, p, eta) -> "SpectralDensityPair":
        vols = np.full(grid.ncells, grid.cell_volume)
        return cls(p=np.asarray(p, float), eta=np.asarray(eta, float),
                   cell_volumes=vols, grid=grid)

    @classmethod
    def from_cells(cls, cell_volumes, p, eta) -> "SpectralDensityPair":
        return cls(p=np.asarray(p, float), eta=np.asarray(eta, float),
                   cell_volumes=_as_cell_volumes(cell_volumes), grid=None)

    @property
    def support_mask(self) -> np.ndarray:
        return _support_mask(self.eta)


def relative_mu_continuum(sd: SpectralDensityPair, c: CountingFunction) -> float:
    """Relative uncertainty fraction of the pair; in (0, 1], 1 iff P = eta."""
    return _relative_mu(sd.p, sd.eta, sd.cell_volumes, c)


@dataclass(frozen=True)
class SectorFamily:
    """Mixed discrete/continuous decomposition: one (P_m, eta_m) sample
    pair per discrete sector over a shared continuous cell layout.

    The totals sum over sectors to one: integral of sum_m eta_m = 1 and
    the same for P_m.
    """

    ps: tuple[np.ndarray, ...]
    etas: tuple[np.ndarray, ...]
    cell_volumes: np.ndarray
    grid: Grid | None = None

    def __post_init__(self):
        vols = np.asarray(self.cell_volumes, dtype=float).ravel().copy()
        ps = tuple(np.asarray(a, dtype=float).ravel().copy() for a in self.ps)
        etas = tuple(np.asarray(a, dtype=float).ravel().copy() for a in self.etas)
        if len(ps) == 0 or len(ps) != len(etas):
            raise InvalidInput("need matching non-empty P and eta sector lists")
        for m, (p, eta) in enumerate(zip(ps, etas)):
            _check_pair(p, eta, vols, what=f"sector {m}")
        for name, arrs in (("P", ps), ("eta", etas)):
            total = math.fsum(float(np.sum(a * vols)) for a in arrs)
            if abs(total - 1.0) > GRID_NORM_TOL:
                raise InvalidInput(
                    f"sector {name} densities must integrate to 1 in total; got {total!r}"
                )
        for arr in (*ps, *etas, vols):
            arr.flags.writeable = False
        object.__setattr__(self, "ps", ps)
        object.__setattr__(self, "etas", etas)
        object.__setattr__(self, "cell_volumes", vols)

    @classmethod
    def from_grid(cls, grid: Grid, sectors) -> "SectorFamily":
        """Build from (p_m, eta_m) pairs sampled on a common grid."""
        ps = tuple(np.asarray(p, float) for p, _ in sectors)
        etas = tuple(np.asarray(e, float) for _, e in sectors)
        return cls(ps=ps, etas=etas,
                   cell_volumes=np.full(grid.ncells, grid.cell_volume), grid=grid)

    @property
    def m_count(self) -> int:
        return len(self.ps)


def mixed_relative_mu(sf: SectorFamily, c: CountingFunction) -> float:
    """Uncertainty fraction summed over discrete sectors.

    A single-sector family reduces to :func:`relative_mu_continuum`
    exactly.
    """
    return math.fsum(
        _relative_mu(p, eta, sf.cell_volumes, c) for p, eta in zip(sf.ps, sf.etas)
    )


@dataclass(frozen=True)
class PartitionAdditivityResult:
    value: float          # fraction of the full pair
    split_value: float    # F1 * fraction(part 1) + F2 * fraction(part 2)
    gap: float
    fractions: tuple[float, float]


def partition_additivity_check(
    sd: SpectralDensityPair,
    part_one: np.ndarray,
    c: CountingFunction,
) -> PartitionAdditivityResult:
    """Two-sided evaluation of the additivity identity under a support cut.

    ``part_one`` is a boolean cell mask selecting the first part.  Each
    part inherits the restricted densities rescaled by the part's spectral
    mass F_i = integral of eta over the part; the identity

        F[P, eta] = F1 * F[P/F1, eta/F1 | part 1] + F2 * (...)

    is exact at the Riemann-sum level, so the returned gap is pure
    floating-point noise.
    """
    mask = np.asarray(part_one, dtype=bool).ravel()
    if mask.size != sd.p.size:
        raise InvalidInput("partition mask must cover every cell")
    value = _relative_mu(sd.p, sd.eta, sd.cell_volumes, c)
    split_terms = []
    fractions = []
    for part in (mask, ~mask):
        f_part = float(np.sum(sd.eta[part] * sd.cell_volumes[part]))
        if f_part <= 0.0:
            raise InvalidInput("partition part carries no spectral mass")
        piece = _relative_mu(
            sd.p[part] / f_part, sd.eta[part] / f_part, sd.cell_volumes[part], c
        )
        fractions.append(f_part)
        split_terms.append(f_part * piece)
    split_value = split_terms[0] + split_terms[1]
    return PartitionAdditivityResult(
        value=value,
        split_value=split_value,
        gap=abs(value - split_value),
        fractions=(fractions[0], fractions[1]),
    )


@dataclass(frozen=True)
class ReparamCheckResult:
    value: float
    mapped_value: float
    discrepancy: float
    error_bound: float

    @property
    def passed(self) -> bool:
        return self.discrepancy <= self.error_bound


def _coarsen(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a[0::2] + a[1::2])


def reparametrization_check(
    sd: SpectralDensityPair,
    f_values: np.ndarray,
    f_derivs: np.ndarray,
    source_grid: Grid,
    c: CountingFunction,
) -> ReparamCheckResult:
    """Verify invariance of the fraction under a relabeling of the spectrum.

    The pair ``sd`` lives on a one-dimensional grid in the target variable;
    ``f_values``/``f_derivs`` sample a strictly increasing differentiable
    map and its derivative at the midpoints of ``source_grid``.  Both
    densities transform with the Jacobian (P' = P(f) f', eta' = eta(f) f')
    and the fraction is evaluated on each side by midpoint quadrature;
    target-side values at mapped points come from linear interpolation.

    The discrepancy between the two sides is reported together with a
    two-sided quadrature error estimate obtained by re-evaluating each
    side at half resolution.  ``passed`` states that the discrepancy is
    within that bound.
    """
    if sd.grid is None or sd.grid.d != 1:
        raise InvalidInput("the shipped checker needs a pair on a 1-dimensional grid")
    if source_grid.d != 1:
        raise InvalidInput("source grid must be 1-dimensional")
    f = np.asarray(f_values, dtype=float).ravel()
    fp = np.asarray(f_derivs, dtype=float).ravel()
    if f.size != source_grid.ncells or fp.size != source_grid.ncells:
        raise InvalidInput("need one f and one f' sample per source cell")
    if np.any(np.diff(f) <= 0.0):
        raise InvalidInput("map samples must be strictly increasing")
    if np.any(fp <= 0.0):
        raise InvalidInput("map derivative must be positive on the support")
    if sd.grid.ncells % 2 or source_grid.ncells % 2 or min(sd.grid.ncells, source_grid.ncells) < 8:
        raise InvalidInput("cell counts must be even and >= 8 for the error estimate")

    centers = sd.grid.centers()[:, 0]
    h_target = sd.grid.spacing[0]
    h_source = source_grid.spacing[0]

    def target_side(p, eta, h):
        mask = _support_mask(eta)
        return float(np.sum(eta[mask] * c(p[mask] / eta[mask]) * h))

    def mapped_side(xs, ps, es, f_s, fp_s, h):
        p2 = np.interp(f_s, xs, ps) * fp_s
        eta2 = np.interp(f_s, xs, es) * fp_s
        mask = _support_mask(eta2)
        return float(np.sum(eta2[mask] * c(p2[mask] / eta2[mask]) * h))

    value = target_side(sd.p, sd.eta, h_target)
    value_coarse = target_side(_coarsen(sd.p), _coarsen(sd.eta), 2.0 * h_target)
    mapped = mapped_side(centers, sd.p, sd.eta, f, fp, h_source)
    mapped_coarse = mapped_side(
        centers, sd.p, sd.eta, _coarsen(f), _coarsen(fp), 2.0 * h_source
    )

    discrepancy = abs(value - mapped)
    bound = abs(value - value_coarse) + abs(mapped - mapped_coarse)
    bound += 1e-14 * (abs(value) + 1.0)  # floor for exactly-matching sides
    return ReparamCheckResult(
        value=value, mapped_value=mapped, discrepancy=discrepancy, error_bound=bound
    )


@dataclass(frozen=True)
class RefinementLevel:
    """One step of a refinement family: counting weights over m blocks at
    regularization scale ``spacing``."""

    m_count: int
    weights: np.ndarray
    spacing: float


@dataclass(frozen=True)
class RefinementRow:
    level: int
    m_count: int
    spacing: float
    ratio: float


@dataclass(frozen=True)
class RefinementResult:
    rows: tuple[RefinementRow, ...]
    extrapolated: float
    residual: float
    fit_order: int
    window: int


def refine_sequence(
    problem: Callable[[int], RefinementLevel],
    levels: int,
    c: CountingFunction,
    *,
    fit_order: int = 1,
    window: int | None = None,
) -> RefinementResult:
    """Drive a refinement family and extrapolate its fraction to zero spacing.

    ``problem(k)`` supplies the discretization for level k = 1..levels.
    Each level contributes the ratio F_k = effective count / m_count; the
    limit is estimated by a least-squares fit of F_k = F_inf + a * h_k**q
    over the last ``window`` levels (default: the larger of 3 and half the
    levels, rounded up) with q = ``fit_order``.  The reported residual is
    the largest misfit inside the window; treat a residual comparable to
    the level-to-level differences as a sign the model order is wrong.
    """
    if levels < 3:
        raise InvalidInput("need at least 3 refinement levels to extrapolate")
    if fit_order < 1:
        raise InvalidInput("fit order must be a positive integer")
    rows = []
    for k in range(1, levels + 1):
        lev = problem(k)
        wv = WeightVector(lev.weights)
        if wv.n != lev.m_count:
            raise InvalidInput(
                f"level {k}: weight vector length {wv.n} != m_count {lev.m_count}"
            )
        ratio = effnum(wv, c) / lev.m_count
        rows.append(RefinementRow(level=k, m_count=lev.m_count,
                                  spacing=float(lev.spacing), ratio=ratio))
    if window is None:
        window = max(3, math.ceil(levels / 2))
    window = min(int(window), levels)
    if window < 2:
        raise InvalidInput("fit window must span at least 2 levels")
    tail = rows[-window:]
    x = np.array([row.spacing for row in tail]) ** fit_order
    y = np.array([row.ratio for row in tail])
    design = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    fit = design @ coef
    residual = float(np.max(np.abs(fit - y)))
    return RefinementResult(
        rows=tuple(rows),
        extrapolated=float(coef[0]),
        residual=residual,
        fit_order=fit_order,
        window=window,
    )


def constant_refinement_problem(
    weights, base_spacing: float = 1.0
) -> Callable[[int], RefinementLevel]:
    """Family whose discretization is already converged: every level
    carries the same weights (the spacing still halves per level)."""
    arr = np.asarray(weights, dtype=float).copy()
    m = arr.size

    def problem(k: int) -> RefinementLevel:
        return RefinementLevel(m_count=m, weights=arr, spacing=base_spacing * 0.5 ** (k - 1))

    return problem


def interval_refinement_problem(
    intensity: Callable[[np.ndarray], np.ndarray],
    box: tuple[float, float],
    base_cells: int,
) -> Callable[[int], RefinementLevel]:
    """Dyadic refinement of a 1-d intensity profile on an interval.

    ``intensity`` returns non-negative midpoint samples proportional to
    the probability density (a wave function's |psi|^2, say); each level
    doubles the cell count, renormalizes the cell masses and converts
    them to counting weights.
    """
    lo, hi = float(box[0]), float(box[1])
    if hi <= lo:
        raise InvalidInput("box must have positive length")
    if base_cells < 2:
        raise InvalidInput("need at least 2 base cells")

    def problem(k: int) -> RefinementLevel:
        m = base_cells * 2 ** (k - 1)
        h = (hi - lo) / m
        x = lo + (np.arange(m) + 0.5) * h
        vals = np.asarray(intensity(x), dtype=float)
        if np.any(vals < 0.0):
            raise InvalidInput("intensity samples must be non-negative")
        total = float(np.sum(vals))
        if total <= 0.0:
            raise InvalidInput("intensity vanishes on the whole box")
        weights = m * (vals / total)
        return RefinementLevel(m_count=m, weights=weights, spacing=h)

    return problem
