"""Counting kernels, weight vectors and effective number functions.

An effective number function assigns a consistent "effective count" to a
collection of N objects carrying counting weights w_i = N * p_i.  It is a
separable sum sum_i c(w_i) over a per-weight kernel c with c(0) = 0 and
c(1) = 1.  Two kernel families are built in:

* ``minimal``:   c(w) = min{w, 1} -- the smallest consistent count.
* ``canonical``: c(w) = min{w**alpha, 1} for 0 < alpha <= 1; alpha = 1
  coincides with the minimal kernel.

User-supplied kernels are accepted and can be screened against the
necessary conditions with :func:`validate_counting_function`.

All reductions use exact summation (``math.fsum``), so effective numbers
are invariant under permutation of the weights bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidInput

PROB_SUM_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12  # scaled by n at the point of use


def _readonly_float_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InvalidInput(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInput(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains non-finite entries")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ProbabilityVector:
    """Non-negative probabilities over n objects, summing to one."""

    p: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        arr = _readonly_float_array(self.p, "probability vector")
        if np.any(arr < 0.0):
            raise InvalidInput("probabilities must be non-negative")
        total = math.fsum(arr.tolist())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise InvalidInput(
                f"probabilities must sum to 1 within {PROB_SUM_TOL:g}; got {total!r}"
            )
        object.__setattr__(self, "p", arr)
        object.__setattr__(self, "n", int(arr.size))


@dataclass(frozen=True)
class WeightVector:
    """Non-negative counting weights summing to the nominal count n.

    ``n`` defaults to the number of entries; it may be given explicitly
    when the weights carry trailing structural zeros beyond the nominal
    count (a reduced density matrix larger than its Schmidt sector, say).
    """

    w: np.ndarray
    n: int | None = None

    def __post_init__(self):
        arr = _readonly_float_array(self.w, "weight vector")
        if np.any(arr < 0.0):
            raise InvalidInput("counting weights must be non-negative")
        n = int(arr.size) if self.n is None else int(self.n)
        if n < 1:
            raise InvalidInput("nominal count must be positive")
        total = math.fsum(arr.tolist())
        if abs(total - n) > WEIGHT_SUM_TOL * n:
            raise InvalidInput(
                f"counting weights must sum to n={n} within {WEIGHT_SUM_TOL * n:g}; "
                f"got {total!r}"
            )
        object.__setattr__(self, "w", arr)
        object.__setattr__(self, "n", n)


def _minimal_eval(w: np.ndarray) -> np.ndarray:
    return np.minimum(w, 1.0)


def _canonical_eval(alpha: float) -> Callable[[np.ndarray], np.ndarray]:
    def _eval(w: np.ndarray) -> np.ndarray:
        return np.minimum(np.power(w, alpha), 1.0)

    return _eval


@dataclass(frozen=True)
class CountingFunction:
    """Per-weight kernel c(w) of an effective number function.

    ``kind`` is one of ``"minimal"``, ``"canonical"`` or ``"user"``; the
    canonical family carries its exponent in ``alpha``.
    """

    kind: str
    func: Callable[[np.ndarray], np.ndarray]
    alpha: float | None = None

    @classmethod
    def minimal(cls) -> "CountingFunction":
        """Kernel min{w, 1}: the smallest consistent count."""
        return cls(kind="minimal", func=_minimal_eval)

    @classmethod
    def canonical(cls, alpha: float) -> "CountingFunction":
        """Kernel min{w**alpha, 1} with 0 < alpha <= 1.

        alpha = 1 returns the minimal kernel's evaluator so the two agree
        bit-for-bit.
        """
        alpha = float(alpha)
        if not 0.0 < alpha <= 1.0:
            raise InvalidInput(f"canonical exponent must lie in (0, 1], got {alpha}")
        if alpha == 1.0:
            return cls(kind="canonical", func=_minimal_eval, alpha=1.0)
        return cls(kind="canonical", func=_canonical_eval(alpha), alpha=alpha)

    @classmethod
    def from_callable(cls, func: Callable[[np.ndarray], np.ndarray]) -> "CountingFunction":
        """Wrap a user-supplied vectorized kernel; see validate_counting_function."""
        return cls(kind="user", func=func)

    def __call__(self, w) -> np.ndarray:
        return np.asarray(self.func(np.asarray(w, dtype=float)), dtype=float)

    @property
    def label(self) -> str:
        if self.kind == "canonical":
            return f"canonical(alpha={self.alpha:g})"
        return self.kind


def weights_from_probs(p: ProbabilityVector) -> WeightVector:
    """Rescale probabilities to counting weights w_i = n * p_i."""
    return WeightVector(p.n * p.p)


def effnum(w: WeightVector, c: CountingFunction) -> float:
    """Effective count sum_i c(w_i); lies in [1, n] for valid kernels."""
    return math.fsum(c(w.w).tolist())


def effnum_min(w: WeightVector) -> float:
    """Smallest consistent effective count sum_i min{w_i, 1}."""
    return effnum(w, CountingFunction.minimal())


def concat(w1: WeightVector, w2: WeightVector) -> WeightVector:
    """Join the weight tuples of two disjoint collections."""
    return WeightVector(np.concatenate([w1.w, w2.w]), n=w1.n + w2.n)


def product(p: ProbabilityVector, q: ProbabilityVector) -> ProbabilityVector:
    """Product distribution with entries p_i * q_j in row-major order."""
    return ProbabilityVector(np.outer(p.p, q.p).ravel())


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class CountingFunctionReport:
    """Pass/fail record of the necessary-condition screen of a kernel."""

    checks: tuple[ConditionCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            lines.append(f"{c.name:<22} {status}  {c.detail}")
        return "\n".join(lines)


def default_sample_grid(w_max: float = 64.0, points: int = 10_001) -> np.ndarray:
    """Uniform validation grid on [0, w_max]."""
    if w_max <= 1.0:
        raise InvalidInput("sample grid must extend beyond w = 1")
    return np.linspace(0.0, float(w_max), int(points))


def validate_counting_function(
    c: CountingFunction,
    sample_grid: Sequence[float] | np.ndarray | None = None,
    *,
    continuity_factor: float = 10.0,
) -> CountingFunctionReport:
    """Screen a kernel against the necessary conditions, by sampling.

    Checked: c(0) = 0, c(1) = 1, boundedness 0 <= c <= 1, pointwise
    domination of the minimal kernel, and a sampled continuity heuristic.
    The continuity bound is scale-relative: adjacent sampled increments
    must satisfy ``|dc| <= continuity_factor * dx / max(x, dx)``.  An
    absolute bound cannot work near w = 0, where valid kernels may rise
    arbitrarily steeply.  This is a screen for necessary conditions only;
    passing it does not certify a kernel as a consistent counting rule.
    """
    grid = default_sample_grid() if sample_grid is None else np.asarray(sample_grid, dtype=float)
    grid = np.unique(grid)
    if grid.size < 16 or grid[0] < 0.0:
        raise InvalidInput("sample grid must hold >= 16 distinct points in [0, w_max]")
    values = c(grid)

    tol = 1e-12
    c0 = float(c(np.array([0.0]))[0])
    c1 = float(c(np.array([1.0]))[0])
    checks = [
        ConditionCheck("zero_at_origin", abs(c0) <= tol, f"c(0) = {c0:.3e}"),
        ConditionCheck("one_at_unit", abs(c1 - 1.0) <= tol, f"c(1) = {c1!r}"),
    ]

    low = float(np.min(values))
    high = float(np.max(values))
    checks.append(
        ConditionCheck(
            "bounded",
            low >= -tol and high <= 1.0 + tol,
            f"range [{low:.6g}, {high:.6g}] on sampled grid",
        )
    )

    deficit = float(np.min(values - np.minimum(grid, 1.0)))
    checks.append(
        ConditionCheck(
            "dominates_minimal",
            deficit >= -tol,
            f"min(c(w) - min{{w,1}}) = {deficit:.3e}",
        )
    )

    dx = np.diff(grid)
    dc = np.abs(np.diff(values))
    thresholds = continuity_factor * dx / np.maximum(grid[:-1], dx)
    worst = float(np.max(dc / thresholds))
    checks.append(
        ConditionCheck(
            "sampled_continuity",
            worst <= 1.0,
            f"max increment at {worst:.3g} of the heuristic bound",
        )
    )

    return CountingFunctionReport(checks=tuple(checks))
