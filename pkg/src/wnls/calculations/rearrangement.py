# rearrangement.py
"""
Rearrangement machinery on the grid.

Distribution functions, the decreasing rearrangement u^#, Schwarz
symmetrization u*(x) = u^#(π|x|²) and the Hardy-Littlewood and
Pólya-Szegő verifiers. Fields are extended by zero outside the box; a
complex field is replaced by its modulus.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..config import thresholds
from .errors import ParameterError
from .grid import Field, GridSpec, integrate_array, make_grid, make_singular_weight, require_same_grid

logger = logging.getLogger(__name__)


def _real_values(u: Field) -> np.ndarray:
    if np.any(u.values.imag != 0.0):
        return u.modulus()
    return u.values.real.copy()


def _nonnegative_values(u: Field) -> np.ndarray:
    values = _real_values(u)
    low = float(np.min(values))
    if low < 0.0:
        raise ParameterError(f"rearrangement needs a nonnegative field, min value {low:.6g}")
    return values


def distribution_function(u: Field, t: float) -> float:
    """μ_u(t) = |{u > t}| as h² × number of cells above t."""
    return float(u.grid.cell_area * np.count_nonzero(_real_values(u) > t))


@dataclass(frozen=True, eq=False)
class RearrangedProfile:
    """
    Step function u^# on [0, total_measure).

    values are strictly decreasing; measures[i] is the measure of the level
    set {u = values[i]}.
    """

    values: np.ndarray
    measures: np.ndarray
    total_measure: float

    def __call__(self, s):
        """Right-continuous evaluation u^#(s); zero beyond the total measure."""
        s = np.asarray(s, dtype=np.float64)
        edges = np.cumsum(self.measures)
        idx = np.searchsorted(edges, s, side="right")
        padded = np.append(self.values, 0.0)
        out = padded[np.minimum(idx, len(self.values))]
        return out.item() if out.ndim == 0 else out

    def distribution(self, t: float) -> float:
        """Σ of measures with value > t."""
        return float(np.sum(self.measures[self.values > t]))


def decreasing_rearrangement(u: Field) -> RearrangedProfile:
    """Merge equal cell values and order them descending, each cell weighing h²."""
    values = _nonnegative_values(u).ravel()
    levels, counts = np.unique(values, return_counts=True)
    area = u.grid.cell_area
    return RearrangedProfile(
        values=levels[::-1].copy(),
        measures=counts[::-1] * area,
        total_measure=float(values.size * area),
    )


def schwarz_symmetrization(u: Field) -> Field:
    """
    Radial, radially nonincreasing field equimeasurable with u.

    Sorted values go to cells ordered by |x|, ties broken by row-major index.
    """
    values = _nonnegative_values(u).ravel()
    ranked = np.sort(values)[::-1]
    radius = u.grid.radius().ravel()
    order = np.lexsort((np.arange(radius.size), radius))
    out = np.empty_like(ranked)
    out[order] = ranked
    return Field(u.grid, out.reshape(u.grid.n, u.grid.n))


@dataclass(frozen=True)
class HardyLittlewood:
    lhs: float
    rhs: float
    holds: bool


def hardy_littlewood_check(f: Field, g: Field) -> HardyLittlewood:
    """∫fg against the aligned pairing of the sorted cell values."""
    require_same_grid(f.grid, g.grid)
    fv = _nonnegative_values(f)
    gv = _nonnegative_values(g)
    lhs = integrate_array(f.grid, fv * gv)
    rhs = float(f.grid.cell_area * np.dot(np.sort(fv, axis=None), np.sort(gv, axis=None)))
    slack = thresholds.HARDY_LITTLEWOOD_SLACK * max(1.0, abs(rhs))
    return HardyLittlewood(lhs=lhs, rhs=rhs, holds=lhs <= rhs + slack)


def finite_difference_gradient_sq(u: Field) -> float:
    """‖∇u‖² with periodic centered differences."""
    v = u.values
    h = u.grid.spacing
    dx = (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)) / (2.0 * h)
    dy = (np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1)) / (2.0 * h)
    return integrate_array(u.grid, np.abs(dx) ** 2 + np.abs(dy) ** 2)


@dataclass(frozen=True)
class PolyaSzego:
    grad_before: float
    grad_after: float
    holds: bool

    @property
    def excess(self) -> float:
        """Relative overshoot grad_after/grad_before - 1 (negative when symmetrization helps)."""
        return self.grad_after / self.grad_before - 1.0 if self.grad_before > 0 else 0.0


def polya_szego_check(u: Field, tolerance: float = thresholds.POLYA_SZEGO_TOLERANCE) -> PolyaSzego:
    """Compare ‖∇u*‖² with ‖∇u‖²; both by finite differences."""
    before = finite_difference_gradient_sq(u.with_values(_nonnegative_values(u)))
    after = finite_difference_gradient_sq(schwarz_symmetrization(u))
    return PolyaSzego(grad_before=before, grad_after=after, holds=after <= before * (1.0 + tolerance))


# ----------------------------------------------------------------------
# Rearrangement of the weight |x|^{-b}
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeightRearrangement:
    """Analytic ω^#(s) = π^{b/2} s^{-b/2} sampled next to its grid counterpart."""

    b: float
    domain_radius: float
    s: np.ndarray
    analytic: np.ndarray
    discrete: np.ndarray

    @property
    def relative_error(self) -> np.ndarray:
        return np.abs(self.discrete - self.analytic) / self.analytic

    @property
    def max_relative_error(self) -> float:
        return float(np.max(self.relative_error))


def analytic_weight_rearrangement(b: float, s):
    """ω^#(s) = π^{b/2} s^{-b/2} for the weight |x|^{-b}."""
    return np.pi ** (b / 2.0) * np.asarray(s, dtype=np.float64) ** (-b / 2.0)


def weight_rearrangement(
    b: float,
    domain_radius: float = 2.0,
    n: int = 512,
    s_min: float = 0.1,
    samples: int = 200,
) -> WeightRearrangement:
    """
    Compare π^{b/2} s^{-b/2} with the rearranged grid weight on [s_min, πR²].

    The grid is the box [-R, R)², which contains the disk of radius R, so
    for s <= πR² the box rearrangement coincides with the disk one.
    """
    if not 0.0 < b < 2.0:
        raise ParameterError(f"weight exponent b={b} outside (0, 2)")
    grid: GridSpec = make_grid(n, domain_radius)
    weight = make_singular_weight(grid, b)
    profile = decreasing_rearrangement(Field(grid, weight.values))
    s = np.geomspace(s_min, np.pi * domain_radius ** 2, samples)
    result = WeightRearrangement(
        b=b,
        domain_radius=domain_radius,
        s=s,
        analytic=analytic_weight_rearrangement(b, s),
        discrete=profile(s),
    )
    logger.debug(f"Weight rearrangement b={b}: max relative error {result.max_relative_error:.3g}")
    return result
