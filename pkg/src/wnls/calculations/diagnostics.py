# diagnostics.py
"""
Trajectory monitors.

record_observables turns a list of snapshots into an ObservableSeries
(pandas-backed, one row per time). The monitors read that series and
return frozen reports:

- localized_mass_monitor: ∫_{B(S+S')}|u(t)|² >= ∫_{B(S)}|u0|² - C(E)t/S'
- concentration_monitor: sup ‖∇u‖, min ∫ω|u|⁴ and ∫ω|u|⁴ + ‖∇u‖² <= 1
- scattering_diagnostic: Cauchy differences of the pullback e^{-itΔ}u(t)
- strichartz_probe: empirical L⁴_t W^{1,4}_x constant of the free flow
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import ClassVar, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate

from ..config import settings, thresholds
from .errors import ParameterError
from .evolve import TrajectoryState, linear_propagator
from .functionals import hamiltonian, quartic_weighted
from .grid import (
    Field,
    GridSpec,
    SingularWeight,
    disk_mask,
    gradient,
    gradient_l2,
    holder_seminorm,
    integrate_array,
    l2_norm,
    linf_norm,
    lp_norm,
)
from .nonlinearity import PhysParams
from .profiles import random_band_limited

logger = logging.getLogger(__name__)


# ============================================================
# Observable series
# ============================================================

def ball_mass(u: Field, radius: float) -> float:
    """∫_{B(radius)} |u|² with sharp cell-center membership."""
    return integrate_array(u.grid, np.where(disk_mask(u.grid, radius), u.intensity(), 0.0))


def localization_cutoff(grid: GridSpec, S: float, Sp: float) -> np.ndarray:
    """ψ = h(1 - d_S(x)/S') with the ramp h(s) = clip(s, 0, 1), so ‖h'‖∞ = 1."""
    distance = np.maximum(grid.radius() - S, 0.0)
    return np.clip(1.0 - distance / Sp, 0.0, 1.0)


def _h1_distance(a: Field, b: Field) -> float:
    diff = a - b
    return float(np.sqrt(l2_norm(diff) ** 2 + gradient_l2(diff) ** 2))


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Time-indexed diagnostics; `frame` has one row per recorded time."""

    frame: pd.DataFrame
    S: float
    Sp: float

    COLUMNS: ClassVar[List[str]] = [
        "time",
        "mass",
        "kinetic",
        "potential",
        "hamiltonian",
        "linf",
        "grad_l2",
        "quartic_weighted",
        "holder_half",
        "localized_mass",
        "smooth_localized_mass",
        "scattering_cauchy",
    ]

    def __post_init__(self):
        missing = [c for c in self.COLUMNS if c not in self.frame.columns]
        if missing:
            raise ParameterError(f"observable series is missing columns {missing}")
        times = self.frame["time"].to_numpy()
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ParameterError("observable times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.frame)

    @property
    def times(self) -> np.ndarray:
        return self.frame["time"].to_numpy()

    def column(self, name: str) -> np.ndarray:
        return self.frame[name].to_numpy()


def record_observables(
    snapshots: Sequence[TrajectoryState],
    u0: Field,
    w: SingularWeight,
    p: PhysParams,
    S: float = settings.DEFAULT_LOCALIZED_S,
    Sp: float = settings.DEFAULT_LOCALIZED_S_PRIME,
) -> ObservableSeries:
    """
    Evaluate every observable on every snapshot.

    Args:
        snapshots: States in increasing time order
        u0: Initial data (reference for the pullback differences)
        w: Singular weight
        p: Physical parameters
        S, Sp: Inner radius and ramp width of the localized-mass bound

    Returns:
        ObservableSeries with ObservableSeries.COLUMNS
    """
    if S <= 0 or Sp <= 0:
        raise ParameterError(f"localized-mass radii S={S}, S'={Sp} must be positive")
    cutoff_sq = localization_cutoff(u0.grid, S, Sp) ** 2
    rows = []
    previous_pullback: Optional[Field] = None
    for state in snapshots:
        u = state.u
        report = hamiltonian(u, w, p)
        pullback = linear_propagator(u, -state.t)
        cauchy = _h1_distance(pullback, previous_pullback) if previous_pullback is not None else np.nan
        previous_pullback = pullback
        rows.append({
            "time": state.t,
            "mass": report.mass,
            "kinetic": report.kinetic,
            "potential": report.potential,
            "hamiltonian": report.hamiltonian,
            "linf": linf_norm(u),
            "grad_l2": float(np.sqrt(report.kinetic)),
            "quartic_weighted": quartic_weighted(u, w),
            "holder_half": holder_seminorm(u, 0.5),
            "localized_mass": ball_mass(u, S + Sp),
            "smooth_localized_mass": integrate_array(u.grid, cutoff_sq * u.intensity()),
            "scattering_cauchy": cauchy,
        })
    logger.info(f"Recorded observables at {len(rows)} times")
    return ObservableSeries(frame=pd.DataFrame(rows, columns=ObservableSeries.COLUMNS), S=S, Sp=Sp)


# ============================================================
# Monitors
# ============================================================

@dataclass(frozen=True)
class LocalizedMassReport:
    S: float
    Sp: float
    energy: float
    initial_ball_mass: float
    violations: List[Tuple[float, float, float]]   # (t, ball mass, lower bound)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary_rows(self) -> List[Tuple[str, object]]:
        return [
            ("S", self.S),
            ("S'", self.Sp),
            ("C(E)", 2.0 * self.energy),
            ("initial B(S) mass", self.initial_ball_mass),
            ("violations", len(self.violations)),
        ]


def localized_mass_monitor(series: ObservableSeries, u0: Field, S: float, Sp: float, E: float) -> LocalizedMassReport:
    """
    Check ∫_{B(S+S')}|u(t)|² >= ∫_{B(S)}|u0|² - C(E) t / S' with C(E) = 2E.

    E is H(u0) + M(u0); the series must have been recorded with the same S, S'.
    """
    if S <= 0 or Sp <= 0:
        raise ParameterError(f"localized-mass radii S={S}, S'={Sp} must be positive")
    if (series.S, series.Sp) != (S, Sp):
        raise ParameterError(f"series was recorded with S={series.S}, S'={series.Sp}, not S={S}, S'={Sp}")
    initial = ball_mass(u0, S)
    rate = 2.0 * E / Sp
    violations = []
    for t, observed in zip(series.times, series.column("localized_mass")):
        bound = initial - rate * t
        if observed < bound - thresholds.LOCALIZED_MASS_SLACK * max(1.0, abs(bound)):
            violations.append((float(t), float(observed), float(bound)))
    if violations:
        logger.warning(f"Localized mass bound violated at {len(violations)} times (S={S}, S'={Sp})")
    return LocalizedMassReport(S=S, Sp=Sp, energy=E, initial_ball_mass=initial, violations=violations)


@dataclass(frozen=True)
class ConcentrationReport:
    sup_grad: float
    min_quartic: float
    max_coupled: float
    coupled_bound_ok: bool

    def summary_rows(self) -> List[Tuple[str, object]]:
        return [
            ("sup ||grad u||", self.sup_grad),
            ("min int w|u|^4", self.min_quartic),
            ("max int w|u|^4 + ||grad u||^2", self.max_coupled),
            ("coupled bound", "ok" if self.coupled_bound_ok else "violated"),
        ]


def concentration_monitor(series: ObservableSeries) -> ConcentrationReport:
    """sup ‖∇u‖, min ∫ω|u|⁴ and whether ∫ω|u|⁴ + ‖∇u‖² <= 1 + slack held throughout."""
    grad = series.column("grad_l2")
    quartic = series.column("quartic_weighted")
    coupled = quartic + grad ** 2
    max_coupled = float(np.max(coupled))
    ok = max_coupled <= 1.0 + thresholds.COUPLED_BOUND_SLACK
    if not ok:
        logger.warning(f"Coupled bound exceeded: max {max_coupled:.9g}")
    return ConcentrationReport(
        sup_grad=float(np.max(grad)),
        min_quartic=float(np.min(quartic)),
        max_coupled=max_coupled,
        coupled_bound_ok=bool(ok),
    )


@dataclass(frozen=True)
class ScatteringReport:
    times: List[float]
    cauchy_sequence: List[float]

    def decreasing_after(self, t0: float) -> bool:
        """True when the differences ending after t0 decrease monotonically."""
        tail = [d for t, d in zip(self.times[1:], self.cauchy_sequence) if t > t0]
        return all(b < a for a, b in zip(tail, tail[1:]))

    def summary_rows(self) -> List[Tuple[float, float]]:
        return list(zip(self.times[1:], self.cauchy_sequence))


def scattering_diagnostic(snapshots: Sequence[TrajectoryState]) -> ScatteringReport:
    """
    Consecutive H¹ differences of the pullbacks e^{-itΔ}u(t).

    A decreasing sequence is consistent with scattering; it is reported as a
    trend, never as a verdict.
    """
    pullbacks = [linear_propagator(s.u, -s.t) for s in snapshots]
    diffs = [_h1_distance(b, a) for a, b in zip(pullbacks, pullbacks[1:])]
    return ScatteringReport(times=[float(s.t) for s in snapshots], cauchy_sequence=diffs)


# ============================================================
# Strichartz probe
# ============================================================

def w14_norm(v: Field) -> float:
    """‖v‖_{W^{1,4}} as ‖v‖₄ + ‖∂x v‖₄ + ‖∂y v‖₄."""
    dx, dy = gradient(v)
    return lp_norm(v, 4) + lp_norm(dx, 4) + lp_norm(dy, 4)


def strichartz_norm(u0: Field, T: float, time_nodes: int = settings.STRICHARTZ_TIME_NODES) -> float:
    """‖e^{itΔ}u0‖_{L⁴([0,T], W^{1,4})} with trapezoid quadrature in time."""
    times = np.linspace(0.0, T, time_nodes)
    samples = np.array([w14_norm(linear_propagator(u0, t)) ** 4 for t in times])
    return float(integrate.trapezoid(samples, times) ** 0.25)


def strichartz_ratio(u0: Field, T: float, time_nodes: int = settings.STRICHARTZ_TIME_NODES) -> float:
    h1 = float(np.sqrt(l2_norm(u0) ** 2 + gradient_l2(u0) ** 2))
    if h1 == 0.0:
        return 0.0
    return strichartz_norm(u0, T, time_nodes) / h1


@dataclass(frozen=True)
class StrichartzReport:
    max_ratio: float
    ratios: List[float]
    T: float
    seed: int

    def summary_rows(self) -> List[Tuple[str, object]]:
        return [
            ("samples", len(self.ratios)),
            ("T", self.T),
            ("seed", self.seed),
            ("max ratio", self.max_ratio),
            ("mean ratio", float(np.mean(self.ratios)) if self.ratios else 0.0),
        ]


def strichartz_probe(
    ensemble_size: int,
    grid: GridSpec,
    T: float,
    seed: int = settings.DEFAULT_SEED,
    time_nodes: int = settings.STRICHARTZ_TIME_NODES,
    sigma: float = settings.STRICHARTZ_BAND_SIGMA,
) -> StrichartzReport:
    """
    Max of ‖e^{itΔ}u0‖_{L⁴W^{1,4}} / ‖u0‖_{H¹} over seeded band-limited data.

    Sample seeds are derived from `seed` through numpy's SeedSequence, so
    the ensemble is reproducible.
    """
    if ensemble_size < 1:
        raise ParameterError(f"ensemble_size={ensemble_size} must be >= 1")
    if T <= 0:
        raise ParameterError(f"Strichartz horizon T={T} must be positive")
    child_seeds = np.random.SeedSequence(seed).generate_state(ensemble_size)
    ratios = []
    for child in child_seeds:
        u0 = random_band_limited(grid, seed=int(child), sigma=sigma)
        ratio = strichartz_ratio(u0, T, time_nodes)
        if ratio > 0:
            ratios.append(ratio)
    max_ratio = max(ratios) if ratios else 0.0
    logger.info(f"Strichartz probe: {len(ratios)} samples, max ratio {max_ratio:.6g}")
    return StrichartzReport(max_ratio=max_ratio, ratios=ratios, T=T, seed=seed)
