# evolve.py
"""
Time integration of  i∂ₜu + Δu = |x|^{-b} u (e^{α|u|²} - 1).

Production path: Strang splitting of the exact linear spectral flow and
the exact pointwise nonlinear phase rotation. Independent oracle: the
Duhamel map

    Φ(u)(t) = e^{itΔ}u₀ - i ∫₀ᵗ e^{i(t-τ)Δ} f(x, u(τ)) dτ

iterated to its fixed point with trapezoid time quadrature.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, List, Optional

import numpy as np
from cachetools import LRUCache, cached

from ..config import settings, thresholds
from .errors import (
    EvolutionError,
    OverflowGuardError,
    ParameterError,
    PicardContractionError,
    SmallnessGateError,
)
from .functionals import Criticality, hamiltonian
from .grid import Field, GridSpec, SingularWeight, gradient_l2, require_same_grid
from .nonlinearity import PhysParams, check_overflow

logger = logging.getLogger(__name__)


class Integrator(str, Enum):
    STRANG = "strang"
    PICARD = "picard"


@dataclass(frozen=True)
class EvolveConfig:
    dt: float = settings.DEFAULT_DT
    t_final: float = settings.DEFAULT_T_FINAL
    integrator: Integrator = Integrator.STRANG
    picard_iters: int = settings.DEFAULT_PICARD_ITERS
    snapshot_stride: int = settings.DEFAULT_SNAPSHOT_STRIDE

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError(f"time.dt={self.dt} must be positive")
        if not self.t_final >= self.dt:
            raise ParameterError(f"time.t_final={self.t_final} must be >= dt={self.dt}")
        if self.picard_iters < 2:
            raise ParameterError(f"integrator.picard_iters={self.picard_iters} must be >= 2")
        if self.snapshot_stride < 1:
            raise ParameterError(f"time.snapshot_stride={self.snapshot_stride} must be >= 1")
        object.__setattr__(self, "integrator", Integrator(self.integrator))

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_final / self.dt - 1e-9))


@dataclass(frozen=True)
class TrajectoryState:
    t: float
    u: Field
    step_index: int = 0


# ----------------------------------------------------------------------
# Substeps
# ----------------------------------------------------------------------

@cached(cache=LRUCache(maxsize=32))
def _free_phase(grid: GridSpec, t: float) -> np.ndarray:
    phase = np.exp(-1j * grid.k_squared() * t)
    phase.setflags(write=False)
    return phase


def _finite_field(grid: GridSpec, values: np.ndarray, t: float) -> Field:
    if not np.all(np.isfinite(values)):
        raise EvolutionError(f"non-finite state at t={t:.6g}")
    return Field(grid, values)


def linear_propagator(u: Field, t: float) -> Field:
    """e^{itΔ}u: multiply every Fourier mode by e^{-i|k|²t}."""
    if t == 0:
        return u
    spectrum = np.fft.fft2(u.values, norm="ortho")
    return Field(u.grid, np.fft.ifft2(spectrum * _free_phase(u.grid, float(t)), norm="ortho"))


def _nonlinear_phase(values: np.ndarray, w: SingularWeight, p: PhysParams, t: float) -> np.ndarray:
    check_overflow(values, p.alpha)
    intensity = values.real ** 2 + values.imag ** 2
    return values * np.exp(-1j * t * w.values * np.expm1(p.alpha * intensity))


def nonlinear_substep(u: Field, w: SingularWeight, p: PhysParams, t: float) -> Field:
    """
    Exact flow of i∂ₜu = ω(e^{α|u|²} - 1)u over time t.

    |u| is invariant under this flow, so the solution is the pointwise phase
    rotation u·exp(-i t ω (e^{α|u|²} - 1)).
    """
    require_same_grid(u.grid, w.grid)
    p.require_pde()
    return Field(u.grid, _nonlinear_phase(u.values, w, p, t))


def strang_step(state: TrajectoryState, cfg: EvolveConfig, w: SingularWeight, p: PhysParams, dt: Optional[float] = None) -> TrajectoryState:
    """Half linear, full nonlinear, half linear."""
    require_same_grid(state.u.grid, w.grid)
    p.require_pde()
    dt = cfg.dt if dt is None else dt
    grid = state.u.grid
    half = _free_phase(grid, 0.5 * dt)
    values = np.fft.ifft2(np.fft.fft2(state.u.values, norm="ortho") * half, norm="ortho")
    values = _nonlinear_phase(values, w, p, dt)
    values = np.fft.ifft2(np.fft.fft2(values, norm="ortho") * half, norm="ortho")
    t_next = state.t + dt
    return TrajectoryState(t=t_next, u=_finite_field(grid, values, t_next), step_index=state.step_index + 1)


# ----------------------------------------------------------------------
# Duhamel / Picard oracle
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PicardResult:
    u_T: Field
    contraction_ratios: List[float]
    differences: List[float]

    @property
    def iterations(self) -> int:
        return len(self.differences)


def _h1_spectral(grid: GridSpec, spectrum: np.ndarray) -> np.ndarray:
    """H¹ norm of every time slice of a stacked ortho spectrum."""
    weights = 1.0 + grid.k_squared()
    return np.sqrt(grid.cell_area * np.sum(weights * np.abs(spectrum) ** 2, axis=(-2, -1)))


def picard_solve(u0: Field, T: float, cfg: EvolveConfig, w: SingularWeight, p: PhysParams) -> PicardResult:
    """
    Fixed-point iteration of the Duhamel map on [0, T].

    Args:
        u0: Initial data with ‖∇u0‖ < 1
        T: Window length, at most PICARD_MAX_T
        cfg: Supplies the internal substep dt and picard_iters
        w: Singular weight
        p: Physical parameters

    Returns:
        PicardResult with the endpoint, successive C_T H¹ differences and
        their ratios

    Raises:
        SmallnessGateError: ‖∇u0‖ >= 1
        PicardContractionError: a ratio >= 1
    """
    require_same_grid(u0.grid, w.grid)
    p.require_pde()
    if not 0 < T <= thresholds.PICARD_MAX_T:
        raise ParameterError(f"Picard window T={T} outside (0, {thresholds.PICARD_MAX_T}]")
    grad = gradient_l2(u0)
    if grad >= 1.0:
        raise SmallnessGateError(f"||grad u0||={grad:.6g} violates the smallness gate ||grad u0|| < 1")

    grid = u0.grid
    steps = max(1, math.ceil(T / cfg.dt - 1e-9))
    times = np.linspace(0.0, T, steps + 1)
    tau = T / steps
    K2 = grid.k_squared()
    forward = np.exp(-1j * times[:, None, None] * K2)   # e^{iτΔ}
    u0_hat = np.fft.fft2(u0.values, norm="ortho")
    h1_u0 = float(_h1_spectral(grid, u0_hat))

    iterate_hat = forward * u0_hat
    differences: List[float] = []
    ratios: List[float] = []
    for k in range(cfg.picard_iters):
        space = np.fft.ifft2(iterate_hat, norm="ortho", axes=(-2, -1))
        check_overflow(space, p.alpha)
        nonlinear = w.values * space * np.expm1(p.alpha * (space.real ** 2 + space.imag ** 2))
        pulled = np.conj(forward) * np.fft.fft2(nonlinear, norm="ortho", axes=(-2, -1))
        accumulated = np.zeros_like(pulled)
        accumulated[1:] = np.cumsum(0.5 * tau * (pulled[1:] + pulled[:-1]), axis=0)
        updated = forward * (u0_hat - 1j * accumulated)

        diff = float(np.max(_h1_spectral(grid, updated - iterate_hat)))
        if differences:
            previous = differences[-1]
            ratio = diff / previous if previous > 0 else 0.0
            ratios.append(ratio)
            if ratio >= 1.0:
                raise PicardContractionError(
                    f"Picard ratio {ratio:.4g} >= 1 at iteration {k + 1} (T={T:g})", ratios
                )
            if ratio > 0.9:
                logger.warning(f"Picard ratio {ratio:.4g} close to 1 at iteration {k + 1}")
        differences.append(diff)
        iterate_hat = updated
        logger.debug(f"Picard iteration {k + 1}: difference {diff:.3e}")
        if 0.0 < diff <= thresholds.PICARD_DIFFERENCE_FLOOR * h1_u0:
            break

    u_T = Field(grid, np.fft.ifft2(iterate_hat[-1], norm="ortho"))
    return PicardResult(u_T=u_T, contraction_ratios=ratios, differences=differences)


def picard_step(state: TrajectoryState, cfg: EvolveConfig, w: SingularWeight, p: PhysParams, dt: Optional[float] = None) -> TrajectoryState:
    """One step of length dt solved by the Picard oracle (single trapezoid panel)."""
    dt = cfg.dt if dt is None else dt
    result = picard_solve(state.u, dt, replace(cfg, dt=dt, t_final=max(cfg.t_final, dt)), w, p)
    t_next = state.t + dt
    return TrajectoryState(t=t_next, u=_finite_field(state.u.grid, result.u_T.values, t_next), step_index=state.step_index + 1)


# ----------------------------------------------------------------------
# Trajectory driver
# ----------------------------------------------------------------------

def integrate(
    u0: Field,
    cfg: EvolveConfig,
    w: SingularWeight,
    p: PhysParams,
    observer: Optional[Callable[[TrajectoryState], None]] = None,
) -> List[TrajectoryState]:
    """
    Run the configured integrator from t = 0 to cfg.t_final.

    Snapshots are taken at t = 0, every snapshot_stride steps and at the
    final time; each is passed to `observer` as it is taken. The last step
    is shortened so the run ends exactly at t_final.

    Raises:
        EvolutionError: ‖∇u‖ exceeds BLOWUP_GRADIENT, a sample becomes
            non-finite or an amplitude trips the overflow guard
    """
    require_same_grid(u0.grid, w.grid)
    p.require_pde()
    report = hamiltonian(u0, w, p)
    if report.criticality is Criticality.SUPERCRITICAL:
        logger.warning(f"Supercritical data accepted: H(u0)={report.hamiltonian:.6g} > 1")
    logger.info(
        f"🧪 Integrating with {cfg.integrator.value}: n={u0.grid.n}, dt={cfg.dt:g}, "
        f"T={cfg.t_final:g}, H(u0)={report.hamiltonian:.6g} ({report.criticality.value})"
    )

    stepper = strang_step if cfg.integrator is Integrator.STRANG else picard_step
    state = TrajectoryState(t=0.0, u=u0, step_index=0)
    snapshots = [state]
    if observer is not None:
        observer(state)

    n_steps = cfg.n_steps
    for step in range(1, n_steps + 1):
        dt = cfg.dt if step < n_steps else cfg.t_final - (n_steps - 1) * cfg.dt
        try:
            state = stepper(state, cfg, w, p, dt=dt)
        except OverflowGuardError as exc:
            raise EvolutionError(f"amplitude guard tripped at t={state.t + dt:.6g}: {exc}") from exc
        if step == n_steps:
            state = replace(state, t=cfg.t_final)
        grad = gradient_l2(state.u)
        if grad > thresholds.BLOWUP_GRADIENT:
            raise EvolutionError(f"||grad u||={grad:.6g} exceeds blow-up threshold at t={state.t:.6g}")
        if step % settings.PROGRESS_EVERY == 0:
            logger.info(f"Step {step}/{n_steps}: t={state.t:.6g}, ||grad u||={grad:.6g}")
        else:
            logger.debug(f"Step {step}: t={state.t:.6g}, ||grad u||={grad:.6g}")
        if step % cfg.snapshot_stride == 0 or step == n_steps:
            snapshots.append(state)
            if observer is not None:
                observer(state)

    logger.info(f"✅ Reached t={state.t:.6g} after {n_steps} steps ({len(snapshots)} snapshots)")
    return snapshots
