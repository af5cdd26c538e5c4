# functionals.py
"""
Conserved quantities and functional inequalities.

- mass / hamiltonian / classify: conservation laws and the criticality
  trichotomy H <, =, > 1
- hardy_integral / hardy_check: weighted Hardy-type bound and its failure
  for b >= 2
- moser_sequence / moser_trudinger_sweep: weighted Moser-Trudinger
  threshold α* = 2π(2 - b)
- log_estimate_probe: L∞ control by H_μ and C^β norms
- strauss_probe: pointwise decay of radial H¹ functions

Existential constants are calibrated as the observed max over a family
times CALIBRATION_MARGIN.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate

from ..config import settings, thresholds
from .errors import OverflowGuardError, ParameterError
from .grid import (
    Field,
    GridSpec,
    SingularWeight,
    gradient_l2,
    integrate_array,
    make_singular_weight,
    norms,
    require_same_grid,
)
from .nonlinearity import PhysParams, check_overflow, hamiltonian_density

logger = logging.getLogger(__name__)


# ============================================================
# Conservation laws and criticality
# ============================================================

class Criticality(str, Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"


@dataclass(frozen=True)
class EnergyReport:
    """Mass, energy split and criticality class of one field."""

    mass: float
    kinetic: float
    potential: float
    hamiltonian: float
    criticality: Criticality

    def summary_rows(self) -> List[Tuple[str, object]]:
        return [
            ("mass", self.mass),
            ("kinetic", self.kinetic),
            ("potential", self.potential),
            ("hamiltonian", self.hamiltonian),
            ("class", self.criticality.value),
        ]


def mass(u: Field) -> float:
    """M(u) = ‖u‖²_{L²}."""
    return integrate_array(u.grid, u.intensity())


def classify(H: float) -> Criticality:
    if abs(H - 1.0) <= thresholds.CRITICALITY_BAND:
        return Criticality.CRITICAL
    return Criticality.SUBCRITICAL if H < 1.0 else Criticality.SUPERCRITICAL


def _check_weight(w: SingularWeight, p: PhysParams) -> None:
    if w.b != p.b:
        raise ParameterError(f"weight exponent b={w.b} does not match phys.b={p.b}")


def potential_energy(u: Field, w: SingularWeight, p: PhysParams) -> float:
    require_same_grid(u.grid, w.grid)
    _check_weight(w, p)
    return integrate_array(u.grid, w.values * hamiltonian_density(u.values, p.alpha))


def hamiltonian(u: Field, w: SingularWeight, p: PhysParams) -> EnergyReport:
    """
    Energy report for u.

    Args:
        u: Field on the weight's grid
        w: Singular weight with w.b == p.b
        p: Physical parameters

    Returns:
        EnergyReport with H = kinetic + potential
    """
    require_same_grid(u.grid, w.grid)
    _check_weight(w, p)
    kinetic = gradient_l2(u) ** 2
    potential = potential_energy(u, w, p)
    H = kinetic + potential
    return EnergyReport(mass=mass(u), kinetic=kinetic, potential=potential, hamiltonian=H, criticality=classify(H))


def quartic_weighted(u: Field, w: SingularWeight) -> float:
    """∫ w|u|⁴."""
    require_same_grid(u.grid, w.grid)
    return integrate_array(u.grid, w.values * u.intensity() ** 2)


def amplitude_for_energy(profile: Field, w: SingularWeight, p: PhysParams, target: float, max_iter: int = 200) -> float:
    """
    Bisect the amplitude A with H(A·profile) = target.

    H is strictly increasing in A, so the bracket [0, A_hi] is grown by
    doubling until H(A_hi) >= target and then halved. Amplitudes that trip
    the overflow guard count as above target.
    """
    if not np.any(profile.values):
        raise ParameterError("amplitude of the zero profile is undefined")
    if not target > 0:
        raise ParameterError(f"target energy {target} must be positive")

    def energy(A: float) -> float:
        try:
            return hamiltonian(profile.scaled(A), w, p).hamiltonian
        except OverflowGuardError:
            return np.inf

    lo, hi = 0.0, 1.0
    while energy(hi) < target:
        lo, hi = hi, 2.0 * hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if energy(mid) < target:
            lo = mid
        else:
            hi = mid
    best = min((lo, hi), key=lambda A: abs(energy(A) - target))
    gap = abs(energy(best) - target)
    if gap > thresholds.CRITICALITY_BAND:
        logger.warning(f"Amplitude {best:.15g} leaves |H-{target:g}|={gap:.3g} outside the band")
    logger.info(f"Amplitude A={best:.12g} for H={target:g} (gap {gap:.2e})")
    return best


def find_critical_amplitude(profile: Field, w: SingularWeight, p: PhysParams, max_iter: int = 200) -> float:
    """Amplitude A* with H(A*·profile) = 1."""
    if not np.any(profile.values):
        raise ParameterError("critical amplitude of the zero profile is undefined")
    return amplitude_for_energy(profile, w, p, 1.0, max_iter=max_iter)


# ============================================================
# Hardy-type inequality
# ============================================================

def hardy_weight_values(grid: GridSpec, b: float) -> np.ndarray:
    """
    Grid weight for the Hardy integral.

    For 0 < b < 2 this is the cell-averaged SingularWeight. For b >= 2 the
    origin cell is not integrable; pointwise |x|^{-b} with the origin cell
    dropped is returned, a lower bound that grows without limit as h -> 0.
    """
    if b <= 0:
        raise ParameterError(f"Hardy exponent b={b} must be positive")
    if b < 2.0:
        return make_singular_weight(grid, b).values
    R = np.array(grid.radius(), copy=True)
    oi, oj = grid.origin_index
    R[oi, oj] = 1.0
    values = R ** (-b)
    values[oi, oj] = 0.0
    return values


def hardy_integral(u: Field, b: float, gamma: float) -> float:
    """∫ |u|^γ / |x|^b."""
    if gamma < 2:
        raise ParameterError(f"Hardy power gamma={gamma} must be >= 2")
    return integrate_array(u.grid, hardy_weight_values(u.grid, b) * u.modulus() ** gamma)


def hardy_check(u: Field, b: float, gamma: float) -> float:
    """Ratio ∫|u|^γ/|x|^b ÷ ‖u‖^γ_{H¹}; 0 for the zero field."""
    integral = hardy_integral(u, b, gamma)
    h1 = norms(u).h1
    return integral / h1 ** gamma if h1 > 0 else 0.0


def calibrate_hardy_constant(fields: Iterable[Field], b: float, gamma: float) -> float:
    ratios = [hardy_check(u, b, gamma) for u in fields]
    if not ratios:
        raise ParameterError("Hardy calibration needs at least one field")
    return max(ratios) * thresholds.CALIBRATION_MARGIN


# ============================================================
# Moser-Trudinger
# ============================================================

class MoserVerdict(str, Enum):
    BOUNDED = "Bounded"
    DIVERGING = "Diverging"


def critical_alpha(b: float) -> float:
    return 2.0 * np.pi * (2.0 - b)


def _moser_profile(r: np.ndarray, n_param: float) -> np.ndarray:
    log_n = np.log(n_param)
    inner = 1.0 / n_param
    out = np.zeros_like(r, dtype=np.float64)
    core = r <= inner
    out[core] = np.sqrt(log_n / (2.0 * np.pi))
    shell = (r > inner) & (r <= 1.0)
    out[shell] = np.log(1.0 / r[shell]) / np.sqrt(2.0 * np.pi * log_n)
    return out


def moser_sequence(n_param: float, grid: GridSpec, subsamples: int = settings.MOSER_SUBSAMPLES) -> Field:
    """
    Truncated-logarithm Moser profile on the grid.

        m(r) = √(log N / 2π)           r <= 1/N
             = log(1/r) / √(2π log N)  1/N < r <= 1
             = 0                       r > 1

    Each node carries the mean of m over a subsamples × subsamples lattice
    inside its cell, which softens the two kinks. The offsets are symmetric
    so the result keeps the grid's reflection symmetry.
    """
    if n_param < 2:
        raise ParameterError(f"Moser index n_param={n_param} must be >= 2")
    X, Y = grid.mesh()
    h = grid.spacing
    offsets = ((np.arange(subsamples) + 0.5) / subsamples - 0.5) * h
    acc = np.zeros_like(X)
    for dx in offsets:
        for dy in offsets:
            acc += _moser_profile(np.hypot(X + dx, Y + dy), n_param)
    return Field(grid, acc / subsamples ** 2)


def moser_l2_squared(n_param: float) -> float:
    """Exact ‖m_N‖²_{L²} of the continuum profile."""
    log_n = np.log(n_param)
    core = log_n / (2.0 * n_param ** 2)
    shell = (0.25 - (log_n ** 2 + log_n + 0.5) / (2.0 * n_param ** 2)) / log_n
    return core + shell


@dataclass(frozen=True)
class MoserSweepResult:
    """Ratio sequences and verdicts of one Moser-Trudinger sweep."""

    b: float
    alpha_grid: Tuple[float, ...]
    n_params: Tuple[float, ...]
    ratios: Tuple[Tuple[Tuple[float, float], ...], ...]
    verdicts: Tuple[MoserVerdict, ...]
    normalization: str = "gradient"
    method: str = "radial"

    def to_frame(self) -> pd.DataFrame:
        """Long-format table with columns b, alpha, n_param, ratio, verdict."""
        rows = []
        for alpha, seq, verdict in zip(self.alpha_grid, self.ratios, self.verdicts):
            for n_param, ratio in seq:
                rows.append({"b": self.b, "alpha": alpha, "n_param": n_param, "ratio": ratio, "verdict": verdict.value})
        return pd.DataFrame(rows, columns=["b", "alpha", "n_param", "ratio", "verdict"])

    def transition(self) -> Optional[Tuple[float, float]]:
        """(largest Bounded α, smallest Diverging α) in ascending α order, or None."""
        ordered = sorted(zip(self.alpha_grid, self.verdicts))
        bounded = [a for a, v in ordered if v is MoserVerdict.BOUNDED]
        diverging = [a for a, v in ordered if v is MoserVerdict.DIVERGING]
        if not bounded or not diverging:
            return None
        return max(bounded), min(diverging)

    def summary_rows(self) -> List[Tuple[float, float, float, str]]:
        return [
            (alpha, seq[0][1], seq[-1][1], verdict.value)
            for alpha, seq, verdict in zip(self.alpha_grid, self.ratios, self.verdicts)
        ]


def _moser_scale(n_param: float, normalization: str) -> float:
    if normalization == "gradient":
        return 1.0
    if normalization == "h1":
        return 1.0 / np.sqrt(1.0 + moser_l2_squared(n_param))
    raise ParameterError(f"unknown Moser normalization {normalization!r}")


def _radial_ratio(b: float, alpha: float, n_param: float, normalization: str) -> float:
    """
    Ratio ∫ω(e^{α|u|²}-1) / (α∫ω|u|²) for u = c·m_N by radial quadrature.

    On the shell the substitution s = log(1/r) gives r^{1-b} dr = e^{-(2-b)s} ds
    and u = c·s/√(2π log N); the core disk is integrated in closed form.
    """
    c2 = _moser_scale(n_param, normalization) ** 2
    log_n = np.log(n_param)
    decay = 2.0 - b
    core_measure = 2.0 * np.pi * n_param ** (-decay) / decay
    core_value = c2 * log_n / (2.0 * np.pi)
    check_overflow(np.sqrt(core_value), alpha)

    shell_num, _ = integrate.quad(
        lambda s: np.expm1(alpha * c2 * s * s / (2.0 * np.pi * log_n)) * np.exp(-decay * s),
        0.0, log_n, epsabs=0.0, epsrel=1e-12, limit=200,
    )
    shell_den, _ = integrate.quad(
        lambda s: c2 * s * s / (2.0 * np.pi * log_n) * np.exp(-decay * s),
        0.0, log_n, epsabs=0.0, epsrel=1e-12, limit=200,
    )
    numerator = np.expm1(alpha * core_value) * core_measure + 2.0 * np.pi * shell_num
    denominator = core_value * core_measure + 2.0 * np.pi * shell_den
    return float(numerator / (alpha * denominator))


def _grid_ratio(w: SingularWeight, alpha: float, n_param: float, normalization: str) -> float:
    if normalization not in ("gradient", "h1"):
        raise ParameterError(f"unknown Moser normalization {normalization!r}")
    m = moser_sequence(n_param, w.grid)
    stats = norms(m)
    scale = 1.0 / stats.grad_l2 if normalization == "gradient" else 1.0 / stats.h1
    u = m.scaled(scale)
    check_overflow(u.values, alpha)
    intensity = u.intensity()
    numerator = integrate_array(w.grid, w.values * np.expm1(alpha * intensity))
    denominator = integrate_array(w.grid, w.values * intensity)
    return numerator / (alpha * denominator)


def _verdict(sequence: Sequence[float]) -> MoserVerdict:
    values = np.asarray(sequence)
    growing = bool(np.all(np.diff(values) > 0))
    if growing and values[-1] > thresholds.MT_DIVERGENCE_FACTOR * values[0]:
        return MoserVerdict.DIVERGING
    return MoserVerdict.BOUNDED


def moser_trudinger_sweep(
    b: float,
    alphas: Sequence[float],
    n_params: Optional[Sequence[float]] = None,
    grid: Optional[GridSpec] = None,
    normalization: str = "gradient",
) -> MoserSweepResult:
    """
    Probe sup ∫ω(e^{α|u|²}-1) / ∫ω|u|² along the Moser family.

    Args:
        b: Weight exponent in (0, 2)
        alphas: Tested strengths, all positive
        n_params: Concentration indices (default MT_RADIAL_N_PARAMS)
        grid: Evaluate sampled profiles on this grid; None uses exact
            radial quadrature of the continuum profiles
        normalization: "gradient" (‖∇u‖ = 1) or "h1" (‖u‖_{H¹} = 1)

    Returns:
        MoserSweepResult; a sequence is Diverging when it increases
        strictly and ends above MT_DIVERGENCE_FACTOR × its first value
    """
    if not alphas:
        raise ParameterError("moser_trudinger_sweep needs at least one alpha")
    if n_params is None:
        n_params = settings.MT_RADIAL_N_PARAMS
    if not n_params:
        raise ParameterError("moser_trudinger_sweep needs at least one n_param")
    if any(a <= 0 for a in alphas):
        raise ParameterError(f"alphas must be positive, got {list(alphas)}")
    if not 0.0 < b < 2.0:
        raise ParameterError(f"weight exponent b={b} outside (0, 2)")

    weight = make_singular_weight(grid, b) if grid is not None else None
    method = "grid" if grid is not None else "radial"
    logger.info(f"📦 Moser-Trudinger sweep b={b} ({method}, {normalization}): {len(alphas)} alphas × {len(n_params)} profiles")

    all_ratios = []
    verdicts = []
    for alpha in alphas:
        if weight is None:
            seq = [_radial_ratio(b, alpha, N, normalization) for N in n_params]
        else:
            seq = [_grid_ratio(weight, alpha, N, normalization) for N in n_params]
        verdict = _verdict(seq)
        logger.debug(f"alpha={alpha:.6g}: ratios {seq[0]:.4g} -> {seq[-1]:.4g}, {verdict.value}")
        all_ratios.append(tuple(zip((float(N) for N in n_params), seq)))
        verdicts.append(verdict)

    ordered = [v for _, v in sorted(zip(alphas, verdicts))]
    for lower, upper in zip(ordered, ordered[1:]):
        if lower is MoserVerdict.DIVERGING and upper is MoserVerdict.BOUNDED:
            logger.warning(f"Non-monotone Moser-Trudinger verdicts for b={b}")
            break

    return MoserSweepResult(
        b=b,
        alpha_grid=tuple(float(a) for a in alphas),
        n_params=tuple(float(N) for N in n_params),
        ratios=tuple(all_ratios),
        verdicts=tuple(verdicts),
        normalization=normalization,
        method=method,
    )


# ============================================================
# Log estimate
# ============================================================

@dataclass(frozen=True)
class LogEstimate:
    lhs: float
    h_mu: float
    holder_ratio: float
    needed_C: float


def log_estimate_probe(u: Field, lam: float, mu: float, beta: float) -> Optional[LogEstimate]:
    """
    Smallest C with ‖u‖²_∞ <= λ‖u‖²_{H_μ} log(C + 8^β μ^{-β} ‖u‖_{C^β}/‖u‖_{H_μ}).

    Zero fields have no meaningful constant and return None. The reported
    C is clipped at 0 when the bound already holds without it.
    """
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"beta={beta} outside (0, 1)")
    if not 0.0 < mu <= 1.0:
        raise ParameterError(f"mu={mu} outside (0, 1]")
    if lam <= 1.0 / (2.0 * np.pi * beta):
        raise ParameterError(f"lambda={lam} must exceed 1/(2*pi*beta)={1.0 / (2.0 * np.pi * beta):.6g}")

    stats = norms(u)
    if stats.linf == 0.0:
        return None
    h_mu = stats.h_mu(mu)
    lhs = stats.linf ** 2
    holder_ratio = 8.0 ** beta * mu ** (-beta) * stats.holder_norm(beta) / h_mu
    needed = max(float(np.exp(lhs / (lam * h_mu ** 2)) - holder_ratio), 0.0)
    return LogEstimate(lhs=lhs, h_mu=h_mu, holder_ratio=holder_ratio, needed_C=needed)


def calibrate_log_estimate_constant(fields: Iterable[Field], lam: float, mu: float, beta: float) -> float:
    results = [log_estimate_probe(u, lam, mu, beta) for u in fields]
    needed = [r.needed_C for r in results if r is not None]
    if not needed:
        raise ParameterError("log-estimate calibration needs at least one nonzero field")
    return max(needed) * thresholds.CALIBRATION_MARGIN


# ============================================================
# Strauss radial bound
# ============================================================

def radial_asymmetry(u: Field) -> float:
    """Largest deviation of u from its transpose and axis reflections."""
    v = u.values
    n = u.grid.n
    mirror = (n - np.arange(n)) % n
    return float(max(
        np.max(np.abs(v - v.T)),
        np.max(np.abs(v - v[mirror, :])),
        np.max(np.abs(v - v[:, mirror])),
    ))


def strauss_probe(u: Field, p: float, tolerance: float = thresholds.RADIAL_SYMMETRY_TOLERANCE) -> float:
    """
    max over r > h of |u(x)|·|x|^{2/(2+p)} / ‖u‖_{H¹}.

    Args:
        u: Radial field (checked against the grid's reflection symmetries)
        p: Power, p >= 2
        tolerance: Allowed asymmetry relative to ‖u‖_∞

    Returns:
        The observed ratio; 0 for the zero field
    """
    if p < 2:
        raise ParameterError(f"Strauss power p={p} must be >= 2")
    stats = norms(u)
    if stats.linf == 0.0:
        return 0.0
    asymmetry = radial_asymmetry(u)
    if asymmetry > tolerance * stats.linf:
        raise ParameterError(f"field is not radial: asymmetry {asymmetry:.3g} exceeds {tolerance:g}·‖u‖∞")
    r = u.grid.radius()
    outside = r > u.grid.spacing
    decay = r[outside] ** (2.0 / (2.0 + p))
    return float(np.max(u.modulus()[outside] * decay) / stats.h1)


def calibrate_strauss_constant(fields: Iterable[Field], p: float) -> float:
    ratios = [strauss_probe(u, p) for u in fields]
    if not ratios:
        raise ParameterError("Strauss calibration needs at least one field")
    return max(ratios) * thresholds.CALIBRATION_MARGIN
