# nonlinearity.py
"""
Pointwise nonlinear terms.

    g(z)  = z (e^{α|z|²} - 1)
    f(x,z) = ω(x) g(z)
    density(z) = (e^{α|z|²} - 1 - α|z|²) / α

All functions accept Python scalars or numpy arrays. Scalars come back as
Python scalars, arrays as arrays of the same shape.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from cachetools import LRUCache, cached

from ..config import settings, thresholds
from .errors import OverflowGuardError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhysParams:
    """Singularity exponent b; α = 2π(2 - b) is always derived."""

    b: float

    def __post_init__(self):
        b = float(self.b)
        if not 0.0 < b < 2.0:
            raise ParameterError(f"phys.b={b} outside (0, 2)")
        object.__setattr__(self, "b", b)

    @property
    def alpha(self) -> float:
        return 2.0 * np.pi * (2.0 - self.b)

    @property
    def pde_admissible(self) -> bool:
        return self.b < 1.0

    def require_pde(self) -> None:
        """Evolution paths need 0 < b < 1."""
        if not self.pde_admissible:
            raise ParameterError(f"phys.b={self.b} out of PDE range (0,1)")


def _restore_scalar(value: np.ndarray, like):
    if np.ndim(like) == 0:
        return value.item()
    return value


def check_overflow(z, alpha: float) -> None:
    """Raise OverflowGuardError if any amplitude would overflow e^{α|z|²}."""
    amplitude = np.abs(np.asarray(z))
    top = float(np.max(amplitude)) if amplitude.size else 0.0
    if top > thresholds.MAX_AMPLITUDE or alpha * top * top > thresholds.MAX_EXPONENT:
        raise OverflowGuardError(
            top,
            f"|z|={top:.6g} exceeds overflow guard (|z| <= {thresholds.MAX_AMPLITUDE:g}, "
            f"alpha|z|^2 <= {thresholds.MAX_EXPONENT:g})",
        )


def _intensity(z: np.ndarray) -> np.ndarray:
    return z.real ** 2 + z.imag ** 2


def g(z, alpha: float):
    """z·(e^{α|z|²} - 1), via expm1 so small amplitudes keep full precision."""
    arr = np.asarray(z, dtype=np.complex128)
    check_overflow(arr, alpha)
    return _restore_scalar(arr * np.expm1(alpha * _intensity(arr)), z)


def f(x_weight, z, alpha: float):
    """Weighted nonlinearity ω(x)·g(z)."""
    arr = np.asarray(z, dtype=np.complex128)
    check_overflow(arr, alpha)
    out = np.asarray(x_weight, dtype=np.float64) * arr * np.expm1(alpha * _intensity(arr))
    if np.ndim(z) == 0 and np.ndim(x_weight) == 0:
        return out.item()
    return out


def _expm1_minus_x(x: np.ndarray) -> np.ndarray:
    """e^x - 1 - x without cancellation for small x."""
    x = np.asarray(x, dtype=np.float64)
    small = np.abs(x) < thresholds.EXPM1_MINUS_X_SERIES_CUTOFF
    # Horner form of x²/2 + x³/6 + ... + x⁷/5040
    series = x * x * (1 / 2 + x * (1 / 6 + x * (1 / 24 + x * (1 / 120 + x * (1 / 720 + x / 5040)))))
    direct = np.expm1(np.where(small, 0.0, x)) - np.where(small, 0.0, x)
    return np.where(small, series, direct)


def hamiltonian_density(z, alpha: float):
    """
    Potential-energy density (e^{α|z|²} - 1 - α|z|²)/α, always >= 0.

    Args:
        z: Complex amplitude(s)
        alpha: Nonlinearity strength

    Returns:
        Real density of the same shape as z
    """
    arr = np.asarray(z, dtype=np.complex128)
    check_overflow(arr, alpha)
    return _restore_scalar(_expm1_minus_x(alpha * _intensity(arr)) / alpha, z)


# ----------------------------------------------------------------------
# Difference bound  |g(z1) - g(z2)| <= C |z1 - z2| (e^{α(1+ε)|z1|²} - 1 + e^{α(1+ε)|z2|²} - 1)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DifferenceBound:
    lhs: float
    rhs: float
    constant: float
    holds: bool

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else 0.0


def _difference_sides(z1, z2, eps: float, alpha: float):
    z1 = np.asarray(z1, dtype=np.complex128)
    z2 = np.asarray(z2, dtype=np.complex128)
    lhs = np.abs(z1 * np.expm1(alpha * _intensity(z1)) - z2 * np.expm1(alpha * _intensity(z2)))
    grow = alpha * (1.0 + eps)
    rhs = np.abs(z1 - z2) * (np.expm1(grow * _intensity(z1)) + np.expm1(grow * _intensity(z2)))
    return lhs, rhs


@cached(cache=LRUCache(maxsize=32))
def calibrate_difference_constant(
    eps: float,
    alpha: float,
    radii: int = settings.CALIBRATION_RADII,
    angles: int = settings.CALIBRATION_ANGLES,
    max_amplitude: float = settings.CALIBRATION_MAX_AMPLITUDE,
) -> float:
    """
    Calibrated C for the difference bound: observed max ratio × margin.

    Both sides are gauge invariant and symmetric under conjugation, so the
    sweep runs over z1 = r1, z2 = r2·e^{iφ} with φ ∈ [0, π].
    Pairs with a vanishing right-hand side (z1 = z2, or both zero) are skipped.
    """
    if eps <= 0:
        raise ParameterError(f"eps={eps} must be positive")
    r = np.linspace(0.0, max_amplitude, radii)
    phi = np.linspace(0.0, np.pi, angles)
    check_overflow(r, alpha)
    r1, r2, ph = np.meshgrid(r, r, phi, indexing="ij")
    lhs, rhs = _difference_sides(r1.astype(np.complex128), r2 * np.exp(1j * ph), eps, alpha)
    valid = rhs > 0
    observed = float(np.max(lhs[valid] / rhs[valid]))
    constant = observed * thresholds.CALIBRATION_MARGIN
    logger.debug(f"Difference-bound calibration eps={eps} alpha={alpha:.6g}: max ratio {observed:.6g}, C={constant:.6g}")
    return constant


def difference_bound_check(z1: complex, z2: complex, eps: float, alpha: float, constant: float | None = None) -> DifferenceBound:
    """
    Compare |g(z1) - g(z2)| with its exponential majorant.

    Args:
        z1, z2: Amplitudes within the overflow guard
        eps: Exponent slack ε > 0
        alpha: Nonlinearity strength
        constant: C to test against; calibrated on the default sweep when None

    Returns:
        DifferenceBound with lhs, rhs, the constant used and holds = lhs <= C·rhs
    """
    if eps <= 0:
        raise ParameterError(f"eps={eps} must be positive")
    check_overflow(np.array([z1, z2]), alpha * (1.0 + eps))
    if constant is None:
        constant = calibrate_difference_constant(float(eps), float(alpha))
    lhs, rhs = _difference_sides(z1, z2, eps, alpha)
    lhs, rhs = float(lhs), float(rhs)
    return DifferenceBound(lhs=lhs, rhs=rhs, constant=constant, holds=lhs <= constant * rhs)
