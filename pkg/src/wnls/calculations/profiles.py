"""
Initial-data families.

Every builder returns a Field on the given grid. Radial builders place the
center on a grid node so that the samples keep the grid's reflection
symmetry.
"""

from __future__ import annotations

import numpy as np

from ..config import settings
from .errors import ParameterError
from .grid import Field, GridSpec, gradient_l2, l2_norm


def gaussian(grid: GridSpec, amplitude: float = 1.0, width: float = 1.0, center: tuple = (0.0, 0.0)) -> Field:
    """A·exp(-|x - c|²/(2σ²)); width σ = 1 gives A·e^{-|x|²/2}."""
    if width <= 0:
        raise ParameterError(f"init.width={width} must be positive")
    X, Y = grid.mesh()
    r2 = (X - center[0]) ** 2 + (Y - center[1]) ** 2
    return Field(grid, amplitude * np.exp(-r2 / (2.0 * width ** 2)))


def ring(grid: GridSpec, amplitude: float = 1.0, radius: float = 2.0, width: float = 0.5) -> Field:
    """Gaussian annulus A·exp(-(|x| - R)²/(2σ²))."""
    if width <= 0 or radius < 0:
        raise ParameterError(f"ring radius={radius}, width={width} invalid")
    r = grid.radius()
    return Field(grid, amplitude * np.exp(-((r - radius) ** 2) / (2.0 * width ** 2)))


def _smooth_zero(t: np.ndarray) -> np.ndarray:
    """exp(-1/t) for t > 0, 0 otherwise."""
    out = np.zeros_like(t, dtype=np.float64)
    positive = t > 0
    out[positive] = np.exp(-1.0 / t[positive])
    return out


def plateau(grid: GridSpec, amplitude: float = 1.0, inner: float = 1.0, outer: float = 2.0) -> Field:
    """
    Smooth plateau: A on |x| <= inner, C∞ transition, 0 for |x| >= outer.
    """
    if not 0 < inner < outer:
        raise ParameterError(f"plateau radii inner={inner}, outer={outer} invalid")
    r = grid.radius()
    rise = _smooth_zero(outer - r)
    fall = _smooth_zero(r - inner)
    return Field(grid, amplitude * rise / (rise + fall))


def plane_wave(grid: GridSpec, mx: int, my: int) -> Field:
    """Unit-modulus grid mode e^{i(k_x x + k_y y)} with k = (π/L)(mx, my)."""
    X, Y = grid.mesh()
    scale = np.pi / grid.half_width
    return Field(grid, np.exp(1j * scale * (mx * X + my * Y)))


def random_band_limited(
    grid: GridSpec,
    seed: int = settings.DEFAULT_SEED,
    sigma: float = settings.STRICHARTZ_BAND_SIGMA,
    normalize: str | None = "h1",
) -> Field:
    """
    Seeded random field with a Gaussian envelope exp(-|k|²/(2σ²)) in Fourier space.

    Args:
        grid: Target grid
        seed: RNG seed (numpy default_rng)
        sigma: Envelope width in wavenumber units
        normalize: "h1" for unit H¹ norm, "l2" for unit L² norm, None to keep raw

    Returns:
        Complex Field
    """
    rng = np.random.default_rng(seed)
    shape = (grid.n, grid.n)
    noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    envelope = np.exp(-grid.k_squared() / (2.0 * sigma ** 2))
    u = Field(grid, np.fft.ifft2(noise * envelope, norm="ortho"))
    if normalize is None:
        return u
    if normalize == "h1":
        scale = np.sqrt(l2_norm(u) ** 2 + gradient_l2(u) ** 2)
    elif normalize == "l2":
        scale = l2_norm(u)
    else:
        raise ParameterError(f"unknown normalization {normalize!r}")
    return u.scaled(1.0 / scale)
