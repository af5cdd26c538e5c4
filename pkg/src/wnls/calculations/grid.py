# grid.py
"""
Discretization substrate

Uniform periodic grid on [-L, L)², spectral transforms, rectangle-rule
quadrature (including the integrable singular weight |x|^{-b}) and the
discrete norms used everywhere else in the toolkit.

Conventions:
    - values[i, j] = u(x_i, y_j) with x_i = -L + i*h, stored row-major.
    - Coordinates are generated as (i - n/2) * h so that the origin is a grid
      node (index n/2) and x_{n-i} = -x_i holds exactly in floating point.
    - Transforms use numpy's "ortho" normalization; together with the h²
      factor in every discrete L² norm this makes Parseval exact.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from cachetools import LRUCache, cached
from scipy import integrate

from ..config import settings
from .errors import GridError, ParameterError

logger = logging.getLogger(__name__)


# ----------------------------------------------------------------------
# Grid specification
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Uniform square grid with n points per axis covering [-L, L)²."""

    n: int
    half_width: float

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def cell_area(self) -> float:
        return self.spacing ** 2

    @property
    def area(self) -> float:
        return (2.0 * self.half_width) ** 2

    @property
    def origin_index(self) -> Tuple[int, int]:
        return (self.n // 2, self.n // 2)

    def coordinates(self) -> np.ndarray:
        """1D node coordinates x_i = -L + i*h."""
        return _grid_tables(self.n, self.half_width)["x"]

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """2D coordinate arrays (X, Y) with X[i, j] = x_i, Y[i, j] = y_j."""
        tables = _grid_tables(self.n, self.half_width)
        return tables["X"], tables["Y"]

    def radius(self) -> np.ndarray:
        """|x| at every node."""
        return _grid_tables(self.n, self.half_width)["R"]

    def wavenumbers(self) -> np.ndarray:
        """1D wavenumbers (π/L)*m in FFT order."""
        return _grid_tables(self.n, self.half_width)["k"]

    def wavenumber_mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        tables = _grid_tables(self.n, self.half_width)
        return tables["KX"], tables["KY"]

    def k_squared(self) -> np.ndarray:
        return _grid_tables(self.n, self.half_width)["K2"]


@cached(cache=LRUCache(maxsize=16))
def _grid_tables(n: int, half_width: float) -> Dict[str, np.ndarray]:
    """Coordinate and wavenumber tables shared by every object on this grid."""
    h = 2.0 * half_width / n
    x = (np.arange(n) - n // 2) * h
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
    X, Y = np.meshgrid(x, x, indexing="ij")
    KX, KY = np.meshgrid(k, k, indexing="ij")
    tables = {
        "x": x,
        "X": X,
        "Y": Y,
        "R": np.hypot(X, Y),
        "k": k,
        "KX": KX,
        "KY": KY,
        "K2": KX ** 2 + KY ** 2,
    }
    for arr in tables.values():
        arr.setflags(write=False)
    return tables


def make_grid(n: int, L: float) -> GridSpec:
    """
    Build a validated grid.

    Args:
        n: Points per axis, a power of two and at least 8
        L: Half-width of the periodic box [-L, L)²

    Returns:
        GridSpec with spacing h = 2L/n
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise GridError(f"grid size n must be an integer, got {n!r}")
    n = int(n)
    if n < settings.MIN_GRID_POINTS or n & (n - 1) != 0:
        raise GridError(f"grid size n={n} must be a power of two >= {settings.MIN_GRID_POINTS}")
    L = float(L)
    if not np.isfinite(L) or L <= 0.0:
        raise GridError(f"half_width L={L} must be positive and finite")
    return GridSpec(n=n, half_width=L)


def require_same_grid(a: GridSpec, b: GridSpec) -> None:
    if a != b:
        raise GridError(f"grid mismatch: {a} vs {b}")


# ----------------------------------------------------------------------
# Fields
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Field:
    """
    Complex samples of u on a grid.

    The sample array is copied on construction and made read-only, so a
    Field is an immutable snapshot that can be handed between threads.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.complex128, copy=True)
        n = self.grid.n
        if arr.shape != (n, n):
            raise GridError(f"field shape {arr.shape} does not match grid ({n}, {n})")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("field contains non-finite samples")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "Field":
        return cls(grid, np.zeros((grid.n, grid.n), dtype=np.complex128))

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)

    def scaled(self, c: complex) -> "Field":
        return Field(self.grid, c * self.values)

    def shifted(self, di: int, dj: int) -> "Field":
        """Periodic translation by whole cells."""
        return Field(self.grid, np.roll(self.values, (di, dj), axis=(0, 1)))

    def modulus(self) -> np.ndarray:
        return np.abs(self.values)

    def intensity(self) -> np.ndarray:
        return self.values.real ** 2 + self.values.imag ** 2

    def __add__(self, other: "Field") -> "Field":
        require_same_grid(self.grid, other.grid)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        require_same_grid(self.grid, other.grid)
        return Field(self.grid, self.values - other.values)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients (ortho normalization, FFT order)."""

    grid: GridSpec
    coefficients: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coefficients, dtype=np.complex128, copy=True)
        if arr.shape != (self.grid.n, self.grid.n):
            raise GridError(f"spectrum shape {arr.shape} does not match grid")
        arr.setflags(write=False)
        object.__setattr__(self, "coefficients", arr)

    def l2(self) -> float:
        return float(np.sqrt(self.grid.cell_area * np.sum(np.abs(self.coefficients) ** 2)))


def forward_transform(f: Field) -> SpectralField:
    return SpectralField(f.grid, np.fft.fft2(f.values, norm="ortho"))


def inverse_transform(F: SpectralField, grid: GridSpec | None = None) -> Field:
    """Inverse of forward_transform; `grid`, when given, must match F.grid."""
    if grid is not None:
        require_same_grid(grid, F.grid)
    return Field(F.grid, np.fft.ifft2(F.coefficients, norm="ortho"))


# ----------------------------------------------------------------------
# Quadrature
# ----------------------------------------------------------------------

def integrate_array(grid: GridSpec, samples: np.ndarray) -> float:
    """Periodic rectangle rule h² Σ samples (real part)."""
    return float(grid.cell_area * np.sum(np.real(samples)))


def quadrature(f: Field) -> float:
    """
    Rectangle-rule integral of a field over the box.

    The imaginary part of the samples is discarded; integrands passed here
    are real-valued quantities stored in a Field.
    """
    return integrate_array(f.grid, f.values)


def disk_mask(grid: GridSpec, radius: float) -> np.ndarray:
    """Sharp cell-center membership of the closed disk |x| <= radius."""
    return grid.radius() <= radius


# ----------------------------------------------------------------------
# Singular weight |x|^{-b}
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SingularWeight:
    """
    Grid samples of ω(x) = |x|^{-b}.

    Every node carries the pointwise value except the origin node, which
    carries the exact average of |x|^{-b} over its cell.
    """

    grid: GridSpec
    b: float
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.shape != (self.grid.n, self.grid.n):
            raise GridError(f"weight shape {arr.shape} does not match grid")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def shifted(self, di: int, dj: int) -> "SingularWeight":
        """Weight re-centered by whole cells (periodic)."""
        return SingularWeight(self.grid, self.b, np.roll(self.values, (di, dj), axis=(0, 1)))

    def scaled(self, factor: float) -> "SingularWeight":
        """Weight multiplied by factor >= 0; factor 0 switches the nonlinearity off."""
        if factor < 0:
            raise ParameterError(f"weight scale factor {factor} must be nonnegative")
        return SingularWeight(self.grid, self.b, factor * self.values)


def origin_cell_average(h: float, b: float) -> float:
    """
    Exact mean of |x|^{-b} over the square [-h/2, h/2]².

    By the 8-fold symmetry of the square the integral reduces to
    8 ∫_0^{π/4} ∫_0^{h/(2cosθ)} r^{1-b} dr dθ, which is a smooth 1D
    integral in θ evaluated adaptively.
    """
    value, _ = integrate.quad(
        lambda theta: (2.0 * np.cos(theta)) ** (b - 2.0),
        0.0,
        np.pi / 4.0,
        epsabs=0.0,
        epsrel=1e-13,
    )
    unit_square = 8.0 / (2.0 - b) * value
    return h ** (-b) * unit_square


@cached(cache=LRUCache(maxsize=16))
def make_singular_weight(grid: GridSpec, b: float) -> SingularWeight:
    """
    Sample ω(x) = |x|^{-b} on the grid.

    Args:
        grid: Target grid
        b: Singularity exponent, 0 < b < 2 (integrable in 2D)

    Returns:
        SingularWeight, strictly positive and finite at every node
    """
    b = float(b)
    if not 0.0 < b < 2.0:
        raise ParameterError(f"weight exponent b={b} outside (0, 2)")
    R = np.array(grid.radius(), copy=True)
    oi, oj = grid.origin_index
    R[oi, oj] = 1.0
    values = R ** (-b)
    values[oi, oj] = origin_cell_average(grid.spacing, b)
    logger.debug(f"Singular weight b={b} on n={grid.n}: origin cell {values[oi, oj]:.6g}")
    return SingularWeight(grid, b, values)


# ----------------------------------------------------------------------
# Norms
# ----------------------------------------------------------------------

def l2_norm(f: Field) -> float:
    return float(np.sqrt(integrate_array(f.grid, f.intensity())))


def gradient_l2(f: Field) -> float:
    """‖∇u‖_{L²} by Parseval on the spectral derivative."""
    spectrum = np.fft.fft2(f.values, norm="ortho")
    energy = f.grid.cell_area * np.sum(f.grid.k_squared() * np.abs(spectrum) ** 2)
    return float(np.sqrt(energy))


def gradient(f: Field) -> Tuple[Field, Field]:
    """Spectral partial derivatives (∂x u, ∂y u)."""
    KX, KY = f.grid.wavenumber_mesh()
    spectrum = np.fft.fft2(f.values)
    dx = np.fft.ifft2(1j * KX * spectrum)
    dy = np.fft.ifft2(1j * KY * spectrum)
    return Field(f.grid, dx), Field(f.grid, dy)


def lp_norm(f: Field, p: float) -> float:
    if p < 1:
        raise ParameterError(f"Lp exponent p={p} must be >= 1")
    return float(integrate_array(f.grid, f.modulus() ** p) ** (1.0 / p))


def linf_norm(f: Field) -> float:
    return float(np.max(f.modulus())) if f.values.size else 0.0


def holder_seminorm(
    f: Field,
    beta: float,
    window: int = settings.HOLDER_WINDOW,
    far_pairs: int | None = None,
    seed: int = settings.HOLDER_SEED,
) -> float:
    """
    Estimate sup |u(x) - u(y)| / |x - y|^β.

    Every pair of nodes within `window` cells (Chebyshev distance) is
    examined, plus `far_pairs` (default 10*n) random pairs drawn with a
    fixed seed. Distances are Euclidean inside the box, not periodic.
    """
    if not 0.0 < beta <= 1.0:
        raise ParameterError(f"Holder exponent beta={beta} outside (0, 1]")
    u = f.values
    n = f.grid.n
    h = f.grid.spacing
    best = 0.0
    for di in range(0, window + 1):
        for dj in range(-window, window + 1):
            if di == 0 and dj <= 0:
                continue
            j0 = max(0, -dj)
            j1 = n - max(0, dj)
            diff = np.abs(u[di:n, j0 + dj:j1 + dj] - u[0:n - di, j0:j1])
            if diff.size == 0:
                continue
            dist = h * np.hypot(di, dj)
            best = max(best, float(np.max(diff)) / dist ** beta)

    count = far_pairs if far_pairs is not None else settings.HOLDER_FAR_PAIRS_PER_N * n
    if count > 0:
        rng = np.random.default_rng(seed)
        a = rng.integers(0, n, size=(count, 2))
        c = rng.integers(0, n, size=(count, 2))
        dist = h * np.hypot(a[:, 0] - c[:, 0], a[:, 1] - c[:, 1])
        keep = dist > 0
        if np.any(keep):
            diff = np.abs(u[a[keep, 0], a[keep, 1]] - u[c[keep, 0], c[keep, 1]])
            best = max(best, float(np.max(diff / dist[keep] ** beta)))
    return best


@dataclass(frozen=True)
class FieldNorms:
    """Discrete norms of one field; parameterized norms are methods."""

    field: Field
    l2: float
    grad_l2: float
    linf: float

    @property
    def h1(self) -> float:
        return float(np.sqrt(self.l2 ** 2 + self.grad_l2 ** 2))

    def h_mu(self, mu: float) -> float:
        """‖u‖_{H_μ} with ‖u‖²_{H_μ} = ‖∇u‖² + μ²‖u‖²."""
        return float(np.sqrt(self.grad_l2 ** 2 + mu ** 2 * self.l2 ** 2))

    def lp(self, p: float) -> float:
        return lp_norm(self.field, p)

    def holder_seminorm(self, beta: float, **kwargs) -> float:
        return holder_seminorm(self.field, beta, **kwargs)

    def holder_norm(self, beta: float, **kwargs) -> float:
        """C^β norm: ‖u‖_∞ plus the Hölder seminorm."""
        return self.linf + holder_seminorm(self.field, beta, **kwargs)


def norms(f: Field) -> FieldNorms:
    return FieldNorms(field=f, l2=l2_norm(f), grad_l2=gradient_l2(f), linf=linf_norm(f))
