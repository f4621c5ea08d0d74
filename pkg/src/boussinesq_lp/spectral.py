"""Field arithmetic on the periodic 2-torus.

Real scalar fields on a uniform n x n grid over [0, L)^2 are represented
by their complex Fourier coefficients.  The forward transform is
normalized "unitary in mean": a constant field c has a single nonzero
coefficient equal to c, and cos(2*pi*x/L) splits into the two modes
m = +-1 with coefficient 1/2 each.  With this convention Parseval reads

    ||f||_{L^2(grid)} = L * sqrt(sum_m |c_m|^2),

where the grid L^2 norm uses the cell weight (L/n)^2.

Wavenumbers are k = 2*pi*m/L for integer mode indices m in [-n/2, n/2).
Odd-order derivative multipliers zero the Nyquist mode m = -n/2 so that
derivatives of real fields stay real; the same convention is applied to
the k (x) k / |k|^2 multipliers, whose sign at the Nyquist bin would
otherwise be ambiguous.  The zero mode of any inverse-Laplacian operator
is set to 0 (fields of interest are mean-zero).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Grid",
    "SpectralField",
    "VectorField",
    "make_grid",
    "transform",
    "inverse_transform",
    "derivative",
    "gradient",
    "divergence",
    "dealias",
    "dealias_vector",
    "grad_inv_laplacian_div",
    "grad_inv_laplacian_partial",
    "leray_project",
    "advect",
    "advect_vector",
    "linf_norm",
    "lp_norm",
    "grad_linf_norm",
    "divergence_residual",
    "is_divergence_free",
]


class Grid:
    """Uniform periodic grid: n points per dimension on [0, L)^2.

    Precomputes mode indices, wavenumber meshes and the 2/3-rule dealias
    mask.  Grids compare and hash by (n, L); use :func:`make_grid` to get
    a cached instance.
    """

    def __init__(self, n: int, box_length: float):
        if not isinstance(n, (int, np.integer)):
            raise ValueError(f"n must be an integer, got {n!r}")
        n = int(n)
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 16, got {n}")
        box_length = float(box_length)
        if not box_length > 0:
            raise ValueError(f"box_length must be positive, got {box_length}")

        self.n = n
        self.length = box_length

        m = np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(int)
        self.m1, self.m2 = np.meshgrid(m, m, indexing="ij")

        k0 = 2.0 * np.pi / box_length
        # full wavenumbers (Nyquist retained, used for |k|^2)
        self.k1_full = k0 * self.m1.astype(float)
        self.k2_full = k0 * self.m2.astype(float)
        # odd-derivative wavenumbers (Nyquist zeroed)
        nyq = n // 2
        self.k1 = np.where(self.m1 == -nyq, 0.0, self.k1_full)
        self.k2 = np.where(self.m2 == -nyq, 0.0, self.k2_full)

        self.ksq = self.k1_full**2 + self.k2_full**2
        self.ksq_safe = self.ksq.copy()
        self.ksq_safe[0, 0] = 1.0
        self.abs_k = np.sqrt(self.ksq)
        # inverse-Laplacian denominators use the Nyquist-zeroed wavenumbers so
        # the k (x) k / |k|^2 operators stay exact projections on every bin;
        # bins where both odd wavenumbers vanish map to 0
        self.ksq_odd = self.k1**2 + self.k2**2
        self.ksq_odd_safe = np.where(self.ksq_odd == 0.0, 1.0, self.ksq_odd)

        cutoff = n / 3.0
        self.dealias_mask = (np.abs(self.m1) <= cutoff) & (np.abs(self.m2) <= cutoff)

        x = box_length * np.arange(n) / n
        self.x1, self.x2 = np.meshgrid(x, x, indexing="ij")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def k_max(self) -> float:
        """Largest axis wavenumber, 2*pi/L * n/2."""
        return (2.0 * np.pi / self.length) * (self.n / 2)

    def __eq__(self, other) -> bool:
        return isinstance(other, Grid) and self.n == other.n and self.length == other.length

    def __hash__(self) -> int:
        return hash((self.n, self.length))

    def __repr__(self) -> str:
        return f"Grid(n={self.n}, L={self.length:g})"


@lru_cache(maxsize=None)
def make_grid(n: int, box_length: float = 2.0 * np.pi) -> Grid:
    """Build (or fetch a cached) grid with a consistent wavenumber table."""
    return Grid(n, box_length)


@dataclass(frozen=True)
class SpectralField:
    """Real scalar field stored as complex Fourier coefficients."""

    grid: Grid
    coeffs: np.ndarray

    @classmethod
    def from_values(cls, grid: Grid, values: np.ndarray) -> "SpectralField":
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n, grid.n):
            raise ValueError(
                f"value array shape {values.shape} does not match grid {(grid.n, grid.n)}"
            )
        return cls(grid, np.fft.fft2(values) / grid.n**2)

    @classmethod
    def zero(cls, grid: Grid) -> "SpectralField":
        return cls(grid, np.zeros((grid.n, grid.n), dtype=complex))

    def values(self) -> np.ndarray:
        """Collocation-grid samples (real part of the inverse transform).

        Cached on first call (fields are immutable); the returned array
        is read-only.
        """
        cache = self.__dict__.get("_values_cache")
        if cache is None:
            cache = np.ascontiguousarray(np.real(np.fft.ifft2(self.coeffs * self.grid.n**2)))
            cache.setflags(write=False)
            object.__setattr__(self, "_values_cache", cache)
        return cache

    def mean(self) -> float:
        return float(self.coeffs[0, 0].real)

    def multiplied(self, multiplier: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * multiplier)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coeffs)

    def _check(self, other: "SpectralField") -> None:
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")


@dataclass(frozen=True)
class VectorField:
    """Two-component field (u1, u2) sharing one grid."""

    u1: SpectralField
    u2: SpectralField

    def __post_init__(self):
        if self.u1.grid != self.u2.grid:
            raise ValueError("vector components live on different grids")

    @property
    def grid(self) -> Grid:
        return self.u1.grid

    @classmethod
    def zero(cls, grid: Grid) -> "VectorField":
        return cls(SpectralField.zero(grid), SpectralField.zero(grid))

    @classmethod
    def from_values(cls, grid: Grid, v1: np.ndarray, v2: np.ndarray) -> "VectorField":
        return cls(SpectralField.from_values(grid, v1), SpectralField.from_values(grid, v2))

    def values(self) -> tuple[np.ndarray, np.ndarray]:
        return self.u1.values(), self.u2.values()

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.u1 + other.u1, self.u2 + other.u2)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.u1 - other.u1, self.u2 - other.u2)

    def __mul__(self, scalar: float) -> "VectorField":
        return VectorField(self.u1 * scalar, self.u2 * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "VectorField":
        return VectorField(-self.u1, -self.u2)


def transform(grid: Grid, values: np.ndarray) -> SpectralField:
    """Forward transform of real grid samples."""
    return SpectralField.from_values(grid, values)


def inverse_transform(field: SpectralField) -> np.ndarray:
    """Real grid samples of a spectral field."""
    return field.values()


def derivative(f: SpectralField, axis: int) -> SpectralField:
    """Spectral partial derivative along axis 1 or 2 (Nyquist zeroed)."""
    if axis == 1:
        k = f.grid.k1
    elif axis == 2:
        k = f.grid.k2
    else:
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    return f.multiplied(1j * k)


def gradient(f: SpectralField) -> VectorField:
    return VectorField(derivative(f, 1), derivative(f, 2))


def divergence(w: VectorField) -> SpectralField:
    return derivative(w.u1, 1) + derivative(w.u2, 2)


def dealias(f: SpectralField) -> SpectralField:
    """Zero all modes with max(|m1|, |m2|) > n/3 (2/3 rule)."""
    return f.multiplied(f.grid.dealias_mask)


def dealias_vector(w: VectorField) -> VectorField:
    return VectorField(dealias(w.u1), dealias(w.u2))


def grad_inv_laplacian_div(w: VectorField) -> VectorField:
    """Gradient-part extractor: the k (x) k / |k|^2 multiplier.

    Reproduces any pure gradient exactly, annihilates divergence-free
    fields, and zeroes the mean mode.
    """
    g = w.grid
    s = (g.k1 * w.u1.coeffs + g.k2 * w.u2.coeffs) / g.ksq_odd_safe
    s[g.ksq_odd == 0.0] = 0.0
    return VectorField(SpectralField(g, g.k1 * s), SpectralField(g, g.k2 * s))


def grad_inv_laplacian_partial(theta: SpectralField, axis: int = 2) -> VectorField:
    """Apply the multiplier k * k_axis / |k|^2 to a scalar field.

    For theta depending only on x2 this recovers theta*e2 exactly.
    """
    g = theta.grid
    if axis == 1:
        ka = g.k1
    elif axis == 2:
        ka = g.k2
    else:
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    s = ka * theta.coeffs / g.ksq_odd_safe
    s[g.ksq_odd == 0.0] = 0.0
    return VectorField(SpectralField(g, g.k1 * s), SpectralField(g, g.k2 * s))


def leray_project(w: VectorField) -> VectorField:
    """Remove the gradient part; the result is divergence-free."""
    return w - grad_inv_laplacian_div(w)


def advect(v: VectorField, f: SpectralField) -> SpectralField:
    """Dealiased advection term v . grad f (pointwise product on the grid)."""
    v1, v2 = v.values()
    fx = derivative(f, 1).values()
    fy = derivative(f, 2).values()
    return dealias(SpectralField.from_values(f.grid, v1 * fx + v2 * fy))


def advect_vector(v: VectorField, w: VectorField) -> VectorField:
    """Componentwise v . grad w."""
    return VectorField(advect(v, w.u1), advect(v, w.u2))


def linf_norm(f: SpectralField) -> float:
    return float(np.max(np.abs(f.values())))


def lp_norm(f: SpectralField, p: float) -> float:
    """L^p norm by collocation quadrature with cell weight (L/n)^2."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if np.isinf(p):
        return linf_norm(f)
    vals = np.abs(f.values())
    cell = (f.grid.length / f.grid.n) ** 2
    return float((np.sum(vals**p) * cell) ** (1.0 / p))


def grad_linf_norm(w: VectorField) -> float:
    """sup-norm of the Jacobian as max over the grid of the max row sum.

    Consistent with the operator norm of v -> v . grad acting on scalars.
    """
    d11 = np.abs(derivative(w.u1, 1).values())
    d12 = np.abs(derivative(w.u1, 2).values())
    d21 = np.abs(derivative(w.u2, 1).values())
    d22 = np.abs(derivative(w.u2, 2).values())
    return float(max(np.max(d11 + d12), np.max(d21 + d22)))


def divergence_residual(w: VectorField) -> float:
    return linf_norm(divergence(w))


def is_divergence_free(w: VectorField, rtol: float = 1e-10, atol: float = 1e-13) -> bool:
    """Check ||div w||_inf <= rtol * ||grad w||_inf + atol."""
    return divergence_residual(w) <= rtol * grad_linf_norm(w) + atol
