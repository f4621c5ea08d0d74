"""Shared test utilities."""

import numpy as np

from boussinesq_lp.spectral import SpectralField, VectorField, linf_norm


def rel_linf(a: SpectralField, b: SpectralField) -> float:
    """Relative sup-distance between two fields."""
    scale = max(linf_norm(a), linf_norm(b), 1e-300)
    return linf_norm(a - b) / scale


def rel_linf_values(values: np.ndarray, reference: np.ndarray) -> float:
    scale = max(np.max(np.abs(reference)), 1e-300)
    return float(np.max(np.abs(values - reference)) / scale)


def vec_linf(w: VectorField) -> float:
    return max(linf_norm(w.u1), linf_norm(w.u2))


def random_dealiased_field(grid, seed: int) -> SpectralField:
    from boussinesq_lp.spectral import dealias

    rng = np.random.default_rng(seed)
    return dealias(SpectralField.from_values(grid, rng.standard_normal((grid.n, grid.n))))


def mean_zero_smooth_field(grid, seed: int, decay: float = 2.0) -> SpectralField:
    """Random field with power-law decaying spectrum and zero mean."""
    rng = np.random.default_rng(seed)
    f = SpectralField.from_values(grid, rng.standard_normal((grid.n, grid.n)))
    weight = (1.0 + grid.abs_k) ** (-decay)
    coeffs = f.coeffs * weight * grid.dealias_mask
    coeffs[0, 0] = 0.0
    return SpectralField(grid, coeffs)
