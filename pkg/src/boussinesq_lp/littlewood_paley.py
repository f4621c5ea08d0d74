"""Dyadic frequency decomposition, Besov/Hoelder norms, paraproducts.

The decomposition is built from one smooth radial profile chi with
chi = 1 on |xi| <= 1 and chi = 0 on |xi| >= 4/3, via the classical
exp(-1/(1-t^2))-type mollified step.  The annulus multipliers are
phi(xi) = chi(xi/2) - chi(xi), supported in 1 <= |xi| <= 8/3, so the
telescoping identities

    chi(xi) + sum_{q=0}^{Q} phi(2^-q xi) = chi(2^-(Q+1) xi)

hold exactly and all support-separation and frame-bound properties
follow by construction.

On the discrete torus the top block q_max absorbs the remaining high
frequency tail (its multiplier is 1 - chi(2^-q_max xi) instead of
phi(2^-q_max xi)), which makes the partition of unity exact at *every*
grid frequency, including the corner modes beyond the last full
annulus.  Blocks q < q_max are genuine annulus multipliers.

Homogeneous norms use additional negative-q annulus blocks down to
q_min = -floor(log2(L)) - 2, a torus truncation of the whole-space
definition (below q_min there is no nonzero grid frequency left).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .spectral import (
    Grid,
    SpectralField,
    VectorField,
    advect,
    dealias,
    derivative,
    grad_linf_norm,
    is_divergence_free,
    linf_norm,
    lp_norm,
    make_grid,
)

__all__ = [
    "DyadicPartition",
    "BesovReport",
    "BernsteinRecord",
    "A0Constant",
    "build_partition",
    "block",
    "low_pass",
    "low_pass_vector",
    "holder_norm",
    "besov_norm",
    "homogeneous_besov_norm",
    "holder_norm_vector",
    "bony_decompose",
    "commutator",
    "bernstein_report",
    "compute_a0",
]

INNER_RADIUS = 0.75
OUTER_RADIUS = 8.0 / 3.0


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0.0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(1.0 - t > 0.0, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return a / (a + b)


def chi_profile(s: np.ndarray) -> np.ndarray:
    """Radial low-pass bump: 1 on |xi| <= 1, 0 on |xi| >= 4/3."""
    s = np.asarray(s, dtype=float)
    return _smooth_step((4.0 / 3.0 - s) * 3.0)


def phi_profile(s: np.ndarray) -> np.ndarray:
    """Radial annulus bump chi(s/2) - chi(s), supported in 1 <= s <= 8/3."""
    return chi_profile(np.asarray(s, dtype=float) / 2.0) - chi_profile(s)


class DyadicPartition:
    """Sampled dyadic multipliers on a grid's frequency lattice.

    Attributes:
        grid: the host grid.
        q_max: largest dyadic block; chosen as the largest q with
            2^q * 8/3 <= (2/3) * k_max so every full annulus sits inside
            the dealiased band.
        chi_hat: samples of chi(xi)  (block q = -1).
        phi_hat: list of samples of phi(2^-q xi) for q = 0..q_max, the
            last entry being the high-frequency tail block.
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        self.r_inner = INNER_RADIUS
        self.r_outer = OUTER_RADIUS

        covered = (2.0 / 3.0) * grid.k_max
        q_max = int(math.floor(math.log2(covered / OUTER_RADIUS)))
        if q_max < 1:
            raise ValueError(
                f"grid too coarse for a dyadic partition (needs blocks -1..1): {grid!r}"
            )
        self.q_max = q_max

        s = grid.abs_k
        self.chi_hat = chi_profile(s)
        self.phi_hat = [phi_profile(s / 2.0**q) for q in range(q_max)]
        self.phi_hat.append(1.0 - chi_profile(s / 2.0**q_max))

        # S_q multipliers for q = 0..q_max+1 (partial sums of the blocks)
        self._lowpass = [self.chi_hat.copy()]
        for q in range(q_max + 1):
            self._lowpass.append(self._lowpass[-1] + self.phi_hat[q])
        self._neg_phi: dict[int, np.ndarray] = {}

    @property
    def q_min_homogeneous(self) -> int:
        return -int(math.floor(math.log2(self.grid.length))) - 2

    def multiplier(self, q: int) -> np.ndarray:
        """Inhomogeneous block multiplier, q in [-1, q_max]."""
        if q == -1:
            return self.chi_hat
        if 0 <= q <= self.q_max:
            return self.phi_hat[q]
        raise ValueError(f"block index q={q} outside [-1, {self.q_max}]")

    def homogeneous_multiplier(self, q: int) -> np.ndarray:
        """Annulus multiplier phi(2^-q xi) for any q in [q_min, q_max]."""
        if q >= 0:
            return self.multiplier(q)
        if q < self.q_min_homogeneous:
            raise ValueError(f"homogeneous block q={q} below q_min={self.q_min_homogeneous}")
        if q not in self._neg_phi:
            self._neg_phi[q] = phi_profile(self.grid.abs_k / 2.0**q)
        return self._neg_phi[q]

    def lowpass_multiplier(self, q: int) -> np.ndarray:
        """S_q multiplier (sum of blocks p <= q-1); q in [-1, q_max+1]."""
        if q <= -1:
            return np.zeros_like(self.chi_hat)
        if q > self.q_max + 1:
            raise ValueError(f"low-pass index q={q} outside [-1, {self.q_max + 1}]")
        return self._lowpass[q]

    def partition_sum(self) -> np.ndarray:
        return self._lowpass[-1]

    def frame_sum(self) -> np.ndarray:
        out = self.chi_hat**2
        for p in self.phi_hat:
            out = out + p**2
        return out


@lru_cache(maxsize=None)
def build_partition(grid: Grid) -> DyadicPartition:
    """Build (or fetch the cached) dyadic partition for a grid."""
    return DyadicPartition(grid)


def block(q: int, f: SpectralField, partition: DyadicPartition | None = None) -> SpectralField:
    """Dyadic block: apply the annulus multiplier of index q."""
    part = partition or build_partition(f.grid)
    return f.multiplied(part.multiplier(q))


def low_pass(q: int, f: SpectralField, partition: DyadicPartition | None = None) -> SpectralField:
    """Cumulative low-pass: sum of blocks p <= q-1."""
    part = partition or build_partition(f.grid)
    return f.multiplied(part.lowpass_multiplier(q))


def low_pass_vector(q: int, w: VectorField, partition: DyadicPartition | None = None) -> VectorField:
    return VectorField(low_pass(q, w.u1, partition), low_pass(q, w.u2, partition))


@dataclass
class BesovReport:
    """Per-block norms and the assembled (in)homogeneous Besov norm."""

    s: float
    p: float
    q_index: float
    block_norms: list[tuple[int, float]]
    value: float
    homogeneous_blocks: list[tuple[int, float]] = field(default_factory=list)
    homogeneous_value: float = 0.0

    def to_dict(self) -> dict:
        def num(x):
            return "inf" if np.isinf(x) else float(x)

        return {
            "s": float(self.s),
            "p": num(self.p),
            "q": num(self.q_index),
            "blocks": [{"q": int(q), "norm": float(v)} for q, v in self.block_norms],
            "value": float(self.value),
            "homogeneous_value": float(self.homogeneous_value),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _assemble(entries: list[tuple[int, float]], s: float, q_index: float) -> float:
    if not entries:
        return 0.0
    if np.isinf(q_index):
        return max(2.0 ** (q * s) * v for q, v in entries)
    total = sum((2.0 ** (q * s) * v) ** q_index for q, v in entries)
    return float(total ** (1.0 / q_index))


def besov_norm(
    f: SpectralField,
    s: float,
    p: float = np.inf,
    q_index: float = np.inf,
    partition: DyadicPartition | None = None,
) -> BesovReport:
    """Inhomogeneous Besov norm with the homogeneous variant alongside."""
    if p < 1 or q_index < 1:
        raise ValueError("integrability indices must be >= 1")
    part = partition or build_partition(f.grid)

    blocks = [(q, lp_norm(block(q, f, part), p)) for q in range(-1, part.q_max + 1)]
    value = _assemble(blocks, s, q_index)

    hom = [
        (q, lp_norm(f.multiplied(part.homogeneous_multiplier(q)), p))
        for q in range(part.q_min_homogeneous, 0)
    ]
    hom += blocks[1:]  # blocks q >= 0 coincide in both decompositions
    hom_value = _assemble(hom, s, q_index)

    return BesovReport(s, p, q_index, blocks, value, hom, hom_value)


def holder_norm(
    f: SpectralField, r: float, partition: DyadicPartition | None = None
) -> BesovReport:
    """Hoelder norm: sup-type Besov norm with p = q = infinity."""
    if r <= 0:
        raise ValueError(f"Hoelder exponent must be positive, got {r}")
    return besov_norm(f, r, np.inf, np.inf, partition)


def homogeneous_besov_norm(
    f: SpectralField,
    s: float,
    p: float = np.inf,
    q_index: float = np.inf,
    partition: DyadicPartition | None = None,
) -> float:
    return besov_norm(f, s, p, q_index, partition).homogeneous_value


def holder_norm_vector(
    w: VectorField, r: float, partition: DyadicPartition | None = None
) -> float:
    """Componentwise maximum of the Hoelder norms."""
    part = partition or build_partition(w.grid)
    return max(holder_norm(w.u1, r, part).value, holder_norm(w.u2, r, part).value)


def bony_decompose(
    u: SpectralField,
    v: SpectralField,
    partition: DyadicPartition | None = None,
) -> tuple[SpectralField, SpectralField, SpectralField]:
    """Split the product uv into (T_u v, T_v u, R(u, v)).

    T_u v pairs low frequencies of u against blocks of v, and R collects
    the diagonal |p - q| <= 1.  The three parts sum to the dealiased
    pointwise product.
    """
    part = partition or build_partition(u.grid)
    grid = u.grid
    qs = range(-1, part.q_max + 1)

    ub = {q: block(q, u, part).values() for q in qs}
    vb = {q: block(q, v, part).values() for q in qs}
    us = {q: low_pass(q, u, part).values() for q in qs}
    vs = {q: low_pass(q, v, part).values() for q in qs}

    t_uv = np.zeros((grid.n, grid.n))
    t_vu = np.zeros((grid.n, grid.n))
    rem = np.zeros((grid.n, grid.n))
    for q in qs:
        if q - 1 >= 0:
            t_uv += us[q - 1] * vb[q]
            t_vu += vs[q - 1] * ub[q]
        near = np.zeros((grid.n, grid.n))
        for j in (-1, 0, 1):
            if -1 <= q + j <= part.q_max:
                near += vb[q + j]
        rem += ub[q] * near

    mk = lambda vals: dealias(SpectralField.from_values(grid, vals))
    return mk(t_uv), mk(t_vu), mk(rem)


def commutator(
    v: VectorField,
    q: int,
    f: SpectralField,
    partition: DyadicPartition | None = None,
) -> SpectralField:
    """Commutator of advection with a dyadic block: v.grad(D_q f) - D_q(v.grad f)."""
    if not is_divergence_free(v):
        raise ValueError("commutator requires a divergence-free velocity field")
    part = partition or build_partition(f.grid)
    return advect(v, block(q, f, part)) - block(q, advect(v, f), part)


@dataclass
class BernsteinRecord:
    """Measured norm ratios for one spectrally localized field."""

    q: int
    k: int
    a: float
    b: float
    lam: float
    ratio_upper: float  # sup_{|alpha|=k} ||d^alpha f||_b / (lam^{k+2(1/a-1/b)} ||f||_a)
    ratio_lower: float  # sup_{|alpha|=k} ||d^alpha f||_a / (lam^k ||f||_a)
    degenerate: bool = False


def bernstein_report(
    f: SpectralField,
    q: int,
    k: int,
    a: float,
    b: float,
    partition: DyadicPartition | None = None,
) -> BernsteinRecord:
    """Measure derivative-vs-scale norm ratios on the block-q part of f."""
    if a > b:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    part = partition or build_partition(f.grid)
    g = block(q, f, part)
    lam = 2.0**q

    base = lp_norm(g, a)
    if base < 1e-300:
        return BernsteinRecord(q, k, a, b, lam, 0.0, 0.0, degenerate=True)

    sup_b = 0.0
    sup_a = 0.0
    for a1 in range(k + 1):
        a2 = k - a1
        d = g
        for _ in range(a1):
            d = derivative(d, 1)
        for _ in range(a2):
            d = derivative(d, 2)
        sup_b = max(sup_b, lp_norm(d, b))
        sup_a = max(sup_a, lp_norm(d, a))

    inv_a = 0.0 if np.isinf(a) else 1.0 / a
    inv_b = 0.0 if np.isinf(b) else 1.0 / b
    scale_upper = lam ** (k + 2.0 * (inv_a - inv_b))
    return BernsteinRecord(
        q, k, a, b, lam,
        ratio_upper=sup_b / (scale_upper * base),
        ratio_lower=sup_a / (lam**k * base),
    )


@dataclass(frozen=True)
class A0Constant:
    """L^1 mass of the kernel generating the cumulative low-pass operators."""

    a0: float
    resolution: int
    box: float


@lru_cache(maxsize=None)
def compute_a0(resolution: int = 2048, box: float = 64.0 * np.pi) -> A0Constant:
    """Quadrature of |F^{-1} chi| over a large fine periodic box.

    The kernel decays super-algebraically, so a box of ~100 length units
    captures the L^1 mass far beyond the 1e-6 level needed downstream.
    chi(0) = 1 forces the integral of the kernel to 1, hence a0 >= 1.
    """
    grid = make_grid(resolution, box)
    coeffs = chi_profile(grid.abs_k).astype(complex) / box**2
    kernel = SpectralField(grid, coeffs)
    return A0Constant(lp_norm(kernel, 1), resolution, box)
