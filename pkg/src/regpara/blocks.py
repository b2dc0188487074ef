"""Dyadic Littlewood-Paley decomposition and spectral multipliers.

The radial cutoff chi is a smooth exponential step, identically 1 for
r <= 4/3 and identically 0 for r >= 3/2.  Blocks are

    rho_{-1}(xi) = chi(|xi|),      rho_j(xi) = chi(2^{-(j+1)}|xi|) - chi(2^{-j}|xi|),

which telescope exactly, so the partition of unity holds to rounding error
on every lattice frequency.  Block j >= 0 is supported in the annulus
[4/3, 3] * 2^j, hence rho_i * rho_j = 0 for |i - j| >= 2, and the low-pass
S_j = sum_{i < j-1} Delta_i has symbol chi(2^{-(j-1)}|xi|) for j >= 1 and
vanishes for j <= 0.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .grid import Field, Grid, from_spectrum, smooth_step

CHI_LO = 4.0 / 3.0
CHI_HI = 3.0 / 2.0
ANNULUS_LO = CHI_LO            # inner radius of the block-0 annulus
ANNULUS_HI = 2.0 * CHI_HI     # outer radius of the block-0 annulus


def chi(r: np.ndarray) -> np.ndarray:
    """Smooth radial step: exactly 1 on r <= 4/3, exactly 0 on r >= 3/2."""
    r = np.asarray(r, dtype=float)
    return 1.0 - smooth_step((r - CHI_LO) / (CHI_HI - CHI_LO))


@dataclass(frozen=True)
class BlockDecomposition:
    """Multipliers rho_{-1..J} on the frequency lattice of one grid."""

    grid: Grid
    j_max: int
    multipliers: np.ndarray  # shape (j_max + 2, *grid.shape)

    def rho(self, j: int) -> np.ndarray:
        if j < -1 or j > self.j_max:
            raise ValueError(f"block index {j} outside [-1, {self.j_max}]")
        return self.multipliers[j + 1]

    def low_symbol(self, j: int) -> np.ndarray:
        """Symbol of S_j = sum_{i < j-1} Delta_i (zero for j <= 0)."""
        if j <= 0:
            return np.zeros(self.grid.shape)
        r = self.grid.freq_radius()
        return chi(r / 2.0 ** (j - 1))

    def gauss_low_symbol(self, j: int) -> np.ndarray:
        """Gaussian low-pass window at scale 2^j, used by slope estimators.

        On the integer frequency lattice forced by the box size, compactly
        supported profiles are under-sampled at small j and their real-space
        kernels have fat tails; the Gaussian's periodization stays thin at
        every lattice granularity, so pairings against it scale cleanly.
        """
        r = self.grid.freq_radius()
        return np.exp(-((r / 2.0**j) ** 2))

    @property
    def js(self) -> range:
        return range(-1, self.j_max + 1)


@functools.lru_cache(maxsize=32)
def make_partition(grid: Grid) -> BlockDecomposition:
    """Dyadic partition of unity on the grid's frequency lattice."""
    r = grid.freq_radius()
    rmax = grid.max_freq_radius()
    j_top = 1
    while CHI_LO * 2.0**j_top < rmax:
        j_top += 1
    if j_top < 3:
        raise ValueError(
            f"grid with n={grid.n}, box={grid.box} cannot host one annulus "
            f"(J={j_top} < 3); increase n"
        )
    mults = np.empty((j_top + 2,) + grid.shape)
    mults[0] = chi(r)
    prev = mults[0].copy()
    for j in range(0, j_top + 1):
        cur = chi(r / 2.0 ** (j + 1))
        mults[j + 1] = cur - prev
        prev = cur
    return BlockDecomposition(grid=grid, j_max=j_top, multipliers=mults)


def lp_block(decomp: BlockDecomposition, j: int, f: Field) -> Field:
    """Delta_j f via spectral multiplication."""
    if f.grid != decomp.grid:
        raise ValueError("grid mismatch")
    return from_spectrum(f.grid, decomp.rho(j) * f.spectrum())


def low_pass(decomp: BlockDecomposition, j: int, f: Field) -> Field:
    """S_j f = sum_{i < j-1} Delta_i f (strict low-pass convention)."""
    if f.grid != decomp.grid:
        raise ValueError("grid mismatch")
    if j <= 0:
        return Field.zero(f.grid)
    return from_spectrum(f.grid, decomp.low_symbol(j) * f.spectrum())


def block_sups(decomp: BlockDecomposition, f: Field, a: float = 0.0) -> np.ndarray:
    """Per-block weighted sup norms ||Delta_j f||_{L^inf_a}, j = -1..J."""
    spec = f.spectrum()
    w = decomp.grid.weight(a) if a else None
    out = np.empty(decomp.j_max + 2)
    for j in decomp.js:
        vals = np.fft.ifftn(decomp.rho(j) * spec).real
        if w is not None:
            vals = w * vals
        out[j + 1] = np.max(np.abs(vals))
    return out


class LowShellError(ValueError):
    """Negative-order multiplier applied to a field with low-frequency mass."""


def fourier_multiplier(m: int, f: Field) -> Field:
    """|grad|^m f.

    For m < 0 the spectrum must vanish below the block-0 annulus (checked);
    the offending shell is named in the error.  For m > 0 the result carries
    `f` as its preimage tag.
    """
    grid = f.grid
    if m == 0:
        return f
    r = grid.freq_radius()
    spec = f.spectrum()
    if m < 0:
        low = r < ANNULUS_LO
        mass = np.max(np.abs(spec[low])) if np.any(low) else 0.0
        scale = np.max(np.abs(spec))
        if scale > 0 and mass > 1e-10 * scale:
            raise LowShellError(
                f"|grad|^{m} undefined: spectral mass {mass:.3e} on the shell "
                f"|xi| < {ANNULUS_LO:.4g} (relative {mass / scale:.3e})"
            )
        mult = np.zeros_like(r)
        np.divide(1.0, r**-m, out=mult, where=r > 0)
        return from_spectrum(grid, mult * spec)
    out = from_spectrum(grid, r**m * spec)
    return Field(grid, out.values, preimage=f)


def derivative(f: Field, k: tuple[int, ...]) -> Field:
    """Spectral partial derivative d^k f on the periodic grid."""
    grid = f.grid
    if len(k) != grid.dim:
        raise ValueError(f"multi-index {k} does not match dim {grid.dim}")
    if not any(k):
        return f
    spec = f.spectrum().astype(complex)
    for axis_freq, ki in zip(grid.freq_axes(), k):
        if ki:
            spec = spec * (1j * axis_freq) ** ki
    return from_spectrum(grid, spec)


def j_operator(decomp: BlockDecomposition, j: int, k: tuple[int, ...], m: int, zeta: Field) -> Field:
    """J_j^{k,m}(zeta) = d^k |grad|^{-m} Delta_j zeta.

    j = -1 requires zeta to carry a preimage tag xi with zeta = |grad|^m xi;
    the result is then d^k Delta_{-1} xi.
    """
    if j < -1 or j > decomp.j_max:
        raise ValueError(f"block index {j} outside [-1, {decomp.j_max}]")
    if j == -1:
        if m == 0:
            return derivative(lp_block(decomp, -1, zeta), k)
        if zeta.preimage is None:
            raise ValueError(
                "J_{-1}^{k,m} needs a field of the form |grad|^m xi (preimage tag missing)"
            )
        return derivative(lp_block(decomp, -1, zeta.preimage), k)
    block = lp_block(decomp, j, zeta)
    if m != 0:
        block = fourier_multiplier(-m, block)
    return derivative(block, k)
