"""Paraproducts, resonant products, and their modified/two-parameter versions."""
from __future__ import annotations

import numpy as np

from .blocks import (
    ANNULUS_HI,
    ANNULUS_LO,
    BlockDecomposition,
    from_spectrum,
    smooth_step,
)
from .grid import Field, Grid, TwoParamField


def _check(decomp: BlockDecomposition, *fields: Field) -> None:
    for f in fields:
        if f.grid != decomp.grid:
            raise ValueError("grid mismatch")


def _blocks(decomp: BlockDecomposition, f: Field) -> np.ndarray:
    spec = f.spectrum()
    out = np.empty((decomp.j_max + 2,) + decomp.grid.shape)
    for j in decomp.js:
        out[j + 1] = np.fft.ifftn(decomp.rho(j) * spec).real
    return out


def paraproduct(decomp: BlockDecomposition, f: Field, g: Field) -> Field:
    """P_f g = sum_{j>=1} (S_j f)(Delta_j g)."""
    return modified_paraproduct(decomp, 0, f, g)


def modified_paraproduct(decomp: BlockDecomposition, m: int, f: Field, g: Field) -> Field:
    """P^m_f g = sum_{j>=1} |grad|^m (S_j f * |grad|^{-m} Delta_j g).

    m = 0 runs the identical code path as the plain paraproduct, so P^0 = P
    bit for bit.
    """
    _check(decomp, f, g)
    if m < 0:
        raise ValueError("modified paraproduct requires m in N")
    grid = decomp.grid
    fspec = f.spectrum()
    gspec = g.spectrum()
    r = grid.freq_radius()
    with np.errstate(divide="ignore"):
        r_neg = np.where(r > 0, r**-float(m), 0.0) if m else None
    acc = np.zeros(grid.shape)
    for j in range(1, decomp.j_max + 1):
        s = np.fft.ifftn(decomp.low_symbol(j) * fspec).real
        block_spec = decomp.rho(j) * gspec
        if m:
            block_spec = block_spec * r_neg
        d = np.fft.ifftn(block_spec).real
        term = s * d
        if m:
            term = np.fft.ifftn(r**m * np.fft.fftn(term)).real
        acc += term
    return Field(grid, acc)


def resonant(decomp: BlockDecomposition, f: Field, g: Field) -> Field:
    """Pi(f, g) = sum_{|i-j|<=1} (Delta_i f)(Delta_j g)."""
    _check(decomp, f, g)
    fb = _blocks(decomp, f)
    gb = _blocks(decomp, g)
    acc = np.zeros(decomp.grid.shape)
    for i in decomp.js:
        for j in (i - 1, i, i + 1):
            if -1 <= j <= decomp.j_max:
                acc += fb[i + 1] * gb[j + 1]
    return Field(decomp.grid, acc)


def smooth_part(decomp: BlockDecomposition, g: Field) -> Field:
    """S g = g - P_1 g = (Delta_{-1} + Delta_0) g."""
    _check(decomp, g)
    spec = g.spectrum()
    return from_spectrum(decomp.grid, (decomp.rho(-1) + decomp.rho(0)) * spec)


def commutator(decomp: BlockDecomposition, f: Field, g: Field, h: Field) -> Field:
    """R°(f, g, h) = P_f P_g h - P_{fg} h."""
    _check(decomp, f, g, h)
    return paraproduct(decomp, f, paraproduct(decomp, g, h)) - paraproduct(decomp, f * g, h)


# ---------------------------------------------------------------------------
# Two-parameter paraproducts.  Dense d=1 only; the (x, y) slots of Lambda are
# (first, second) array axes.

# Spectrum of x -> P_j(x-y) Q_j(x-z) sits in the annulus 2^j * [ENV_LO, ENV_HI]
# (Minkowski sum of the S_j ball of radius (3/4)2^j and the block annulus).
ENV_LO = ANNULUS_LO - 0.75
ENV_HI = ANNULUS_HI + 0.75


def _envelope_symbol(grid: Grid, j: int, m: int = 0) -> np.ndarray:
    """Symbol of R_j^m = |grad|^m R_j: |xi|^m chi_A(2^{-j}|xi|), where the
    smooth window chi_A is exactly 1 on [ENV_LO, ENV_HI]."""
    r = grid.freq_radius()
    scaled = r / 2.0**j
    lo0, hi0 = ENV_LO / 2.0, ENV_HI * 1.25
    sym = smooth_step((scaled - lo0) / (ENV_LO - lo0)) * smooth_step(
        (hi0 - scaled) / (hi0 - ENV_HI)
    )
    if m:
        sym = sym * r**m
    return sym


def two_param_block(
    decomp: BlockDecomposition,
    j: int,
    lam: TwoParamField,
    m: int = 0,
    envelope: bool | None = None,
) -> Field:
    """Q_j Lambda (m = 0) or Q_j^m Lambda: low-pass in the first slot, block
    (with |grad|^{-m}) in the second, diagonal trace, then the R_j^m envelope.

    For m = 0 the envelope convolution is a no-op on the relevant annulus and
    is skipped by default; pass envelope=True to insert R_j explicitly.
    """
    grid = decomp.grid
    if lam.grid != grid:
        raise ValueError("grid mismatch")
    if j < 1 or j > decomp.j_max:
        raise ValueError(f"two-parameter blocks need 1 <= j <= {decomp.j_max}")
    if envelope is None:
        envelope = m != 0
    spec = np.fft.fft2(lam.values)
    psym = decomp.low_symbol(j)
    qsym = decomp.rho(j).astype(float).copy()
    if m:
        r = grid.freq_radius()
        with np.errstate(divide="ignore"):
            qsym = qsym * np.where(r > 0, r**-float(m), 0.0)
    spec = psym[:, None] * spec * qsym[None, :]
    diag = np.diag(np.fft.ifft2(spec).real).copy()
    out = Field(grid, diag)
    if envelope:
        env = _envelope_symbol(grid, j, m)
        out = from_spectrum(grid, env * out.spectrum())
    return out


def two_param_paraproduct(decomp: BlockDecomposition, lam: TwoParamField) -> Field:
    """**P** Lambda = sum_{j>=1} Q_j Lambda; **P**(f (x) g) = P_f g."""
    acc = Field.zero(decomp.grid)
    for j in range(1, decomp.j_max + 1):
        acc = acc + two_param_block(decomp, j, lam)
    return acc


def two_param_modified(decomp: BlockDecomposition, m: int, lam: TwoParamField) -> Field:
    """**P**^m Lambda = sum_{j>=1} Q_j^m Lambda; **P**^m(f (x) g) = P^m_f g."""
    if m < 0:
        raise ValueError("two-parameter modified paraproduct requires m in N")
    if m == 0:
        return two_param_paraproduct(decomp, lam)
    acc = Field.zero(decomp.grid)
    for j in range(1, decomp.j_max + 1):
        acc = acc + two_param_block(decomp, j, lam, m)
    return acc
