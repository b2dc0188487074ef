"""Periodic grids, sampled fields, and the binary field file format.

Fields live on a uniform grid over the box [-L, L)^d with periodic wrap.
Polynomial evaluations use true box coordinates, not the periodic angle, so
x^k keeps its meaning for characters and models.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

FIELD_MAGIC = b"RPF1"

# Relative width of the boundary collar on which coordinate fields are
# smoothly flattened; inside |x| <= (1 - COORD_MARGIN) * box they equal the
# true box coordinates.
COORD_MARGIN = 0.15


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C^5 polynomial step: exactly 0 for t <= 0, exactly 1 for t >= 1.

    The moderate-order polynomial profile keeps spectral kernel tails thin at
    desk-scale resolutions (an exponential step is formally C^inf but its
    huge derivatives make the finite-N kernel moments useless).
    """
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t**6 * (462.0 + t * (-1980.0 + t * (3465.0 + t * (-3080.0 + t * (1386.0 - t * 252.0)))))


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid: `n` points per axis on [-box, box)^d."""

    dim: int
    n: int
    box: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.n < 4 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 4, got {self.n}")
        if not self.box > 0:
            raise ValueError(f"box half-width must be positive, got {self.box}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def step(self) -> float:
        return 2.0 * self.box / self.n

    @property
    def freq_step(self) -> float:
        return np.pi / self.box

    def axis(self) -> np.ndarray:
        return -self.box + self.step * np.arange(self.n)

    def coords(self) -> tuple[np.ndarray, ...]:
        """Raw coordinate arrays, each of shape `self.shape`."""
        ax = self.axis()
        if self.dim == 1:
            return (ax,)
        return tuple(np.meshgrid(ax, ax, indexing="ij"))

    def coord_fields(self) -> tuple[np.ndarray, ...]:
        """Smooth-periodic coordinate fields.

        The true coordinate is flattened to zero across a boundary collar and
        then mollified by a spectral Gaussian (scale a few frequency steps).
        Mollification reproduces affine functions exactly, so the field equals
        the true coordinate in the interior up to Gaussian-small tails, while
        its spectrum is concentrated in the lowest blocks; polynomial factors
        therefore never feed wrap artifacts into the spectral calculus."""
        ax = self.axis()
        w = smooth_step((self.box - np.abs(ax)) / (COORD_MARGIN * self.box))
        xw = ax * w
        damp_scale = 3.0 * (np.pi / self.box)
        freqs = np.fft.fftfreq(self.n, d=1.0 / self.n) * self.freq_step
        damped = np.fft.ifft(np.fft.fft(xw) * np.exp(-((freqs / damp_scale) ** 2))).real
        if self.dim == 1:
            return (damped,)
        return tuple(np.meshgrid(damped, damped, indexing="ij"))

    def freq_axes(self) -> tuple[np.ndarray, ...]:
        f = np.fft.fftfreq(self.n, d=1.0 / self.n) * self.freq_step
        if self.dim == 1:
            return (f,)
        return tuple(np.meshgrid(f, f, indexing="ij"))

    def freq_radius(self) -> np.ndarray:
        fs = self.freq_axes()
        return np.sqrt(sum(f**2 for f in fs))

    def max_freq_radius(self) -> float:
        return float(self.freq_step * (self.n // 2) * np.sqrt(self.dim))

    def poly(self, k: tuple[int, ...]) -> np.ndarray:
        """Monomial x^k sampled on the grid: true box coordinates on the
        interior, smooth-periodic through the boundary collar."""
        if len(k) != self.dim:
            raise ValueError(f"multi-index {k} does not match dim {self.dim}")
        out = np.ones(self.shape)
        for x, ki in zip(self.coord_fields(), k):
            if ki:
                out = out * x**ki
        return out

    def weight(self, a: float) -> np.ndarray:
        """|x|_*^a = (1+|x|)^a on the grid."""
        r = np.sqrt(sum(x**2 for x in self.coords()))
        return (1.0 + r) ** a


class Field:
    """Real-valued function sampled on a Grid.

    `preimage` is set when the field was produced as |grad|^m of another
    field (m > 0); block -1 of a negative-order multiplier is only defined
    through it.
    """

    __slots__ = ("grid", "values", "preimage")

    def __init__(self, grid: Grid, values: np.ndarray, preimage: "Field | None" = None):
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape:
            raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values = values.copy()
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self.preimage = preimage

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "Field":
        return cls(grid, np.full(grid.shape, float(c)))

    @classmethod
    def zero(cls, grid: Grid) -> "Field":
        return cls.constant(grid, 0.0)

    def spectrum(self) -> np.ndarray:
        return np.fft.fftn(self.values)

    def _binary(self, other, op) -> "Field":
        if isinstance(other, Field):
            if other.grid != self.grid:
                raise ValueError("grid mismatch")
            other = other.values
        return Field(self.grid, op(self.values, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return Field(self.grid, np.asarray(other, dtype=float) - self.values)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def weighted_sup(self, a: float) -> float:
        if a == 0:
            return self.sup()
        return float(np.max(self.grid.weight(a) * np.abs(self.values)))

    def __repr__(self):
        return f"Field(grid={self.grid}, sup={self.sup():.4g})"


def from_spectrum(grid: Grid, spec: np.ndarray, preimage: Field | None = None) -> Field:
    return Field(grid, np.fft.ifftn(spec).real, preimage=preimage)


class TwoParamField:
    """Function of two grid points.

    Dense storage (shape grid.shape * 2, first index block = x, second = y)
    is only supported for d=1; d=2 callers work with sampled pair lists.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: np.ndarray):
        if grid.dim != 1:
            raise ValueError("dense two-parameter fields require dim 1")
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n, grid.n):
            raise ValueError(f"values shape {values.shape} != {(grid.n, grid.n)}")
        if not np.all(np.isfinite(values)):
            raise ValueError("two-parameter field values must be finite")
        self.grid = grid
        self.values = values

    @classmethod
    def separable(cls, f: Field, g: Field) -> "TwoParamField":
        """Lambda(y, z) = f(y) g(z)."""
        if f.grid != g.grid:
            raise ValueError("grid mismatch")
        return cls(f.grid, np.outer(f.values, g.values))


def write_field(path, f: Field) -> None:
    """Binary format: magic, u32 dim, u32 n, f64 box, n^d little-endian f64."""
    with open(path, "wb") as fh:
        fh.write(FIELD_MAGIC)
        fh.write(struct.pack("<II", f.grid.dim, f.grid.n))
        fh.write(struct.pack("<d", f.grid.box))
        fh.write(f.values.astype("<f8").tobytes(order="C"))


def read_field(path) -> Field:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != FIELD_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {FIELD_MAGIC!r}")
        dim, n = struct.unpack("<II", fh.read(8))
        (box,) = struct.unpack("<d", fh.read(8))
        grid = Grid(dim, n, box)
        data = np.frombuffer(fh.read(8 * grid.size), dtype="<f8").reshape(grid.shape)
        return Field(grid, data)
