"""Periodic pseudo-spectral substrate: grids, fields, transforms, multipliers.

Sampling and normalization conventions used by every module above this one:

* collocation points   ``x_j = j * period / n``, ``j = 0 .. n-1``
* integer modes        ``m`` in ``{-n/2, ..., n/2 - 1}``, stored in FFT order
* scaled wavenumbers   ``xi_m = m * 2*pi / period``
* coefficients         ``c(m) = (1/n) * sum_j f(x_j) * exp(-i * m * 2*pi*j/n)``

With this normalization a constant field ``c`` has ``c(0) = c`` and
``cos(x)`` on a ``2*pi`` grid has coefficients ``1/2`` at modes ``+-1``.
The quadrature weight ``period/n`` makes the discrete L2 norm
Parseval-consistent::

    sum_j f_j^2 * (period/n) == period * sum_m |c(m)|^2

Derivatives act as multiplication by ``(i*xi_m)**k``; for odd orders the
unpaired Nyquist mode is zeroed so real fields stay real.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "make_grid",
    "from_function",
    "zero_field",
    "forward_transform",
    "inverse_transform",
    "derivative",
    "apply_multiplier",
    "dealias",
    "inner",
    "regrid",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``n`` collocation points on ``[0, period)``.

    Derived arrays are cached and exposed read-only; two grids compare
    equal iff they share ``n`` and ``period``.
    """

    n: int
    period: float

    @cached_property
    def x(self) -> np.ndarray:
        x = np.arange(self.n) * (self.period / self.n)
        x.flags.writeable = False
        return x

    @cached_property
    def modes(self) -> np.ndarray:
        m = np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)
        m.flags.writeable = False
        return m

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        xi = self.modes * (TWO_PI / self.period)
        xi.flags.writeable = False
        return xi

    @cached_property
    def nyquist_index(self) -> int:
        return self.n // 2

    @cached_property
    def dealias_keep(self) -> np.ndarray:
        # 2/3 rule on the integer mode index, independent of the period
        keep = np.abs(self.modes) <= self.n / 3.0
        keep.flags.writeable = False
        return keep

    @property
    def spacing(self) -> float:
        return self.period / self.n

    @property
    def quadrature_weight(self) -> float:
        return self.period / self.n


def make_grid(n: int, period: float = TWO_PI) -> Grid:
    """Validated grid constructor.

    ``n`` must be an even integer of at least 8 so that the mode set is
    symmetric enough for the 2/3 rule; ``period`` must be positive.
    """
    if not isinstance(n, (int, np.integer)):
        raise ValueError(f"grid size must be an integer, got {n!r}")
    n = int(n)
    if n < 8 or n % 2 != 0:
        raise ValueError(f"grid size must be an even integer >= 8, got {n}")
    period = float(period)
    if not np.isfinite(period) or period <= 0.0:
        raise ValueError(f"period must be a positive real number, got {period}")
    return Grid(n=n, period=period)


class Field:
    """A real periodic scalar held simultaneously in sample and coefficient form.

    Instances are immutable: both arrays are materialized at construction
    and marked read-only. Build via :meth:`from_samples` or
    :meth:`from_coefficients`; arithmetic returns new fields (``*`` between
    two fields is the pointwise product of samples).
    """

    __slots__ = ("grid", "samples", "coefficients")

    def __init__(self, grid: Grid, samples: np.ndarray, coefficients: np.ndarray):
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "coefficients", coefficients)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    @staticmethod
    def _freeze(a: np.ndarray) -> np.ndarray:
        a = np.ascontiguousarray(a)
        a.flags.writeable = False
        return a

    @classmethod
    def from_samples(cls, grid: Grid, values: np.ndarray) -> "Field":
        v = np.asarray(values, dtype=np.float64)
        if v.shape != (grid.n,):
            raise ValueError(f"samples must have shape ({grid.n},), got {v.shape}")
        c = np.fft.fft(v) / grid.n
        return cls(grid, cls._freeze(v), cls._freeze(c))

    @classmethod
    def from_coefficients(cls, grid: Grid, coefficients: np.ndarray) -> "Field":
        c = np.asarray(coefficients, dtype=np.complex128)
        if c.shape != (grid.n,):
            raise ValueError(f"coefficients must have shape ({grid.n},), got {c.shape}")
        # real part only: callers are expected to hand in conjugate-symmetric data
        v = np.fft.ifft(c * grid.n).real
        return cls(grid, cls._freeze(v), cls._freeze(c.copy()))

    def __add__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self._freeze(self.samples + other.samples),
                     self._freeze(self.coefficients + other.coefficients))

    def __sub__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self._freeze(self.samples - other.samples),
                     self._freeze(self.coefficients - other.coefficients))

    def __neg__(self) -> "Field":
        return Field(self.grid, self._freeze(-self.samples), self._freeze(-self.coefficients))

    def __mul__(self, other):
        if isinstance(other, Field):
            self._check_same_grid(other)
            return Field.from_samples(self.grid, self.samples * other.samples)
        return Field(self.grid, self._freeze(self.samples * float(other)),
                     self._freeze(self.coefficients * float(other)))

    __rmul__ = __mul__

    def _check_same_grid(self, other: "Field") -> None:
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")

    def __repr__(self) -> str:
        return f"Field(n={self.grid.n}, period={self.grid.period:.6g})"


def from_function(grid: Grid, fn: Callable[[np.ndarray], np.ndarray]) -> Field:
    """Sample ``fn`` at the collocation points."""
    return Field.from_samples(grid, np.asarray(fn(grid.x), dtype=np.float64))


def zero_field(grid: Grid) -> Field:
    return Field.from_samples(grid, np.zeros(grid.n))


def forward_transform(f: Field) -> np.ndarray:
    """Fourier coefficients of ``f`` (a copy, in FFT mode order)."""
    return f.coefficients.copy()


def inverse_transform(grid: Grid, coefficients: np.ndarray) -> Field:
    """Synthesize a field from coefficients (conjugate symmetry assumed)."""
    return Field.from_coefficients(grid, coefficients)


def derivative(f: Field, k: int = 1) -> Field:
    """Spectral derivative of order ``k >= 0``.

    Coefficients are multiplied by ``(i*xi)**k``; for odd ``k`` the
    Nyquist mode is zeroed because it has no conjugate partner.
    """
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError(f"derivative order must be a non-negative integer, got {k!r}")
    if k == 0:
        return f
    g = f.grid
    mult = (1j * g.wavenumbers) ** k
    if k % 2 == 1:
        mult = mult.copy()
        mult[g.nyquist_index] = 0.0
    return Field.from_coefficients(g, mult * f.coefficients)


def apply_multiplier(f: Field, symbol: Callable[[np.ndarray], np.ndarray]) -> Field:
    """Apply a Fourier multiplier given by a real even symbol of the wavenumber."""
    vals = np.asarray(symbol(f.grid.wavenumbers), dtype=np.float64)
    if vals.shape != (f.grid.n,):
        raise ValueError("symbol must return one value per wavenumber")
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise ValueError(f"symbol is non-finite at wavenumber {f.grid.wavenumbers[bad]:.6g}")
    return Field.from_coefficients(f.grid, vals * f.coefficients)


def dealias(f: Field) -> Field:
    """Zero all coefficients with integer mode index ``|m| > n/3`` (2/3 rule)."""
    return Field.from_coefficients(f.grid, f.grid.dealias_keep * f.coefficients)


def inner(f: Field, g: Field) -> float:
    """Discrete L2 inner product ``sum_j f_j g_j * period/n``."""
    f._check_same_grid(g)
    return float(np.dot(f.samples, g.samples) * f.grid.quadrature_weight)


def regrid(f: Field, grid: Grid) -> Field:
    """Represent ``f`` on another grid with the same period by mode matching.

    Modes present on both grids are copied; refining is exact for
    band-limited fields, coarsening truncates.
    """
    if grid.period != f.grid.period:
        raise ValueError("regrid requires identical periods")
    c_old = f.coefficients
    c_new = np.zeros(grid.n, dtype=np.complex128)
    half = min(f.grid.n, grid.n) // 2
    for m in range(-half + 1, half):
        c_new[m % grid.n] = c_old[m % f.grid.n]
    return Field.from_coefficients(grid, c_new)
