"""Nonlocal operators of the fully dispersive shallow-water model.

Three families live here:

* the dispersive smoothing operator with even symbol ``tanh(xi)/xi``
  (value 1 at ``xi = 0``) and its square root, applied as Fourier
  multipliers;
* a periodic kernel partial sum plus a direct quadrature convolution
  against it, which reproduces the multiplier on band-limited fields by a
  route that never touches an FFT and therefore serves as an independent
  cross-check;
* a Fourier-side mollifier that multiplies coefficients by
  ``rho_hat(eps * xi)``, where ``rho`` is the standard unit-mass bump
  ``C * exp(-1/(1-x^2))`` supported on ``(-1, 1)``. The transform
  ``rho_hat`` has no closed form; it is tabulated once by adaptive
  quadrature and interpolated with a cubic spline. Normalizing the table
  by its value at 0 makes ``rho_hat(0) == 1`` exact, so mollification
  preserves the mean bit-for-bit.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .spectral import TWO_PI, Field, Grid, apply_multiplier, make_grid, regrid

__all__ = [
    "whitham_symbol",
    "whitham_sqrt_symbol",
    "apply_whitham",
    "apply_whitham_sqrt",
    "periodic_kernel",
    "kernel_convolve",
    "bump_transform",
    "mollifier_multiplier",
    "mollify",
]


def whitham_symbol(xi):
    """Symbol ``tanh(xi)/xi``, extended by its limit 1 at ``xi = 0``.

    Even, positive, bounded by 1, and decreasing in ``|xi|``.
    """
    arr = np.asarray(xi, dtype=np.float64)
    out = np.ones_like(arr)
    nz = arr != 0.0
    out[nz] = np.tanh(arr[nz]) / arr[nz]
    if np.ndim(xi) == 0:
        return float(out)
    return out


def whitham_sqrt_symbol(xi):
    """Square root of :func:`whitham_symbol`; the one-way phase speed."""
    return np.sqrt(whitham_symbol(xi))


def apply_whitham(f: Field) -> Field:
    """Apply the ``tanh(xi)/xi`` multiplier to a field."""
    return apply_multiplier(f, whitham_symbol)


def apply_whitham_sqrt(f: Field) -> Field:
    """Apply the square-root multiplier; composing it twice gives :func:`apply_whitham`."""
    return apply_multiplier(f, whitham_sqrt_symbol)


def periodic_kernel(x, M: int) -> np.ndarray:
    """Partial sum of the 2*pi-periodic kernel of the smoothing operator.

    ``K_M(x) = 1 + 2 * sum_{m=1..M} tanh(m)/m * cos(m x)``; the ``m = 0``
    term equals 1 by the symbol's limit. Real and even in ``x``.
    """
    if not isinstance(M, (int, np.integer)) or M < 0:
        raise ValueError(f"kernel truncation must be a non-negative integer, got {M!r}")
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.ones_like(xs)
    if M >= 1:
        m = np.arange(1, M + 1, dtype=np.float64)
        out = out + 2.0 * np.cos(np.outer(xs, m)) @ (np.tanh(m) / m)
    if np.ndim(x) == 0:
        return float(out[0])
    return out


def kernel_convolve(f: Field, M: int, quad_points: int | None = None) -> Field:
    """Convolve ``f`` with the truncated periodic kernel by direct quadrature.

    Evaluates ``g(x_i) = (1/n_q) * sum_j K_M(x_i - y_j) f(y_j)`` on a fine
    quadrature grid of ``n_q`` points (mean-normalized, so a pure mode
    ``e^{imx}`` with ``|m| <= M`` maps to ``tanh(m)/m * e^{imx}``).
    The quadrature grid defaults to the smallest multiple of ``n``
    exceeding ``M + n``, which removes aliasing between kernel and field
    modes entirely. Deliberately O(n * n_q): this is the slow,
    transform-free route used to validate the multiplier.
    """
    g = f.grid
    if abs(g.period - TWO_PI) > 1e-12 * TWO_PI:
        raise ValueError("the periodic kernel is defined for period 2*pi grids only")
    n = g.n
    if quad_points is None:
        quad_points = ((M + n) // n + 1) * n
    if quad_points % n != 0:
        raise ValueError("quadrature point count must be a multiple of the grid size")
    nq = int(quad_points)
    fine = f.samples if nq == n else regrid(f, make_grid(nq, g.period)).samples
    kern = periodic_kernel(TWO_PI * np.arange(nq) / nq, M)
    ratio = nq // n
    # dense kernel matrix indexed by the offset (x_i - y_j) mod period
    idx = (np.arange(n)[:, None] * ratio - np.arange(nq)[None, :]) % nq
    out = (kern[idx] @ fine) / nq
    return Field.from_samples(g, out)


# ---------------------------------------------------------------------------
# mollifier tables

_TABLE_STEP = 0.05


def _bump(x: float) -> float:
    # scalar form: the adaptive quadrature calls it pointwise
    if abs(x) >= 1.0:
        return 0.0
    return math.exp(-1.0 / (1.0 - x * x))


class _BumpTransformTable:
    """Cosine transform of the bump on a uniform xi-table, spline-interpolated."""

    def __init__(self, xi_max: float, step: float = _TABLE_STEP):
        self.xi_max = float(xi_max)
        self.step = float(step)
        xi = np.arange(0.0, self.xi_max + step, step)
        vals = np.empty_like(xi)
        for i, w in enumerate(xi):
            # oscillatory weight handled by QAWO; the bump is even so the
            # sine part vanishes and 2 * integral over [0, 1] suffices
            val, _ = quad(_bump, 0.0, 1.0, weight="cos", wvar=float(w),
                          epsabs=1e-13, epsrel=1e-12, limit=200)
            vals[i] = 2.0 * val
        vals /= vals[0]  # unit mass: rho_hat(0) == 1 exactly
        self.xi = xi
        self.values = vals
        self._spline = CubicSpline(xi, vals)

    def __call__(self, xi) -> np.ndarray:
        a = np.abs(np.asarray(xi, dtype=np.float64))
        if a.size and float(a.max()) > self.xi_max + 1e-9:
            raise ValueError(f"bump transform queried beyond tabulated range {self.xi_max}")
        out = self._spline(a)
        out[a == 0.0] = 1.0
        return out


_table: _BumpTransformTable | None = None


def _get_table(xi_need: float) -> _BumpTransformTable:
    global _table
    if _table is None or _table.xi_max < xi_need:
        # round the capacity up so repeated slightly-larger requests reuse one table
        cap = 32.0
        while cap < xi_need:
            cap *= 2.0
        _table = _BumpTransformTable(cap)
    return _table


def bump_transform(xi) -> np.ndarray:
    """Fourier transform of the unit-mass standard bump, ``rho_hat(xi)``.

    Real, even, ``rho_hat(0) = 1``, decays faster than any polynomial.
    """
    arr = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    table = _get_table(float(np.abs(arr).max()) if arr.size else 1.0)
    out = table(arr)
    if np.ndim(xi) == 0:
        return float(out[0])
    return out


def mollifier_multiplier(grid: Grid, eps: float) -> np.ndarray:
    """Multiplier array ``rho_hat(eps * |xi_m|)`` over the grid's modes."""
    if not (0.0 < eps <= 1.0):
        raise ValueError(f"mollification width must satisfy 0 < eps <= 1, got {eps}")
    mult = bump_transform(eps * np.abs(grid.wavenumbers))
    mult[0] = 1.0  # mode 0 preserved exactly
    return mult


def mollify(f: Field, eps: float) -> Field:
    """Smooth a field by the Fourier-side mollifier of width ``eps``."""
    return Field.from_coefficients(f.grid, mollifier_multiplier(f.grid, eps) * f.coefficients)
