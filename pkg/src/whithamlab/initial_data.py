"""Named initial-data generators for experiments.

Each generator returns an ``(eta0, u0)`` field pair and is referenced
from run configurations by its registry name, so a manifest fully
determines the data. Random data are driven by an explicit seed.
"""

from __future__ import annotations

import math

import numpy as np

from .spectral import Field, Grid

__all__ = ["cosine_bump", "gaussian_like", "random_bandlimited", "build_initial_data", "GENERATORS"]


def cosine_bump(grid: Grid, base: float = 1.0, amplitude: float = 0.1,
                velocity_amplitude: float = 0.1, phase: float = 0.0):
    """Single-mode data ``eta0 = base + amplitude*cos(theta x)``, ``u0 = velocity_amplitude*sin(theta x)``."""
    th = 2.0 * np.pi / grid.period
    eta = Field.from_samples(grid, base + amplitude * np.cos(th * grid.x + phase))
    u = Field.from_samples(grid, velocity_amplitude * np.sin(th * grid.x + phase))
    return eta, u


def gaussian_like(grid: Grid, base: float = 1.0, amplitude: float = 0.1,
                  width: float = 1.0, center: float | None = None,
                  velocity_scale: float = 1.0, images: int = 3):
    """Periodized bump over a flat background, with a right-moving velocity.

    The velocity is the simple-wave pairing ``u0 = velocity_scale * 2*(sqrt(eta0)-sqrt(base))``,
    which launches a predominantly one-directional pulse on wide (line
    approximation) grids.
    """
    if center is None:
        center = 0.5 * grid.period
    bump = np.zeros(grid.n)
    for k in range(-images, images + 1):
        bump += np.exp(-0.5 * ((grid.x - center + k * grid.period) / width) ** 2)
    eta_vals = base + amplitude * bump
    eta = Field.from_samples(grid, eta_vals)
    u = Field.from_samples(grid, velocity_scale * 2.0 * (np.sqrt(eta_vals) - math.sqrt(base)))
    return eta, u


def random_bandlimited(grid: Grid, seed: int, cutoff: int | None = None,
                       decay: float = 2.0, amplitude: float = 0.1,
                       mean: float = 0.0) -> Field:
    """Random real field with power-law coefficient decay up to ``cutoff``.

    Coefficients at modes ``1..cutoff`` are complex Gaussian with
    magnitude envelope ``(1+m)**-decay``; the result is rescaled so its
    peak deviation from ``mean`` equals ``amplitude``. Fully determined
    by the seed.
    """
    if cutoff is None:
        cutoff = grid.n // 3
    cutoff = int(min(cutoff, grid.n // 2 - 1))
    if cutoff < 1:
        raise ValueError("cutoff must allow at least one active mode")
    rng = np.random.default_rng(seed)
    c = np.zeros(grid.n, dtype=np.complex128)
    m = np.arange(1, cutoff + 1)
    z = (rng.standard_normal(cutoff) + 1j * rng.standard_normal(cutoff)) / math.sqrt(2.0)
    c[m] = z * (1.0 + m) ** (-decay)
    c[-m] = np.conj(c[m])
    raw = np.fft.ifft(c * grid.n).real
    peak = float(np.max(np.abs(raw)))
    if peak == 0.0:
        raise ValueError("degenerate random draw")
    return Field.from_samples(grid, mean + amplitude * raw / peak)


def build_initial_data(name: str, grid: Grid, params: dict):
    """Dispatch a registry name to its generator; returns ``(eta0, u0)``.

    ``random-bandlimited`` builds the elevation from ``seed`` and the
    velocity from ``seed + 1`` around the requested base level.
    """
    if name == "cosine-bump":
        return cosine_bump(grid, **params)
    if name == "gaussian-like":
        return gaussian_like(grid, **params)
    if name == "random-bandlimited":
        p = dict(params)
        base = p.pop("base", 1.0)
        seed = int(p.pop("seed", 0))
        amp = p.pop("amplitude", 0.1)
        vel = p.pop("velocity_amplitude", amp)
        eta = random_bandlimited(grid, seed=seed, amplitude=amp, mean=base, **p)
        u = random_bandlimited(grid, seed=seed + 1, amplitude=vel, mean=0.0, **p)
        return eta, u
    raise KeyError(f"unknown initial-data generator {name!r}")


GENERATORS = ("cosine-bump", "gaussian-like", "random-bandlimited")
