"""Sobolev norms, energy functionals, lifespan estimate, and inequality probes.

The energy of a symmetric state ``U = (zeta, u)`` at derivative order
``k`` is ``E_k = ||d^k zeta||^2 + ||d^k u||^2`` with spectral
derivatives; ``total_energy`` sums ``E_0 .. E_N``. The functional is
equivalent to the squared ``H^N`` norm of the pair, with explicit
two-sided constants ``2**-N`` and ``N + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .spectral import Field, derivative

__all__ = [
    "sobolev_norm",
    "l2_norm",
    "max_norm",
    "EnergyReport",
    "partial_energy",
    "total_energy",
    "energy_components",
    "lifespan_estimate",
    "RatioReport",
    "check_tame_product",
    "check_interpolation",
    "check_interpolation_sobolev",
]


def sobolev_norm(f: Field, s: float) -> float:
    """``H^s`` norm via the spectral sum with scaled wavenumbers.

    ``s = 0`` reproduces the L2 norm under the package's
    Parseval-consistent normalization.
    """
    w = (1.0 + f.grid.wavenumbers**2) ** s
    return math.sqrt(f.grid.period * float(np.sum(w * np.abs(f.coefficients) ** 2)))


def l2_norm(f: Field) -> float:
    return math.sqrt(f.grid.period * float(np.sum(np.abs(f.coefficients) ** 2)))


def max_norm(f: Field) -> float:
    return float(np.max(np.abs(f.samples)))


@dataclass(frozen=True)
class EnergyReport:
    """Energy ledger at one instant: per-order values and their sum."""

    time: float
    per_k: tuple
    total: float

    @property
    def order(self) -> int:
        return len(self.per_k) - 1

    def csv_row(self):
        return [self.time, *self.per_k, self.total]


def energy_components(coeff_pairs: np.ndarray, wavenumbers: np.ndarray,
                      period: float, N: int) -> np.ndarray:
    """Vectorized ``E_0..E_N`` for stacked coefficient pairs.

    ``coeff_pairs`` has shape ``(..., 2, n)``; returns shape ``(..., N+1)``.
    """
    power = np.abs(coeff_pairs) ** 2  # (..., 2, n)
    xi2k = wavenumbers[None, :] ** (2 * np.arange(N + 1)[:, None])  # (N+1, n)
    return period * np.einsum("...cn,kn->...k", power, xi2k)


def partial_energy(U, k: int) -> float:
    """``||d^k zeta||^2 + ||d^k u||^2`` of a symmetric state."""
    if U.representation != "symmetric":
        raise ValueError("energies are defined on symmetric states")
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError(f"derivative order must be a non-negative integer, got {k!r}")
    return l2_norm(derivative(U.first, k)) ** 2 + l2_norm(derivative(U.second, k)) ** 2


def total_energy(U, N: int, time: float = 0.0) -> EnergyReport:
    """Sum of :func:`partial_energy` over ``k = 0 .. N`` (``N >= 2``)."""
    if N < 2:
        raise ValueError(f"the energy order must satisfy N >= 2, got {N}")
    if U.representation != "symmetric":
        raise ValueError("energies are defined on symmetric states")
    pairs = np.stack([U.first.coefficients, U.second.coefficients])
    per_k = energy_components(pairs, U.grid.wavenumbers, U.grid.period, N)
    return EnergyReport(time=float(time), per_k=tuple(float(v) for v in per_k),
                        total=float(per_k.sum()))


def lifespan_estimate(E0: float, N: int, T1: float, c: float) -> float:
    """Guaranteed-existence time shape ``c * min(T1, ln 2 / (1 + sum_i (2 E0)^{i/2}))``.

    Decreasing in ``E0``; at ``E0 = 0`` it reduces to ``c * min(T1, ln 2)``.
    """
    if E0 < 0.0:
        raise ValueError(f"initial energy must be non-negative, got {E0}")
    if N < 1 or T1 <= 0.0 or c <= 0.0:
        raise ValueError("lifespan estimate needs N >= 1, T1 > 0, c > 0")
    s = sum((2.0 * E0) ** (0.5 * i) for i in range(1, N + 1))
    return c * min(T1, math.log(2.0) / (1.0 + s))


@dataclass(frozen=True)
class RatioReport:
    """Outcome of an inequality probe: numerator / denominator, if defined."""

    numerator: float
    denominator: float
    defined: bool

    @property
    def ratio(self) -> float:
        return self.numerator / self.denominator if self.defined else float("nan")


def _ratio(num: float, den: float) -> RatioReport:
    if den == 0.0:
        return RatioReport(num, den, defined=False)
    return RatioReport(num, den, defined=True)


def check_tame_product(f: Field, g: Field, k: int) -> RatioReport:
    """Ratio probe for the product estimate.

    ``||d^k (f g)|| / (||f||_inf ||d^k g|| + ||g||_inf ||d^k f||)``,
    fields multiplied pointwise in physical space. The flag is False when
    the denominator vanishes (both fields identically zero).
    """
    num = l2_norm(derivative(f * g, k))
    den = max_norm(f) * l2_norm(derivative(g, k)) + max_norm(g) * l2_norm(derivative(f, k))
    return _ratio(num, den)


def check_interpolation(f: Field, l: int, k: int) -> RatioReport:
    """Ratio probe for the derivative interpolation inequality.

    ``||d^l f|| / (||f||^(1-l/k) ||d^k f||^(l/k))`` for ``0 <= l <= k``;
    equals 1 exactly at the endpoints and for single-mode fields.
    """
    if not (0 <= l <= k):
        raise ValueError(f"need 0 <= l <= k, got l={l}, k={k}")
    if k == 0:
        n0 = l2_norm(f)
        return _ratio(n0, n0)
    theta = l / k
    num = l2_norm(derivative(f, l))
    den = l2_norm(f) ** (1.0 - theta) * l2_norm(derivative(f, k)) ** theta
    return _ratio(num, den)


def check_interpolation_sobolev(f: Field, s: float, N: int) -> RatioReport:
    """Ratio probe for ``||f||_{H^s} <= ||f||_{L2}^(1-s/N) ||f||_{H^N}^(s/N)``."""
    if not (0.0 <= s <= N):
        raise ValueError(f"need 0 <= s <= N, got s={s}, N={N}")
    theta = s / N
    num = sobolev_norm(f, s)
    den = l2_norm(f) ** (1.0 - theta) * sobolev_norm(f, N) ** theta
    return _ratio(num, den)
