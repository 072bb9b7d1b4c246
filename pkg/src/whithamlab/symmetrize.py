"""Square-root change of variables and the symmetric coefficient matrices.

The surface elevation ``eta`` (positive, with background ``eta_bar``) is
traded for ``zeta = 2*(sqrt(eta) - sqrt(eta_bar))``, which brings the
two-way system to symmetric-hyperbolic form with coefficient matrices

    A(U) = [[u, (zeta + 2*lam)/2], [(zeta + 2*lam)/2, u]]
    B(U) = [[0, 2/(zeta + 2*lam)], [0, 0]],   lam = sqrt(eta_bar).

Admissible data keep ``zeta + 2*lam`` inside a positive corridor
``[2*mu, 1/(2*mu)]``; :func:`admissible_mu` returns the largest such
``mu``, which downstream monitors use as the floor and ceiling.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import AdmissibilityError
from .spectral import Field

__all__ = [
    "State",
    "Admissibility",
    "to_symmetric",
    "from_symmetric",
    "symmetrize_state",
    "physical_state",
    "advection_matrix",
    "dispersion_matrix",
    "admissible_mu",
]

REPRESENTATIONS = ("symmetric", "physical")


@dataclass(frozen=True)
class State:
    """A pair of fields with a representation tag and background elevation.

    ``representation == 'symmetric'`` stores ``(zeta, u)``;
    ``'physical'`` stores ``(eta, u)``.
    """

    first: Field
    second: Field
    representation: str
    eta_bar: float

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")
        if self.first.grid != self.second.grid:
            raise ValueError("state components live on different grids")
        if not (np.isfinite(self.eta_bar) and self.eta_bar > 0.0):
            raise AdmissibilityError(f"background elevation must be positive, got {self.eta_bar}")

    @classmethod
    def symmetric(cls, zeta: Field, u: Field, eta_bar: float) -> "State":
        return cls(zeta, u, "symmetric", float(eta_bar))

    @classmethod
    def physical(cls, eta: Field, u: Field, eta_bar: float) -> "State":
        return cls(eta, u, "physical", float(eta_bar))

    @property
    def grid(self):
        return self.first.grid

    @property
    def u(self) -> Field:
        return self.second

    @property
    def zeta(self) -> Field:
        if self.representation != "symmetric":
            raise ValueError("zeta is only defined for symmetric states")
        return self.first

    @property
    def eta(self) -> Field:
        if self.representation != "physical":
            raise ValueError("eta is only defined for physical states")
        return self.first

    @property
    def lambda_bar(self) -> float:
        return math.sqrt(self.eta_bar)


@dataclass(frozen=True)
class Admissibility:
    """Certificate that the data corridor ``2*mu <= zeta + 2*lam <= 1/(2*mu)`` holds."""

    mu: float
    lambda_bar: float

    @property
    def floor(self) -> float:
        return 2.0 * self.mu

    @property
    def ceiling(self) -> float:
        return 1.0 / (2.0 * self.mu)


def to_symmetric(eta: Field, eta_bar: float) -> Field:
    """``zeta = 2*(sqrt(eta) - sqrt(eta_bar))``; requires ``eta > 0`` pointwise."""
    vals = eta.samples
    if np.any(vals <= 0.0):
        j = int(np.argmin(vals))
        raise AdmissibilityError(
            f"elevation must be positive everywhere; eta = {vals[j]:.6g} at sample index {j}")
    if eta_bar <= 0.0:
        raise AdmissibilityError(f"background elevation must be positive, got {eta_bar}")
    return Field.from_samples(eta.grid, 2.0 * (np.sqrt(vals) - math.sqrt(eta_bar)))


def from_symmetric(zeta: Field, eta_bar: float) -> Field:
    """Inverse change of variables ``eta = (zeta/2 + sqrt(eta_bar))**2``.

    Requires ``zeta + 2*sqrt(eta_bar) > 0`` so the square root branch is
    the positive one.
    """
    if eta_bar <= 0.0:
        raise AdmissibilityError(f"background elevation must be positive, got {eta_bar}")
    lam = math.sqrt(eta_bar)
    shifted = zeta.samples + 2.0 * lam
    if np.any(shifted <= 0.0):
        j = int(np.argmin(shifted))
        raise AdmissibilityError(
            f"zeta + 2*sqrt(eta_bar) must stay positive; value {shifted[j]:.6g} at sample index {j}")
    return Field.from_samples(zeta.grid, (0.5 * zeta.samples + lam) ** 2)


def symmetrize_state(state: State) -> State:
    if state.representation == "symmetric":
        return state
    return State.symmetric(to_symmetric(state.eta, state.eta_bar), state.u, state.eta_bar)


def physical_state(state: State) -> State:
    if state.representation == "physical":
        return state
    return State.physical(from_symmetric(state.zeta, state.eta_bar), state.u, state.eta_bar)


def advection_matrix(U: State):
    """Symmetric advection matrix ``A(U)`` as a nested tuple of fields.

    The off-diagonal entries are one shared object, so their equality is
    structural rather than numerical.
    """
    if U.representation != "symmetric":
        raise ValueError("coefficient matrices are built from symmetric states")
    lam = U.lambda_bar
    off = Field.from_samples(U.grid, 0.5 * U.zeta.samples + lam)
    return ((U.u, off), (off, U.u))


def dispersion_matrix(U: State):
    """Coupling matrix ``B(U)``; only the top-right entry is nonzero.

    Raises when the denominator ``zeta + 2*sqrt(eta_bar)`` touches zero.
    """
    if U.representation != "symmetric":
        raise ValueError("coefficient matrices are built from symmetric states")
    denom = U.zeta.samples + 2.0 * U.lambda_bar
    if np.any(denom <= 0.0):
        j = int(np.argmin(denom))
        raise AdmissibilityError(
            f"coupling denominator vanishes: zeta + 2*sqrt(eta_bar) = {denom[j]:.6g} at index {j}")
    zero = Field.from_samples(U.grid, np.zeros(U.grid.n))
    top_right = Field.from_samples(U.grid, 2.0 / denom)
    return ((zero, top_right), (zero, zero))


def admissible_mu(zeta0: Field, eta_bar: float) -> Admissibility:
    """Largest ``mu > 0`` with ``2*mu <= zeta0 + 2*lam <= 1/(2*mu)`` and ``lam <= 1/mu``.

    All three constraints bound ``mu`` from above, so the largest value is
    their minimum; it is positive exactly when ``zeta0 + 2*lam`` is.
    """
    if eta_bar <= 0.0:
        raise AdmissibilityError(f"background elevation must be positive, got {eta_bar}")
    lam = math.sqrt(eta_bar)
    shifted = zeta0.samples + 2.0 * lam
    lo = float(shifted.min())
    hi = float(shifted.max())
    if lo <= 0.0:
        j = int(np.argmin(shifted))
        raise AdmissibilityError(
            f"no admissible corridor: zeta0 + 2*sqrt(eta_bar) = {lo:.6g} at index {j} is not positive")
    mu = min(lo / 2.0, 1.0 / (2.0 * hi), 1.0 / lam)
    return Admissibility(mu=mu, lambda_bar=lam)
