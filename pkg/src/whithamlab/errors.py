"""Exception vocabulary shared across the package.

The CLI maps these onto process exit codes, so solver and harness code
should raise the most specific class that applies.
"""

from __future__ import annotations


class WhithamLabError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(WhithamLabError):
    """Malformed configuration file, unknown key, or invalid CLI override."""


class AdmissibilityError(WhithamLabError):
    """A positivity or admissibility hypothesis on the data is violated."""


class AssumptionViolation(WhithamLabError):
    """A coefficient provider left its assumed energy or range corridor."""

    def __init__(self, time: float, reason: str):
        super().__init__(f"coefficient assumption violated at t={time:.6g}: {reason}")
        self.time = time
        self.reason = reason


class BlowUpError(WhithamLabError):
    """The evolution became non-finite or crossed the admissibility floor."""

    def __init__(self, time: float, reason: str, max_slope: float = float("nan")):
        super().__init__(f"blow-up detected at t={time:.6g}: {reason} (max |u_x| = {max_slope:.6g})")
        self.time = time
        self.reason = reason
        self.max_slope = max_slope
        self.trajectory = None  # partial record, attached by the solver when available


class NonContractionError(WhithamLabError):
    """Successive-approximation differences failed to contract in time."""

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class ScenarioFailure(WhithamLabError):
    """One or more assertions of an experiment scenario did not hold."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))
