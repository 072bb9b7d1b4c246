"""Time evolution for the two-way fully dispersive shallow-water system.

Four integrators share one fixed-step classical RK4 march:

* ``solve_regularized``: the symmetric-variable system with frozen
  coefficients taken from a provider ``V`` and every term filtered by the
  Fourier mollifier of width ``eps``,

      dU/dt = -J_eps[ J_eps(A(V)) d/dx (J_eps U) ]
              -J_eps[ J_eps(B(V)) K d/dx (J_eps U) ],

* ``solve_linearized``: the same with ``eps = 0`` (the mollifier drops
  out entirely),
* ``solve_direct``: the untransformed two-way system
  ``eta_t = -K u_x - (eta u)_x``, ``u_t = -eta_x - u u_x``,
* ``solve_unidirectional``: the one-way reference equation
  ``u_t + sqrt(K) u_x + u u_x = 0``.

Nonlinear products are formed in physical space and filtered by the 2/3
rule when dealiasing is on. Trajectories store the state and the
right-hand side at every accepted step, which makes cubic Hermite dense
output available; the successive-approximation driver uses it to sample
the previous iterate at RK4 stage times without losing fourth order.

Coefficient providers are monitored each step against the corridor
``mu <= phi + 2*sqrt(eta_bar) <= 1/mu`` and the energy bound
``E_N(V(t)) <= 2 E_N(U0)``: hard errors for the one-shot solvers,
recorded flags inside Picard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .energy import energy_components, sobolev_norm, total_energy
from .errors import (AdmissibilityError, AssumptionViolation, BlowUpError,
                     ConfigError, NonContractionError)
from .operators import apply_whitham, mollifier_multiplier, whitham_symbol
from .spectral import Field, Grid, inner
from .symmetrize import State, admissible_mu, from_symmetric, to_symmetric

__all__ = [
    "SolveConfig",
    "Trajectory",
    "PicardDiagnostics",
    "DependenceReport",
    "cfl_timestep",
    "rhs_regularized",
    "solve_regularized",
    "solve_linearized",
    "picard_iterate",
    "solve_direct",
    "solve_unidirectional",
    "hamiltonian",
    "hamiltonian_series",
    "max_slope_series",
    "continuous_dependence_probe",
]

_REL_SLACK = 1e-9  # round-off slack on monitored inequalities


@dataclass(frozen=True)
class SolveConfig:
    """Knobs shared by every solver.

    ``eta_bar = None`` means "derive from the data" (spatial mean of the
    initial elevation) where that applies.
    """

    T: float
    dt: float
    N: int = 2
    epsilon: float = 0.0
    eta_bar: float | None = None
    dealias: bool = True
    tol: float = 1e-8
    max_iter: int = 30

    def __post_init__(self):
        if not (np.isfinite(self.T) and self.T > 0.0):
            raise ConfigError(f"final time must be positive, got {self.T}")
        if not (np.isfinite(self.dt) and 0.0 < self.dt <= self.T * (1 + 1e-12)):
            raise ConfigError(f"time step must satisfy 0 < dt <= T, got dt={self.dt}, T={self.T}")
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 2):
            raise ConfigError(f"energy order must be an integer >= 2, got {self.N!r}")
        if not (0.0 <= self.epsilon <= 1.0):
            raise ConfigError(f"mollification width must lie in [0, 1], got {self.epsilon}")
        if self.eta_bar is not None and not (np.isfinite(self.eta_bar) and self.eta_bar > 0.0):
            raise ConfigError(f"background elevation must be positive, got {self.eta_bar}")
        if not (self.tol > 0.0):
            raise ConfigError(f"tolerance must be positive, got {self.tol}")
        if not (isinstance(self.max_iter, (int, np.integer)) and self.max_iter >= 1):
            raise ConfigError(f"max_iter must be a positive integer, got {self.max_iter!r}")

    def with_(self, **kw) -> "SolveConfig":
        return replace(self, **kw)


def cfl_timestep(state: State, c_cfl: float = 0.3) -> float:
    """Advective CFL step ``c_cfl * dx / (max|u| + max sqrt(eta))``."""
    g = state.grid
    if state.representation == "physical":
        root = np.sqrt(np.maximum(state.eta.samples, 0.0))
    else:
        root = np.maximum(0.5 * state.zeta.samples + state.lambda_bar, 0.0)
    speed = float(np.max(np.abs(state.u.samples)) + np.max(root))
    if speed <= 0.0:
        speed = math.sqrt(state.eta_bar)
    return c_cfl * g.spacing / speed


# ---------------------------------------------------------------------------
# trajectories

class Trajectory:
    """Dense record of one solve: states, tendencies, energies, config.

    ``values`` and ``tendencies`` have shape ``(steps+1, m, n)`` where
    ``m`` is the component count of the representation ('symmetric' and
    'physical' store pairs, 'velocity' a single field).
    """

    def __init__(self, grid: Grid, times: np.ndarray, values: np.ndarray,
                 tendencies: np.ndarray, representation: str, eta_bar: float,
                 config: SolveConfig):
        self.grid = grid
        self.times = times
        self.values = values
        self.tendencies = tendencies
        self.representation = representation
        self.eta_bar = eta_bar
        self.config = config
        self._energy = None

    def __len__(self) -> int:
        return len(self.times)

    def component(self, name: str) -> np.ndarray:
        names = {"symmetric": ("zeta", "u"), "physical": ("eta", "u"),
                 "velocity": ("u",)}[self.representation]
        return self.values[:, names.index(name), :]

    def state(self, i: int) -> State:
        if self.representation == "velocity":
            raise ValueError("a one-way trajectory has no state pairs")
        first = Field.from_samples(self.grid, self.values[i, 0])
        second = Field.from_samples(self.grid, self.values[i, 1])
        return State(first, second, self.representation, self.eta_bar)

    @property
    def final_state(self) -> State:
        return self.state(len(self.times) - 1)

    def state_at(self, t: float) -> np.ndarray:
        """Cubic Hermite dense output (sample rows, shape ``(m, n)``)."""
        ts = self.times
        if t <= ts[0]:
            return self.values[0]
        if t >= ts[-1]:
            return self.values[-1]
        i = int(np.searchsorted(ts, t, side="right")) - 1
        h = ts[i + 1] - ts[i]
        s = (t - ts[i]) / h
        h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
        h10 = s * (1.0 - s) ** 2
        h01 = s * s * (3.0 - 2.0 * s)
        h11 = s * s * (s - 1.0)
        return (h00 * self.values[i] + h01 * self.values[i + 1]
                + h * (h10 * self.tendencies[i] + h11 * self.tendencies[i + 1]))

    def _symmetric_rows(self) -> np.ndarray:
        if self.representation == "symmetric":
            return self.values
        if self.representation == "physical":
            eta = self.values[:, 0, :]
            if np.any(eta <= 0.0):
                raise AdmissibilityError("stored elevation is not positive everywhere")
            rows = self.values.copy()
            rows[:, 0, :] = 2.0 * (np.sqrt(eta) - math.sqrt(self.eta_bar))
            return rows
        u = self.values[:, 0, :]
        return np.stack([u, np.zeros_like(u)], axis=1)

    @property
    def energy_per_k(self) -> np.ndarray:
        """``E_0..E_N`` per stored time, on the symmetric representation."""
        if self._energy is None:
            rows = self._symmetric_rows()
            coeffs = np.fft.fft(rows, axis=-1) / self.grid.n
            self._energy = energy_components(coeffs, self.grid.wavenumbers,
                                             self.grid.period, self.config.N)
        return self._energy

    @property
    def energy_totals(self) -> np.ndarray:
        return self.energy_per_k.sum(axis=-1)

    def energy_reports(self):
        from .energy import EnergyReport
        per_k = self.energy_per_k
        return [EnergyReport(time=float(t), per_k=tuple(float(v) for v in row),
                             total=float(row.sum()))
                for t, row in zip(self.times, per_k)]

    def mean_series(self) -> np.ndarray:
        """Spatial mean of each component per stored time, shape ``(steps+1, m)``."""
        return self.values.mean(axis=-1)

    def sup_l2_distance(self, other: "Trajectory") -> float:
        """``max_t`` of the joint L2 distance; lattices must coincide."""
        if self.values.shape != other.values.shape or not np.array_equal(self.times, other.times):
            raise ValueError("trajectories live on different time lattices")
        d = self.values - other.values
        per_t = np.sqrt(self.grid.quadrature_weight * np.einsum("tcn,tcn->t", d, d))
        return float(per_t.max())


# ---------------------------------------------------------------------------
# coefficient providers

class _ConstantProvider:
    def __init__(self, state: State, N: int):
        self.rows = np.stack([state.first.samples, state.second.samples])
        self._energy = total_energy(state, N).total

    def rows_at(self, t: float) -> np.ndarray:
        return self.rows

    def energy_at(self, t: float, N: int) -> float:
        return self._energy


class _TrajectoryProvider:
    def __init__(self, traj: Trajectory):
        if traj.representation != "symmetric":
            raise ValueError("coefficient trajectories must be symmetric")
        self.traj = traj
        self._last = None

    def rows_at(self, t: float) -> np.ndarray:
        if self._last is not None and self._last[0] == t:
            return self._last[1]
        rows = self.traj.state_at(t)
        self._last = (t, rows)
        return rows

    def energy_at(self, t: float, N: int) -> float:
        ts, tot = self.traj.times, self.traj.energy_totals
        return float(np.interp(t, ts, tot))


class _CallableProvider:
    def __init__(self, fn, N: int):
        self.fn = fn
        self.N = N
        self._last = None

    def rows_at(self, t: float) -> np.ndarray:
        return self._state(t)[0]

    def energy_at(self, t: float, N: int) -> float:
        return self._state(t)[1]

    def _state(self, t: float):
        if self._last is not None and self._last[0] == t:
            return self._last[1], self._last[2]
        st = self.fn(t)
        if st.representation != "symmetric":
            raise ValueError("coefficient providers must yield symmetric states")
        rows = np.stack([st.first.samples, st.second.samples])
        e = total_energy(st, self.N).total
        self._last = (t, rows, e)
        return rows, e


def _as_provider(V, N: int):
    if isinstance(V, State):
        return _ConstantProvider(V, N)
    if isinstance(V, Trajectory):
        return _TrajectoryProvider(V)
    if callable(V):
        return _CallableProvider(V, N)
    raise TypeError(f"cannot interpret {type(V).__name__} as a coefficient provider")


# ---------------------------------------------------------------------------
# right-hand sides

class _SymmetricRhs:
    """Workspace for the symmetric-variable tendency with optional mollifier."""

    def __init__(self, grid: Grid, eta_bar: float, eps: float, use_dealias: bool):
        xi = grid.wavenumbers
        d = 1j * xi
        d = d.copy()
        d[grid.nyquist_index] = 0.0
        self.deriv = d
        self.kderiv = whitham_symbol(xi) * d
        self.moll = mollifier_multiplier(grid, eps) if eps > 0.0 else None
        self.keep = grid.dealias_keep if use_dealias else None
        self.lam2 = 2.0 * math.sqrt(eta_bar)

    def coefficient_fields(self, rows: np.ndarray):
        phi, v = rows[0], rows[1]
        shifted = phi + self.lam2
        m = float(shifted.min())
        if m <= 0.0:
            raise AdmissibilityError(
                f"coefficient corridor broken: min(phi + 2*sqrt(eta_bar)) = {m:.6g}")
        a = 0.5 * shifted
        b = 2.0 / shifted
        if self.moll is None:
            return v, a, b
        sm = np.fft.ifft(self.moll * np.fft.fft(np.stack([v, a, b]), axis=-1), axis=-1).real
        return sm[0], sm[1], sm[2]

    def tendency(self, y: np.ndarray, coeffs) -> np.ndarray:
        jv, ja, jb = coeffs
        F = np.fft.fft(y, axis=-1)
        if self.moll is not None:
            F = F * self.moll
        dz, du = np.fft.ifft(self.deriv * F, axis=-1).real
        kdu = np.fft.ifft(self.kderiv * F[1]).real
        r = np.empty_like(y)
        r[0] = jv * dz + ja * du + jb * kdu
        r[1] = ja * dz + jv * du
        R = np.fft.fft(r, axis=-1)
        if self.keep is not None:
            R = R * self.keep
        if self.moll is not None:
            R = R * self.moll
        return -np.fft.ifft(R, axis=-1).real


class _DirectRhs:
    def __init__(self, grid: Grid, use_dealias: bool):
        xi = grid.wavenumbers
        d = (1j * xi).copy()
        d[grid.nyquist_index] = 0.0
        self.deriv = d
        self.kderiv = whitham_symbol(xi) * d
        self.keep = grid.dealias_keep if use_dealias else None

    def tendency(self, y: np.ndarray) -> np.ndarray:
        eta, u = y[0], y[1]
        F = np.fft.fft(y, axis=-1)
        deta = np.fft.ifft(self.deriv * F[0]).real
        kdu = np.fft.ifft(self.kderiv * F[1]).real
        P = np.fft.fft(np.stack([eta * u, 0.5 * u * u]), axis=-1)
        if self.keep is not None:
            P = P * self.keep
        dp = np.fft.ifft(self.deriv * P, axis=-1).real
        out = np.empty_like(y)
        out[0] = -kdu - dp[0]
        out[1] = -deta - dp[1]
        return out


class _UnidirectionalRhs:
    def __init__(self, grid: Grid, use_dealias: bool):
        xi = grid.wavenumbers
        d = (1j * xi).copy()
        d[grid.nyquist_index] = 0.0
        self.deriv = d
        self.kderiv = np.sqrt(whitham_symbol(xi)) * d
        self.keep = grid.dealias_keep if use_dealias else None

    def tendency(self, y: np.ndarray) -> np.ndarray:
        u = y[0]
        F = np.fft.fft(u)
        disp = np.fft.ifft(self.kderiv * F).real
        P = np.fft.fft(0.5 * u * u)
        if self.keep is not None:
            P = P * self.keep
        dp = np.fft.ifft(self.deriv * P).real
        return np.stack([-disp - dp])


# ---------------------------------------------------------------------------
# RK4 march

class _Abort(Exception):
    def __init__(self, cause: Exception, keep_last: bool):
        self.cause = cause
        self.keep_last = keep_last


def _time_lattice(T: float, dt: float) -> np.ndarray:
    nfull = int(math.floor(T / dt + 1e-9))
    times = dt * np.arange(nfull + 1, dtype=np.float64)
    if T - times[-1] > 1e-12 * max(T, 1.0):
        times = np.append(times, T)
    else:
        times[-1] = T
    return times


def _rk4_march(y0: np.ndarray, f, times: np.ndarray, hook=None):
    """Classical RK4 over a fixed lattice; records state and tendency per node.

    ``hook(t, y)`` runs after every accepted step (and once at t=0) and
    may raise ``_Abort``; the cause is re-raised with the partial record
    attached as ``cause.partial``.
    """
    y = np.array(y0, dtype=np.float64)
    vals = np.empty((len(times),) + y.shape)
    tends = np.empty_like(vals)
    vals[0] = y
    with np.errstate(all="ignore"):
        try:
            if hook is not None:
                hook(times[0], y)
        except _Abort as ab:
            ab.cause.partial = (times[:1], vals[:1], np.zeros_like(vals[:1]))
            raise ab.cause from None
        tends[0] = f(times[0], y)
        for i in range(len(times) - 1):
            t = times[i]
            h = times[i + 1] - t
            k1 = tends[i]
            k2 = f(t + 0.5 * h, y + (0.5 * h) * k1)
            k3 = f(t + 0.5 * h, y + (0.5 * h) * k2)
            k4 = f(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            vals[i + 1] = y
            try:
                if hook is not None:
                    hook(times[i + 1], y)
            except _Abort as ab:
                j = i + 2 if ab.keep_last else i + 1
                if ab.keep_last:
                    tends[i + 1] = f(times[i + 1], y)
                ab.cause.partial = (times[:j].copy(), vals[:j].copy(), tends[:j].copy())
                raise ab.cause from None
            tends[i + 1] = f(times[i + 1], y)
    return vals, tends


# ---------------------------------------------------------------------------
# symmetric-variable solvers

def rhs_regularized(U_eps: State, V: State, eps: float, use_dealias: bool = True):
    """One tendency evaluation of the (regularized) symmetric system.

    Returns the pair ``(d zeta/dt, d u/dt)`` as fields; ``eps = 0`` gives
    the plain linearized right-hand side.
    """
    if U_eps.representation != "symmetric" or V.representation != "symmetric":
        raise ValueError("tendencies are defined on symmetric states")
    if U_eps.grid != V.grid:
        raise ValueError("state and coefficients live on different grids")
    if not (0.0 <= eps <= 1.0):
        raise ValueError(f"mollification width must lie in [0, 1], got {eps}")
    ws = _SymmetricRhs(U_eps.grid, V.eta_bar, eps, use_dealias)
    rows = np.stack([U_eps.first.samples, U_eps.second.samples])
    vrows = np.stack([V.first.samples, V.second.samples])
    out = ws.tendency(rows, ws.coefficient_fields(vrows))
    return (Field.from_samples(U_eps.grid, out[0]),
            Field.from_samples(U_eps.grid, out[1]))


def _solve_symmetric(U0: State, V, cfg: SolveConfig, eps: float,
                     enforce_assumptions: bool = True, monitor: dict | None = None) -> Trajectory:
    if U0.representation != "symmetric":
        raise ValueError("initial data must be a symmetric state")
    grid = U0.grid
    eta_bar = U0.eta_bar
    adm = admissible_mu(U0.first, eta_bar)
    E0 = total_energy(U0, cfg.N).total
    energy_bound = 2.0 * E0 * (1.0 + _REL_SLACK) + 1e-300
    floor = adm.mu * (1.0 - _REL_SLACK)
    ceiling = (1.0 / adm.mu) * (1.0 + _REL_SLACK)

    prov = _as_provider(V, cfg.N)
    ws = _SymmetricRhs(grid, eta_bar, eps, cfg.dealias)
    lam2 = ws.lam2

    if isinstance(prov, _ConstantProvider):
        frozen = ws.coefficient_fields(prov.rows)

        def f(t, y):
            return ws.tendency(y, frozen)
    else:
        def f(t, y):
            return ws.tendency(y, ws.coefficient_fields(prov.rows_at(t)))

    def hook(t, y):
        if not np.all(np.isfinite(y)):
            raise _Abort(BlowUpError(t, "non-finite state"), keep_last=False)
        shifted = prov.rows_at(t)[0] + lam2
        lo, hi = float(shifted.min()), float(shifted.max())
        reason = None
        if lo < floor:
            reason = f"min(phi + 2*sqrt(eta_bar)) = {lo:.6g} below mu = {adm.mu:.6g}"
        elif hi > ceiling:
            reason = f"max(phi + 2*sqrt(eta_bar)) = {hi:.6g} above 1/mu = {1.0 / adm.mu:.6g}"
        else:
            ev = prov.energy_at(t, cfg.N)
            if ev > energy_bound:
                reason = f"E_N(V) = {ev:.6g} above twice the initial energy {E0:.6g}"
        if reason is not None:
            if enforce_assumptions:
                raise _Abort(AssumptionViolation(t, reason), keep_last=True)
            if monitor is not None and "violation" not in monitor:
                monitor["violation"] = (t, reason)

    times = _time_lattice(cfg.T, cfg.dt)
    y0 = np.stack([U0.first.samples, U0.second.samples])
    vals, tends = _rk4_march(y0, f, times, hook)
    return Trajectory(grid, times, vals, tends, "symmetric", eta_bar, cfg)


def solve_regularized(U0: State, V, cfg: SolveConfig) -> Trajectory:
    """March the mollified frozen-coefficient system (``cfg.epsilon > 0``)."""
    if not (cfg.epsilon > 0.0):
        raise ConfigError("solve_regularized needs a positive mollification width")
    return _solve_symmetric(U0, V, cfg, eps=cfg.epsilon)


def solve_linearized(U0: State, V, cfg: SolveConfig) -> Trajectory:
    """March the frozen-coefficient system without mollification (``cfg.epsilon == 0``)."""
    if cfg.epsilon != 0.0:
        raise ConfigError("solve_linearized requires epsilon = 0")
    return _solve_symmetric(U0, V, cfg, eps=0.0)


@dataclass
class PicardDiagnostics:
    """Per-iteration record of the successive-approximation run."""

    differences: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    energy_maxima: list = field(default_factory=list)
    assumption_flags: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0


def picard_iterate(U0: State, cfg: SolveConfig):
    """Iterate the linearized solve to the fixed point.

    The zeroth iterate is the constant-in-time initial state; iterate
    ``m+1`` solves the linearized problem with the previous iterate as
    coefficients. Stops when the sup-in-time L2 difference of successive
    iterates drops below ``cfg.tol``; raises
    :class:`~whithamlab.errors.NonContractionError` when ``cfg.max_iter``
    solves do not get there. Returns ``(trajectory, diagnostics)``.
    """
    if U0.representation != "symmetric":
        raise ValueError("initial data must be a symmetric state")
    if cfg.epsilon != 0.0:
        raise ConfigError("the iteration runs on the linearized problem; set epsilon = 0")
    admissible_mu(U0.first, U0.eta_bar)  # fail fast on inadmissible data

    diag = PicardDiagnostics()
    rows0 = np.stack([U0.first.samples, U0.second.samples])
    provider = U0  # constant-in-time zeroth iterate
    prev_values = None
    traj = None
    for m in range(1, cfg.max_iter + 1):
        mon: dict = {}
        traj = _solve_symmetric(U0, provider, cfg, eps=0.0,
                                enforce_assumptions=False, monitor=mon)
        if prev_values is None:
            d = traj.values - rows0[None, :, :]
        else:
            d = traj.values - prev_values
        per_t = np.sqrt(traj.grid.quadrature_weight * np.einsum("tcn,tcn->t", d, d))
        diff = float(per_t.max())

        if diag.differences and diag.differences[-1] > cfg.tol * 1e-3:
            diag.ratios.append(diff / diag.differences[-1])
        else:
            diag.ratios.append(None)
        diag.differences.append(diff)
        diag.energy_maxima.append(float(traj.energy_totals.max()))
        diag.assumption_flags.append(mon.get("violation"))
        diag.iterations = m
        if diff < cfg.tol:
            diag.converged = True
            break
        provider = traj
        prev_values = traj.values
    if not diag.converged:
        raise NonContractionError(
            f"no contraction to tol={cfg.tol:g} within {cfg.max_iter} iterations "
            f"(last difference {diag.differences[-1]:.3e})", diagnostics=diag)
    return traj, diag


# ---------------------------------------------------------------------------
# physical-variable solvers

def solve_direct(eta0: Field, u0: Field, cfg: SolveConfig) -> Trajectory:
    """March the untransformed two-way system from ``(eta0, u0)``.

    The run is terminated with a blow-up report when the state goes
    non-finite or the elevation sinks to a quarter of ``mu`` squared,
    which is the physical image of half the admissibility floor.
    """
    grid = eta0.grid
    if grid != u0.grid:
        raise ValueError("elevation and velocity live on different grids")
    eta_bar = cfg.eta_bar if cfg.eta_bar is not None else float(eta0.samples.mean())
    zeta0 = to_symmetric(eta0, eta_bar)  # also validates eta0 > 0
    adm = admissible_mu(zeta0, eta_bar)
    floor_eta = 0.25 * adm.mu**2

    ws = _DirectRhs(grid, cfg.dealias)

    def f(t, y):
        return ws.tendency(y)

    def hook(t, y):
        if not np.all(np.isfinite(y)):
            raise _Abort(BlowUpError(t, "non-finite state"), keep_last=False)
        if float(y[0].min()) <= floor_eta:
            raise _Abort(BlowUpError(
                t, f"elevation reached the admissibility floor {floor_eta:.6g}"),
                keep_last=True)

    times = _time_lattice(cfg.T, cfg.dt)
    y0 = np.stack([eta0.samples, u0.samples])
    try:
        vals, tends = _rk4_march(y0, f, times, hook)
    except BlowUpError as exc:
        pt, pv, pk = exc.partial
        partial = Trajectory(grid, pt, pv, pk, "physical", eta_bar, cfg)
        slope = float(max_slope_series(partial).max()) if len(partial) else float("nan")
        err = BlowUpError(exc.time, exc.reason, max_slope=slope)
        err.trajectory = partial
        raise err from None
    return Trajectory(grid, times, vals, tends, "physical", eta_bar, cfg)


def solve_unidirectional(u0: Field, cfg: SolveConfig) -> Trajectory:
    """March the one-way reference equation from ``u0``."""
    grid = u0.grid
    ws = _UnidirectionalRhs(grid, cfg.dealias)

    def f(t, y):
        return ws.tendency(y)

    def hook(t, y):
        if not np.all(np.isfinite(y)):
            raise _Abort(BlowUpError(t, "non-finite state"), keep_last=False)

    times = _time_lattice(cfg.T, cfg.dt)
    eta_bar = cfg.eta_bar if cfg.eta_bar is not None else 1.0
    vals, tends = _rk4_march(np.stack([u0.samples]), f, times, hook)
    return Trajectory(grid, times, vals, tends, "velocity", eta_bar, cfg)


# ---------------------------------------------------------------------------
# derived diagnostics

def hamiltonian(eta: Field, u: Field) -> float:
    """Conserved functional ``integral(u K u / 2 + eta^2 / 2 + eta u^2 / 2)``."""
    return 0.5 * (inner(u, apply_whitham(u)) + inner(eta, eta) + inner(eta, u * u))


def hamiltonian_series(traj: Trajectory) -> np.ndarray:
    """The conserved functional along a physical trajectory."""
    if traj.representation != "physical":
        raise ValueError("the conserved functional is evaluated on physical trajectories")
    eta = traj.values[:, 0, :]
    u = traj.values[:, 1, :]
    sym = whitham_symbol(traj.grid.wavenumbers)
    ku = np.fft.ifft(sym * np.fft.fft(u, axis=-1), axis=-1).real
    dens = 0.5 * (u * ku + eta * eta + eta * u * u)
    return traj.grid.quadrature_weight * dens.sum(axis=-1)


def max_slope_series(traj: Trajectory) -> np.ndarray:
    """``max_x |u_x|`` per stored time; the blow-up proxy."""
    u = traj.component("u")
    g = traj.grid
    d = (1j * g.wavenumbers).copy()
    d[g.nyquist_index] = 0.0
    du = np.fft.ifft(d * np.fft.fft(u, axis=-1), axis=-1).real
    return np.abs(du).max(axis=-1)


# ---------------------------------------------------------------------------
# continuous dependence

@dataclass(frozen=True)
class DependenceReport:
    """Perturbation response of the flow map at one final time."""

    deltas: tuple
    differences: tuple
    skipped: tuple
    slope: float | None


def _default_direction(grid: Grid, N: int):
    th = 2.0 * np.pi / grid.period
    dz = Field.from_samples(grid, np.cos(2.0 * th * grid.x) + 0.3 * np.sin(th * grid.x))
    du = Field.from_samples(grid, np.sin(3.0 * th * grid.x) - 0.2 * np.cos(th * grid.x))
    scale = math.sqrt(sobolev_norm(dz, N) ** 2 + sobolev_norm(du, N) ** 2)
    return dz * (1.0 / scale), du * (1.0 / scale)


def _flow_to_symmetric(U: State, cfg: SolveConfig) -> State:
    eta0 = from_symmetric(U.zeta, U.eta_bar)
    traj = solve_direct(eta0, U.u, cfg.with_(eta_bar=U.eta_bar))
    final = traj.final_state
    return State.symmetric(to_symmetric(final.eta, U.eta_bar), final.u, U.eta_bar)


def continuous_dependence_probe(U0: State, deltas, cfg: SolveConfig,
                                direction=None) -> DependenceReport:
    """Flow perturbations of size ``delta`` (in the ``H^N`` pair norm) to time T.

    Inadmissible perturbed data are skipped with a note. The slope is the
    log-log regression of the final-time ``H^N`` difference against
    ``delta`` over the runs that completed with a positive difference.
    """
    if U0.representation != "symmetric":
        raise ValueError("the probe perturbs symmetric states")
    if direction is None:
        direction = _default_direction(U0.grid, cfg.N)
    dz, du = direction
    base = _flow_to_symmetric(U0, cfg)

    diffs, skipped = [], []
    for delta in deltas:
        delta = float(delta)
        if delta == 0.0:
            diffs.append(0.0)
            continue
        pert = State.symmetric(U0.zeta + delta * dz, U0.u + delta * du, U0.eta_bar)
        try:
            admissible_mu(pert.first, pert.eta_bar)
            out = _flow_to_symmetric(pert, cfg)
        except (AdmissibilityError, BlowUpError) as exc:
            skipped.append((delta, str(exc)))
            diffs.append(float("nan"))
            continue
        dzf = out.zeta - base.zeta
        duf = out.u - base.u
        diffs.append(math.sqrt(sobolev_norm(dzf, cfg.N) ** 2 + sobolev_norm(duf, cfg.N) ** 2))

    pts = [(d, v) for d, v in zip(deltas, diffs) if d > 0.0 and np.isfinite(v) and v > 0.0]
    slope = None
    if len(pts) >= 2:
        lx = np.log([p[0] for p in pts])
        ly = np.log([p[1] for p in pts])
        slope = float(np.polyfit(lx, ly, 1)[0])
    return DependenceReport(deltas=tuple(float(d) for d in deltas),
                            differences=tuple(diffs), skipped=tuple(skipped), slope=slope)
