"""Release gate: one test per numbered claim the laboratory must certify.

Each criterion prints a single ``[criterion N] PASS/FAIL: detail`` line
with the measured quantities, then asserts. Tolerances are frozen here;
loosening one to make a run green defeats the point of the gate.
"""

import math
import time

import numpy as np
import pytest

from whithamlab import (
    SolveConfig,
    State,
    apply_whitham,
    continuous_dependence_probe,
    from_function,
    hamiltonian_series,
    kernel_convolve,
    lifespan_estimate,
    make_grid,
    picard_iterate,
    random_bandlimited,
    solve_direct,
    symmetrize_state,
    total_energy,
    whitham_symbol,
)
from whithamlab.scenarios import (
    CONTRACTION_BOUND,
    DEFAULT_T1,
    FROZEN_LIFESPAN_C,
    LIFESPAN_WINDOW,
    SLOPE_BAND,
    TAME_CAP,
    TREND_TOL,
    cauchy_differences,
    empirical_lifespans,
    inequality_suite,
    mollifier_suite,
    vanishing_runs,
)


def _verdict(num: int, passed: bool, detail: str) -> None:
    print(f"[criterion {num}] {'PASS' if passed else 'FAIL'}: {detail}")
    assert passed, f"criterion {num}: {detail}"


def _loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x)), np.log(np.asarray(y)), 1)[0])


def _reference_data(n: int):
    grid = make_grid(n)
    eta0 = from_function(grid, lambda x: 1.0 + 0.1 * np.cos(x))
    u0 = from_function(grid, lambda x: 0.1 * np.sin(x))
    return grid, eta0, u0


@pytest.fixture(scope="module")
def horizon_run():
    """Direct solve and fixed-point iteration on the guaranteed horizon.

    Shared by criteria 5 and 6 so the gate times one solve, not two.
    """
    grid, eta0, u0 = _reference_data(128)
    U0 = symmetrize_state(State.physical(eta0, u0, eta_bar=1.0))
    E0 = total_energy(U0, 2).total
    T_star = lifespan_estimate(E0, 2, DEFAULT_T1, FROZEN_LIFESPAN_C)
    cfg = SolveConfig(T=T_star, dt=0.005, N=2, tol=1e-10, max_iter=30)
    t0 = time.perf_counter()
    traj, diag = picard_iterate(U0, cfg)
    direct = solve_direct(eta0, u0, cfg)
    elapsed = time.perf_counter() - t0
    return {"grid": grid, "E0": E0, "T_star": T_star, "traj": traj,
            "diag": diag, "direct": direct, "elapsed": elapsed}


def test_criterion_01_dispersive_symbol_is_exact_on_pure_modes():
    grid = make_grid(256)
    worst = 0.0
    for m in range(86):
        expected = whitham_symbol(float(m))
        for phase in (np.cos, np.sin) if m else (np.cos,):
            f = from_function(grid, lambda x: phase(m * x))
            err = np.max(np.abs(apply_whitham(f).samples - expected * f.samples))
            worst = max(worst, err / abs(expected))
    zero_ok = whitham_symbol(0.0) == 1.0
    _verdict(1, worst <= 1e-12 and zero_ok,
             f"max relative error {worst:.3e} over modes 0..85 "
             f"(tolerance 1e-12), symbol(0) == 1 is {zero_ok}")


def test_criterion_02_truncated_convolution_matches_the_multiplier():
    grid = make_grid(256)
    worst = 0.0
    for seed in range(20):
        f = random_bandlimited(grid, seed=seed, decay=1.5, amplitude=1.0)
        diff = kernel_convolve(f, 2048).samples - apply_whitham(f).samples
        worst = max(worst, float(np.max(np.abs(diff))))
    _verdict(2, worst <= 1e-6,
             f"max difference {worst:.3e} over 20 fields at M=2048 "
             f"(tolerance 1e-6)")


def test_criterion_03_mollifier_constants_are_eps_independent():
    suite = mollifier_suite()
    worst, worst_cell = 0.0, ""
    for key, cell in suite["smoothing"].items():
        if abs(cell["slope"]) > worst:
            worst, worst_cell = abs(cell["slope"]), f"smoothing{key}"
    for k, cell in suite["difference"].items():
        if abs(cell["slope"]) > worst:
            worst, worst_cell = abs(cell["slope"]), f"difference k={k}"
    _verdict(3, worst <= TREND_TOL,
             f"max |trend slope| {worst:.4f} at {worst_cell} over "
             f"{suite['field_count']} fields, eps 2^-3..2^-10 "
             f"(tolerance {TREND_TOL})")


def test_criterion_04_product_and_interpolation_inequalities_hold():
    suite = inequality_suite(ns=(64, 128, 256), pairs=100, k_max=4)
    tame_max = max(float(v.max()) for v in suite["tame"].values())
    interp_max = max(float(v.max()) for v in suite["interpolation"].values())
    sobolev_max = max(float(v.max()) for v in suite["sobolev"].values())
    endpoint = suite["endpoint_error"]
    ok = (tame_max <= TAME_CAP and interp_max <= 1.0 + 1e-12
          and sobolev_max <= 1.0 + 1e-12 and endpoint <= 1e-12)
    _verdict(4, ok,
             f"300 pairs per grid at n in (64, 128, 256): tame max "
             f"{tame_max:.4f} (cap {TAME_CAP}), interpolation max "
             f"{interp_max:.12f}, endpoint error {endpoint:.2e}")


def test_criterion_05_energy_stays_under_twice_initial_on_the_horizon(horizon_run):
    r = horizon_run
    bound = 2.0 * r["E0"] * (1.0 + 1e-10)
    iterate_max = max(r["diag"].energy_maxima)
    direct_max = float(r["direct"].energy_totals.max())
    ok = (iterate_max <= bound and direct_max <= bound
          and r["diag"].converged and r["elapsed"] <= 10.0)
    _verdict(5, ok,
             f"T* = {r['T_star']:.4f}, 2 E0 = {2.0 * r['E0']:.4f}; iterate "
             f"energies peak at {iterate_max:.4f}, direct at {direct_max:.4f}, "
             f"solved in {r['elapsed']:.2f} s (limit 10 s)")


def test_criterion_06_iteration_contracts_and_agrees_with_direct(horizon_run):
    r = horizon_run
    ratios = [x for x in r["diag"].ratios if x is not None]
    traj, direct = r["traj"], r["direct"]
    zeta_direct = 2.0 * (np.sqrt(direct.component("eta")) - 1.0)
    d1 = traj.component("zeta") - zeta_direct
    d2 = traj.component("u") - direct.component("u")
    w = r["grid"].quadrature_weight
    dist = float(np.sqrt(w * (np.einsum("tn,tn->t", d1, d1)
                              + np.einsum("tn,tn->t", d2, d2))).max())
    ok = all(x <= CONTRACTION_BOUND for x in ratios) and dist <= 1e-6
    _verdict(6, ok,
             f"{r['diag'].iterations} iterations, max ratio {max(ratios):.4f} "
             f"(bound {CONTRACTION_BOUND}), limit vs direct sup-t L2 "
             f"{dist:.3e} (tolerance 1e-6)")


def test_criterion_07_regularized_flows_are_cauchy_in_eps():
    eps_list = [2.0 ** -j for j in range(3, 10)]
    pairs = cauchy_differences(n=2048, decay=2.0, T=0.2, dt=2.5e-4,
                               eps_list=eps_list, seed=20260816)
    gaps = [p[2] for p in pairs]
    diffs = [p[3] for p in pairs]
    slope = _loglog_slope(gaps, diffs)
    ok = SLOPE_BAND[0] <= slope <= SLOPE_BAND[1] and all(d > 0 for d in diffs)
    _verdict(7, ok,
             f"sup-t L2 gap falls from {diffs[0]:.3e} to {diffs[-1]:.3e} "
             f"over eps 2^-3..2^-9; log-log slope {slope:.4f} "
             f"(band {SLOPE_BAND})")


def test_criterion_08_means_and_hamiltonian_are_conserved():
    _, eta0, u0 = _reference_data(128)
    drifts, mean_drift = [], 0.0
    for dt in (0.04, 0.02, 0.01):
        traj = solve_direct(eta0, u0, SolveConfig(T=1.0, dt=dt, N=2))
        H = hamiltonian_series(traj)
        drifts.append(float(np.abs(H - H[0]).max()))
        means = traj.mean_series()
        mean_drift = max(mean_drift, float(np.abs(means - means[0]).max()))
    r1, r2 = drifts[0] / drifts[1], drifts[1] / drifts[2]
    ok = mean_drift <= 1e-10 and all(12.0 <= r <= 40.0 for r in (r1, r2))
    _verdict(8, ok,
             f"mean drift {mean_drift:.2e} (tolerance 1e-10); Hamiltonian "
             f"drift shrinks {r1:.1f}x then {r2:.1f}x per dt halving "
             f"(band [12, 40])")


def test_criterion_09_dependence_on_data_is_lipschitz():
    grid, eta0, u0 = _reference_data(128)
    U0 = symmetrize_state(State.physical(eta0, u0, eta_bar=1.0))
    report = continuous_dependence_probe(
        U0, (1e-2, 5e-3, 2.5e-3), SolveConfig(T=0.5, dt=0.002, N=2))
    slope = report.slope
    ok = (slope is not None and SLOPE_BAND[0] <= slope <= SLOPE_BAND[1]
          and not report.skipped)
    _verdict(9, ok,
             f"terminal difference vs perturbation size has log-log slope "
             f"{slope if slope is None else round(slope, 5)} (band {SLOPE_BAND})")


def test_criterion_10_vanishing_background_steepens_and_breaks():
    rows = vanishing_runs(deltas=(0.5, 0.1, 0.02))
    proxies = [r["proxy"] for r in rows]
    ok = (all(a < b for a, b in zip(proxies, proxies[1:]))
          and rows[-1]["status"] == "triggered")
    _verdict(10, ok,
             f"steepening proxy {', '.join(f'{p:.3f}' for p in proxies)} as "
             f"the background falls 0.5 -> 0.02; smallest background "
             f"{rows[-1]['status']} at t = {rows[-1]['end_time']:.3f}")


def test_criterion_11_contracting_horizon_tracks_the_energy_shape():
    rows = empirical_lifespans((0.05, 0.2, 0.8))
    emp = [row[4] for row in rows]
    ratios = [T / lifespan_estimate(E, 2, DEFAULT_T1, FROZEN_LIFESPAN_C)
              for (_, _, E, _, T) in rows]
    lo, hi = 1.0 / LIFESPAN_WINDOW, LIFESPAN_WINDOW
    ok = (all(math.isfinite(T) for T in emp)
          and all(a > b for a, b in zip(emp, emp[1:]))
          and all(lo <= r <= hi for r in ratios))
    _verdict(11, ok,
             f"empirical horizons {', '.join(f'{T:.2f}' for T in emp)} for "
             f"E0 in (0.05, 0.2, 0.8); ratio to the predicted shape "
             f"{', '.join(f'{r:.2f}' for r in ratios)} (window "
             f"[{lo:.2f}, {hi:.1f}])")
