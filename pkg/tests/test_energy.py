"""Norms, energy functionals, the lifespan formula, and inequality probes."""

import math

import numpy as np
import pytest

from whithamlab import (
    State,
    check_interpolation,
    check_interpolation_sobolev,
    check_tame_product,
    from_function,
    l2_norm,
    lifespan_estimate,
    make_grid,
    max_norm,
    partial_energy,
    sobolev_norm,
    total_energy,
)
from whithamlab.energy import RatioReport, energy_components
from whithamlab.initial_data import random_bandlimited

SQRT_PI = math.sqrt(math.pi)


@pytest.fixture
def grid():
    return make_grid(64)


class TestNorms:
    def test_l2_of_cosine(self, grid):
        f = from_function(grid, np.cos)
        assert l2_norm(f) == pytest.approx(SQRT_PI, rel=1e-14)

    def test_l2_of_constant(self, grid):
        f = from_function(grid, lambda x: np.full_like(x, 3.0))
        assert l2_norm(f) == pytest.approx(3.0 * math.sqrt(2.0 * math.pi), rel=1e-14)

    def test_max_norm(self, grid):
        f = from_function(grid, lambda x: -2.0 + np.cos(x))
        assert max_norm(f) == pytest.approx(3.0, rel=1e-14)

    def test_sobolev_zero_is_l2(self, grid):
        f = random_bandlimited(grid, seed=4)
        assert sobolev_norm(f, 0.0) == pytest.approx(l2_norm(f), rel=1e-13)

    def test_sobolev_of_single_mode(self, grid):
        # H^s weight (1 + m^2)^(s/2) on a unit cosine
        f = from_function(grid, lambda x: np.cos(3.0 * x))
        for s in (0.5, 1.0, 2.0):
            assert sobolev_norm(f, s) == pytest.approx(
                SQRT_PI * (1.0 + 9.0) ** (0.5 * s), rel=1e-13)

    def test_sobolev_monotone_in_order(self, grid):
        f = random_bandlimited(grid, seed=5)
        ns = [sobolev_norm(f, s) for s in (0.0, 0.5, 1.0, 2.0)]
        assert all(a < b for a, b in zip(ns, ns[1:]))


class TestEnergies:
    def _state(self, grid):
        zeta = from_function(grid, lambda x: 0.1 * np.cos(x))
        u = from_function(grid, lambda x: 0.2 * np.sin(2.0 * x))
        return State.symmetric(zeta, u, 1.0)

    def test_partial_energy_single_modes(self, grid):
        U = self._state(grid)
        # ||d^k (0.1 cos x)||^2 = 0.01 pi, ||d^k (0.2 sin 2x)||^2 = 0.04 pi 4^k
        for k in range(4):
            expected = 0.01 * math.pi + 0.04 * math.pi * 4.0**k
            assert partial_energy(U, k) == pytest.approx(expected, rel=1e-12)

    def test_partial_energy_requires_symmetric(self, grid):
        eta = from_function(grid, lambda x: 1.0 + 0.1 * np.cos(x))
        u = from_function(grid, np.sin)
        phys = State.physical(eta, u, 1.0)
        with pytest.raises(ValueError):
            partial_energy(phys, 0)

    def test_partial_energy_rejects_bad_order(self, grid):
        with pytest.raises(ValueError):
            partial_energy(self._state(grid), -1)

    def test_total_energy_sums_partials(self, grid):
        U = self._state(grid)
        rep = total_energy(U, N=3, time=0.5)
        assert rep.time == 0.5
        assert rep.order == 3
        for k in range(4):
            assert rep.per_k[k] == pytest.approx(partial_energy(U, k), rel=1e-12)
        assert rep.total == pytest.approx(sum(rep.per_k), rel=1e-14)
        assert rep.csv_row() == [0.5, *rep.per_k, rep.total]

    def test_total_energy_requires_order_two(self, grid):
        with pytest.raises(ValueError):
            total_energy(self._state(grid), N=1)

    def test_energy_components_vectorization(self, grid):
        U = self._state(grid)
        pairs = np.stack([U.first.coefficients, U.second.coefficients])
        stacked = np.stack([pairs, pairs])  # (2, 2, n)
        out = energy_components(stacked, grid.wavenumbers, grid.period, N=2)
        assert out.shape == (2, 3)
        for k in range(3):
            assert out[0, k] == pytest.approx(partial_energy(U, k), rel=1e-12)
        np.testing.assert_allclose(out[0], out[1])


class TestLifespan:
    def test_zero_energy_reduces_to_log_two(self):
        assert lifespan_estimate(0.0, 2, 4.0, 10.0) == pytest.approx(
            10.0 * math.log(2.0), rel=1e-15)

    def test_short_window_binds(self):
        assert lifespan_estimate(0.0, 2, 0.1, 10.0) == pytest.approx(1.0, rel=1e-15)

    def test_formula_at_order_two(self):
        E0 = 0.18
        s = math.sqrt(2.0 * E0) + 2.0 * E0
        expected = 10.0 * math.log(2.0) / (1.0 + s)
        assert lifespan_estimate(E0, 2, 4.0, 10.0) == pytest.approx(expected, rel=1e-14)

    def test_decreasing_in_energy(self):
        vals = [lifespan_estimate(e, 2, 4.0, 10.0) for e in (0.0, 0.1, 0.5, 2.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_higher_order_shrinks_lifespan(self):
        assert lifespan_estimate(0.5, 3, 4.0, 10.0) < lifespan_estimate(0.5, 2, 4.0, 10.0)

    @pytest.mark.parametrize("args", [(-0.1, 2, 4.0, 10.0), (0.5, 0, 4.0, 10.0),
                                      (0.5, 2, 0.0, 10.0), (0.5, 2, 4.0, -1.0)])
    def test_validation(self, args):
        with pytest.raises(ValueError):
            lifespan_estimate(*args)


class TestTameProduct:
    def test_cosine_squared_oracle(self, grid):
        # f = g = cos x: d(f g) = -sin 2x with norm sqrt(pi), denominator
        # 1 * sqrt(pi) + 1 * sqrt(pi); the ratio is exactly 1/2
        f = from_function(grid, np.cos)
        rep = check_tame_product(f, f, k=1)
        assert rep.defined
        assert rep.ratio == pytest.approx(0.5, abs=1e-13)

    def test_constant_factor_saturates(self, grid):
        # g == 1: numerator and denominator are both ||d^2 f||
        f = random_bandlimited(grid, seed=7)
        one = from_function(grid, np.ones_like)
        rep = check_tame_product(f, one, k=2)
        assert rep.defined
        assert rep.ratio == pytest.approx(1.0, abs=1e-12)

    def test_zero_fields_are_flagged(self, grid):
        z = from_function(grid, np.zeros_like)
        rep = check_tame_product(z, z, k=1)
        assert not rep.defined
        assert math.isnan(rep.ratio)

    def test_random_fields_stay_below_one(self, grid):
        rng_seeds = [(21, 22), (23, 24), (25, 26)]
        for k in (1, 2, 3):
            for sa, sb in rng_seeds:
                f = random_bandlimited(grid, seed=sa, decay=1.5)
                g = random_bandlimited(grid, seed=sb, decay=2.5)
                rep = check_tame_product(f, g, k)
                assert rep.defined
                assert rep.ratio <= 1.0


class TestInterpolation:
    def test_endpoints_are_exact(self, grid):
        f = random_bandlimited(grid, seed=9)
        for k in (1, 2, 4):
            assert check_interpolation(f, 0, k).ratio == pytest.approx(1.0, abs=1e-12)
            assert check_interpolation(f, k, k).ratio == pytest.approx(1.0, abs=1e-12)

    def test_single_mode_saturates(self, grid):
        # one Fourier mode turns the inequality into an identity
        f = from_function(grid, lambda x: np.cos(5.0 * x))
        for l, k in [(1, 2), (1, 3), (2, 3), (3, 4)]:
            assert check_interpolation(f, l, k).ratio == pytest.approx(1.0, abs=1e-12)

    def test_mixed_modes_stay_below_one(self, grid):
        f = from_function(grid, lambda x: np.cos(x) + 0.5 * np.cos(6.0 * x))
        for l, k in [(1, 2), (2, 4), (1, 4)]:
            rep = check_interpolation(f, l, k)
            assert rep.ratio <= 1.0 + 1e-12

    def test_order_validation(self, grid):
        f = random_bandlimited(grid, seed=10)
        with pytest.raises(ValueError):
            check_interpolation(f, 3, 2)

    def test_degenerate_order_zero(self, grid):
        f = random_bandlimited(grid, seed=10)
        assert check_interpolation(f, 0, 0).ratio == pytest.approx(1.0, abs=1e-15)

    def test_sobolev_endpoints_are_exact(self, grid):
        f = random_bandlimited(grid, seed=14)
        assert check_interpolation_sobolev(f, 0.0, 3).ratio == pytest.approx(
            1.0, abs=1e-12)
        assert check_interpolation_sobolev(f, 3.0, 3).ratio == pytest.approx(
            1.0, abs=1e-12)

    def test_sobolev_single_mode_saturates(self, grid):
        f = from_function(grid, lambda x: np.sin(4.0 * x))
        for s in (0.5, 1.0, 1.7, 2.5):
            assert check_interpolation_sobolev(f, s, 3).ratio == pytest.approx(
                1.0, abs=1e-12)

    def test_sobolev_mixed_modes_stay_below_one(self, grid):
        f = random_bandlimited(grid, seed=15, decay=1.0)
        for s in (0.5, 1.5, 2.5):
            assert check_interpolation_sobolev(f, s, 3).ratio <= 1.0 + 1e-12

    def test_sobolev_range_validation(self, grid):
        f = random_bandlimited(grid, seed=16)
        with pytest.raises(ValueError):
            check_interpolation_sobolev(f, 4.0, 3)


def test_ratio_report_nan_contract():
    rep = RatioReport(1.0, 0.0, defined=False)
    assert math.isnan(rep.ratio)
    ok = RatioReport(3.0, 2.0, defined=True)
    assert ok.ratio == 1.5
