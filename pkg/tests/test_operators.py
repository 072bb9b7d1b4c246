"""Dispersive multiplier, its kernel form, and the mollifier family."""

import math

import numpy as np
import pytest

from whithamlab import (
    apply_whitham,
    apply_whitham_sqrt,
    bump_transform,
    from_function,
    kernel_convolve,
    make_grid,
    mollifier_multiplier,
    mollify,
    whitham_sqrt_symbol,
    whitham_symbol,
)
from whithamlab.energy import max_norm
from whithamlab.initial_data import random_bandlimited
from whithamlab.operators import periodic_kernel


class TestSymbol:
    def test_value_at_zero_is_one(self):
        assert whitham_symbol(0.0) == 1.0

    def test_value_at_one(self):
        assert whitham_symbol(1.0) == pytest.approx(math.tanh(1.0), abs=1e-15)
        assert whitham_symbol(1.0) == pytest.approx(0.7615941559557649, abs=1e-15)

    def test_even(self):
        xi = np.linspace(0.1, 40.0, 57)
        np.testing.assert_allclose(whitham_symbol(xi), whitham_symbol(-xi), rtol=1e-15)

    def test_monotone_decreasing_and_bounded(self):
        xi = np.linspace(0.0, 60.0, 601)
        vals = whitham_symbol(xi)
        assert vals[0] == 1.0
        assert np.all(np.diff(vals) < 0.0)
        assert np.all(vals > 0.0)
        assert np.all(vals <= 1.0)

    def test_large_argument_decay(self):
        # tanh saturates, so the symbol behaves like 1/|xi|
        assert whitham_symbol(1e3) == pytest.approx(1e-3, rel=1e-12)

    def test_sqrt_symbol_squares_back(self):
        xi = np.linspace(0.0, 30.0, 301)
        np.testing.assert_allclose(whitham_sqrt_symbol(xi) ** 2, whitham_symbol(xi),
                                   rtol=1e-14)

    def test_scalar_in_scalar_out(self):
        assert isinstance(whitham_symbol(2.0), float)
        assert isinstance(whitham_sqrt_symbol(2.0), float)


class TestApply:
    def test_single_modes_scale_exactly(self):
        g = make_grid(64)
        for m in (1, 3, 10):
            f = from_function(g, lambda x, m=m: np.cos(m * x))
            got = apply_whitham(f)
            expected = (math.tanh(m) / m) * np.cos(m * g.x)
            np.testing.assert_allclose(got.samples, expected, atol=1e-14)

    def test_constant_is_fixed_point(self):
        g = make_grid(32)
        f = from_function(g, lambda x: np.full_like(x, 2.5))
        np.testing.assert_allclose(apply_whitham(f).samples, 2.5, atol=1e-14)

    def test_sqrt_composes_to_full_operator(self):
        g = make_grid(64)
        f = random_bandlimited(g, seed=5)
        twice = apply_whitham_sqrt(apply_whitham_sqrt(f))
        full = apply_whitham(f)
        np.testing.assert_allclose(twice.samples, full.samples, atol=1e-14)

    def test_self_adjoint(self):
        from whithamlab import inner
        g = make_grid(64)
        f = random_bandlimited(g, seed=1)
        h = random_bandlimited(g, seed=2)
        assert inner(apply_whitham(f), h) == pytest.approx(
            inner(f, apply_whitham(h)), rel=1e-12)


class TestKernel:
    def test_kernel_is_even(self):
        x = np.linspace(0.0, math.pi, 11)
        np.testing.assert_allclose(periodic_kernel(x, 50), periodic_kernel(-x, 50),
                                   rtol=1e-13)

    def test_truncation_zero_is_mean_term(self):
        assert periodic_kernel(0.7, 0) == 1.0

    def test_rejects_bad_truncation(self):
        with pytest.raises(ValueError):
            periodic_kernel(0.0, -1)

    def test_convolution_matches_multiplier_on_modes(self):
        g = make_grid(32)
        f = from_function(g, lambda x: np.cos(4.0 * x) - 0.5 * np.sin(7.0 * x))
        conv = kernel_convolve(f, M=512)
        spec = apply_whitham(f)
        assert max_norm(conv - spec) < 1e-6

    def test_convolution_is_exact_once_the_kernel_covers_the_band(self):
        # the quadrature grid removes aliasing, so a cutoff-8 field is
        # reproduced to round-off for any M >= 8
        g = make_grid(32)
        f = random_bandlimited(g, seed=9, cutoff=8)
        spec = apply_whitham(f)
        for M in (8, 64, 256):
            assert max_norm(kernel_convolve(f, M=M) - spec) < 1e-13

    def test_truncation_error_comes_from_the_uncovered_modes(self):
        # modes above M are dropped by the truncated kernel, so the error
        # shrinks as M sweeps through the band of the field
        g = make_grid(32)
        f = random_bandlimited(g, seed=9, cutoff=12, decay=0.5)
        spec = apply_whitham(f)
        errs = [max_norm(kernel_convolve(f, M=M) - spec) for M in (2, 5, 9)]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 0.01

    def test_requires_standard_period(self):
        f = from_function(make_grid(16, period=1.0), lambda x: np.cos(2 * math.pi * x))
        with pytest.raises(ValueError):
            kernel_convolve(f, M=32)


class TestBumpTransform:
    def test_unit_mass_normalization(self):
        assert bump_transform(0.0) == 1.0

    def test_even_and_bounded_by_one(self):
        xi = np.linspace(0.0, 25.0, 401)
        vals = bump_transform(xi)
        np.testing.assert_allclose(vals, bump_transform(-xi), rtol=1e-12)
        assert np.all(np.abs(vals) <= 1.0 + 1e-12)

    def test_envelope_decay(self):
        # the transform oscillates, so compare window envelopes rather
        # than single points
        lo = np.abs(bump_transform(np.linspace(5.0, 15.0, 400))).max()
        hi = np.abs(bump_transform(np.linspace(20.0, 40.0, 400))).max()
        assert hi < lo
        assert hi < 0.02


class TestMollifier:
    @pytest.mark.parametrize("eps", [0.0, -0.5, 1.5])
    def test_width_domain(self, eps):
        with pytest.raises(ValueError):
            mollifier_multiplier(make_grid(16), eps)

    def test_width_one_is_allowed(self):
        mult = mollifier_multiplier(make_grid(16), 1.0)
        assert mult.shape == (16,)

    def test_mode_zero_preserved(self):
        mult = mollifier_multiplier(make_grid(64), 0.5)
        assert mult[0] == 1.0
        assert np.all(np.abs(mult) <= 1.0)

    def test_mollify_preserves_mean(self):
        g = make_grid(64)
        f = random_bandlimited(g, seed=3, mean=1.7)
        sm = mollify(f, 0.25)
        assert float(np.mean(sm.samples)) == pytest.approx(
            float(np.mean(f.samples)), rel=1e-13)

    def test_mollify_converges_to_identity_quadratically(self):
        g = make_grid(128)
        f = from_function(g, lambda x: np.cos(3.0 * x) + 0.3 * np.sin(5.0 * x))
        errs = [max_norm(mollify(f, eps) - f) for eps in (0.4, 0.2, 0.1, 0.05)]
        assert all(a > b for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 5e-3
        # leading error term is quadratic in the width
        assert errs[-2] / errs[-1] == pytest.approx(4.0, abs=1.0)

    def test_mollify_commutes_with_derivative(self):
        from whithamlab import derivative
        g = make_grid(64)
        f = random_bandlimited(g, seed=8)
        a = derivative(mollify(f, 0.3), 2)
        b = mollify(derivative(f, 2), 0.3)
        np.testing.assert_allclose(a.samples, b.samples, atol=1e-11)

    def test_mollify_is_smoothing(self):
        # high modes are damped harder than low ones
        g = make_grid(128)
        mult = mollifier_multiplier(g, 0.5)
        low = abs(mult[2])
        high = abs(mult[g.nyquist_index - 1])
        assert high < low
