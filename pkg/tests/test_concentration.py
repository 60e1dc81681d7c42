"""Bernstein thresholds, moment prechecks, tail simulations, sup lemma."""

import math

import numpy as np
import pytest

from rates_lab.concentration import (
    BernsteinParams,
    DistributionSpec,
    bernstein_tail_check,
    bernstein_threshold,
    matched_parameters,
    mean_vector,
    moment_precheck,
    norm_moment,
    sample_summands,
    sup_fraction,
)


class TestThreshold:
    def test_moment_form_value(self):
        params = BernsteinParams(sigma=1.0, B=1.0, n=100, tau=1.0, variant="moment_form")
        assert bernstein_threshold(params) == pytest.approx(0.46721359549995795, rel=1e-15)

    def test_sup_form_value(self):
        params = BernsteinParams(sigma=1.0, B=1.0, n=100, tau=1.0, variant="sup_form")
        assert bernstein_threshold(params) == pytest.approx(0.44, rel=1e-15)

    def test_linear_in_tau(self):
        base = BernsteinParams(sigma=1.0, B=1.0, n=100, tau=1.0)
        double = BernsteinParams(sigma=1.0, B=1.0, n=100, tau=2.0)
        assert bernstein_threshold(double) == pytest.approx(2.0 * bernstein_threshold(base), rel=1e-15)

    def test_decreasing_in_n(self):
        values = [
            bernstein_threshold(BernsteinParams(sigma=1.0, B=1.0, n=n, tau=1.0))
            for n in (10, 100, 1000, 10000)
        ]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestParamsValidation:
    def test_tau_below_one(self):
        with pytest.raises(ValueError):
            BernsteinParams(sigma=1.0, B=1.0, n=10, tau=0.99)

    def test_bad_variant(self):
        with pytest.raises(ValueError):
            BernsteinParams(sigma=1.0, B=1.0, n=10, tau=1.0, variant="hoeffding")

    def test_non_positive_scales(self):
        with pytest.raises(ValueError):
            BernsteinParams(sigma=0.0, B=1.0, n=10, tau=1.0)
        with pytest.raises(ValueError):
            BernsteinParams(sigma=1.0, B=-1.0, n=10, tau=1.0)

    def test_bad_distribution(self):
        with pytest.raises(ValueError):
            DistributionSpec(kind="cauchy", dim=2, scale=1.0)
        with pytest.raises(ValueError):
            DistributionSpec(kind="gaussian", dim=0, scale=1.0)
        with pytest.raises(ValueError):
            DistributionSpec(kind="sphere", dim=2, scale=0.0)


class TestNormMoment:
    def test_gaussian_second_moment_is_dimension(self):
        spec = DistributionSpec(kind="gaussian", dim=3, scale=1.0)
        assert norm_moment(spec, 2) == pytest.approx(3.0, rel=1e-12)

    def test_gaussian_chi_moments_match_monte_carlo(self):
        spec = DistributionSpec(kind="gaussian", dim=4, scale=0.5)
        rng = np.random.default_rng(79)
        norms = np.linalg.norm(sample_summands(spec, 200_000, rng), axis=1)
        for m in (1, 2, 3):
            mc = float(np.mean(norms**m))
            assert norm_moment(spec, m) == pytest.approx(mc, rel=0.02)

    def test_sphere_and_constant_are_degenerate(self):
        for kind in ("sphere", "constant"):
            spec = DistributionSpec(kind=kind, dim=5, scale=2.0)
            for m in (1, 2, 4):
                assert norm_moment(spec, m) == pytest.approx(2.0**m, rel=1e-15)

    def test_negative_order_rejected(self):
        spec = DistributionSpec(kind="sphere", dim=2, scale=1.0)
        with pytest.raises(ValueError):
            norm_moment(spec, -1)


class TestMatchedParameters:
    def test_gaussian_sigma_squared_is_second_moment(self):
        spec = DistributionSpec(kind="gaussian", dim=3, scale=1.0)
        params = matched_parameters(spec, n=50, tau=1.0, variant="moment_form")
        assert params.sigma**2 == pytest.approx(3.0, rel=1e-12)
        moment_precheck(params, spec)

    def test_gaussian_sup_form_rejected(self):
        spec = DistributionSpec(kind="gaussian", dim=3, scale=1.0)
        with pytest.raises(ValueError, match="bounded"):
            matched_parameters(spec, n=50, tau=1.0, variant="sup_form")

    def test_bounded_kinds_satisfy_both_variants(self):
        """Matched sphere parameters pass the precheck under either hypothesis."""
        spec = DistributionSpec(kind="sphere", dim=4, scale=1.5)
        for variant in ("moment_form", "sup_form"):
            params = matched_parameters(spec, n=20, tau=1.0, variant=variant)
            assert params.sigma == 1.5
            assert params.B == 1.5
            moment_precheck(params, spec)


class TestMomentPrecheck:
    def test_failure_lists_offending_orders(self):
        spec = DistributionSpec(kind="gaussian", dim=3, scale=1.0)
        tight = BernsteinParams(sigma=1.0, B=0.01, n=10, tau=1.0, variant="moment_form")
        with pytest.raises(ValueError, match="m=3"):
            moment_precheck(tight, spec)

    def test_sup_form_scale_above_bound(self):
        spec = DistributionSpec(kind="sphere", dim=3, scale=2.0)
        params = BernsteinParams(sigma=2.0, B=1.0, n=10, tau=1.0, variant="sup_form")
        with pytest.raises(ValueError, match="exceeds B"):
            moment_precheck(params, spec)


class TestTailSimulation:
    def test_constant_summands_never_deviate(self):
        spec = DistributionSpec(kind="constant", dim=3, scale=1.0)
        params = matched_parameters(spec, n=10, tau=1.0, variant="sup_form")
        report = bernstein_tail_check(params, spec, trials=500, seed=1)
        assert report.violation_rate == 0.0
        assert report.passed

    def test_sphere_sup_form(self):
        spec = DistributionSpec(kind="sphere", dim=4, scale=1.0)
        params = matched_parameters(spec, n=50, tau=1.0, variant="sup_form")
        report = bernstein_tail_check(params, spec, trials=2000, seed=2)
        assert report.passed
        assert report.tail_target == pytest.approx(min(1.0, 2.0 * math.exp(-1.0)), rel=1e-15)

    def test_gaussian_moment_form(self):
        spec = DistributionSpec(kind="gaussian", dim=3, scale=1.0)
        params = matched_parameters(spec, n=100, tau=1.0, variant="moment_form")
        report = bernstein_tail_check(params, spec, trials=1000, seed=3)
        assert report.passed

    def test_deterministic_given_seed(self):
        spec = DistributionSpec(kind="gaussian", dim=2, scale=1.0)
        params = matched_parameters(spec, n=20, tau=1.0, variant="moment_form")
        a = bernstein_tail_check(params, spec, trials=400, seed=7)
        b = bernstein_tail_check(params, spec, trials=400, seed=7)
        assert a.violation_rate == b.violation_rate

    def test_precheck_runs_first(self):
        spec = DistributionSpec(kind="gaussian", dim=3, scale=1.0)
        bad = BernsteinParams(sigma=0.1, B=0.1, n=10, tau=1.0, variant="moment_form")
        with pytest.raises(ValueError, match="precheck"):
            bernstein_tail_check(bad, spec, trials=10)

    def test_mean_vector_only_constant_is_nonzero(self):
        assert mean_vector(DistributionSpec(kind="gaussian", dim=3, scale=1.0)).tolist() == [0, 0, 0]
        np.testing.assert_array_equal(
            mean_vector(DistributionSpec(kind="constant", dim=3, scale=2.0)), [2.0, 0.0, 0.0]
        )


class TestSupFraction:
    def test_half_power(self):
        # sup t^(1/2)/(1+t) over t >= 0 is 1/2 at t = 1
        value, argmax = sup_fraction(1.0, 0.5)
        assert value == pytest.approx(0.5, rel=1e-15)
        assert argmax == pytest.approx(1.0, rel=1e-15)

    def test_b_zero(self):
        value, argmax = sup_fraction(4.0, 0.0)
        assert value == pytest.approx(0.25, rel=1e-15)
        assert argmax == 0.0

    def test_b_one(self):
        value, argmax = sup_fraction(3.0, 1.0)
        assert value == 1.0
        assert math.isinf(argmax)

    def test_closed_form_and_envelope_on_random_inputs(self):
        """Grid search never beats the closed form; the two-sided envelope holds."""
        rng = np.random.default_rng(83)
        t_grid = np.linspace(0.0, 200.0, 400_001)
        for _ in range(50):
            a = float(10.0 ** rng.uniform(-1.5, 1.5))
            b = float(rng.uniform(0.01, 0.99))
            value, argmax = sup_fraction(a, b)
            envelope = a ** (b - 1.0)
            assert 0.5 * envelope - 1e-12 <= value <= envelope + 1e-12
            with np.errstate(divide="ignore", invalid="ignore"):
                grid_vals = t_grid**b / (a + t_grid)
            grid_best = float(np.nanmax(grid_vals))
            assert grid_best <= value * (1.0 + 1e-9)
            assert value == pytest.approx(argmax**b / (a + argmax), rel=1e-12)

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            sup_fraction(0.0, 0.5)
        with pytest.raises(ValueError):
            sup_fraction(1.0, 1.5)
