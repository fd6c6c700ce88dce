"""
Unit Tests for Result Validation Module
=======================================
Tests the ToleranceValidator class that compares empirical experiment
results against analytic predictions.
"""

import math

import pytest

from tomochaos.state import CheckResult
from tomochaos.validation import ToleranceValidator


class TestToleranceValidator:
    """Test suite for ToleranceValidator"""

    def test_numbers_match_within_tolerance(self):
        """Test absolute comparison inside the tolerance"""
        assert ToleranceValidator.numbers_match(4.80, 4.85, 0.15)
        assert ToleranceValidator.numbers_match(4.85, 4.85, 0.0)

    def test_numbers_match_outside_tolerance(self):
        """Test absolute comparison outside the tolerance"""
        assert not ToleranceValidator.numbers_match(4.60, 4.85, 0.15)

    def test_numbers_match_rejects_nan(self):
        """Test that NaN never matches"""
        assert not ToleranceValidator.numbers_match(float("nan"), 1.0, 10.0)
        assert not ToleranceValidator.numbers_match(1.0, math.inf, 10.0)

    def test_check_passes(self):
        """Test a value within tolerance"""
        result = ToleranceValidator.check("ParityBlockCOE", 4.69, analytic=4.664, tolerance=0.07)
        assert result.passed is True
        assert result.analytic == pytest.approx(4.664)
        assert result.tolerance == 0.07

    def test_check_fails(self):
        """Test a value outside tolerance"""
        result = ToleranceValidator.check("HaarPerStep", 5.9, analytic=6.0868, tolerance=0.02)
        assert result.passed is False

    def test_check_without_prediction_is_informational(self):
        """Test that no analytic value means no verdict"""
        result = ToleranceValidator.check("grid_coverage", 0.93)
        assert result.passed is None
        assert result.analytic is None

    def test_check_without_tolerance_is_informational(self):
        """Test that no tolerance means no verdict"""
        result = ToleranceValidator.check("haar_entropy", 6.0, analytic=6.08)
        assert result.passed is None

    def test_check_bound_upper(self):
        """Test that upper bounds report the bound as analytic with zero tolerance"""
        result = ToleranceValidator.check_bound("parity_rank", 220, upper=220)
        assert result.passed is True
        assert result.analytic == 220.0
        assert result.tolerance == 0.0
        assert ToleranceValidator.check_bound("parity_rank", 221, upper=220).passed is False

    def test_check_bound_lower(self):
        """Test a lower bound"""
        assert ToleranceValidator.check_bound("coverage", 0.9, lower=0.8).passed is True
        assert ToleranceValidator.check_bound("coverage", 0.7, lower=0.8).passed is False
        assert ToleranceValidator.check_bound("coverage", float("nan"), lower=0.8).passed is False

    def test_check_bound_needs_one_side(self):
        """Test that exactly one bound must be given"""
        with pytest.raises(ValueError):
            ToleranceValidator.check_bound("x", 1.0)
        with pytest.raises(ValueError):
            ToleranceValidator.check_bound("x", 1.0, lower=0.0, upper=2.0)

    def test_ordering_resolved(self):
        """Test that gaps well above the combined error pass"""
        result = ToleranceValidator.check_ordering("fidelity_ordering", [0.9, 0.7, 0.4], [0.01, 0.02, 0.01])
        assert result.passed is True
        assert result.empirical > 1.0

    def test_ordering_within_noise(self):
        """Test that gaps inside the noise fail"""
        result = ToleranceValidator.check_ordering("fidelity_ordering", [0.9, 0.89], [0.02, 0.02])
        assert result.passed is False

    def test_ordering_inverted(self):
        """Test that an inverted ordering fails"""
        result = ToleranceValidator.check_ordering("fidelity_ordering", [0.5, 0.8], [0.0, 0.0])
        assert result.passed is False
        assert result.empirical == -math.inf

    def test_ordering_single_curve(self):
        """Test that a single curve has nothing to order"""
        result = ToleranceValidator.check_ordering("fidelity_ordering", [0.9], [0.01])
        assert result.passed is None

    def test_ordering_without_verdict(self):
        """Test that an informational ordering keeps its gap but has no pass entry"""
        result = ToleranceValidator.check_ordering("fidelity_ordering", [0.5, 0.8], [0.01, 0.01], verdict=False)
        assert result.passed is None
        assert result.tolerance is None
        assert result.empirical < 0.0

    def test_ordering_length_mismatch(self):
        """Test that means and errors must have the same length"""
        with pytest.raises(ValueError):
            ToleranceValidator.check_ordering("x", [0.9, 0.8], [0.01])


class TestCheckAggregation:
    """Test summary mappings and reports"""

    @pytest.fixture
    def checks(self):
        return [
            CheckResult(name="CUE", analytic=5.35, empirical=5.33, tolerance=0.07, passed=True),
            CheckResult(name="curve_gap", empirical=0.16),
            CheckResult(name="HaarPerStep", analytic=6.09, empirical=6.0, tolerance=0.02, passed=False),
        ]

    def test_collect(self, checks):
        """Test the four summary maps"""
        analytic, empirical, tolerance, passed = ToleranceValidator.collect(checks)
        assert set(analytic) == {"CUE", "curve_gap", "HaarPerStep"}
        assert analytic["curve_gap"] is None
        assert empirical["CUE"] == 5.33
        assert tolerance["HaarPerStep"] == 0.02
        assert passed == {"CUE": True, "curve_gap": None, "HaarPerStep": False}

    def test_all_passed_ignores_informational(self, checks):
        """Test that informational checks do not count toward all_passed"""
        assert not ToleranceValidator.all_passed(checks)
        assert ToleranceValidator.all_passed(checks[:2])
        assert ToleranceValidator.all_passed([])

    def test_format_report(self, checks):
        """Test the text report"""
        report = ToleranceValidator.format_report(checks)
        lines = report.splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("[PASS]")
        assert lines[1].startswith("[INFO]")
        assert lines[2].startswith("[FAIL]")
