"""
Result Validation Module
========================
Compares empirical experiment results against analytic predictions and
reference values, producing the analytic / empirical / tolerance / pass
entries of the run summary.
"""
import math
from typing import Dict, List, Optional, Sequence, Tuple

from .state import CheckResult


class ToleranceValidator:
    """Validates that measured quantities match their predictions"""

    @staticmethod
    def numbers_match(num1: float, num2: float, tolerance: float) -> bool:
        """
        Absolute comparison |num1 - num2| <= tolerance

        Args:
            num1: First number
            num2: Second number
            tolerance: Absolute tolerance

        Returns:
            False when either number is not finite
        """
        if not (math.isfinite(num1) and math.isfinite(num2)):
            return False
        return abs(num1 - num2) <= tolerance

    @classmethod
    def check(
        cls,
        name: str,
        empirical: float,
        analytic: Optional[float] = None,
        tolerance: Optional[float] = None,
    ) -> CheckResult:
        """
        One comparison; without an analytic value or tolerance the check is informational

        Returns:
            CheckResult with passed=None for informational entries
        """
        passed = None
        if analytic is not None and tolerance is not None:
            passed = cls.numbers_match(float(empirical), float(analytic), float(tolerance))
        return CheckResult(
            name=name,
            analytic=None if analytic is None else float(analytic),
            empirical=float(empirical),
            tolerance=None if tolerance is None else float(tolerance),
            passed=passed,
        )

    @staticmethod
    def check_bound(
        name: str,
        empirical: float,
        lower: Optional[float] = None,
        upper: Optional[float] = None,
    ) -> CheckResult:
        """One-sided check; the bound is reported as the analytic value with zero tolerance"""
        if (lower is None) == (upper is None):
            raise ValueError("Give exactly one of lower or upper")
        value = float(empirical)
        if lower is not None:
            passed = math.isfinite(value) and value >= lower
            bound = lower
        else:
            passed = math.isfinite(value) and value <= upper
            bound = upper
        return CheckResult(name=name, analytic=float(bound), empirical=value, tolerance=0.0, passed=passed)

    @staticmethod
    def check_ordering(
        name: str,
        means: Sequence[float],
        sems: Sequence[float],
        verdict: bool = True,
    ) -> CheckResult:
        """
        Strictly decreasing means with every gap larger than the combined standard error

        Args:
            name: Check name
            means: Values expected in decreasing order
            sems: Standard errors of the means
            verdict: False reports the smallest gap without a pass/fail entry

        Returns:
            CheckResult whose empirical value is the smallest gap in units of its error
        """
        if len(means) != len(sems):
            raise ValueError("means and sems must have the same length")
        if len(means) < 2:
            return CheckResult(name=name, empirical=float("nan"), passed=None)
        ratios = []
        for (m1, s1), (m2, s2) in zip(zip(means, sems), zip(means[1:], sems[1:])):
            error = math.hypot(s1, s2)
            gap = m1 - m2
            ratios.append(gap / error if error > 0 else (math.inf if gap > 0 else -math.inf))
        worst = min(ratios)
        if not verdict:
            return CheckResult(name=name, analytic=None, empirical=worst, tolerance=None, passed=None)
        return CheckResult(name=name, analytic=None, empirical=worst, tolerance=1.0, passed=worst > 1.0)

    @staticmethod
    def collect(checks: List[CheckResult]) -> Tuple[Dict[str, Optional[float]], Dict[str, float],
                                                     Dict[str, Optional[float]], Dict[str, Optional[bool]]]:
        """Split checks into the analytic / empirical / tolerance / pass mappings"""
        analytic = {c.name: c.analytic for c in checks}
        empirical = {c.name: c.empirical for c in checks}
        tolerance = {c.name: c.tolerance for c in checks}
        passed = {c.name: c.passed for c in checks}
        return analytic, empirical, tolerance, passed

    @staticmethod
    def all_passed(checks: List[CheckResult]) -> bool:
        """True unless some check with a verdict failed"""
        return all(c.passed is not False for c in checks)

    @classmethod
    def format_report(cls, checks: List[CheckResult]) -> str:
        """
        Plain-text table of checks

        Args:
            checks: Results to report

        Returns:
            One line per check with its verdict
        """
        lines = []
        for c in checks:
            if c.passed is None:
                verdict = "INFO"
            else:
                verdict = "PASS" if c.passed else "FAIL"
            analytic = "-" if c.analytic is None else f"{c.analytic:.4f}"
            tolerance = "-" if c.tolerance is None else f"{c.tolerance:g}"
            lines.append(f"[{verdict:4}] {c.name:40} empirical={c.empirical:.4f} analytic={analytic} tol={tolerance}")
        return "\n".join(lines)
