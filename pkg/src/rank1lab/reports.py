"""Verdict vocabulary shared by the verification reports.

INCONCLUSIVE marks a resolution budget running out (interval wider than the
tolerance), which is distinct from an actual counterexample.
"""

from __future__ import annotations

from fractions import Fraction

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 3}


def classify_deviation(dev_lo: Fraction, dev_hi: Fraction, tol: Fraction) -> str:
    """PASS if certainly within tol, FAIL if certainly beyond, else INCONCLUSIVE."""
    if dev_hi <= tol:
        return PASS
    if dev_lo > tol:
        return FAIL
    return INCONCLUSIVE


def combine(statuses) -> str:
    worst = PASS
    for status in statuses:
        if status == FAIL:
            return FAIL
        if status == INCONCLUSIVE:
            worst = INCONCLUSIVE
    return worst
