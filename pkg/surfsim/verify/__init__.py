#!/usr/bin/env python

"""
Bounded checks of the simulation relations between two systems.
"""

from surfsim.verify.refine import (
    RefinementReport, check_follows, check_models, check_equiv_productions,
    run_check, CHECKS, PASS, FAIL, INDETERMINATE,
)

__all__ = [
    "RefinementReport", "check_follows", "check_models", "check_equiv_productions",
    "run_check", "CHECKS", "PASS", "FAIL", "INDETERMINATE",
]
