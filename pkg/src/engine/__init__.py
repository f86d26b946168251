# Engine Package
from .inequalities import Instance, BoundReport, check_theorem, dw_lower_bound, dw_upper_bound
from .feasibility import ConstraintSet, FeasibilityResult, FeasibilityStatus, solve_state_feasibility
from .certifier import Certificate, CaseTag, certify, verify_certificate

__all__ = [
    'Instance', 'BoundReport', 'check_theorem', 'dw_lower_bound', 'dw_upper_bound',
    'ConstraintSet', 'FeasibilityResult', 'FeasibilityStatus', 'solve_state_feasibility',
    'Certificate', 'CaseTag', 'certify', 'verify_certificate',
]
