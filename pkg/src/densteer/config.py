"""Central numeric tolerances.

All thresholds used by the linear-algebra and solver layers live in one
record so that they can be inspected or tightened in one place.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    #: relative symmetry test: ||M - M.T||_F <= symmetry_rtol * max(1, ||M||_F)
    symmetry_rtol: float = 1e-10
    #: eigenvalues of a PSD input may dip this far below zero before rejection
    psd_atol: float = 1e-10
    #: smallest eigenvalue a strictly-PD matrix must exceed
    pd_atol: float = 1e-12
    #: relative cutoff for rank decisions (pseudo-inverse, invertibility)
    rank_rtol: float = 1e-12
    #: relative mass allowed outside a support before KL is declared infinite
    support_rtol: float = 1e-9
    #: tolerance for policy/prior class-membership checks
    class_atol: float = 1e-9
    #: absolute slack allowed in monotone-descent checks
    descent_slack: float = 1e-10
    #: relative prior change below which alternation may stop early
    prior_stop_rtol: float = 1e-10


DEFAULT = Tolerances()
