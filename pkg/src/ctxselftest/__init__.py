"""Robust self-testing certificates for noncontextuality inequalities."""

from .certificates import (
    CertificationReport,
    DualCertificate,
    NondegeneracyVerdict,
    Verdict,
    build_cycle_dual,
    certify_self_test,
    check_nondegeneracy,
    verify_complementarity,
    verify_dual_feasible,
)
from .graphs import ExclusivityGraph, cycle_graph, weighted_independence_number
from .realizations import QuantumRealization, align, canonical_kcbs, realization_from_gram
from .theta_sdp import SdpSolution, build_problem, cycle_theta_closed_form, solve

__version__ = "0.1.0"
