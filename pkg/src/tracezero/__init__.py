"""Trace-zero certificates for three rational points on an elliptic curve.

For every prime of good reduction, :func:`certify_prime` produces an integer
3x3 matrix M with trace zero and M (P1, P2, P3)^T = (P1, P2, P3)^T over F_p,
together with everything needed to re-check it. :func:`independence_evidence`
and :func:`check_not_cm` test the global side: that no short integer relation
among the points survives many primes, and that the curve has no CM.
"""

from .certificate import (
    IndependenceReport,
    PrimeCertificate,
    Setup,
    build_matrix,
    certify_prime,
    check_gcd_one,
    check_not_cm,
    independence_evidence,
    load_setup,
    seed_setup,
    verify_certificate,
)
from .curve import FpCurve, RationalCurve, reduce_curve, reduce_point
from .ecgroup import GroupStructure, coordinates, discrete_log, group_order, structure, weil_pairing
from .zlattice import RelationLattice, alpha_triple, hnf, intersect, kernel_lattice, relation_row

__version__ = "0.1.0"
