"""Numerical laboratory for pinching cones of algebraic curvature operators."""

from .cones import (ConeSpec, Membership, ScanReport, check_inclusions, delta_n, epsilon_n,
                    epsilon_n_exact, f_and_df, member, resolve_a, ricci_positivity, sample_boundary,
                    sample_member, scan_invariance)
from .curvature import (CurvatureOperator, DecompositionParts, decompose, from_tensor, lambda_bar,
                        random_curvature, ricci, rotate, scalar, to_tensor, wedge)
from .errors import (DomainError, IntegrationError, InvalidArgumentError, UnsupportedDimensionError,
                     UnsupportedError)
from .hamilton import OdeTrajectory, integrate, q_of, sharp, sharp_ad, tri
from .identities import (CheckResult, equality_witness, verify_identity, verify_inequality)
from .kahler import (KahlerCurvatureOperator, KahlerFieldSample, bundle_norm_report, choose_tau,
                     cone_margin, e_operator, kahler_decompose, lift, lift_general, pinching_check,
                     pinching_implies_cone, star)

__version__ = "0.1.0"

__all__ = [
    "ConeSpec", "Membership", "ScanReport", "check_inclusions", "delta_n", "epsilon_n",
    "epsilon_n_exact", "f_and_df", "member", "resolve_a", "ricci_positivity", "sample_boundary",
    "sample_member", "scan_invariance",
    "CurvatureOperator", "DecompositionParts", "decompose", "from_tensor", "lambda_bar",
    "random_curvature", "ricci", "rotate", "scalar", "to_tensor", "wedge",
    "DomainError", "IntegrationError", "InvalidArgumentError", "UnsupportedDimensionError",
    "UnsupportedError",
    "OdeTrajectory", "integrate", "q_of", "sharp", "sharp_ad", "tri",
    "CheckResult", "equality_witness", "verify_identity", "verify_inequality",
    "KahlerCurvatureOperator", "KahlerFieldSample", "bundle_norm_report", "choose_tau",
    "cone_margin", "e_operator", "kahler_decompose", "lift", "lift_general", "pinching_check",
    "pinching_implies_cone", "star",
]
