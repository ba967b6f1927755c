"""Numerical toolkit for timelike minimal Lagrangian surfaces in the indefinite
complex hyperbolic plane, built from solutions of the Tzitzeica equation."""
from .frame import (build_coordinate_mc, build_general_mc, build_minimal_mc, compute_L_integral,
                    flatness_residual, gauge_by_G, integrate_frame, path_independence)
from .gaussmap import gauss3, normalized_frame, primitive_check, quasi_symmetric_check, split_alpha
from .linalg import herm_form, is_su21, is_u21, mat_exp, u21_inverse
from .loops import (RealFormId, eigenspace_project, real_form_apply, relation_check,
                    twisted_loop_check)
from .surface import (closure_check_clifford, export_surface, lift_from_frame, oracle_clifford,
                      oracle_rp, project_to_ch, recover_invariants, verify_lift)
from .tzitzeica import GoursatData, residual, solve_goursat

__version__ = "0.1.0"

__all__ = [
    "build_coordinate_mc", "build_general_mc", "build_minimal_mc", "compute_L_integral",
    "flatness_residual", "gauge_by_G", "integrate_frame", "path_independence", "gauss3",
    "normalized_frame", "primitive_check", "quasi_symmetric_check", "split_alpha", "herm_form",
    "is_su21", "is_u21", "mat_exp", "u21_inverse", "RealFormId", "eigenspace_project",
    "real_form_apply", "relation_check", "twisted_loop_check", "closure_check_clifford",
    "export_surface", "lift_from_frame", "oracle_clifford", "oracle_rp", "project_to_ch",
    "recover_invariants", "verify_lift", "GoursatData", "residual", "solve_goursat",
]
