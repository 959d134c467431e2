"""Finite-dimensional lab for the D_h family, spectral projectors and Frölicher-type inequalities."""

from .catalog import CATALOG, iwasawa, kodaira_thurston, random_metric, torus
from .complex import EXACT, FLOAT, BigradedComplex, direct_sum, total_view, validate_complex
from .covering import build_cover, gamma_dim, l2_report, sector_injectivity, torus_cover
from .errors import FrolabError
from .frolicher import (ddbar_detect, euler_relation_check, frolicher_check, kodaira_spencer_check,
                        q_injection, theta_h)
from .hodge import (HermitianMetric, aeppli, betti, bott_chern, build_dh, hodge_dbar, hodge_decomposition,
                    hodge_del, kernel_dim)
from .io import load_complex, save_complex
from .lie import from_lie_algebra, from_structure_equations
from .spectral import (h_sweep, projector_injectivity, reed_simon_criterion, resolvent_distance,
                       spectral_data, spectral_density, spectral_projector)

__version__ = "0.1.0"
