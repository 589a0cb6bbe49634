"""kposi: compounds, sign-regularity, and k-diagonal stability certificates.

Library plus CLI for multiplicative compound matrices and wedge
products, sign-regularity classification, diagonal Stein certificates
at compound order, cyclic chain matrices, and simulation of nonlinear
updates x(j+1) = A phi(x(j)) with wedge-trajectory Lyapunov
diagnostics.
"""

from .compound import WedgeVector, k_content, mult_compound, wedge
from .cyclic import CyclicAnalysis, CyclicSpec, analyze_cyclic, build_cyclic
from .errors import CapacityError, DomainError, KposiError, NumericError, PreconditionError
from .matcore import (
    LexIndexSet,
    PdCheck,
    SpectralReport,
    is_positive_definite,
    lex_index_sets,
    minor,
    minor_table,
    spectral_report,
)
from .nonlinear import (
    ContentReport,
    LyapunovReport,
    NonlinearSystem,
    ScalarMap,
    SimResult,
    WedgeTrajectory,
    check_k_content_preserving,
    eval_phi,
    export_trajectory_csv,
    lyapunov_decrement_report,
    simulate,
    wedge_trajectory,
)
from .signreg import (
    ConeSamplingReport,
    KPositivityReport,
    SignClass,
    classify_sign_regularity,
    cone_membership,
    is_k_positive_system,
    sampled_cone_invariance,
    sign_variations,
)
from .stability import (
    CertificationFailure,
    KDiagCertificate,
    NecessaryConditionReport,
    SchurCheck,
    SteinCheck,
    cayley,
    certify_k_diag_stability,
    construct_dlf_nonneg,
    dlf_compound,
    is_schur,
    necessary_ct_diag,
    necessary_dt_diag,
    solve_top_compound_diagonal,
    stein_holds,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CertificationFailure",
    "ConeSamplingReport",
    "ContentReport",
    "CyclicAnalysis",
    "CyclicSpec",
    "DomainError",
    "KDiagCertificate",
    "KPositivityReport",
    "KposiError",
    "LexIndexSet",
    "LyapunovReport",
    "NecessaryConditionReport",
    "NonlinearSystem",
    "NumericError",
    "PdCheck",
    "PreconditionError",
    "ScalarMap",
    "SchurCheck",
    "SignClass",
    "SimResult",
    "SpectralReport",
    "SteinCheck",
    "WedgeTrajectory",
    "WedgeVector",
    "analyze_cyclic",
    "build_cyclic",
    "cayley",
    "certify_k_diag_stability",
    "check_k_content_preserving",
    "classify_sign_regularity",
    "cone_membership",
    "construct_dlf_nonneg",
    "dlf_compound",
    "eval_phi",
    "export_trajectory_csv",
    "is_k_positive_system",
    "is_positive_definite",
    "is_schur",
    "k_content",
    "lex_index_sets",
    "lyapunov_decrement_report",
    "minor",
    "minor_table",
    "mult_compound",
    "necessary_ct_diag",
    "necessary_dt_diag",
    "sampled_cone_invariance",
    "sign_variations",
    "simulate",
    "solve_top_compound_diagonal",
    "spectral_report",
    "stein_holds",
    "wedge",
    "wedge_trajectory",
]
