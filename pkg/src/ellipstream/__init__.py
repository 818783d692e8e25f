"""Streaming ellipsoidal rounding: maintain a sandwich
center + alpha*E inside conv(points) inside center + E with monotone
per-point updates, plus a hull coreset selector, a lower-bound adversary,
and brute-force verification oracles.
"""

from .ellipsoid import (
    Ellipsoid,
    ScaledEllipsoid,
    containment_margin,
    contains_ellipsoid,
    log_volume,
    membership,
    support,
)
from .state import Phase, RoundingState
from .update_rule import (
    UpdateError,
    UpdateParams,
    compute_params,
    full_update,
    full_update_detailed,
    irregular_update,
    is_off_span,
    solve_gamma,
)
from .streaming import RunReport, StepRecord, run_fully_online, run_seeded
from .coreset import CoresetTrace, coreset_step, run_coreset
from .adversary import (
    AdversaryTrace,
    library_rule,
    run_adversary,
    shell_point,
    simplex_vertices,
)
from .oracle import (
    StepCertificate,
    check_monotone_step,
    hull_membership,
    inequality_suite,
    mvee_khachiyan,
)

__version__ = "0.1.0"

__all__ = [
    "Ellipsoid",
    "ScaledEllipsoid",
    "containment_margin",
    "contains_ellipsoid",
    "log_volume",
    "membership",
    "support",
    "Phase",
    "RoundingState",
    "UpdateError",
    "UpdateParams",
    "compute_params",
    "full_update",
    "full_update_detailed",
    "irregular_update",
    "is_off_span",
    "solve_gamma",
    "RunReport",
    "StepRecord",
    "run_fully_online",
    "run_seeded",
    "CoresetTrace",
    "coreset_step",
    "run_coreset",
    "AdversaryTrace",
    "library_rule",
    "run_adversary",
    "shell_point",
    "simplex_vertices",
    "StepCertificate",
    "check_monotone_step",
    "hull_membership",
    "inequality_suite",
    "mvee_khachiyan",
    "__version__",
]
