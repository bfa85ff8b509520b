"""Restriction phenomena on the discrete parabola: exact counts, certified
inequalities, and sparse recovery over (Z/NZ)^2."""

from .fourier import (
    Signal2D,
    Spectrum2D,
    dft,
    idft,
    lp_norm,
    normalized_lp_norm,
    signal_from_json,
    signal_to_json,
    spectrum_from_json,
)
from .parabola import (
    DecayProfile,
    EnergyReport,
    ParabolaSet,
    build_parabola,
    decay_profile,
    energy_exact,
    exp_sum,
    extend_from,
    restrict_to,
)
from .recovery import (
    LoganParams,
    RecoveryProblem,
    RecoveryResult,
    SweepRow,
    erase,
    least_squares_recover,
    logan_recover,
    project_feasible,
    random_instance,
    threshold_sweep,
)
from .restriction import (
    ProbeResult,
    RestrictionParams,
    RestrictionReport,
    UncertaintyVerdict,
    UniversalCertificate,
    certified_constant,
    duality_chain,
    restriction_lhs,
    sharpness_probe,
    uncertainty_search,
    universal_certificate,
    verify_dual,
    verify_l1_l2,
    verify_main_theorem,
    verify_restriction,
)
from .rng import spawn_rng
from .zmod import RingContext, count_square_roots, crt_combine, make_ring, square_roots_mod

__version__ = "0.1.0"

__all__ = [
    "DecayProfile",
    "EnergyReport",
    "LoganParams",
    "ParabolaSet",
    "ProbeResult",
    "RecoveryProblem",
    "RecoveryResult",
    "RestrictionParams",
    "RestrictionReport",
    "RingContext",
    "Signal2D",
    "Spectrum2D",
    "SweepRow",
    "UncertaintyVerdict",
    "UniversalCertificate",
    "build_parabola",
    "certified_constant",
    "count_square_roots",
    "crt_combine",
    "decay_profile",
    "dft",
    "duality_chain",
    "energy_exact",
    "erase",
    "exp_sum",
    "extend_from",
    "idft",
    "least_squares_recover",
    "logan_recover",
    "lp_norm",
    "make_ring",
    "normalized_lp_norm",
    "project_feasible",
    "random_instance",
    "restrict_to",
    "restriction_lhs",
    "sharpness_probe",
    "signal_from_json",
    "signal_to_json",
    "spawn_rng",
    "spectrum_from_json",
    "square_roots_mod",
    "threshold_sweep",
    "uncertainty_search",
    "universal_certificate",
    "verify_dual",
    "verify_l1_l2",
    "verify_main_theorem",
    "verify_restriction",
    "__version__",
]
