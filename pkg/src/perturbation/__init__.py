"""Small/semismall perturbation profiles and Green comparability."""

from .profile import (
    MODES,
    ComparabilityReport,
    ComparabilityRow,
    PerturbationProfile,
    TruncationRow,
    comparability_check,
    comparability_constant,
    decay_verdict,
    mode_ordering,
    require_subcritical,
    smallness_profile,
    smallness_profiles,
)

__all__ = [
    "MODES",
    "ComparabilityReport",
    "ComparabilityRow",
    "PerturbationProfile",
    "TruncationRow",
    "comparability_check",
    "comparability_constant",
    "decay_verdict",
    "mode_ordering",
    "require_subcritical",
    "smallness_profile",
    "smallness_profiles",
]
