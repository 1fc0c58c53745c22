"""Label discovery in noisy point clouds relative to a background measure.

Thin wrapper over the C++ core. JSON-bearing objects cross the boundary as
strings; pair them with the standard :mod:`json` module.
"""

from ._labelkit import (  # noqa: F401
    AbsorbOrder,
    BackgroundNoise,
    CandidateResult,
    ConcentrationExponents,
    ConcentrationParams,
    ConicSpec,
    CovarianceEstimate,
    Dataset,
    DeltaF,
    ExperimentBundle,
    FeatureMap,
    GroundTruth,
    Interval,
    LabelAtlas,
    LabelCheck,
    LabelRecord,
    LabelSetEstimate,
    MassEstimate,
    MassSession,
    PendulumParameters,
    PendulumSpec,
    PotentialLabel,
    SearchConfig,
    SeedMode,
    Table,
    TruthMatch,
    VerifyReport,
    VerifyRow,
    candidate_label,
    candidate_label_rows,
    canonical_experiment_name,
    check_label,
    check_label_cached,
    concentration_probability_exponent,
    dataset_fingerprint,
    dedupe_similar,
    delta_f,
    estimate_covariance,
    estimate_label_set,
    estimate_label_set_cached,
    experiment_names,
    generate_conics,
    generate_pendulums,
    generate_preset,
    generator_preset_names,
    inverse_sqrt_spd,
    label_from_raw,
    label_search,
    label_to_raw,
    make_whitened,
    match_atlas_to_truth,
    match_label_to_truth,
    pendulum_from_label,
    pushforward_mass,
    recommend_delta,
    run_experiment,
    smin_ratio,
    smin_ratio_of,
    tight_interval,
    verify_atlas,
    whiten,
    write_experiment_bundle,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
