#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "labelkit/data.hpp"
#include "labelkit/rmt.hpp"
#include "labelkit/search.hpp"

namespace labelkit {

// Plot-ready numeric table, written as one CSV per table.
struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string to_csv() const;
};

// Everything a reproduction run produces. `metrics` holds only seed-determined
// quantities (never wall-clock times), so reruns with the same seed are
// byte-identical.
struct ExperimentBundle {
    std::string name;
    std::uint64_t seed = 0;
    nlohmann::json metrics;
    std::optional<Dataset> dataset;
    std::optional<LabelAtlas> atlas;
    std::vector<Table> tables;
};

std::vector<std::string> experiment_names();
// Resolves aliases ("two-circles-noisy" -> "two-circles-noise"); throws
// std::invalid_argument for unknown names.
std::string canonical_experiment_name(const std::string& name);

ExperimentBundle run_experiment(const std::string& name,
                                std::optional<std::uint64_t> seed_override = std::nullopt);

// Dataset-only presets for the generate command (same pinned constants as the
// experiments; "pure-noise" additionally available).
std::vector<std::string> generator_preset_names();
Dataset generate_preset(const std::string& name,
                        std::optional<std::uint64_t> seed_override = std::nullopt);

// Per ground-truth shape: the record chosen among those with cosine match at
// least `cosine_threshold` (largest member_fraction, ties to the lower record
// index). `record` is -1 when no record qualifies; `best_cosine` is the best
// match over the whole atlas regardless.
struct TruthMatch {
    int truth_index = 0;
    int record = -1;
    double best_cosine = 0.0;
    double chosen_cosine = 0.0;
    double member_fraction = 0.0;
    double noise_excluded_fraction = 1.0;

    nlohmann::json to_json() const;
};

// For each ground-truth shape, scans the atlas for records whose label is
// within cosine_threshold of the true coefficient direction and reports the
// one with the largest member overlap (or, with prefer_cosine, the closest
// direction — the right choice when the record feeds parameter recovery).
std::vector<TruthMatch> match_atlas_to_truth(const LabelAtlas& atlas, const FeatureMap& map,
                                             const GroundTruth& truth, double cosine_threshold,
                                             bool prefer_cosine = false);

// Writes metrics.json plus, when present, points.csv / truth.json /
// atlas.json / membership.csv and one CSV per table.
void write_experiment_bundle(const std::filesystem::path& dir, const ExperimentBundle& bundle);

// Pinned constants shared between presets, CLI and the test suites.
namespace presets {
inline constexpr double kCircleRadius = 0.45;
inline constexpr double kCircleOffset = 0.25;
inline constexpr double kCircleSigma = 0.02;
inline constexpr double kDelta = 0.05;
inline constexpr long kWhitenSamples = 50000;
inline constexpr long kMcSamples = 20000;
inline constexpr int kAbsorbPasses = 3;
// Tight on purpose: merging must only collapse re-discoveries of the same
// label. At looser tolerances a slightly tilted variant with a few extra
// far-band members can swallow the faithful record of the same shape.
inline constexpr double kDedupeCosineTol = 0.002;

inline constexpr std::uint64_t kSeedTwoCircles = 7101;
inline constexpr std::uint64_t kSeedTwoCirclesNoise = 7102;
inline constexpr std::uint64_t kSeedTwoCirclesLowSnr = 7501;
inline constexpr std::uint64_t kSeedThreeConicsLowSnr = 7104;
inline constexpr std::uint64_t kSeedPendulums = 7401;
inline constexpr std::uint64_t kSeedPureNoiseFdr = 7106;
inline constexpr std::uint64_t kSeedSminConcentration = 7107;
inline constexpr std::uint64_t kSeedSignalGap = 7108;
inline constexpr std::uint64_t kSeedDeltaFCurve = 7109;

// f used for the false-discovery machinery: x1^2 + x2^2 - 0.8^2 in the
// monomial(2, 2) ordering (1, x, y, x^2, xy, y^2).
Eigen::VectorXd circle_raw_coefficients();

// The three reference pendulums (centre, amplitude, mass).
std::vector<PendulumSpec> reference_pendulums(int points_each);
}  // namespace presets

}  // namespace labelkit
