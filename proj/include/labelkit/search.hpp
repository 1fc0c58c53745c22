#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "labelkit/labelcore.hpp"

namespace labelkit {

enum class AbsorbOrder { kIndex, kRandomPermutation };

// How seed subsets are drawn each iteration. kUniform draws a uniform
// n0-subset of the cloud. kLocalNeighborhood draws a uniform anchor point,
// pools it with its 3 * n0 - 1 nearest neighbours, and selects n0 of the pool
// by one of three patterns, rotating with the iteration index:
//   - nearest:  the n0 pool points closest to the anchor after dropping
//     low-density pool members (third-neighbour radius above 1.5x the pool
//     median) — stays pure where distinct shapes run close to each other;
//   - densest:  the n0 pool points with the smallest third-neighbour radius
//     — hugs the shape through background clutter at the cost of drifting
//     toward locally dense spots;
//   - random:   a uniform n0-subset of the density-filtered pool — spreads
//     the seed across the whole neighbourhood, which stiffens the fitted
//     direction.
// No single pattern suffices (each fails on some mixture of overlap, clutter
// and curvature), but a seed only has to succeed once, so the rotation keeps
// the guided search robust at realistic iteration counts. kUniform remains
// the default and matches the plain randomized algorithm.
enum class SeedMode { kUniform, kLocalNeighborhood };

struct SearchConfig {
    int n0 = 0;  // 0 resolves to 3 * D at run time
    int iterations = 500;
    double delta = 0.05;
    std::uint64_t seed = 0;
    AbsorbOrder absorb_order = AbsorbOrder::kRandomPermutation;
    SeedMode seed_mode = SeedMode::kUniform;
    // Number of sweeps over the unabsorbed points after a seed is accepted.
    // 1 is the plain greedy pass; higher values revisit points that were
    // rejected while the label estimate was still warped by the seed, and
    // stop early once a sweep absorbs nothing.
    int absorb_passes = 1;
    long mc_samples = 20000;

    nlohmann::json to_json() const;
    static SearchConfig from_json(const nlohmann::json& j);
};

struct LabelRecord {
    std::vector<int> members;  // sorted point indices
    PotentialLabel label;
    LabelCheck check;
    bool degenerate = false;

    nlohmann::json to_json() const;
    static LabelRecord from_json(const nlohmann::json& j);
};

struct LabelAtlas {
    std::vector<LabelRecord> records;
    std::string dataset_fingerprint;
    SearchConfig config;
    nlohmann::json map_descriptor;
    nlohmann::json noise_descriptor;

    nlohmann::json to_json() const;
    static LabelAtlas from_json(const nlohmann::json& j);
};

// FNV-1a over the raw bytes of the point matrix, hex-encoded. Used to tie an
// atlas to the dataset it was computed from.
std::string dataset_fingerprint(const Eigen::Ref<const Eigen::MatrixXd>& points);

// Randomised greedy search for labelled subsets: each iteration seeds a
// subset, fits and checks its candidate label, and on acceptance greedily
// absorbs every remaining point whose addition keeps the refitted label
// acceptable. Distinct final member sets become atlas records. Deterministic
// for fixed (points, map, noise, config); per-iteration streams are keyed by
// (config.seed, iteration).
LabelAtlas label_search(const Eigen::Ref<const Eigen::MatrixXd>& points, const FeatureMap& map,
                        const BackgroundNoise& noise, const SearchConfig& config);

// Merge records whose labels are within `cosine_tol` of collinear (raw
// coefficients, offsets folded) and whose member sets overlap with Jaccard
// index at least 0.8, keeping the larger member set.
LabelAtlas dedupe_similar(const LabelAtlas& atlas, double cosine_tol);

struct VerifyRow {
    int record = 0;
    bool accepted = false;
    double mass = 0.0;
    double bound = 0.0;
    bool interval_contains_zero = false;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    bool all_ok = true;
    bool fingerprint_matches = true;
};

// Independent re-check of each record against the dataset: recomputes the
// tight interval from the stored label and re-estimates its mass on a fresh
// stream with `mc_multiplier` times the configured sample count. A record
// passes when the interval contains 0 and the fresh mass stays below
// delta + 3 * (the record's stored standard error).
VerifyReport verify_atlas(const LabelAtlas& atlas, const Eigen::Ref<const Eigen::MatrixXd>& points,
                          std::uint64_t fresh_seed, long mc_multiplier = 16);

}  // namespace labelkit
