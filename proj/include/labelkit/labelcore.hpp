#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <optional>

#include "labelkit/feature.hpp"
#include "labelkit/noise.hpp"

namespace labelkit {

// A candidate label f(x) = <ell, Phi(x)> - offset with unit ell. Canonical
// form: ||ell|| = 1 and the first coordinate of ell larger than 1e-12 in
// magnitude is positive (sign fixed for deterministic comparison).
class PotentialLabel {
public:
    PotentialLabel() = default;

    // Canonicalises: rescales (ell, offset) by 1/||ell|| and fixes the sign.
    static PotentialLabel from_functional(Eigen::VectorXd ell, double offset = 0.0);

    const Eigen::VectorXd& ell() const { return ell_; }
    double offset() const { return offset_; }

    double value(const FeatureMap& map, const Eigen::Ref<const Eigen::VectorXd>& x) const;
    // f applied to precomputed feature rows: rows * ell - offset.
    Eigen::VectorXd values(const Eigen::Ref<const Eigen::MatrixXd>& feature_rows) const;

    // f - c (same direction, offset increased by c).
    PotentialLabel shifted(double c) const;
    PotentialLabel negated() const;

    nlohmann::json to_json() const;
    static PotentialLabel from_json(const nlohmann::json& j);

private:
    Eigen::VectorXd ell_;
    double offset_ = 0.0;
};

// Express a label in the monomial basis: returns q with
// f(x) = <q_without_offset, base(x)> and, when the map has a constant
// coordinate, the offset folded into q's constant entry. For whitened maps
// q = W^T ell before folding.
Eigen::VectorXd label_to_raw(const FeatureMap& map, const PotentialLabel& f);

// Inverse direction: build the (canonicalised) label whose raw monomial
// coefficients are `raw`. For whitened maps solves W^T ell = raw.
PotentialLabel label_from_raw(const FeatureMap& map, const Eigen::VectorXd& raw, double offset = 0.0);

struct CandidateResult {
    PotentialLabel label;
    bool degenerate = false;         // two smallest singular values tied (1e-10 relative)
    double smallest_singular = 0.0;
    double second_smallest = 0.0;
};

// Right singular vector of the |C| x D feature matrix for the smallest
// singular value: the direction of the feature span that the cloud most
// nearly annihilates. Requires at least D rows.
CandidateResult candidate_label(const Eigen::MatrixXd& feature_rows);
CandidateResult candidate_label(const FeatureMap& map, const Eigen::Ref<const Eigen::MatrixXd>& points);

// Smallest closed interval containing f over the cloud.
Interval tight_interval(const PotentialLabel& f, const Eigen::Ref<const Eigen::MatrixXd>& feature_rows);

// One cached Monte Carlo sample of the noise measure, pushed through the
// feature map once and reused for every interval queried in a session. All
// mass comparisons within a session therefore share one stream: masses are
// exactly monotone in the interval and translation-equivariant.
class MassSession {
public:
    MassSession(const FeatureMap& map, const BackgroundNoise& noise, long samples, std::uint64_t seed);

    MassEstimate mass(const PotentialLabel& f, const Interval& interval) const;
    long samples() const { return static_cast<long>(features_.rows()); }
    bool map_has_constants() const { return has_constants_; }

private:
    Eigen::MatrixXd features_;
    bool has_constants_ = true;
};

// Pushforward mass of the interval under f applied to the noise measure,
// estimated from a fresh `samples`-point stream.
MassEstimate pushforward_mass(const PotentialLabel& f, const FeatureMap& map, const Interval& interval,
                              const BackgroundNoise& noise, long samples, std::uint64_t seed);

struct MonteCarloParams {
    long samples = 20000;
    std::uint64_t seed = 0;
};

struct LabelCheck {
    bool accepted = false;
    Interval interval;       // tight interval; translated to contain 0 when a shift was applied
    MassEstimate mass;       // pushforward mass of the (unshifted) tight interval
    double shifted_by = 0.0;

    nlohmann::json to_json() const;
    static LabelCheck from_json(const nlohmann::json& j);
};

// Decide whether f is an acceptable label for the cloud at threshold delta:
// take the tight interval I of f over the cloud, estimate its pushforward
// mass, and accept when mass < delta, provided 0 lies in I or the feature
// span contains constants (then f is shifted by the midpoint of I).
LabelCheck check_label(const PotentialLabel& f, const FeatureMap& map,
                       const Eigen::Ref<const Eigen::MatrixXd>& points,
                       const BackgroundNoise& noise, double delta, const MonteCarloParams& mc);
LabelCheck check_label_cached(const PotentialLabel& f, const Eigen::Ref<const Eigen::MatrixXd>& feature_rows,
                              const MassSession& session, double delta);

struct LabelSetEstimate {
    std::optional<PotentialLabel> label;  // shift already applied
    LabelCheck check;
    bool degenerate_candidate = false;

    bool empty() const { return !label.has_value(); }
};

// Fit the candidate label on the cloud and check it; empty on rejection.
LabelSetEstimate estimate_label_set(const FeatureMap& map, const Eigen::Ref<const Eigen::MatrixXd>& points,
                                    const BackgroundNoise& noise, double delta, const MonteCarloParams& mc);
LabelSetEstimate estimate_label_set_cached(const Eigen::Ref<const Eigen::MatrixXd>& feature_rows,
                                           const MassSession& session, double delta);

}  // namespace labelkit
