#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <vector>

#include "labelkit/labelcore.hpp"

namespace labelkit {

using Vector6d = Eigen::Matrix<double, 6, 1>;

// Planar conic a x^2 + b xy + c y^2 + d x + e y + g = 0 together with the
// sampling parameters used by the generators.
struct ConicSpec {
    enum class Sampler { kParametric, kProjected };

    Vector6d coefficients = Vector6d::Zero();  // (a, b, c, d, e, g)
    int n = 0;
    double sigma = 0.0;

    Sampler sampler = Sampler::kProjected;
    // parametric data (centre, semi-axes, rotation) when built via circle()/ellipse()
    double cx = 0.0, cy = 0.0, rx = 0.0, ry = 0.0, rot = 0.0;

    static ConicSpec circle(double cx, double cy, double r, int n, double sigma);
    static ConicSpec ellipse(double cx, double cy, double rx, double ry, double rotation, int n,
                             double sigma);
    static ConicSpec general(const Vector6d& coefficients, int n, double sigma);

    // Coefficients reordered to the monomial(2, 2) basis
    // (1, x, y, x^2, xy, y^2): (g, d, e, a, b, c).
    Eigen::VectorXd raw_feature_coefficients() const;

    double residual(double x, double y) const;

    nlohmann::json to_json() const;
    static ConicSpec from_json(const nlohmann::json& j);
};

// Pendulum with unit stiffness: phase-space trajectory
// x(t) = centre + amplitude sin(omega t + phase), v = x'(t), omega = mass^{-1/2},
// i.e. the ellipse (x - centre)^2 + mass * v^2 = amplitude^2.
struct PendulumSpec {
    double centre = 0.0;
    double amplitude = 0.0;
    double mass = 0.0;
    int n = 0;

    Vector6d conic_coefficients() const;  // (a, b, c, d, e, g) in the (x, v) plane

    nlohmann::json to_json() const;
    static PendulumSpec from_json(const nlohmann::json& j);
};

// Ground truth kept strictly out of band: the search consumes only the bare
// point matrix, this sidecar exists for evaluation.
struct GroundTruth {
    std::vector<Eigen::VectorXd> truth_raw;        // per shape, monomial(2,2) coefficients
    std::vector<std::vector<int>> members;         // per shape, generated point indices
    std::vector<int> noise_points;                 // background point indices
    nlohmann::json specs = nlohmann::json::array();

    nlohmann::json to_json() const;
    static GroundTruth from_json(const nlohmann::json& j);
};

struct Dataset {
    Eigen::MatrixXd points;
    GroundTruth truth;
};

// Sample one point on the conic locus inside [lower, upper]; parametric specs
// draw an angle, general specs draw a box point and project it onto the locus
// by Newton iteration. Throws std::domain_error when the locus cannot be hit.
Eigen::Vector2d sample_on_conic(const ConicSpec& spec, const Eigen::Vector2d& lower,
                                const Eigen::Vector2d& upper, rng::Stream& stream);

// Shape points (each spec's n points on its locus, jittered by an isotropic
// Gaussian of its sigma) followed by noise_count uniform background points.
Dataset generate_conics(const std::vector<ConicSpec>& specs, const Eigen::Vector2d& lower,
                        const Eigen::Vector2d& upper, int noise_count, std::uint64_t seed);

// Phase-space points of each pendulum (uniform in phase angle, exact on the
// ellipse) followed by noise_count samples of `background`.
Dataset generate_pendulums(const std::vector<PendulumSpec>& specs, const BackgroundNoise& background,
                           int noise_count, std::uint64_t seed);

struct PendulumParameters {
    double centre = 0.0;
    double amplitude = 0.0;
    double mass = 0.0;
};

// Invert a label back to pendulum parameters by completing the square in the
// (x, v) plane. The label's quadratic part must be a definite diagonal form:
// cross term below `cross_term_tol` (relative) and equal signs on x^2 and
// v^2; otherwise throws std::domain_error.
PendulumParameters pendulum_from_label(const FeatureMap& map, const PotentialLabel& label,
                                       double cross_term_tol = 0.05);

// |cosine| between the label's raw coefficient vector (offset folded) and a
// ground-truth coefficient vector; 1.0 means the same curve up to scale/sign.
double match_label_to_truth(const FeatureMap& map, const PotentialLabel& label,
                            const Eigen::VectorXd& truth_raw);

}  // namespace labelkit
