#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "labelkit/labelcore.hpp"

namespace labelkit {

// Parameters of the small-ball / Orlicz-norm concentration machinery. alpha
// is the Orlicz exponent of the feature coordinates, psi_norm their Orlicz
// norm bound, rho a fourth-moment bound and lambda_norm the operator norm of
// the feature second-moment matrix.
struct ConcentrationParams {
    double t = 0.7;
    double gamma = 0.3;
    double alpha = 2.0;
    double psi_norm = 1.0;
    double rho = 1.0;
    double lambda_norm = 1.0;

    void validate() const;
};

struct ConcentrationExponents {
    double a = 0.0;      // A_{D,N}
    double b = 0.0;      // B_{D,N}
    double beta = 0.0;   // (1 + 2/alpha)^{-1}
    double p_dn = 0.0;   // (1 / (B v A^2))^beta
    double p = 0.0;      // t^beta N^{beta (gamma - 1/2)} p_dn
};

// A = psi sqrt(log D) (log N)^{1/alpha} / sqrt(N); B = rho^2 / sqrt(N)
// + sqrt(lambda) A; p as above. Edge cases: D = 1 or N = 1 give A = 0.
ConcentrationExponents concentration_probability_exponent(int feature_dim, long n,
                                                          const ConcentrationParams& params);

// Smallest singular value of the N x D feature matrix of an N-point noise
// sample, divided by sqrt(N). Close to 1 for whitened maps on unstructured
// data; collapses towards 0 when the sample nearly satisfies a functional
// relation in the feature span.
double smin_ratio(const FeatureMap& map, const BackgroundNoise& noise, long n, std::uint64_t seed);

// Same ratio for a given cloud instead of a fresh noise sample.
double smin_ratio_of(const FeatureMap& map, const Eigen::Ref<const Eigen::MatrixXd>& points);

struct DeltaF {
    double value = 0.0;
    long n = 0;
    double t = 0.0;
    double gamma = 0.0;
    long samples = 0;
};

// Per-functional false-discovery threshold: the smaller of the pushforward
// masses of [0, 1 - t N^{gamma - 1/2}] and its mirror image. For thresholds
// delta below this value, an N-point sample of the noise measure is unlikely
// to admit f as a label. Requires unit ||ell||; zero when the endpoint
// 1 - t N^{gamma - 1/2} is nonpositive (vacuous regime).
DeltaF delta_f(const MassSession& session, const PotentialLabel& f, long n, double t, double gamma);
DeltaF delta_f(const PotentialLabel& f, const FeatureMap& map, const BackgroundNoise& noise, long n,
               double t, double gamma, long mc_samples, std::uint64_t seed);

// safety * delta_f: a usable default threshold for searches on data whose
// background matches `noise`.
double recommend_delta(const PotentialLabel& f, const FeatureMap& map, const BackgroundNoise& noise,
                       long n, double t, double gamma, double safety, long mc_samples,
                       std::uint64_t seed);

}  // namespace labelkit
