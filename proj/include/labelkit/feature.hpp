#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

#include "labelkit/noise.hpp"

namespace labelkit {

// Finite-dimensional feature map Phi : R^d -> R^D. The base basis is the set
// of monomials of total degree <= k enumerated in graded-lexicographic order
// (degree ascending, then first variable's exponent descending), e.g. for
// d = 2, k = 2: (1, x1, x2, x1^2, x1*x2, x2^2). A map may additionally carry a
// linear transform W (whitening), in which case Phi(x) = W * base(x).
class FeatureMap {
public:
    static constexpr int kDefaultDimCap = 10000;

    // All monomials with total degree <= k. k = 0 yields the degenerate
    // constant-only map (D = 1), which is occasionally useful in diagnostics.
    static FeatureMap monomial(int input_dim, int degree, int dim_cap = kDefaultDimCap);

    // Same basis with the constant coordinate removed. Exists so that the
    // offset-shift machinery can be exercised against a span without
    // constants; not used by the standard pipelines.
    static FeatureMap monomial_without_constant(int input_dim, int degree, int dim_cap = kDefaultDimCap);

    int input_dim() const { return d_; }
    int output_dim() const { return static_cast<int>(exponents_.size()); }
    int degree() const { return k_; }
    bool has_constants() const { return include_constant_; }
    bool is_whitened() const { return transform_.has_value(); }
    // Null when the map is the plain monomial basis.
    const Eigen::MatrixXd* transform() const { return transform_ ? &*transform_ : nullptr; }
    const std::vector<std::vector<int>>& exponents() const { return exponents_; }
    // Index of the constant coordinate (always 0 when present).
    int constant_index() const;

    Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    // One feature row per input row.
    Eigen::MatrixXd evaluate_rows(const Eigen::Ref<const Eigen::MatrixXd>& points) const;

    // Returns a copy of this map with `w` composed on the left of any
    // existing transform.
    FeatureMap with_transform(const Eigen::MatrixXd& w) const;

    nlohmann::json to_json() const;
    static FeatureMap from_json(const nlohmann::json& j);

private:
    FeatureMap() = default;

    Eigen::MatrixXd base_rows(const Eigen::Ref<const Eigen::MatrixXd>& points) const;

    int d_ = 0;
    int k_ = 0;
    bool include_constant_ = true;
    std::vector<std::vector<int>> exponents_;
    std::optional<Eigen::MatrixXd> transform_;
};

// Second-moment matrix of the feature map under the noise measure, estimated
// by Monte Carlo.
struct CovarianceEstimate {
    Eigen::MatrixXd matrix;
    long sample_count = 0;
    double condition_number = 0.0;
};

// Requires samples >= 10 * D. Throws std::domain_error when the estimate is
// numerically singular (condition number above `condition_cap`).
CovarianceEstimate estimate_covariance(const FeatureMap& map, const BackgroundNoise& noise,
                                       long samples, std::uint64_t seed,
                                       double condition_cap = 1e12);

// Symmetric inverse square root of an SPD matrix; eigenvalues are floored at
// `eigen_floor` before inversion.
Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& m, double eigen_floor = 1e-12);

// Whitened copy of `map`: composes cov^{-1/2} onto the map so that the
// feature second-moment matrix becomes (approximately) the identity. The
// spanned function class is unchanged.
FeatureMap whiten(const FeatureMap& map, const CovarianceEstimate& cov);

// Convenience: estimate the covariance and whiten in one step.
FeatureMap make_whitened(const FeatureMap& map, const BackgroundNoise& noise,
                         long samples, std::uint64_t seed);

}  // namespace labelkit
