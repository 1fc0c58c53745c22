#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <string>

#include "labelkit/rng.hpp"

namespace labelkit {

// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_);

    bool contains(double v) const { return lo <= v && v <= hi; }
    double width() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    Interval shifted(double c) const { return Interval(lo - c, hi - c); }
    static Interval hull(const Interval& a, const Interval& b);

    nlohmann::json to_json() const;
    static Interval from_json(const nlohmann::json& j);
};

// Monte Carlo estimate of a probability mass.
struct MassEstimate {
    double value = 0.0;
    long samples = 0;
    double std_error = 0.0;

    nlohmann::json to_json() const;
    static MassEstimate from_json(const nlohmann::json& j);
};

// Background-noise measure on R^d: the reference distribution against which
// candidate labels are judged. Three concrete families are supported.
class BackgroundNoise {
public:
    enum class Kind { kUniformBox, kGaussian, kEmpirical };

    static BackgroundNoise uniform_box(Eigen::VectorXd lower, Eigen::VectorXd upper);
    static BackgroundNoise gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance);
    static BackgroundNoise standard_gaussian(int dim);
    static BackgroundNoise empirical(Eigen::MatrixXd points);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }

    // n i.i.d. samples, one per row. Sampling is chunked with per-chunk
    // streams keyed by (seed, chunk), so the result is independent of any
    // parallel schedule a caller might impose.
    Eigen::MatrixXd sample(long n, std::uint64_t seed) const;

    const Eigen::MatrixXd& empirical_points() const;

    nlohmann::json to_json() const;
    static BackgroundNoise from_json(const nlohmann::json& j);

private:
    BackgroundNoise() = default;

    void sample_row(rng::Stream& s,
                    Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) const;

    Kind kind_ = Kind::kUniformBox;
    int dim_ = 0;
    Eigen::VectorXd lower_, upper_;          // uniform box
    Eigen::VectorXd mean_;                   // gaussian
    Eigen::MatrixXd covariance_;             // gaussian (kept for serialization)
    Eigen::MatrixXd chol_;                   // gaussian lower Cholesky factor
    Eigen::MatrixXd points_;                 // empirical atoms
};

}  // namespace labelkit
