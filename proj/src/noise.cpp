#include "labelkit/noise.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

#include "labelkit/serialize.hpp"

namespace labelkit {

namespace {
constexpr long kSampleChunk = 8192;
}

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo <= hi)) throw std::invalid_argument("interval endpoints out of order");
}

Interval Interval::hull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

nlohmann::json Interval::to_json() const { return nlohmann::json::array({lo, hi}); }

Interval Interval::from_json(const nlohmann::json& j) {
    return Interval(j.at(0).get<double>(), j.at(1).get<double>());
}

nlohmann::json MassEstimate::to_json() const {
    return {{"value", value}, {"samples", samples}, {"std_error", std_error}};
}

MassEstimate MassEstimate::from_json(const nlohmann::json& j) {
    MassEstimate m;
    m.value = j.at("value").get<double>();
    m.samples = j.at("samples").get<long>();
    m.std_error = j.at("std_error").get<double>();
    return m;
}

BackgroundNoise BackgroundNoise::uniform_box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
    if (lower.size() == 0 || lower.size() != upper.size())
        throw std::invalid_argument("uniform_box: bound dimensions mismatch or empty");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (!(lower(i) < upper(i)))
            throw std::invalid_argument("uniform_box: lower bound must be strictly below upper bound");
    }
    BackgroundNoise n;
    n.kind_ = Kind::kUniformBox;
    n.dim_ = static_cast<int>(lower.size());
    n.lower_ = std::move(lower);
    n.upper_ = std::move(upper);
    return n;
}

BackgroundNoise BackgroundNoise::gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
    if (mean.size() == 0 || covariance.rows() != mean.size() || covariance.cols() != mean.size())
        throw std::invalid_argument("gaussian: covariance shape must match mean dimension");
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("gaussian: covariance must be symmetric positive definite");
    BackgroundNoise n;
    n.kind_ = Kind::kGaussian;
    n.dim_ = static_cast<int>(mean.size());
    n.mean_ = std::move(mean);
    n.covariance_ = std::move(covariance);
    n.chol_ = llt.matrixL();
    return n;
}

BackgroundNoise BackgroundNoise::standard_gaussian(int dim) {
    if (dim < 1) throw std::invalid_argument("standard_gaussian: dim must be positive");
    return gaussian(Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Identity(dim, dim));
}

BackgroundNoise BackgroundNoise::empirical(Eigen::MatrixXd points) {
    if (points.rows() == 0 || points.cols() == 0)
        throw std::invalid_argument("empirical: need at least one point");
    BackgroundNoise n;
    n.kind_ = Kind::kEmpirical;
    n.dim_ = static_cast<int>(points.cols());
    n.points_ = std::move(points);
    return n;
}

const Eigen::MatrixXd& BackgroundNoise::empirical_points() const {
    if (kind_ != Kind::kEmpirical) throw std::logic_error("not an empirical noise measure");
    return points_;
}

void BackgroundNoise::sample_row(rng::Stream& s,
                                 Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) const {
    switch (kind_) {
        case Kind::kUniformBox:
            for (int i = 0; i < dim_; ++i) out(i) = s.uniform(lower_(i), upper_(i));
            break;
        case Kind::kGaussian: {
            Eigen::VectorXd z(dim_);
            for (int i = 0; i < dim_; ++i) z(i) = s.normal();
            out = (mean_ + chol_ * z).transpose();
            break;
        }
        case Kind::kEmpirical:
            out = points_.row(static_cast<Eigen::Index>(s.below(static_cast<std::uint64_t>(points_.rows()))));
            break;
    }
}

Eigen::MatrixXd BackgroundNoise::sample(long n, std::uint64_t seed) const {
    if (n < 0) throw std::invalid_argument("sample: n must be nonnegative");
    Eigen::MatrixXd out(n, dim_);
    for (long chunk = 0; chunk * kSampleChunk < n; ++chunk) {
        rng::Stream s(seed, rng::kSample, static_cast<std::uint64_t>(chunk));
        const long begin = chunk * kSampleChunk;
        const long end = std::min(n, begin + kSampleChunk);
        for (long r = begin; r < end; ++r) sample_row(s, out.row(r));
    }
    return out;
}

nlohmann::json BackgroundNoise::to_json() const {
    switch (kind_) {
        case Kind::kUniformBox:
            return {{"kind", "uniform_box"},
                    {"lower", detail::vector_to_json(lower_)},
                    {"upper", detail::vector_to_json(upper_)}};
        case Kind::kGaussian:
            return {{"kind", "gaussian"},
                    {"mean", detail::vector_to_json(mean_)},
                    {"covariance", detail::matrix_to_json(covariance_)}};
        case Kind::kEmpirical:
            return {{"kind", "empirical"}, {"points", detail::matrix_to_json(points_)}};
    }
    throw std::logic_error("unreachable");
}

BackgroundNoise BackgroundNoise::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform_box")
        return uniform_box(detail::vector_from_json(j.at("lower")), detail::vector_from_json(j.at("upper")));
    if (kind == "gaussian")
        return gaussian(detail::vector_from_json(j.at("mean")), detail::matrix_from_json(j.at("covariance")));
    if (kind == "empirical") return empirical(detail::matrix_from_json(j.at("points")));
    throw std::runtime_error("unknown noise kind: " + kind);
}

}  // namespace labelkit
