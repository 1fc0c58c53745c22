#include "labelkit/rmt.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace labelkit {

void ConcentrationParams::validate() const {
    if (!(t > 0.0)) throw std::invalid_argument("concentration: t must be positive");
    if (!(gamma >= 0.0 && gamma <= 0.5))
        throw std::invalid_argument("concentration: gamma must lie in [0, 1/2]");
    if (!(alpha > 0.0)) throw std::invalid_argument("concentration: alpha must be positive");
    if (!(psi_norm > 0.0)) throw std::invalid_argument("concentration: psi_norm must be positive");
    if (!(rho > 0.0)) throw std::invalid_argument("concentration: rho must be positive");
    if (!(lambda_norm > 0.0)) throw std::invalid_argument("concentration: lambda_norm must be positive");
}

ConcentrationExponents concentration_probability_exponent(int feature_dim, long n,
                                                          const ConcentrationParams& params) {
    params.validate();
    if (feature_dim < 1) throw std::invalid_argument("concentration: feature_dim must be >= 1");
    if (n < 1) throw std::invalid_argument("concentration: n must be >= 1");

    const double nn = static_cast<double>(n);
    const double sqrt_n = std::sqrt(nn);
    ConcentrationExponents e;
    e.a = params.psi_norm * std::sqrt(std::log(static_cast<double>(feature_dim))) *
          std::pow(std::log(nn), 1.0 / params.alpha) / sqrt_n;
    e.b = params.rho * params.rho / sqrt_n + std::sqrt(params.lambda_norm) * e.a;
    e.beta = 1.0 / (1.0 + 2.0 / params.alpha);
    const double denom = std::max(e.b, e.a * e.a);
    e.p_dn = std::pow(1.0 / denom, e.beta);
    e.p = std::pow(params.t, e.beta) * std::pow(nn, e.beta * (params.gamma - 0.5)) * e.p_dn;
    return e;
}

double smin_ratio_of(const FeatureMap& map, const Eigen::Ref<const Eigen::MatrixXd>& points) {
    const Eigen::MatrixXd rows = map.evaluate_rows(points);
    if (rows.rows() < rows.cols())
        throw std::invalid_argument("smin_ratio: need at least D points");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(rows);
    return svd.singularValues()(rows.cols() - 1) / std::sqrt(static_cast<double>(rows.rows()));
}

double smin_ratio(const FeatureMap& map, const BackgroundNoise& noise, long n, std::uint64_t seed) {
    if (n < map.output_dim()) throw std::invalid_argument("smin_ratio: need n >= D");
    return smin_ratio_of(map, noise.sample(n, rng::key(seed, rng::kSminTrial)));
}

DeltaF delta_f(const MassSession& session, const PotentialLabel& f, long n, double t, double gamma) {
    if (n < 1) throw std::invalid_argument("delta_f: n must be >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("delta_f: t must be positive");
    if (!(gamma >= 0.0 && gamma <= 0.5)) throw std::invalid_argument("delta_f: gamma must lie in [0, 1/2]");
    if (std::abs(f.ell().norm() - 1.0) > 1e-9)
        throw std::invalid_argument("delta_f: label must have unit norm");

    DeltaF d;
    d.n = n;
    d.t = t;
    d.gamma = gamma;
    d.samples = session.samples();
    const double endpoint = 1.0 - t * std::pow(static_cast<double>(n), gamma - 0.5);
    if (endpoint <= 0.0) {
        d.value = 0.0;  // vacuous regime: the bound says nothing at this N
        return d;
    }
    const double right = session.mass(f, Interval(0.0, endpoint)).value;
    const double left = session.mass(f, Interval(-endpoint, 0.0)).value;
    d.value = std::min(right, left);
    return d;
}

DeltaF delta_f(const PotentialLabel& f, const FeatureMap& map, const BackgroundNoise& noise, long n,
               double t, double gamma, long mc_samples, std::uint64_t seed) {
    const MassSession session(map, noise, mc_samples, seed);
    return delta_f(session, f, n, t, gamma);
}

double recommend_delta(const PotentialLabel& f, const FeatureMap& map, const BackgroundNoise& noise,
                       long n, double t, double gamma, double safety, long mc_samples,
                       std::uint64_t seed) {
    if (!(safety > 0.0 && safety <= 1.0))
        throw std::invalid_argument("recommend_delta: safety must lie in (0, 1]");
    return safety * delta_f(f, map, noise, n, t, gamma, mc_samples, seed).value;
}

}  // namespace labelkit
