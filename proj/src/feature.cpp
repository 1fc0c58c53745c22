#include "labelkit/feature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

#include "labelkit/serialize.hpp"

namespace labelkit {

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

void enumerate_degree(int vars_left, int deg_left, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
    if (vars_left == 1) {
        cur.push_back(deg_left);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int e = deg_left; e >= 0; --e) {
        cur.push_back(e);
        enumerate_degree(vars_left - 1, deg_left - e, cur, out);
        cur.pop_back();
    }
}

}  // namespace

FeatureMap FeatureMap::monomial(int input_dim, int degree, int dim_cap) {
    if (input_dim < 1) throw std::invalid_argument("monomial: input_dim must be >= 1");
    if (degree < 0) throw std::invalid_argument("monomial: degree must be >= 0");
    const double dim = binomial(input_dim + degree, degree);
    if (dim > static_cast<double>(dim_cap))
        throw std::length_error("monomial: feature dimension " + std::to_string(static_cast<long long>(dim)) +
                                " exceeds cap " + std::to_string(dim_cap));
    FeatureMap m;
    m.d_ = input_dim;
    m.k_ = degree;
    m.include_constant_ = true;
    std::vector<int> cur;
    for (int total = 0; total <= degree; ++total) enumerate_degree(input_dim, total, cur, m.exponents_);
    return m;
}

FeatureMap FeatureMap::monomial_without_constant(int input_dim, int degree, int dim_cap) {
    if (degree < 1) throw std::invalid_argument("monomial_without_constant: degree must be >= 1");
    FeatureMap m = monomial(input_dim, degree, dim_cap);
    m.include_constant_ = false;
    m.exponents_.erase(m.exponents_.begin());  // graded-lex puts the constant first
    return m;
}

int FeatureMap::constant_index() const {
    if (!include_constant_) throw std::logic_error("feature map has no constant coordinate");
    return 0;
}

Eigen::MatrixXd FeatureMap::base_rows(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    if (points.cols() != d_) throw std::invalid_argument("evaluate: point dimension mismatch");
    const Eigen::Index n = points.rows();
    const Eigen::Index dim = static_cast<Eigen::Index>(exponents_.size());
    Eigen::MatrixXd out(n, dim);
    std::vector<double> pows(static_cast<std::size_t>(d_) * (static_cast<std::size_t>(k_) + 1));
    for (Eigen::Index r = 0; r < n; ++r) {
        for (int i = 0; i < d_; ++i) {
            double p = 1.0;
            const double xi = points(r, i);
            for (int e = 0; e <= k_; ++e) {
                pows[static_cast<std::size_t>(i) * (static_cast<std::size_t>(k_) + 1) + static_cast<std::size_t>(e)] = p;
                p *= xi;
            }
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
            double v = 1.0;
            const auto& alpha = exponents_[static_cast<std::size_t>(c)];
            for (int i = 0; i < d_; ++i) {
                const int e = alpha[static_cast<std::size_t>(i)];
                if (e > 0)
                    v *= pows[static_cast<std::size_t>(i) * (static_cast<std::size_t>(k_) + 1) + static_cast<std::size_t>(e)];
            }
            out(r, c) = v;
        }
    }
    return out;
}

Eigen::VectorXd FeatureMap::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    Eigen::MatrixXd row = evaluate_rows(x.transpose());
    return row.row(0).transpose();
}

Eigen::MatrixXd FeatureMap::evaluate_rows(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
    Eigen::MatrixXd base = base_rows(points);
    if (transform_) return base * transform_->transpose();
    return base;
}

FeatureMap FeatureMap::with_transform(const Eigen::MatrixXd& w) const {
    const int dim = output_dim();
    if (w.rows() != dim || w.cols() != dim)
        throw std::invalid_argument("with_transform: transform must be D x D");
    FeatureMap m = *this;
    m.transform_ = transform_ ? Eigen::MatrixXd(w * *transform_) : w;
    return m;
}

nlohmann::json FeatureMap::to_json() const {
    nlohmann::json j{{"kind", transform_ ? "whitened" : "monomial"},
                     {"input_dim", d_},
                     {"degree", k_},
                     {"constant", include_constant_}};
    if (transform_) j["transform"] = detail::matrix_to_json(*transform_);
    return j;
}

FeatureMap FeatureMap::from_json(const nlohmann::json& j) {
    const bool constant = j.value("constant", true);
    FeatureMap m = constant ? monomial(j.at("input_dim").get<int>(), j.at("degree").get<int>())
                            : monomial_without_constant(j.at("input_dim").get<int>(), j.at("degree").get<int>());
    if (j.contains("transform")) m = m.with_transform(detail::matrix_from_json(j.at("transform")));
    return m;
}

CovarianceEstimate estimate_covariance(const FeatureMap& map, const BackgroundNoise& noise,
                                       long samples, std::uint64_t seed, double condition_cap) {
    const long dim = map.output_dim();
    if (samples < 10 * dim)
        throw std::invalid_argument("estimate_covariance: need at least 10 * D samples");
    if (noise.dim() != map.input_dim())
        throw std::invalid_argument("estimate_covariance: noise dimension mismatch");

    const Eigen::MatrixXd pts = noise.sample(samples, rng::key(seed, rng::kCovariance));
    const Eigen::MatrixXd feats = map.evaluate_rows(pts);
    Eigen::MatrixXd cov = (feats.transpose() * feats) / static_cast<double>(samples);
    cov = (0.5 * (cov + cov.transpose())).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double cond = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(cond <= condition_cap))
        throw std::domain_error("estimate_covariance: covariance numerically singular (condition " +
                                std::to_string(cond) + ")");
    return CovarianceEstimate{std::move(cov), samples, cond};
}

Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& m, double eigen_floor) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse_sqrt_spd: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success) throw std::domain_error("inverse_sqrt_spd: eigendecomposition failed");
    Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(eigen_floor);
    return eig.eigenvectors() * vals.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

FeatureMap whiten(const FeatureMap& map, const CovarianceEstimate& cov) {
    if (cov.matrix.rows() != map.output_dim())
        throw std::invalid_argument("whiten: covariance dimension mismatch");
    return map.with_transform(inverse_sqrt_spd(cov.matrix));
}

FeatureMap make_whitened(const FeatureMap& map, const BackgroundNoise& noise,
                         long samples, std::uint64_t seed) {
    return whiten(map, estimate_covariance(map, noise, samples, seed));
}

}  // namespace labelkit
