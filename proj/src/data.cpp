#include "labelkit/data.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "labelkit/serialize.hpp"

namespace labelkit {

namespace {

constexpr int kMaxDraws = 10000;
constexpr int kNewtonIters = 60;

// conic (a, b, c, d, e, g) -> monomial(2, 2) order (1, x, y, x^2, xy, y^2)
Eigen::VectorXd raw_from_conic(const Vector6d& q) {
    Eigen::VectorXd r(6);
    r << q(5), q(3), q(4), q(0), q(1), q(2);
    return r;
}

bool inside_box(const Eigen::Vector2d& p, const Eigen::Vector2d& lower,
                const Eigen::Vector2d& upper) {
    return lower(0) <= p(0) && p(0) <= upper(0) && lower(1) <= p(1) && p(1) <= upper(1);
}

Eigen::Vector2d conic_gradient(const Vector6d& q, const Eigen::Vector2d& p) {
    return {2.0 * q(0) * p(0) + q(1) * p(1) + q(3),
            q(1) * p(0) + 2.0 * q(2) * p(1) + q(4)};
}

void require_box(const Eigen::Vector2d& lower, const Eigen::Vector2d& upper) {
    if (!(lower(0) < upper(0)) || !(lower(1) < upper(1)))
        throw std::invalid_argument("sampling box must have lower < upper in every coordinate");
}

}  // namespace

ConicSpec ConicSpec::circle(double cx, double cy, double r, int n, double sigma) {
    return ellipse(cx, cy, r, r, 0.0, n, sigma);
}

ConicSpec ConicSpec::ellipse(double cx, double cy, double rx, double ry, double rotation, int n,
                             double sigma) {
    if (!(rx > 0.0) || !(ry > 0.0)) throw std::invalid_argument("ellipse semi-axes must be positive");
    if (n < 0) throw std::invalid_argument("point count must be nonnegative");
    if (sigma < 0.0) throw std::invalid_argument("noise level must be nonnegative");

    const double co = std::cos(rotation), si = std::sin(rotation);
    const double qa = co * co / (rx * rx) + si * si / (ry * ry);
    const double qc = si * si / (rx * rx) + co * co / (ry * ry);
    const double qb = 2.0 * co * si * (1.0 / (rx * rx) - 1.0 / (ry * ry));

    ConicSpec s;
    // expand qa*(x-cx)^2 + qb*(x-cx)*(y-cy) + qc*(y-cy)^2 - 1
    s.coefficients << qa, qb, qc, -2.0 * qa * cx - qb * cy, -qb * cx - 2.0 * qc * cy,
        qa * cx * cx + qb * cx * cy + qc * cy * cy - 1.0;
    s.n = n;
    s.sigma = sigma;
    s.sampler = Sampler::kParametric;
    s.cx = cx;
    s.cy = cy;
    s.rx = rx;
    s.ry = ry;
    s.rot = rotation;
    return s;
}

ConicSpec ConicSpec::general(const Vector6d& coefficients, int n, double sigma) {
    if (coefficients.head<5>().cwiseAbs().maxCoeff() == 0.0)
        throw std::invalid_argument("conic must have a nonconstant term");
    if (n < 0) throw std::invalid_argument("point count must be nonnegative");
    if (sigma < 0.0) throw std::invalid_argument("noise level must be nonnegative");

    ConicSpec s;
    s.coefficients = coefficients;
    s.n = n;
    s.sigma = sigma;
    s.sampler = Sampler::kProjected;
    return s;
}

Eigen::VectorXd ConicSpec::raw_feature_coefficients() const { return raw_from_conic(coefficients); }

double ConicSpec::residual(double x, double y) const {
    const Vector6d& q = coefficients;
    return q(0) * x * x + q(1) * x * y + q(2) * y * y + q(3) * x + q(4) * y + q(5);
}

nlohmann::json ConicSpec::to_json() const {
    nlohmann::json j{{"coefficients", detail::vector_to_json(coefficients)},
                     {"n", n},
                     {"sigma", sigma},
                     {"sampler", sampler == Sampler::kParametric ? "parametric" : "projected"}};
    if (sampler == Sampler::kParametric) {
        j["cx"] = cx;
        j["cy"] = cy;
        j["rx"] = rx;
        j["ry"] = ry;
        j["rot"] = rot;
    }
    return j;
}

ConicSpec ConicSpec::from_json(const nlohmann::json& j) {
    ConicSpec s;
    const Eigen::VectorXd q = detail::vector_from_json(j.at("coefficients"));
    if (q.size() != 6) throw std::runtime_error("conic spec needs 6 coefficients");
    s.coefficients = q;
    s.n = j.at("n").get<int>();
    s.sigma = j.at("sigma").get<double>();
    const std::string sampler = j.at("sampler").get<std::string>();
    if (sampler == "parametric") {
        s.sampler = Sampler::kParametric;
        s.cx = j.at("cx").get<double>();
        s.cy = j.at("cy").get<double>();
        s.rx = j.at("rx").get<double>();
        s.ry = j.at("ry").get<double>();
        s.rot = j.at("rot").get<double>();
    } else if (sampler == "projected") {
        s.sampler = Sampler::kProjected;
    } else {
        throw std::runtime_error("unknown conic sampler: " + sampler);
    }
    return s;
}

Vector6d PendulumSpec::conic_coefficients() const {
    Vector6d q;
    // (x - centre)^2 + mass * v^2 = amplitude^2
    q << 1.0, 0.0, mass, -2.0 * centre, 0.0, centre * centre - amplitude * amplitude;
    return q;
}

nlohmann::json PendulumSpec::to_json() const {
    return {{"centre", centre}, {"amplitude", amplitude}, {"mass", mass}, {"n", n}};
}

PendulumSpec PendulumSpec::from_json(const nlohmann::json& j) {
    PendulumSpec s;
    s.centre = j.at("centre").get<double>();
    s.amplitude = j.at("amplitude").get<double>();
    s.mass = j.at("mass").get<double>();
    s.n = j.at("n").get<int>();
    return s;
}

nlohmann::json GroundTruth::to_json() const {
    nlohmann::json raws = nlohmann::json::array();
    for (const auto& r : truth_raw) raws.push_back(detail::vector_to_json(r));
    return {{"truth_raw", raws}, {"members", members}, {"noise_points", noise_points}, {"specs", specs}};
}

GroundTruth GroundTruth::from_json(const nlohmann::json& j) {
    GroundTruth t;
    for (const auto& r : j.at("truth_raw")) t.truth_raw.push_back(detail::vector_from_json(r));
    t.members = j.at("members").get<std::vector<std::vector<int>>>();
    t.noise_points = j.at("noise_points").get<std::vector<int>>();
    t.specs = j.value("specs", nlohmann::json::array());
    return t;
}

Eigen::Vector2d sample_on_conic(const ConicSpec& spec, const Eigen::Vector2d& lower,
                                const Eigen::Vector2d& upper, rng::Stream& stream) {
    require_box(lower, upper);

    if (spec.sampler == ConicSpec::Sampler::kParametric) {
        const double co = std::cos(spec.rot), si = std::sin(spec.rot);
        for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
            const double t = stream.uniform(0.0, 6.28318530717958647692);
            const double u = spec.rx * std::cos(t), v = spec.ry * std::sin(t);
            const Eigen::Vector2d p(spec.cx + co * u - si * v, spec.cy + si * u + co * v);
            if (inside_box(p, lower, upper)) return p;
        }
        throw std::domain_error("conic locus does not intersect the sampling box");
    }

    const double tol = 1e-13 * std::max(1.0, spec.coefficients.cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
        Eigen::Vector2d p(stream.uniform(lower(0), upper(0)), stream.uniform(lower(1), upper(1)));
        bool ok = false;
        for (int it = 0; it < kNewtonIters; ++it) {
            const double r = spec.residual(p(0), p(1));
            if (std::abs(r) <= tol) {
                ok = true;
                break;
            }
            const Eigen::Vector2d grad = conic_gradient(spec.coefficients, p);
            const double g2 = grad.squaredNorm();
            if (g2 < 1e-20) break;  // critical point, restart from a fresh draw
            p -= (r / g2) * grad;
        }
        if (ok && inside_box(p, lower, upper)) return p;
    }
    throw std::domain_error("projection onto the conic locus failed inside the sampling box");
}

Dataset generate_conics(const std::vector<ConicSpec>& specs, const Eigen::Vector2d& lower,
                        const Eigen::Vector2d& upper, int noise_count, std::uint64_t seed) {
    require_box(lower, upper);
    if (noise_count < 0) throw std::invalid_argument("noise count must be nonnegative");

    long total = noise_count;
    for (const auto& s : specs) total += s.n;

    Dataset ds;
    ds.points.resize(total, 2);
    long row = 0;
    for (std::size_t s = 0; s < specs.size(); ++s) {
        rng::Stream stream(seed, rng::kData, s);
        std::vector<int> idx;
        idx.reserve(static_cast<std::size_t>(specs[s].n));
        for (int i = 0; i < specs[s].n; ++i) {
            Eigen::Vector2d p = sample_on_conic(specs[s], lower, upper, stream);
            if (specs[s].sigma > 0.0) {
                p(0) += specs[s].sigma * stream.normal();
                p(1) += specs[s].sigma * stream.normal();
            }
            ds.points.row(row) = p.transpose();
            idx.push_back(static_cast<int>(row));
            ++row;
        }
        ds.truth.truth_raw.push_back(specs[s].raw_feature_coefficients());
        ds.truth.members.push_back(std::move(idx));
        nlohmann::json sj = specs[s].to_json();
        sj["kind"] = "conic";
        ds.truth.specs.push_back(std::move(sj));
    }
    if (noise_count > 0) {
        const auto background = BackgroundNoise::uniform_box(lower, upper);
        ds.points.bottomRows(noise_count) =
            background.sample(noise_count, rng::key(seed, rng::kData, specs.size()));
        for (int i = 0; i < noise_count; ++i) ds.truth.noise_points.push_back(static_cast<int>(row + i));
    }
    return ds;
}

Dataset generate_pendulums(const std::vector<PendulumSpec>& specs, const BackgroundNoise& background,
                           int noise_count, std::uint64_t seed) {
    if (background.dim() != 2)
        throw std::invalid_argument("pendulum datasets live in the (position, velocity) plane");
    if (noise_count < 0) throw std::invalid_argument("noise count must be nonnegative");

    long total = noise_count;
    for (const auto& s : specs) {
        if (!(s.amplitude > 0.0) || !(s.mass > 0.0))
            throw std::invalid_argument("pendulum amplitude and mass must be positive");
        if (s.n < 0) throw std::invalid_argument("point count must be nonnegative");
        total += s.n;
    }

    Dataset ds;
    ds.points.resize(total, 2);
    long row = 0;
    for (std::size_t s = 0; s < specs.size(); ++s) {
        rng::Stream stream(seed, rng::kData, s);
        const double omega = 1.0 / std::sqrt(specs[s].mass);
        std::vector<int> idx;
        idx.reserve(static_cast<std::size_t>(specs[s].n));
        for (int i = 0; i < specs[s].n; ++i) {
            const double theta = stream.uniform(0.0, 6.28318530717958647692);
            ds.points(row, 0) = specs[s].centre + specs[s].amplitude * std::sin(theta);
            ds.points(row, 1) = specs[s].amplitude * omega * std::cos(theta);
            idx.push_back(static_cast<int>(row));
            ++row;
        }
        ds.truth.truth_raw.push_back(raw_from_conic(specs[s].conic_coefficients()));
        ds.truth.members.push_back(std::move(idx));
        nlohmann::json sj = specs[s].to_json();
        sj["kind"] = "pendulum";
        ds.truth.specs.push_back(std::move(sj));
    }
    if (noise_count > 0) {
        ds.points.bottomRows(noise_count) =
            background.sample(noise_count, rng::key(seed, rng::kData, specs.size()));
        for (int i = 0; i < noise_count; ++i) ds.truth.noise_points.push_back(static_cast<int>(row + i));
    }
    return ds;
}

PendulumParameters pendulum_from_label(const FeatureMap& map, const PotentialLabel& label,
                                       double cross_term_tol) {
    if (map.input_dim() != 2 || map.degree() != 2 || !map.has_constants() || map.output_dim() != 6)
        throw std::invalid_argument("pendulum recovery needs the full quadratic basis in the plane");

    Eigen::VectorXd q = label_to_raw(map, label);  // (1, x, v, x^2, xv, v^2)
    const double qmax = std::max(std::abs(q(3)), std::abs(q(5)));
    if (qmax == 0.0) throw std::domain_error("label has no quadratic part");
    if (std::abs(q(4)) > cross_term_tol * qmax)
        throw std::domain_error("label has a significant xv cross term; not an axis-aligned ellipse");
    if (q(3) * q(5) <= 0.0)
        throw std::domain_error("quadratic part is not definite; level set is not an ellipse");
    if (q(3) < 0.0) q = -q;

    const double cx = -q(1) / (2.0 * q(3));
    const double cv = -q(2) / (2.0 * q(5));
    const double rhs = q(3) * cx * cx + q(5) * cv * cv - q(0);
    if (rhs <= 0.0) throw std::domain_error("level set is empty or a single point");

    PendulumParameters out;
    out.centre = cx;
    out.amplitude = std::sqrt(rhs / q(3));
    out.mass = q(5) / q(3);
    return out;
}

double match_label_to_truth(const FeatureMap& map, const PotentialLabel& label,
                            const Eigen::VectorXd& truth_raw) {
    const Eigen::VectorXd r = label_to_raw(map, label);
    if (r.size() != truth_raw.size())
        throw std::invalid_argument("truth coefficient vector does not match the feature dimension");
    const double nr = r.norm(), nt = truth_raw.norm();
    if (nt == 0.0) throw std::invalid_argument("truth coefficient vector is zero");
    if (nr == 0.0) return 0.0;
    return std::abs(r.dot(truth_raw) / (nr * nt));
}

}  // namespace labelkit
