#include "labelkit/labelcore.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

#include "labelkit/serialize.hpp"

namespace labelkit {

PotentialLabel PotentialLabel::from_functional(Eigen::VectorXd ell, double offset) {
    const double norm = ell.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("label functional must be nonzero");
    ell /= norm;
    offset /= norm;
    for (Eigen::Index i = 0; i < ell.size(); ++i) {
        if (std::abs(ell(i)) > 1e-12) {
            if (ell(i) < 0.0) {
                ell = -ell;
                offset = -offset;
            }
            break;
        }
    }
    PotentialLabel f;
    f.ell_ = std::move(ell);
    f.offset_ = offset;
    return f;
}

double PotentialLabel::value(const FeatureMap& map, const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return ell_.dot(map.evaluate(x)) - offset_;
}

Eigen::VectorXd PotentialLabel::values(const Eigen::Ref<const Eigen::MatrixXd>& feature_rows) const {
    if (feature_rows.cols() != ell_.size())
        throw std::invalid_argument("feature rows do not match label dimension");
    return (feature_rows * ell_).array() - offset_;
}

PotentialLabel PotentialLabel::shifted(double c) const {
    PotentialLabel f = *this;
    f.offset_ += c;
    return f;
}

PotentialLabel PotentialLabel::negated() const {
    PotentialLabel f;
    f.ell_ = -ell_;
    f.offset_ = -offset_;
    return f;
}

nlohmann::json PotentialLabel::to_json() const {
    return {{"ell", detail::vector_to_json(ell_)}, {"offset", offset_}};
}

PotentialLabel PotentialLabel::from_json(const nlohmann::json& j) {
    PotentialLabel f;
    f.ell_ = detail::vector_from_json(j.at("ell"));
    f.offset_ = j.at("offset").get<double>();
    return f;
}

Eigen::VectorXd label_to_raw(const FeatureMap& map, const PotentialLabel& f) {
    if (f.ell().size() != map.output_dim())
        throw std::invalid_argument("label dimension does not match map");
    Eigen::VectorXd raw = map.transform() ? Eigen::VectorXd(map.transform()->transpose() * f.ell())
                                          : f.ell();
    if (f.offset() != 0.0) {
        if (!map.has_constants())
            throw std::domain_error("cannot fold a nonzero offset without a constant coordinate");
        raw(map.constant_index()) -= f.offset();
    }
    return raw;
}

PotentialLabel label_from_raw(const FeatureMap& map, const Eigen::VectorXd& raw, double offset) {
    if (raw.size() != map.output_dim())
        throw std::invalid_argument("raw coefficient dimension does not match map");
    if (!map.transform()) return PotentialLabel::from_functional(raw, offset);
    Eigen::VectorXd ell = map.transform()->transpose().partialPivLu().solve(raw);
    return PotentialLabel::from_functional(std::move(ell), offset);
}

CandidateResult candidate_label(const Eigen::MatrixXd& feature_rows) {
    const Eigen::Index dim = feature_rows.cols();
    if (dim < 1) throw std::invalid_argument("candidate_label: empty feature rows");
    if (feature_rows.rows() < dim)
        throw std::invalid_argument("candidate_label: need at least D points (least singular vector "
                                    "is not determined below D rows)");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(feature_rows, Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();
    CandidateResult r;
    r.label = PotentialLabel::from_functional(svd.matrixV().col(dim - 1), 0.0);
    r.smallest_singular = s(dim - 1);
    r.second_smallest = (dim >= 2) ? s(dim - 2) : s(0);
    // Direction is ambiguous when a second singular value sits at the
    // numerical rank floor (nullspace dimension >= 2) or ties the smallest.
    if (dim >= 2)
        r.degenerate = s(dim - 2) <= 1e-10 * s(0) ||
                       (s(dim - 2) - s(dim - 1)) <= 1e-10 * s(dim - 2);
    return r;
}

CandidateResult candidate_label(const FeatureMap& map, const Eigen::Ref<const Eigen::MatrixXd>& points) {
    return candidate_label(map.evaluate_rows(points));
}

Interval tight_interval(const PotentialLabel& f, const Eigen::Ref<const Eigen::MatrixXd>& feature_rows) {
    if (feature_rows.rows() == 0) throw std::invalid_argument("tight_interval: empty cloud");
    const Eigen::VectorXd v = f.values(feature_rows);
    return Interval(v.minCoeff(), v.maxCoeff());
}

MassSession::MassSession(const FeatureMap& map, const BackgroundNoise& noise, long samples,
                         std::uint64_t seed)
    : has_constants_(map.has_constants()) {
    if (samples < 1) throw std::invalid_argument("MassSession: need at least one sample");
    features_ = map.evaluate_rows(noise.sample(samples, rng::key(seed, rng::kMass)));
}

MassEstimate MassSession::mass(const PotentialLabel& f, const Interval& interval) const {
    const Eigen::VectorXd v = f.values(features_);
    long count = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (interval.lo <= v(i) && v(i) <= interval.hi) ++count;
    }
    const long m = static_cast<long>(v.size());
    const double p = static_cast<double>(count) / static_cast<double>(m);
    return MassEstimate{p, m, std::sqrt(p * (1.0 - p) / static_cast<double>(m))};
}

MassEstimate pushforward_mass(const PotentialLabel& f, const FeatureMap& map, const Interval& interval,
                              const BackgroundNoise& noise, long samples, std::uint64_t seed) {
    return MassSession(map, noise, samples, seed).mass(f, interval);
}

nlohmann::json LabelCheck::to_json() const {
    return {{"accepted", accepted},
            {"interval", interval.to_json()},
            {"mass", mass.to_json()},
            {"shifted_by", shifted_by}};
}

LabelCheck LabelCheck::from_json(const nlohmann::json& j) {
    LabelCheck c;
    c.accepted = j.at("accepted").get<bool>();
    c.interval = Interval::from_json(j.at("interval"));
    c.mass = MassEstimate::from_json(j.at("mass"));
    c.shifted_by = j.at("shifted_by").get<double>();
    return c;
}

LabelCheck check_label_cached(const PotentialLabel& f, const Eigen::Ref<const Eigen::MatrixXd>& feature_rows,
                              const MassSession& session, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    LabelCheck out;
    const Interval tight = tight_interval(f, feature_rows);
    out.interval = tight;
    out.mass = session.mass(f, tight);
    if (out.mass.value < delta) {
        if (tight.contains(0.0)) {
            out.accepted = true;
        } else if (session.map_has_constants()) {
            // Shift by the interval midpoint; the translated interval contains 0
            // and its mass is unchanged (same stream, same membership counts).
            out.shifted_by = tight.midpoint();
            out.interval = tight.shifted(out.shifted_by);
            out.accepted = true;
        }
    }
    return out;
}

LabelCheck check_label(const PotentialLabel& f, const FeatureMap& map,
                       const Eigen::Ref<const Eigen::MatrixXd>& points,
                       const BackgroundNoise& noise, double delta, const MonteCarloParams& mc) {
    const MassSession session(map, noise, mc.samples, mc.seed);
    return check_label_cached(f, map.evaluate_rows(points), session, delta);
}

LabelSetEstimate estimate_label_set_cached(const Eigen::Ref<const Eigen::MatrixXd>& feature_rows,
                                           const MassSession& session, double delta) {
    const CandidateResult cand = candidate_label(feature_rows);
    LabelSetEstimate est;
    est.degenerate_candidate = cand.degenerate;
    est.check = check_label_cached(cand.label, feature_rows, session, delta);
    if (est.check.accepted) est.label = cand.label.shifted(est.check.shifted_by);
    return est;
}

LabelSetEstimate estimate_label_set(const FeatureMap& map, const Eigen::Ref<const Eigen::MatrixXd>& points,
                                    const BackgroundNoise& noise, double delta, const MonteCarloParams& mc) {
    const MassSession session(map, noise, mc.samples, mc.seed);
    return estimate_label_set_cached(map.evaluate_rows(points), session, delta);
}

}  // namespace labelkit
