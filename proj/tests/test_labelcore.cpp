#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "labelkit/labelcore.hpp"
#include "labelkit/rng.hpp"

using namespace labelkit;

namespace {
constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXd circle_points(double r, int n, double phase = 0.0) {
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i) {
        const double a = phase + 2.0 * kPi * i / n;
        pts(i, 0) = r * std::cos(a);
        pts(i, 1) = r * std::sin(a);
    }
    return pts;
}
}  // namespace

TEST_CASE("labels are canonicalised to a signed unit functional") {
    Eigen::VectorXd ell(3);
    ell << -2.0, 1.0, 2.0;
    const PotentialLabel f = PotentialLabel::from_functional(ell, 6.0);
    CHECK(f.ell().norm() == doctest::Approx(1.0));
    CHECK(f.ell()(0) > 0.0);  // sign fixed on the first sizeable coordinate
    CHECK(f.offset() == doctest::Approx(-2.0));
    CHECK_THROWS_AS(PotentialLabel::from_functional(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("value and values agree and respect shift and negation") {
    const FeatureMap map = FeatureMap::monomial(2, 2);
    Eigen::VectorXd ell(6);
    ell << 0.5, -1.0, 2.0, 0.0, 1.0, -0.5;
    const PotentialLabel f = PotentialLabel::from_functional(ell, 0.25);
    Eigen::MatrixXd pts(3, 2);
    pts << 0.1, 0.2, -0.4, 0.9, 0.0, -1.0;
    const Eigen::MatrixXd rows = map.evaluate_rows(pts);
    const Eigen::VectorXd v = f.values(rows);
    for (int i = 0; i < 3; ++i) CHECK(v(i) == doctest::Approx(f.value(map, pts.row(i))));

    const PotentialLabel g = f.shifted(0.75);
    CHECK((g.values(rows) - (v.array() - 0.75).matrix()).norm() == doctest::Approx(0.0));
    const PotentialLabel neg = f.negated();
    CHECK((neg.values(rows) + v).norm() == doctest::Approx(0.0).epsilon(1).scale(1e-12));
}

TEST_CASE("raw coefficients round trip and fold offsets into the constant") {
    const FeatureMap map = FeatureMap::monomial(2, 2);
    Eigen::VectorXd raw(6);
    raw << -0.64, 0.0, 0.0, 1.0, 0.0, 1.0;  // x^2 + y^2 - 0.8^2
    const PotentialLabel f = label_from_raw(map, raw);
    const Eigen::VectorXd back = label_to_raw(map, f);
    // recovered up to the scale (and possibly sign) fixed by canonicalisation
    const double scale = back(3) / raw(3);
    CHECK(std::abs(scale) > 0.0);
    CHECK((back - scale * raw).norm() == doctest::Approx(0.0).epsilon(1).scale(1e-12));

    // a nonzero offset moves into the constant coordinate of the raw vector
    const PotentialLabel shifted = f.shifted(0.1);
    const Eigen::VectorXd raw_shifted = label_to_raw(map, shifted);
    CHECK(raw_shifted(3) == doctest::Approx(back(3)));
    CHECK(raw_shifted(0) == doctest::Approx(back(0) - 0.1));

    CHECK_THROWS_AS(label_to_raw(FeatureMap::monomial(2, 1), f), std::invalid_argument);
    const FeatureMap bare = FeatureMap::monomial_without_constant(2, 2);
    const PotentialLabel on_bare =
        PotentialLabel::from_functional(Eigen::VectorXd::Ones(5), 0.2);
    CHECK_THROWS_AS(label_to_raw(bare, on_bare), std::domain_error);
}

TEST_CASE("raw round trip survives whitening") {
    const FeatureMap map = FeatureMap::monomial(2, 2);
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(6, 6);
    w(0, 0) = 2.0;
    w(3, 3) = 0.5;
    w(1, 2) = 0.25;  // any invertible transform
    const FeatureMap wmap = map.with_transform(w);
    Eigen::VectorXd raw(6);
    raw << 0.3, -1.0, 0.2, 1.0, 0.0, 1.0;
    const PotentialLabel f = label_from_raw(wmap, raw);
    const Eigen::VectorXd back = label_to_raw(wmap, f);
    const double scale = back(3) / raw(3);
    CHECK((back - scale * raw).norm() == doctest::Approx(0.0).epsilon(1).scale(1e-10));
}

TEST_CASE("the SVD candidate annihilates an exact circle") {
    const FeatureMap map = FeatureMap::monomial(2, 2);
    const Eigen::MatrixXd rows = map.evaluate_rows(circle_points(0.8, 40));
    const CandidateResult cand = candidate_label(rows);
    CHECK_FALSE(cand.degenerate);
    CHECK(cand.smallest_singular < 1e-10);
    CHECK(cand.second_smallest > 1e-3);

    Eigen::VectorXd truth(6);
    truth << -0.64, 0.0, 0.0, 1.0, 0.0, 1.0;
    const Eigen::VectorXd got = label_to_raw(map, cand.label);
    const double cosine = std::abs(got.dot(truth)) / (got.norm() * truth.norm());
    CHECK(cosine == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("collinear clouds set the degenerate flag") {
    const FeatureMap map = FeatureMap::monomial(2, 2);
    Eigen::MatrixXd pts(20, 2);
    for (int i = 0; i < 20; ++i) {
        const double x = -1.0 + 0.1 * i;
        pts(i, 0) = x;
        pts(i, 1) = 0.5 * x + 0.25;  // a line admits several degree-2 annihilators
    }
    const CandidateResult cand = candidate_label(map.evaluate_rows(pts));
    CHECK(cand.degenerate);
    CHECK_THROWS_AS(candidate_label(map.evaluate_rows(pts.topRows(5))), std::invalid_argument);
}

TEST_CASE("tight_interval is the exact min-max envelope") {
    const FeatureMap map = FeatureMap::monomial(1, 1);
    const PotentialLabel f =
        PotentialLabel::from_functional((Eigen::VectorXd(2) << 0.0, 1.0).finished());
    Eigen::MatrixXd pts(4, 1);
    pts << 0.5, -0.25, 0.875, 0.125;
    const Interval i = tight_interval(f, map.evaluate_rows(pts));
    CHECK(i.lo == -0.25);
    CHECK(i.hi == 0.875);
    CHECK_THROWS_AS(tight_interval(f, Eigen::MatrixXd(0, 2)), std::invalid_argument);
}

TEST_CASE("pushforward mass of the unit disk under the uniform box is pi/4") {
    const FeatureMap map = FeatureMap::monomial(2, 2);
    const auto noise =
        BackgroundNoise::uniform_box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
    Eigen::VectorXd raw(6);
    raw << -1.0, 0.0, 0.0, 1.0, 0.0, 1.0;  // x^2 + y^2 - 1
    const PotentialLabel f = label_from_raw(map, raw);
    // f spans the disk interior between its value at the centre and 0 on the
    // boundary; the hull absorbs the sign chosen by canonicalisation. The
    // centre value is +-1/sqrt(3) because the canonical scale divides by ||raw||.
    const double centre_value = f.value(map, Eigen::Vector2d(0.0, 0.0));
    CHECK(std::abs(centre_value) == doctest::Approx(1.0 / std::sqrt(3.0)));
    const Interval disk = Interval::hull(Interval(0.0, 0.0), Interval(centre_value, centre_value));
    const MassEstimate m = pushforward_mass(f, map, disk, noise, 400000, 13);
    CHECK(m.value == doctest::Approx(kPi / 4.0).epsilon(0.005));
    CHECK(m.samples == 400000);
    CHECK(m.std_error == doctest::Approx(std::sqrt(m.value * (1 - m.value) / 400000.0)));
}

TEST_CASE("MassSession masses are monotone in the interval on a shared stream") {
    const FeatureMap map = FeatureMap::monomial(2, 2);
    const auto noise =
        BackgroundNoise::uniform_box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
    const MassSession session(map, noise, 20000, 21);
    CHECK(session.samples() == 20000);
    CHECK(session.map_has_constants());
    const PotentialLabel f =
        PotentialLabel::from_functional((Eigen::VectorXd(6) << 0, 1, 0, 0, 0, 0).finished());
    double prev = -1.0;
    for (double hi : {0.1, 0.2, 0.3, 0.5, 0.9}) {
        const double v = session.mass(f, Interval(-0.1, hi)).value;
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(MassSession(map, noise, 0, 1), std::invalid_argument);
}

TEST_CASE("check_label shifts through the interval midpoint only when constants exist") {
    const auto noise =
        BackgroundNoise::uniform_box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
    // cloud whose f-values sit in a narrow band away from zero
    Eigen::MatrixXd pts(30, 2);
    rng::Stream s(77, rng::kProperty);
    for (int i = 0; i < 30; ++i) {
        pts(i, 0) = 0.55 + 0.01 * s.uniform();
        pts(i, 1) = s.uniform(-1.0, 1.0);
    }

    const FeatureMap with_const = FeatureMap::monomial(2, 1);
    const PotentialLabel fx = PotentialLabel::from_functional(
        (Eigen::VectorXd(3) << 0.0, 1.0, 0.0).finished());  // f(x, y) = x
    const LabelCheck shifted = check_label(fx, with_const, pts, noise, 0.05, {20000, 3});
    CHECK(shifted.accepted);
    CHECK(shifted.shifted_by == doctest::Approx(0.555).epsilon(0.01));
    CHECK(shifted.interval.contains(0.0));
    CHECK(shifted.mass.value < 0.05);

    const FeatureMap bare = FeatureMap::monomial_without_constant(2, 1);
    const PotentialLabel fx_bare = PotentialLabel::from_functional(
        (Eigen::VectorXd(2) << 1.0, 0.0).finished());
    const LabelCheck rejected = check_label(fx_bare, bare, pts, noise, 0.05, {20000, 3});
    CHECK_FALSE(rejected.accepted);  // same tiny mass, but 0 is outside and no shift is possible
    CHECK(rejected.shifted_by == 0.0);
    CHECK(rejected.mass.value < 0.05);

    CHECK_THROWS_AS(check_label(fx, with_const, pts, noise, 0.0, {100, 1}), std::invalid_argument);
}

TEST_CASE("estimate_label_set accepts structure and rejects scatter") {
    const FeatureMap map = FeatureMap::monomial(2, 2);
    const auto noise =
        BackgroundNoise::uniform_box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
    const LabelSetEstimate good =
        estimate_label_set(map, circle_points(0.7, 30), noise, 0.05, {20000, 5});
    REQUIRE_FALSE(good.empty());
    CHECK(good.check.accepted);
    CHECK(good.check.mass.value < 0.05);

    rng::Stream s(31, rng::kProperty);
    Eigen::MatrixXd scatter(40, 2);
    for (int i = 0; i < 40; ++i) {
        scatter(i, 0) = s.uniform(-1.0, 1.0);
        scatter(i, 1) = s.uniform(-1.0, 1.0);
    }
    const LabelSetEstimate bad = estimate_label_set(map, scatter, noise, 0.05, {20000, 5});
    CHECK(bad.empty());
    CHECK_FALSE(bad.check.accepted);
}

TEST_CASE("LabelCheck round trips through JSON") {
    LabelCheck c;
    c.accepted = true;
    c.interval = Interval(-0.25, 0.125);
    c.mass = MassEstimate{0.03125, 20000, 0.00123};
    c.shifted_by = -0.0625;
    const LabelCheck back = LabelCheck::from_json(c.to_json());
    CHECK(back.accepted == c.accepted);
    CHECK(back.interval.lo == c.interval.lo);
    CHECK(back.mass.value == c.mass.value);
    CHECK(back.mass.samples == c.mass.samples);
    CHECK(back.shifted_by == c.shifted_by);
}
