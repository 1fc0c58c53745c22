#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "labelkit/data.hpp"
#include "labelkit/experiments.hpp"

using namespace labelkit;

TEST_CASE("circle specs carry the right conic coefficients") {
    // Normalised so the quadratic form equals 1 on the locus: x^2/r^2 + y^2/r^2 - 1.
    const ConicSpec c = ConicSpec::circle(0.0, 0.0, 0.8, 50, 0.0);
    const double inv_r2 = 1.0 / 0.64;
    const Eigen::VectorXd raw = c.raw_feature_coefficients();
    REQUIRE(raw.size() == 6);
    CHECK(raw(0) == doctest::Approx(-1.0));     // constant
    CHECK(raw(1) == 0.0);                       // x
    CHECK(raw(2) == 0.0);                       // y
    CHECK(raw(3) == doctest::Approx(inv_r2));   // x^2
    CHECK(raw(4) == 0.0);                       // xy
    CHECK(raw(5) == doctest::Approx(inv_r2));   // y^2

    // Same direction as the unnormalised form x^2 + y^2 - r^2.
    Eigen::VectorXd plain(6);
    plain << -0.64, 0.0, 0.0, 1.0, 0.0, 1.0;
    CHECK(raw.dot(plain) / (raw.norm() * plain.norm()) == doctest::Approx(1.0));

    CHECK(c.residual(0.8, 0.0) == doctest::Approx(0.0));
    CHECK(c.residual(0.0, 0.0) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(ConicSpec::circle(0, 0, -1.0, 10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ConicSpec::circle(0, 0, 1.0, 10, -0.1), std::invalid_argument);
}

TEST_CASE("rotated ellipses satisfy their own residual") {
    const ConicSpec e = ConicSpec::ellipse(0.2, -0.1, 0.5, 0.3, 0.7, 10, 0.0);
    for (double a : {0.0, 0.5, 1.0, 2.5, 4.0}) {
        const double x = 0.2 + 0.5 * std::cos(a) * std::cos(0.7) - 0.3 * std::sin(a) * std::sin(0.7);
        const double y = -0.1 + 0.5 * std::cos(a) * std::sin(0.7) + 0.3 * std::sin(a) * std::cos(0.7);
        CHECK(e.residual(x, y) == doctest::Approx(0.0).epsilon(1).scale(1e-12));
    }
}

TEST_CASE("conic specs round trip through JSON") {
    const ConicSpec c = ConicSpec::ellipse(0.1, 0.2, 0.4, 0.3, 1.1, 77, 0.05);
    const ConicSpec back = ConicSpec::from_json(c.to_json());
    CHECK((back.coefficients - c.coefficients).norm() == 0.0);
    CHECK(back.n == c.n);
    CHECK(back.sigma == c.sigma);
    CHECK(back.raw_feature_coefficients() == c.raw_feature_coefficients());
}

TEST_CASE("generate_conics partitions indices into shapes then noise") {
    const std::vector<ConicSpec> specs = {ConicSpec::circle(-0.25, -0.25, 0.45, 30, 0.0),
                                          ConicSpec::circle(0.25, 0.25, 0.45, 20, 0.0)};
    const Dataset ds =
        generate_conics(specs, Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), 25, 99);
    CHECK(ds.points.rows() == 75);
    REQUIRE(ds.truth.members.size() == 2);
    CHECK(ds.truth.members[0].size() == 30);
    CHECK(ds.truth.members[1].size() == 20);
    CHECK(ds.truth.noise_points.size() == 25);
    CHECK(ds.truth.members[0].front() == 0);
    CHECK(ds.truth.members[1].front() == 30);
    CHECK(ds.truth.noise_points.front() == 50);

    // sigma = 0: members lie exactly on their circle; noise fills the box
    for (std::size_t t = 0; t < 2; ++t)
        for (int idx : ds.truth.members[t])
            CHECK(std::abs(specs[t].residual(ds.points(idx, 0), ds.points(idx, 1))) < 1e-9);
    for (int idx : ds.truth.noise_points) {
        CHECK(std::abs(ds.points(idx, 0)) <= 1.0);
        CHECK(std::abs(ds.points(idx, 1)) <= 1.0);
    }
    CHECK(ds.truth.truth_raw.size() == 2);
    CHECK((ds.truth.truth_raw[0] - specs[0].raw_feature_coefficients()).norm() == 0.0);

    // deterministic in the seed
    const Dataset again =
        generate_conics(specs, Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), 25, 99);
    CHECK((again.points - ds.points).norm() == 0.0);
}

TEST_CASE("sampling an unreachable locus throws") {
    Vector6d coeffs;
    coeffs << 1.0, 0.0, 1.0, 0.0, 0.0, 1.0;  // x^2 + y^2 + 1 = 0 has no real points
    const ConicSpec impossible = ConicSpec::general(coeffs, 5, 0.0);
    CHECK_THROWS_AS(
        generate_conics({impossible}, Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), 0, 1),
        std::domain_error);
    Vector6d constant = Vector6d::Zero();
    constant(5) = 1.0;
    CHECK_THROWS_AS(ConicSpec::general(constant, 5, 0.0), std::invalid_argument);
}

TEST_CASE("pendulum specs encode the phase-space ellipse") {
    const PendulumSpec p{0.3, 0.8, 4.0, 40};
    const Vector6d c = p.conic_coefficients();
    // (x - 0.3)^2 + 4 v^2 = 0.64
    CHECK(c(0) == doctest::Approx(1.0));   // x^2
    CHECK(c(1) == 0.0);                    // xv
    CHECK(c(2) == doctest::Approx(4.0));   // v^2
    CHECK(c(3) == doctest::Approx(-0.6));  // x
    CHECK(c(4) == 0.0);                    // v
    CHECK(c(5) == doctest::Approx(0.09 - 0.64));
    const PendulumSpec back = PendulumSpec::from_json(p.to_json());
    CHECK(back.centre == p.centre);
    CHECK(back.amplitude == p.amplitude);
    CHECK(back.mass == p.mass);
    CHECK(back.n == p.n);
}

TEST_CASE("generate_pendulums puts members exactly on their energy ellipse") {
    const auto specs = presets::reference_pendulums(50);
    const auto background =
        BackgroundNoise::uniform_box(Eigen::Vector2d(-1.0, -0.5), Eigen::Vector2d(1.0, 0.5));
    const Dataset ds = generate_pendulums(specs, background, 30, 11);
    CHECK(ds.points.rows() == 180);
    REQUIRE(ds.truth.members.size() == 3);
    for (std::size_t t = 0; t < 3; ++t) {
        const auto& s = specs[t];
        for (int idx : ds.truth.members[t]) {
            const double x = ds.points(idx, 0), v = ds.points(idx, 1);
            const double lhs = (x - s.centre) * (x - s.centre) + s.mass * v * v;
            CHECK(lhs == doctest::Approx(s.amplitude * s.amplitude).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(generate_pendulums({{0.0, -1.0, 1.0, 5}}, background, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_pendulums(specs, BackgroundNoise::standard_gaussian(3), 5, 1),
                    std::invalid_argument);
}

TEST_CASE("reference pendulum parameters survive the algebraic round trip") {
    const FeatureMap map = FeatureMap::monomial(2, 2);
    for (const PendulumSpec& spec : presets::reference_pendulums(10)) {
        const ConicSpec conic = ConicSpec::general(spec.conic_coefficients(), 10, 0.0);
        const PotentialLabel label = label_from_raw(map, conic.raw_feature_coefficients());
        const PendulumParameters rec = pendulum_from_label(map, label);
        CHECK(rec.centre == doctest::Approx(spec.centre).epsilon(1e-9));
        CHECK(rec.amplitude == doctest::Approx(spec.amplitude).epsilon(1e-9));
        CHECK(rec.mass == doctest::Approx(spec.mass).epsilon(1e-9));
    }
}

TEST_CASE("pendulum inversion rejects non-elliptical labels") {
    const FeatureMap map = FeatureMap::monomial(2, 2);
    Eigen::VectorXd hyperbola(6);
    hyperbola << -1.0, 0.0, 0.0, 1.0, 0.0, -1.0;  // x^2 - v^2 = 1
    CHECK_THROWS_AS(pendulum_from_label(map, label_from_raw(map, hyperbola)), std::domain_error);
    Eigen::VectorXd crossed(6);
    crossed << -0.5, 0.0, 0.0, 1.0, 0.8, 1.0;  // strong xv term: not axis-aligned
    CHECK_THROWS_AS(pendulum_from_label(map, label_from_raw(map, crossed)), std::domain_error);
}

TEST_CASE("match_label_to_truth is scale and sign blind") {
    const FeatureMap map = FeatureMap::monomial(2, 2);
    Eigen::VectorXd truth(6);
    truth << -0.64, 0.0, 0.0, 1.0, 0.0, 1.0;
    const PotentialLabel f = label_from_raw(map, truth);
    CHECK(match_label_to_truth(map, f, truth) == doctest::Approx(1.0));
    CHECK(match_label_to_truth(map, f, (-2.5 * truth).eval()) == doctest::Approx(1.0));
    Eigen::VectorXd other(6);
    other << 0.0, 1.0, 0.0, 0.0, 0.0, 0.0;  // the line x = 0
    CHECK(match_label_to_truth(map, f, other) < 0.5);
}

TEST_CASE("ground truth round trips through JSON") {
    const Dataset ds = generate_conics({ConicSpec::circle(0, 0, 0.5, 10, 0.01)},
                                       Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1), 5, 2);
    const GroundTruth back = GroundTruth::from_json(ds.truth.to_json());
    CHECK(back.members == ds.truth.members);
    CHECK(back.noise_points == ds.truth.noise_points);
    REQUIRE(back.truth_raw.size() == ds.truth.truth_raw.size());
    CHECK((back.truth_raw[0] - ds.truth.truth_raw[0]).norm() == 0.0);
}
