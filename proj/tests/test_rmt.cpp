#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "labelkit/rmt.hpp"

using namespace labelkit;

TEST_CASE("concentration exponents at the defaults match frozen values") {
    const ConcentrationExponents e = concentration_probability_exponent(6, 400, {});
    CHECK(e.beta == doctest::Approx(0.5));  // alpha = 2
    CHECK(e.a == doctest::Approx(0.163816).epsilon(1e-4));
    CHECK(e.b == doctest::Approx(0.213816).epsilon(1e-4));
    CHECK(e.p == doctest::Approx(0.993837).epsilon(1e-4));
}

TEST_CASE("edge cases zero out the Orlicz term") {
    CHECK(concentration_probability_exponent(1, 400, {}).a == 0.0);
    CHECK(concentration_probability_exponent(6, 1, {}).a == 0.0);
}

TEST_CASE("concentration parameters are validated") {
    ConcentrationParams p;
    p.t = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.gamma = 0.6;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.alpha = -1.0;
    CHECK_THROWS_AS(concentration_probability_exponent(6, 100, p), std::invalid_argument);
    CHECK_THROWS_AS(concentration_probability_exponent(0, 100, {}), std::invalid_argument);
}

TEST_CASE("the exponent grows with gamma") {
    double prev = 0.0;
    for (double gamma : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        ConcentrationParams p;
        p.gamma = gamma;
        const double value = concentration_probability_exponent(6, 2000, p).p;
        CHECK(value >= prev);
        prev = value;
    }
}

TEST_CASE("a constant-only feature matrix has smin ratio exactly 1") {
    const FeatureMap map = FeatureMap::monomial(2, 0);
    const auto noise =
        BackgroundNoise::uniform_box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
    CHECK(smin_ratio(map, noise, 50, 3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(smin_ratio(map, noise, 0, 3), std::invalid_argument);
}

TEST_CASE("whitened noise has smin ratio near 1, structured data near 0") {
    const auto noise =
        BackgroundNoise::uniform_box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
    const FeatureMap wmap = make_whitened(FeatureMap::monomial(2, 2), noise, 50000, 7);
    const double background = smin_ratio(wmap, noise, 2000, 11);
    CHECK(background > 0.8);
    CHECK(background < 1.2);

    Eigen::MatrixXd circle(100, 2);
    for (int i = 0; i < 100; ++i) {
        const double a = 2.0 * 3.14159265358979323846 * i / 100;
        circle(i, 0) = 0.8 * std::cos(a);
        circle(i, 1) = 0.8 * std::sin(a);
    }
    CHECK(smin_ratio_of(wmap, circle) < 1e-8);
    CHECK_THROWS_AS(smin_ratio_of(wmap, circle.topRows(4)), std::invalid_argument);
}

TEST_CASE("delta_f matches the closed form for a uniform coordinate") {
    // f(x) = x under uniform [-1,1]: both one-sided masses of [0, e] equal e/2
    const FeatureMap map = FeatureMap::monomial(1, 1);
    const auto noise = BackgroundNoise::uniform_box(Eigen::VectorXd::Constant(1, -1.0),
                                                    Eigen::VectorXd::Constant(1, 1.0));
    const PotentialLabel f =
        PotentialLabel::from_functional((Eigen::VectorXd(2) << 0.0, 1.0).finished());
    const long n = 400;
    const double endpoint = 1.0 - 0.7 * std::pow(static_cast<double>(n), 0.3 - 0.5);
    const DeltaF d = delta_f(f, map, noise, n, 0.7, 0.3, 200000, 5);
    CHECK(d.value == doctest::Approx(endpoint / 2.0).epsilon(0.01));
    CHECK(d.n == n);
    CHECK(d.samples == 200000);
}

TEST_CASE("delta_f is zero in the vacuous regime") {
    const FeatureMap map = FeatureMap::monomial(1, 1);
    const auto noise = BackgroundNoise::uniform_box(Eigen::VectorXd::Constant(1, -1.0),
                                                    Eigen::VectorXd::Constant(1, 1.0));
    const PotentialLabel f =
        PotentialLabel::from_functional((Eigen::VectorXd(2) << 0.0, 1.0).finished());
    // 1 - t N^{gamma - 1/2} <= 0 when t is large and N small
    const DeltaF d = delta_f(f, map, noise, 4, 5.0, 0.3, 1000, 5);
    CHECK(d.value == 0.0);
}

TEST_CASE("recommend_delta scales delta_f by the safety factor") {
    const FeatureMap map = FeatureMap::monomial(1, 1);
    const auto noise = BackgroundNoise::uniform_box(Eigen::VectorXd::Constant(1, -1.0),
                                                    Eigen::VectorXd::Constant(1, 1.0));
    const PotentialLabel f =
        PotentialLabel::from_functional((Eigen::VectorXd(2) << 0.0, 1.0).finished());
    const DeltaF d = delta_f(f, map, noise, 400, 0.7, 0.3, 50000, 9);
    const double rec = recommend_delta(f, map, noise, 400, 0.7, 0.3, 0.5, 50000, 9);
    CHECK(rec == doctest::Approx(0.5 * d.value));
}
