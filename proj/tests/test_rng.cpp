#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "labelkit/rng.hpp"

using labelkit::rng::Stream;

TEST_CASE("streams with the same key replay the same sequence") {
    Stream a(42, labelkit::rng::kSample, 7);
    Stream b(42, labelkit::rng::kSample, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different tags and indices give different streams") {
    Stream a(42, labelkit::rng::kSample, 0);
    Stream b(42, labelkit::rng::kMass, 0);
    Stream c(42, labelkit::rng::kSample, 1);
    CHECK(a.next_u64() != b.next_u64());
    Stream a2(42, labelkit::rng::kSample, 0);
    a2.next_u64();
    CHECK(a2.next_u64() != c.next_u64());
}

TEST_CASE("uniform stays in [0, 1) and has the right mean") {
    Stream s(1, labelkit::rng::kSample);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws have unit variance") {
    Stream s(2, labelkit::rng::kSample);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(sum / n == doctest::Approx(0.0).epsilon(1).scale(0.02));
    CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("below is in range and roughly uniform") {
    Stream s(3, labelkit::rng::kSample);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
        const auto v = s.below(7);
        REQUIRE(v < 7);
        ++counts[static_cast<std::size_t>(v)];
    }
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("sample_without_replacement returns sorted distinct indices") {
    Stream s(4, labelkit::rng::kSample);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 5 + trial;
        const int k = 1 + trial % n;
        const auto idx = s.sample_without_replacement(n, k);
        REQUIRE(static_cast<int>(idx.size()) == k);
        CHECK(std::is_sorted(idx.begin(), idx.end()));
        CHECK(std::set<int>(idx.begin(), idx.end()).size() == idx.size());
        CHECK(idx.front() >= 0);
        CHECK(idx.back() < n);
    }
    // full draw is a permutation of 0..n-1
    const auto all = s.sample_without_replacement(12, 12);
    for (int i = 0; i < 12; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("shuffle permutes") {
    Stream s(5, labelkit::rng::kSample);
    std::vector<int> v(40);
    for (int i = 0; i < 40; ++i) v[static_cast<std::size_t>(i)] = i;
    auto w = v;
    s.shuffle(w);
    CHECK(w != v);
    std::sort(w.begin(), w.end());
    CHECK(w == v);
}
