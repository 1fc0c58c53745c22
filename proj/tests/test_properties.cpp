#include <doctest.h>

#include "property_suites.hpp"

using namespace labelkit::proptest;

namespace {
constexpr int kCases = 200;

void require_clean(const SuiteResult& r) {
    CAPTURE(r.first_failure);
    CHECK(r.cases == kCases);
    CHECK(r.failures == 0);
}
}  // namespace

TEST_CASE("union of labelled clouds stays labelled at the summed threshold") {
    require_clean(union_bound(kCases));
}

TEST_CASE("shifting a label by any point of its interval preserves the mass") {
    require_clean(shift_invariance(kCases));
}

TEST_CASE("nonzero rescaling of a functional canonicalises to the same label") {
    require_clean(scale_sign_invariance(kCases));
}

TEST_CASE("acceptance is monotone in delta") {
    require_clean(delta_monotonicity(kCases));
}

TEST_CASE("subsets shrink the tight interval and its mass") {
    require_clean(subset_monotonicity(kCases));
}

TEST_CASE("the SVD candidate beats random unit functionals") {
    require_clean(candidate_optimality(kCases));
}

TEST_CASE("whitened feature second moments are isotropic") {
    require_clean(whitening_isotropy(kCases));
}

TEST_CASE("noiseless pendulum parameters round trip through a fitted label") {
    require_clean(pendulum_roundtrip(kCases));
}
