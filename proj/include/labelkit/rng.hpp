#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace labelkit::rng {

// splitmix64 finalizer, used only to derive independent stream keys from
// (seed, purpose tag, index) triples.
constexpr std::uint64_t mix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0) noexcept {
    return mix(mix(seed) ^ mix(tag ^ 0x517cc1b727220a95ULL) ^ mix(index ^ 0x2545f4914f6cdd1dULL));
}

// Stream purposes. Every consumer keys its generator by (seed, tag[, index]),
// so results never depend on how work is scheduled elsewhere.
enum Tag : std::uint64_t {
    kSample = 1,
    kCovariance = 2,
    kMass = 3,
    kSearchIter = 4,
    kData = 5,
    kSminTrial = 6,
    kProperty = 7,
};

// Deterministic random stream. Wraps std::mt19937_64; floating-point draws use
// explicit conversions (and Box-Muller for normals) so results are identical
// across standard libraries.
class Stream {
public:
    explicit Stream(std::uint64_t raw_key) : gen_(raw_key) {}
    Stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0)
        : gen_(key(seed, tag, index)) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.28318530717958647692 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // unbiased integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // k distinct indices from [0, n), returned sorted
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = 0; i < k; ++i) {
            std::swap(idx[static_cast<std::size_t>(i)],
                      idx[static_cast<std::size_t>(i) + below(static_cast<std::uint64_t>(n - i))]);
        }
        idx.resize(static_cast<std::size_t>(k));
        std::sort(idx.begin(), idx.end());
        return idx;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace labelkit::rng
