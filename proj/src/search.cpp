#include "labelkit/search.hpp"

#include <algorithm>
#include <cstring>
#include <set>
#include <stdexcept>

namespace labelkit {

namespace {

const char* absorb_order_name(AbsorbOrder o) {
    return o == AbsorbOrder::kIndex ? "index" : "random-permutation";
}

AbsorbOrder absorb_order_from_name(const std::string& s) {
    if (s == "index") return AbsorbOrder::kIndex;
    if (s == "random-permutation") return AbsorbOrder::kRandomPermutation;
    throw std::runtime_error("unknown absorb_order: " + s);
}

const char* seed_mode_name(SeedMode m) {
    return m == SeedMode::kUniform ? "uniform" : "local";
}

SeedMode seed_mode_from_name(const std::string& s) {
    if (s == "uniform") return SeedMode::kUniform;
    if (s == "local") return SeedMode::kLocalNeighborhood;
    throw std::runtime_error("unknown seed_mode: " + s);
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& all, const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), all.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = all.row(idx[i]);
    return out;
}

struct NeighbourIndex {
    std::vector<std::vector<int>> pool;  // per-anchor k nearest, self excluded
    std::vector<double> r3;              // per-point third-neighbour radius
};

// Brute-force O(n^2) neighbour scan; ties broken by index.
NeighbourIndex build_neighbour_index(const Eigen::Ref<const Eigen::MatrixXd>& points, int k) {
    const int n = static_cast<int>(points.rows());
    NeighbourIndex idx;
    idx.pool.resize(static_cast<std::size_t>(n));
    idx.r3.resize(static_cast<std::size_t>(n), 0.0);
    const int front = std::max(k, std::min(3, n - 1));
    std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b)
            dist[static_cast<std::size_t>(b)] = {(points.row(a) - points.row(b)).squaredNorm(), b};
        dist[static_cast<std::size_t>(a)].first = std::numeric_limits<double>::infinity();
        std::partial_sort(dist.begin(), dist.begin() + front, dist.end());
        auto& row = idx.pool[static_cast<std::size_t>(a)];
        row.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) row.push_back(dist[static_cast<std::size_t>(i)].second);
        if (n > 1) idx.r3[static_cast<std::size_t>(a)] = std::sqrt(dist[static_cast<std::size_t>(std::min(3, n - 1) - 1)].first);
    }
    return idx;
}

}  // namespace

nlohmann::json SearchConfig::to_json() const {
    return {{"n0", n0},
            {"iterations", iterations},
            {"delta", delta},
            {"seed", seed},
            {"absorb_order", absorb_order_name(absorb_order)},
            {"seed_mode", seed_mode_name(seed_mode)},
            {"absorb_passes", absorb_passes},
            {"mc_samples", mc_samples}};
}

SearchConfig SearchConfig::from_json(const nlohmann::json& j) {
    SearchConfig c;
    c.n0 = j.value("n0", 0);
    c.iterations = j.value("iterations", 500);
    c.delta = j.value("delta", 0.05);
    if (!j.contains("seed")) throw std::runtime_error("search config: seed is required");
    c.seed = j.at("seed").get<std::uint64_t>();
    c.absorb_order = absorb_order_from_name(j.value("absorb_order", std::string("random-permutation")));
    c.seed_mode = seed_mode_from_name(j.value("seed_mode", std::string("uniform")));
    c.absorb_passes = j.value("absorb_passes", 1);
    c.mc_samples = j.value("mc_samples", 20000L);
    return c;
}

nlohmann::json LabelRecord::to_json() const {
    return {{"members", members},
            {"label", label.to_json()},
            {"check", check.to_json()},
            {"degenerate", degenerate}};
}

LabelRecord LabelRecord::from_json(const nlohmann::json& j) {
    LabelRecord r;
    r.members = j.at("members").get<std::vector<int>>();
    r.label = PotentialLabel::from_json(j.at("label"));
    r.check = LabelCheck::from_json(j.at("check"));
    r.degenerate = j.value("degenerate", false);
    return r;
}

nlohmann::json LabelAtlas::to_json() const {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records) recs.push_back(r.to_json());
    return {{"fingerprint", dataset_fingerprint},
            {"map", map_descriptor},
            {"noise", noise_descriptor},
            {"config", config.to_json()},
            {"records", recs}};
}

LabelAtlas LabelAtlas::from_json(const nlohmann::json& j) {
    LabelAtlas a;
    a.dataset_fingerprint = j.at("fingerprint").get<std::string>();
    a.map_descriptor = j.at("map");
    a.noise_descriptor = j.at("noise");
    a.config = SearchConfig::from_json(j.at("config"));
    for (const auto& r : j.at("records")) a.records.push_back(LabelRecord::from_json(r));
    return a;
}

std::string dataset_fingerprint(const Eigen::Ref<const Eigen::MatrixXd>& points) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto absorb = [&h](const void* data, std::size_t len) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::int64_t rows = points.rows(), cols = points.cols();
    absorb(&rows, sizeof rows);
    absorb(&cols, sizeof cols);
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        for (Eigen::Index c = 0; c < points.cols(); ++c) {
            const double v = points(r, c);
            absorb(&v, sizeof v);
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

LabelAtlas label_search(const Eigen::Ref<const Eigen::MatrixXd>& points, const FeatureMap& map,
                        const BackgroundNoise& noise, const SearchConfig& config) {
    const int n = static_cast<int>(points.rows());
    const int dim = map.output_dim();
    SearchConfig cfg = config;
    if (cfg.n0 == 0) cfg.n0 = 3 * dim;
    if (cfg.n0 < dim)
        throw std::invalid_argument("label_search: n0 must be at least the feature dimension");
    if (cfg.n0 > n) throw std::invalid_argument("label_search: n0 exceeds the cloud size");
    if (cfg.iterations < 1) throw std::invalid_argument("label_search: iterations must be positive");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
        throw std::invalid_argument("label_search: delta must lie in (0, 1)");
    if (cfg.absorb_passes < 1)
        throw std::invalid_argument("label_search: absorb_passes must be positive");

    const Eigen::MatrixXd feats = map.evaluate_rows(points);
    const MassSession session(map, noise, cfg.mc_samples, rng::key(cfg.seed, rng::kMass));
    const int pool_size = std::min(3 * cfg.n0, n);
    NeighbourIndex neighbours;
    if (cfg.seed_mode == SeedMode::kLocalNeighborhood && pool_size > 1)
        neighbours = build_neighbour_index(points, pool_size - 1);

    LabelAtlas atlas;
    atlas.config = cfg;
    atlas.dataset_fingerprint = dataset_fingerprint(points);
    atlas.map_descriptor = map.to_json();
    atlas.noise_descriptor = noise.to_json();

    std::set<std::vector<int>> seen;
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        rng::Stream rs(cfg.seed, rng::kSearchIter, static_cast<std::uint64_t>(iter));

        std::vector<int> members;
        if (cfg.seed_mode == SeedMode::kUniform) {
            members = rs.sample_without_replacement(n, cfg.n0);
        } else {
            const int anchor = static_cast<int>(rs.below(static_cast<std::uint64_t>(n)));
            std::vector<int> pool;
            pool.reserve(static_cast<std::size_t>(pool_size));
            pool.push_back(anchor);
            if (pool_size > 1) {
                const auto& nn = neighbours.pool[static_cast<std::size_t>(anchor)];
                pool.insert(pool.end(), nn.begin(), nn.end());
            }
            const auto r3_of = [&](int p) { return neighbours.r3[static_cast<std::size_t>(p)]; };
            if (pool_size <= 1) {
                members = std::move(pool);
            } else if (iter % 3 == 1) {
                // densest: smallest third-neighbour radius, ties by nearness
                std::stable_sort(pool.begin(), pool.end(),
                                 [&](int a, int b) { return r3_of(a) < r3_of(b); });
                pool.resize(static_cast<std::size_t>(cfg.n0));
                members = std::move(pool);
            } else {
                // drop pool members sitting in anomalously sparse surroundings
                std::vector<double> radii;
                radii.reserve(pool.size());
                for (int p : pool) radii.push_back(r3_of(p));
                std::sort(radii.begin(), radii.end());
                const std::size_t h = radii.size() / 2;
                const double median =
                    radii.size() % 2 ? radii[h] : 0.5 * (radii[h - 1] + radii[h]);
                std::vector<int> survivors, dropped;
                for (int p : pool) (r3_of(p) <= 1.5 * median ? survivors : dropped).push_back(p);
                for (int p : dropped) {
                    if (survivors.size() >= static_cast<std::size_t>(cfg.n0)) break;
                    survivors.push_back(p);
                }
                if (iter % 3 == 0) {
                    survivors.resize(static_cast<std::size_t>(cfg.n0));  // nearest
                    members = std::move(survivors);
                } else {
                    const auto pick = rs.sample_without_replacement(
                        static_cast<int>(survivors.size()), cfg.n0);
                    members.reserve(static_cast<std::size_t>(cfg.n0));
                    for (int i : pick) members.push_back(survivors[static_cast<std::size_t>(i)]);
                }
            }
            std::sort(members.begin(), members.end());
        }

        LabelSetEstimate est = estimate_label_set_cached(gather_rows(feats, members), session, cfg.delta);
        if (est.empty()) continue;

        std::vector<int> remaining;
        remaining.reserve(static_cast<std::size_t>(n - cfg.n0));
        {
            std::size_t mi = 0;
            for (int p = 0; p < n; ++p) {
                if (mi < members.size() && members[mi] == p) {
                    ++mi;
                    continue;
                }
                remaining.push_back(p);
            }
        }
        for (int pass = 0; pass < cfg.absorb_passes && !remaining.empty(); ++pass) {
            if (cfg.absorb_order == AbsorbOrder::kRandomPermutation) rs.shuffle(remaining);
            std::vector<int> rejected;
            rejected.reserve(remaining.size());
            for (int p : remaining) {
                std::vector<int> grown = members;
                grown.insert(std::lower_bound(grown.begin(), grown.end(), p), p);
                LabelSetEstimate next = estimate_label_set_cached(gather_rows(feats, grown), session, cfg.delta);
                if (!next.empty()) {
                    members = std::move(grown);
                    est = std::move(next);
                } else {
                    rejected.push_back(p);
                }
            }
            if (rejected.size() == remaining.size()) break;
            remaining = std::move(rejected);
        }

        if (seen.insert(members).second) {
            LabelRecord rec;
            rec.members = std::move(members);
            rec.label = *est.label;
            rec.check = est.check;
            rec.degenerate = est.degenerate_candidate;
            atlas.records.push_back(std::move(rec));
        }
    }

    std::sort(atlas.records.begin(), atlas.records.end(),
              [](const LabelRecord& a, const LabelRecord& b) { return a.members < b.members; });
    return atlas;
}

LabelAtlas dedupe_similar(const LabelAtlas& atlas, double cosine_tol) {
    if (!(cosine_tol >= 0.0 && cosine_tol < 1.0))
        throw std::invalid_argument("dedupe_similar: cosine_tol must lie in [0, 1)");
    const FeatureMap map = FeatureMap::from_json(atlas.map_descriptor);

    std::vector<Eigen::VectorXd> raw;
    raw.reserve(atlas.records.size());
    for (const auto& r : atlas.records) raw.push_back(label_to_raw(map, r.label).normalized());

    std::vector<std::size_t> order(atlas.records.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return atlas.records[a].members.size() > atlas.records[b].members.size();
    });

    std::vector<bool> absorbed(atlas.records.size(), false);
    std::vector<std::size_t> keep;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t i = order[oi];
        if (absorbed[i]) continue;
        keep.push_back(i);
        for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
            const std::size_t j = order[oj];
            if (absorbed[j]) continue;
            const double cosine = std::abs(raw[i].dot(raw[j]));
            if (cosine < 1.0 - cosine_tol) continue;
            const auto& a = atlas.records[i].members;
            const auto& b = atlas.records[j].members;
            std::vector<int> inter;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
            const double uni = static_cast<double>(a.size() + b.size() - inter.size());
            if (static_cast<double>(inter.size()) / uni >= 0.8) absorbed[j] = true;
        }
    }

    LabelAtlas out = atlas;
    out.records.clear();
    for (std::size_t i : keep) out.records.push_back(atlas.records[i]);
    std::sort(out.records.begin(), out.records.end(),
              [](const LabelRecord& a, const LabelRecord& b) { return a.members < b.members; });
    return out;
}

VerifyReport verify_atlas(const LabelAtlas& atlas, const Eigen::Ref<const Eigen::MatrixXd>& points,
                          std::uint64_t fresh_seed, long mc_multiplier) {
    const FeatureMap map = FeatureMap::from_json(atlas.map_descriptor);
    const BackgroundNoise noise = BackgroundNoise::from_json(atlas.noise_descriptor);
    const Eigen::MatrixXd feats = map.evaluate_rows(points);
    const MassSession session(map, noise, atlas.config.mc_samples * mc_multiplier,
                              rng::key(fresh_seed, rng::kMass, 1));

    VerifyReport report;
    report.fingerprint_matches = dataset_fingerprint(points) == atlas.dataset_fingerprint;
    report.all_ok = report.fingerprint_matches;
    for (std::size_t i = 0; i < atlas.records.size(); ++i) {
        const auto& rec = atlas.records[i];
        const Interval tight = tight_interval(rec.label, gather_rows(feats, rec.members));
        const MassEstimate fresh = session.mass(rec.label, tight);
        VerifyRow row;
        row.record = static_cast<int>(i);
        row.interval_contains_zero = tight.contains(0.0);
        row.mass = fresh.value;
        row.bound = atlas.config.delta + 3.0 * rec.check.mass.std_error;
        row.accepted = row.interval_contains_zero && fresh.value < row.bound;
        report.all_ok = report.all_ok && row.accepted;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace labelkit
