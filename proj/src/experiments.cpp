#include "labelkit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "labelkit/io.hpp"
#include "labelkit/serialize.hpp"

namespace labelkit {

namespace {

constexpr double kT = 0.7;
constexpr double kGamma = 0.3;
constexpr long kCurveMcSamples = 200000;

// namespace component for seeds derived inside a runner (outside the rng::Tag range)
constexpr std::uint64_t kSubSeedTag = 1001;

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
    return rng::key(seed, kSubSeedTag, index);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Eigen::VectorXd box_lower() { return Eigen::Vector2d(-1.0, -1.0); }
Eigen::VectorXd box_upper() { return Eigen::Vector2d(1.0, 1.0); }

std::vector<ConicSpec> two_circle_specs(int per_circle) {
    return {ConicSpec::circle(-presets::kCircleOffset, 0.0, presets::kCircleRadius, per_circle,
                              presets::kCircleSigma),
            ConicSpec::circle(presets::kCircleOffset, 0.0, presets::kCircleRadius, per_circle,
                              presets::kCircleSigma)};
}

std::vector<ConicSpec> three_conic_specs(int per_conic) {
    return {ConicSpec::circle(-0.25, 0.0, 0.45, per_conic, presets::kCircleSigma),
            ConicSpec::ellipse(0.25, 0.10, 0.50, 0.30, 0.6, per_conic, presets::kCircleSigma),
            ConicSpec::ellipse(-0.10, -0.15, 0.55, 0.35, -0.9, per_conic, presets::kCircleSigma)};
}

int count_common(const std::vector<int>& sorted_a, const std::vector<int>& sorted_b) {
    int common = 0;
    auto ia = sorted_a.begin();
    auto ib = sorted_b.begin();
    while (ia != sorted_a.end() && ib != sorted_b.end()) {
        if (*ia < *ib)
            ++ia;
        else if (*ib < *ia)
            ++ib;
        else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    return common;
}

nlohmann::json base_metrics(const ExperimentBundle& b, const SearchConfig& cfg, long points) {
    return {{"name", b.name},
            {"seed", b.seed},
            {"points", points},
            {"delta", cfg.delta},
            {"n0", cfg.n0},
            {"iterations", cfg.iterations},
            {"seed_mode", cfg.seed_mode == SeedMode::kLocalNeighborhood ? "local" : "uniform"}};
}

// Shared pipeline of the labelled reproductions: generate -> whiten -> search
// -> dedupe -> compare against ground truth.
ExperimentBundle run_labelled(const std::string& name, std::uint64_t seed, Dataset ds,
                              const BackgroundNoise& noise, const SearchConfig& base_cfg,
                              double cosine_threshold, bool prefer_cosine = false) {
    ExperimentBundle bundle;
    bundle.name = name;
    bundle.seed = seed;

    const FeatureMap wmap =
        make_whitened(FeatureMap::monomial(2, 2), noise, presets::kWhitenSamples, seed);

    SearchConfig cfg = base_cfg;
    cfg.seed = seed;
    LabelAtlas atlas = label_search(ds.points, wmap, noise, cfg);
    const auto before = static_cast<long>(atlas.records.size());
    atlas = dedupe_similar(atlas, presets::kDedupeCosineTol);

    const std::vector<TruthMatch> matches =
        match_atlas_to_truth(atlas, wmap, ds.truth, cosine_threshold, prefer_cosine);

    std::vector<std::vector<int>> record_members;
    record_members.reserve(atlas.records.size());
    for (const auto& r : atlas.records) record_members.push_back(r.members);
    const auto per_point = membership_from_records(record_members, ds.points.rows());
    long unlabelled = 0;
    for (const auto& ids : per_point)
        if (ids.empty()) ++unlabelled;

    nlohmann::json metrics = base_metrics(bundle, cfg, ds.points.rows());
    metrics["cosine_threshold"] = cosine_threshold;
    metrics["records_before_dedupe"] = before;
    metrics["records"] = static_cast<long>(atlas.records.size());
    metrics["noise_points"] = static_cast<long>(ds.truth.noise_points.size());
    metrics["unlabelled_points"] = unlabelled;
    nlohmann::json tm = nlohmann::json::array();
    for (const auto& m : matches) tm.push_back(m.to_json());
    metrics["truth_matches"] = tm;

    bundle.metrics = std::move(metrics);
    bundle.dataset = std::move(ds);
    bundle.atlas = std::move(atlas);
    return bundle;
}

ExperimentBundle run_two_circles(const std::string& name, std::uint64_t seed, int per_circle,
                                 int noise_count, int n0, int iterations, double cosine_threshold) {
    Dataset ds = generate_conics(two_circle_specs(per_circle), box_lower(), box_upper(), noise_count, seed);
    const auto noise = BackgroundNoise::uniform_box(box_lower(), box_upper());
    SearchConfig cfg;
    cfg.n0 = n0;
    cfg.iterations = iterations;
    cfg.delta = presets::kDelta;
    cfg.seed_mode = SeedMode::kLocalNeighborhood;
    cfg.absorb_passes = presets::kAbsorbPasses;
    cfg.mc_samples = presets::kMcSamples;
    return run_labelled(name, seed, std::move(ds), noise, cfg, cosine_threshold);
}

ExperimentBundle run_three_conics(std::uint64_t seed) {
    Dataset ds = generate_conics(three_conic_specs(40), box_lower(), box_upper(), 200, seed);
    const auto noise = BackgroundNoise::uniform_box(box_lower(), box_upper());
    SearchConfig cfg;
    cfg.n0 = 8;
    cfg.iterations = 4000;
    cfg.delta = presets::kDelta;
    cfg.seed_mode = SeedMode::kLocalNeighborhood;
    cfg.absorb_passes = presets::kAbsorbPasses;
    cfg.mc_samples = presets::kMcSamples;
    return run_labelled("three-conics-lowsnr", seed, std::move(ds), noise, cfg, 0.99);
}

ExperimentBundle run_pendulums(std::uint64_t seed) {
    const auto specs = presets::reference_pendulums(100);
    const auto noise =
        BackgroundNoise::uniform_box(Eigen::Vector2d(-1.0, -0.5), Eigen::Vector2d(1.0, 0.5));
    Dataset ds = generate_pendulums(specs, noise, 100, seed);

    SearchConfig cfg;
    // small seeds: the three energy ellipses interleave, so an 18-point
    // neighbourhood is never single-pendulum while an 8-point one often is
    cfg.n0 = 8;
    cfg.iterations = 3000;
    cfg.delta = presets::kDelta;
    cfg.seed_mode = SeedMode::kLocalNeighborhood;
    cfg.absorb_passes = presets::kAbsorbPasses;
    cfg.mc_samples = presets::kMcSamples;

    ExperimentBundle bundle =
        run_labelled("pendulums", seed, std::move(ds), noise, cfg, 0.99, /*prefer_cosine=*/true);

    // invert each matched record back to physical parameters
    const FeatureMap wmap = FeatureMap::from_json(bundle.atlas->map_descriptor);
    nlohmann::json recovered = nlohmann::json::array();
    for (const auto& mj : bundle.metrics["truth_matches"]) {
        const int t = mj.at("truth").get<int>();
        const int rec = mj.at("record").get<int>();
        nlohmann::json row{{"truth", t},
                           {"centre", specs[static_cast<std::size_t>(t)].centre},
                           {"amplitude", specs[static_cast<std::size_t>(t)].amplitude},
                           {"mass", specs[static_cast<std::size_t>(t)].mass},
                           {"recovered", false}};
        if (rec >= 0) {
            try {
                const auto est = pendulum_from_label(
                    wmap, bundle.atlas->records[static_cast<std::size_t>(rec)].label);
                row["recovered"] = true;
                row["est_centre"] = est.centre;
                row["est_amplitude"] = est.amplitude;
                row["est_mass"] = est.mass;
                row["rel_err_centre"] =
                    std::abs(est.centre - specs[static_cast<std::size_t>(t)].centre) /
                    std::abs(specs[static_cast<std::size_t>(t)].centre);
                row["rel_err_amplitude"] =
                    std::abs(est.amplitude - specs[static_cast<std::size_t>(t)].amplitude) /
                    specs[static_cast<std::size_t>(t)].amplitude;
                row["rel_err_mass"] = std::abs(est.mass - specs[static_cast<std::size_t>(t)].mass) /
                                      specs[static_cast<std::size_t>(t)].mass;
            } catch (const std::domain_error&) {
                // matched record is not an axis-aligned ellipse; left unrecovered
            }
        }
        recovered.push_back(std::move(row));
    }
    bundle.metrics["pendulums"] = std::move(recovered);
    return bundle;
}

ExperimentBundle run_pure_noise_fdr(std::uint64_t seed) {
    ExperimentBundle bundle;
    bundle.name = "pure-noise-fdr";
    bundle.seed = seed;

    const long points_per_run = 200;
    const int runs = 100;
    const auto noise = BackgroundNoise::uniform_box(box_lower(), box_upper());
    const FeatureMap wmap =
        make_whitened(FeatureMap::monomial(2, 2), noise, presets::kWhitenSamples, seed);

    const PotentialLabel f = label_from_raw(wmap, presets::circle_raw_coefficients());
    const double delta = recommend_delta(f, wmap, noise, points_per_run, kT, kGamma, 0.5,
                                         kCurveMcSamples, sub_seed(seed, 0));

    Table table{"false_discoveries", {"run", "records"}, {}};
    int runs_with_records = 0;
    long total_records = 0;
    for (int run = 0; run < runs; ++run) {
        const Eigen::MatrixXd pts = noise.sample(points_per_run, sub_seed(seed, 100 + run));
        SearchConfig cfg;  // defaults: n0 = 3D, 500 iterations, uniform seeding
        cfg.delta = delta;
        cfg.seed = sub_seed(seed, 200 + run);
        cfg.mc_samples = presets::kMcSamples;
        const LabelAtlas atlas = label_search(pts, wmap, noise, cfg);
        const auto n_rec = static_cast<long>(atlas.records.size());
        if (n_rec > 0) ++runs_with_records;
        total_records += n_rec;
        table.rows.push_back({static_cast<double>(run), static_cast<double>(n_rec)});
    }

    bundle.metrics = {{"name", bundle.name},
                      {"seed", seed},
                      {"runs", runs},
                      {"points_per_run", points_per_run},
                      {"delta", delta},
                      {"t", kT},
                      {"gamma", kGamma},
                      {"safety", 0.5},
                      {"runs_with_records", runs_with_records},
                      {"total_records", total_records}};
    bundle.tables.push_back(std::move(table));
    return bundle;
}

ExperimentBundle run_smin_concentration(std::uint64_t seed) {
    ExperimentBundle bundle;
    bundle.name = "smin-concentration";
    bundle.seed = seed;

    const auto noise = BackgroundNoise::uniform_box(box_lower(), box_upper());
    const FeatureMap wmap =
        make_whitened(FeatureMap::monomial(2, 2), noise, presets::kWhitenSamples, seed);

    const std::vector<long> grid = {500, 1000, 2000, 5000};
    const int trials = 100;
    Table table{"smin_ratios", {"N", "seed_index", "smin_ratio"}, {}};
    nlohmann::json per_n = nlohmann::json::array();
    for (long n : grid) {
        const double half_width = 0.7 * std::pow(static_cast<double>(n), -0.2);
        std::vector<double> ratios;
        ratios.reserve(trials);
        int in_bounds = 0;
        for (int s = 0; s < trials; ++s) {
            const double r = smin_ratio(wmap, noise, n,
                                        sub_seed(seed, (static_cast<std::uint64_t>(n) << 16) + s));
            ratios.push_back(r);
            if (r >= 1.0 - half_width && r <= 1.0 + half_width) ++in_bounds;
            table.rows.push_back({static_cast<double>(n), static_cast<double>(s), r});
        }
        auto stddev_of = [&](int count) {
            double mean = 0.0;
            for (int i = 0; i < count; ++i) mean += ratios[static_cast<std::size_t>(i)];
            mean /= count;
            double var = 0.0;
            for (int i = 0; i < count; ++i) {
                const double d = ratios[static_cast<std::size_t>(i)] - mean;
                var += d * d;
            }
            return std::sqrt(var / (count - 1));
        };
        double mean = 0.0;
        for (double r : ratios) mean += r;
        mean /= trials;
        per_n.push_back({{"n", n},
                         {"lower", 1.0 - half_width},
                         {"upper", 1.0 + half_width},
                         {"fraction_in_bounds", static_cast<double>(in_bounds) / trials},
                         {"mean", mean},
                         {"std", stddev_of(trials)},
                         {"std_first_50", stddev_of(50)}});
    }

    bundle.metrics = {{"name", bundle.name}, {"seed", seed}, {"trials", trials}, {"per_n", per_n}};
    bundle.tables.push_back(std::move(table));
    return bundle;
}

ExperimentBundle run_signal_gap(std::uint64_t seed) {
    ExperimentBundle bundle;
    bundle.name = "signal-gap";
    bundle.seed = seed;

    const long n = 200;
    const auto noise = BackgroundNoise::uniform_box(box_lower(), box_upper());
    const FeatureMap wmap =
        make_whitened(FeatureMap::monomial(2, 2), noise, presets::kWhitenSamples, seed);

    const double noise_ratio = smin_ratio(wmap, noise, n, sub_seed(seed, 0));

    Table table{"signal_gap", {"sigma", "circle_ratio", "noise_ratio"}, {}};
    nlohmann::json per_sigma = nlohmann::json::array();
    const std::vector<double> sigmas = {0.02, 0.1};
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        const auto spec = ConicSpec::circle(0.0, 0.0, 0.8, static_cast<int>(n), sigmas[i]);
        const Dataset ds = generate_conics({spec}, box_lower(), box_upper(), 0, sub_seed(seed, 1 + i));
        const double circle_ratio = smin_ratio_of(wmap, ds.points);
        table.rows.push_back({sigmas[i], circle_ratio, noise_ratio});
        per_sigma.push_back({{"sigma", sigmas[i]},
                             {"circle_ratio", circle_ratio},
                             {"gap", circle_ratio / noise_ratio}});
    }

    bundle.metrics = {{"name", bundle.name},
                      {"seed", seed},
                      {"n", n},
                      {"noise_ratio", noise_ratio},
                      {"per_sigma", per_sigma}};
    bundle.tables.push_back(std::move(table));
    return bundle;
}

ExperimentBundle run_delta_f_curve(std::uint64_t seed) {
    ExperimentBundle bundle;
    bundle.name = "delta-f-curve";
    bundle.seed = seed;

    const std::vector<long> grid = {100, 500, 1000, 5000, 10000};
    const std::vector<std::pair<std::string, BackgroundNoise>> measures = {
        {"uniform", BackgroundNoise::uniform_box(box_lower(), box_upper())},
        {"gaussian", BackgroundNoise::standard_gaussian(2)}};

    nlohmann::json curves = nlohmann::json::object();
    for (std::size_t k = 0; k < measures.size(); ++k) {
        const auto& [label, noise] = measures[k];
        const FeatureMap wmap =
            make_whitened(FeatureMap::monomial(2, 2), noise, presets::kWhitenSamples, sub_seed(seed, k));
        const PotentialLabel f = label_from_raw(wmap, presets::circle_raw_coefficients());
        // one shared sample for the whole curve: masses are exactly monotone
        // in the interval, so the curve is nondecreasing by construction
        const MassSession session(wmap, noise, kCurveMcSamples, sub_seed(seed, 10 + k));

        Table table{"delta_f_" + label, {"N", "delta_f", "std_error"}, {}};
        nlohmann::json points = nlohmann::json::array();
        for (long n : grid) {
            const DeltaF d = delta_f(session, f, n, kT, kGamma);
            const double se = std::sqrt(d.value * (1.0 - d.value) / static_cast<double>(d.samples));
            table.rows.push_back({static_cast<double>(n), d.value, se});
            points.push_back({{"n", n}, {"delta_f", d.value}, {"std_error", se}});
        }
        curves[label] = std::move(points);
        bundle.tables.push_back(std::move(table));
    }

    bundle.metrics = {{"name", bundle.name},
                      {"seed", seed},
                      {"t", kT},
                      {"gamma", kGamma},
                      {"mc_samples", kCurveMcSamples},
                      {"curves", curves}};
    return bundle;
}

}  // namespace

namespace presets {

Eigen::VectorXd circle_raw_coefficients() {
    Eigen::VectorXd raw(6);
    raw << -0.64, 0.0, 0.0, 1.0, 0.0, 1.0;
    return raw;
}

std::vector<PendulumSpec> reference_pendulums(int points_each) {
    std::vector<PendulumSpec> out(3);
    out[0] = {0.1015, 0.6945, 3.6181, points_each};
    out[1] = {0.1703, 0.4131, 6.1357, points_each};
    out[2] = {-0.3155, 0.5519, 9.1091, points_each};
    return out;
}

}  // namespace presets

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ',';
        out += columns[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::logic_error("table row width does not match its header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json TruthMatch::to_json() const {
    return {{"truth", truth_index},
            {"record", record},
            {"best_cosine", best_cosine},
            {"chosen_cosine", chosen_cosine},
            {"member_fraction", member_fraction},
            {"noise_excluded_fraction", noise_excluded_fraction}};
}

std::vector<std::string> experiment_names() {
    return {"two-circles",     "two-circles-noise", "two-circles-lowsnr",
            "three-conics-lowsnr", "pendulums",     "pure-noise-fdr",
            "smin-concentration",  "signal-gap",    "delta-f-curve"};
}

std::string canonical_experiment_name(const std::string& name) {
    const std::string canonical = name == "two-circles-noisy" ? "two-circles-noise" : name;
    const auto names = experiment_names();
    if (std::find(names.begin(), names.end(), canonical) == names.end())
        throw std::invalid_argument("unknown experiment: " + name);
    return canonical;
}

std::vector<TruthMatch> match_atlas_to_truth(const LabelAtlas& atlas, const FeatureMap& map,
                                             const GroundTruth& truth, double cosine_threshold,
                                             bool prefer_cosine) {
    std::vector<TruthMatch> out;
    const auto n_noise = static_cast<double>(truth.noise_points.size());
    for (std::size_t t = 0; t < truth.truth_raw.size(); ++t) {
        TruthMatch m;
        m.truth_index = static_cast<int>(t);
        const auto& members = truth.members[t];
        for (std::size_t r = 0; r < atlas.records.size(); ++r) {
            const auto& rec = atlas.records[r];
            const double cosine = match_label_to_truth(map, rec.label, truth.truth_raw[t]);
            m.best_cosine = std::max(m.best_cosine, cosine);
            if (cosine < cosine_threshold) continue;
            const double fraction =
                members.empty() ? 0.0
                                : static_cast<double>(count_common(rec.members, members)) /
                                      static_cast<double>(members.size());
            if (m.record < 0 ||
                (prefer_cosine ? cosine > m.chosen_cosine : fraction > m.member_fraction)) {
                m.record = static_cast<int>(r);
                m.chosen_cosine = cosine;
                m.member_fraction = fraction;
                m.noise_excluded_fraction =
                    truth.noise_points.empty()
                        ? 1.0
                        : 1.0 - static_cast<double>(count_common(rec.members, truth.noise_points)) / n_noise;
            }
        }
        out.push_back(m);
    }
    return out;
}

ExperimentBundle run_experiment(const std::string& name, std::optional<std::uint64_t> seed_override) {
    const std::string canonical = canonical_experiment_name(name);
    auto seed = [&](std::uint64_t pinned) { return seed_override.value_or(pinned); };

    if (canonical == "two-circles")
        return run_two_circles(canonical, seed(presets::kSeedTwoCircles), 100, 0, 18, 500, 0.995);
    if (canonical == "two-circles-noise")
        return run_two_circles(canonical, seed(presets::kSeedTwoCirclesNoise), 100, 100, 18, 500, 0.995);
    if (canonical == "two-circles-lowsnr")
        return run_two_circles(canonical, seed(presets::kSeedTwoCirclesLowSnr), 40, 200, 8, 3000, 0.99);
    if (canonical == "three-conics-lowsnr") return run_three_conics(seed(presets::kSeedThreeConicsLowSnr));
    if (canonical == "pendulums") return run_pendulums(seed(presets::kSeedPendulums));
    if (canonical == "pure-noise-fdr") return run_pure_noise_fdr(seed(presets::kSeedPureNoiseFdr));
    if (canonical == "smin-concentration")
        return run_smin_concentration(seed(presets::kSeedSminConcentration));
    if (canonical == "signal-gap") return run_signal_gap(seed(presets::kSeedSignalGap));
    return run_delta_f_curve(seed(presets::kSeedDeltaFCurve));
}

std::vector<std::string> generator_preset_names() {
    return {"two-circles", "two-circles-noise", "two-circles-lowsnr",
            "three-conics-lowsnr", "pendulums", "pure-noise"};
}

Dataset generate_preset(const std::string& name, std::optional<std::uint64_t> seed_override) {
    const std::string canonical = name == "two-circles-noisy" ? "two-circles-noise" : name;
    auto seed = [&](std::uint64_t pinned) { return seed_override.value_or(pinned); };

    if (canonical == "two-circles")
        return generate_conics(two_circle_specs(100), box_lower(), box_upper(), 0,
                               seed(presets::kSeedTwoCircles));
    if (canonical == "two-circles-noise")
        return generate_conics(two_circle_specs(100), box_lower(), box_upper(), 100,
                               seed(presets::kSeedTwoCirclesNoise));
    if (canonical == "two-circles-lowsnr")
        return generate_conics(two_circle_specs(40), box_lower(), box_upper(), 200,
                               seed(presets::kSeedTwoCirclesLowSnr));
    if (canonical == "three-conics-lowsnr")
        return generate_conics(three_conic_specs(40), box_lower(), box_upper(), 200,
                               seed(presets::kSeedThreeConicsLowSnr));
    if (canonical == "pendulums")
        return generate_pendulums(
            presets::reference_pendulums(100),
            BackgroundNoise::uniform_box(Eigen::Vector2d(-1.0, -0.5), Eigen::Vector2d(1.0, 0.5)), 100,
            seed(presets::kSeedPendulums));
    if (canonical == "pure-noise")
        return generate_conics({}, box_lower(), box_upper(), 200, seed(presets::kSeedPureNoiseFdr));
    throw std::invalid_argument("unknown preset: " + name);
}

void write_experiment_bundle(const std::filesystem::path& dir, const ExperimentBundle& bundle) {
    std::filesystem::create_directories(dir);
    save_json(dir / "metrics.json", bundle.metrics);
    if (bundle.dataset) {
        write_points_csv(dir / "points.csv", bundle.dataset->points);
        save_json(dir / "truth.json", bundle.dataset->truth.to_json());
    }
    if (bundle.atlas) {
        save_json(dir / "atlas.json", bundle.atlas->to_json());
        std::vector<std::vector<int>> record_members;
        record_members.reserve(bundle.atlas->records.size());
        for (const auto& r : bundle.atlas->records) record_members.push_back(r.members);
        long point_count = bundle.dataset ? bundle.dataset->points.rows() : 0;
        if (!bundle.dataset)
            for (const auto& mem : record_members)
                for (int p : mem) point_count = std::max(point_count, static_cast<long>(p) + 1);
        write_membership_csv(dir / "membership.csv", membership_from_records(record_members, point_count));
    }
    for (const auto& t : bundle.tables) write_text_file(dir / (t.name + ".csv"), t.to_csv());
}

}  // namespace labelkit
