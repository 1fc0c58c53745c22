// labelkit command-line harness: generate / label / rmt-sim / experiment / check.
#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "labelkit/experiments.hpp"
#include "labelkit/io.hpp"

namespace fs = std::filesystem;
using namespace labelkit;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct LabelOptions {
    std::string dataset;
    std::string config_path;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> delta;
    std::optional<int> n0;
    std::optional<int> iters;
    std::optional<long> mc_samples;
    std::optional<std::string> seed_mode;
    std::optional<int> absorb_passes;
    int degree = 2;
    bool no_whiten = false;
    double dedupe_tol = 0.01;
};

int run_generate(const std::string& preset, std::optional<std::uint64_t> seed, const std::string& out) {
    const Dataset ds = generate_preset(preset, seed);
    write_points_csv(fs::path(out) / "points.csv", ds.points);
    save_json(fs::path(out) / "truth.json", ds.truth.to_json());
    std::cout << "wrote " << ds.points.rows() << " points to " << (fs::path(out) / "points.csv").string()
              << "\n";
    return 0;
}

int run_label(const LabelOptions& opt) {
    const Eigen::MatrixXd points = read_points_csv(opt.dataset);
    if (points.rows() == 0) throw std::runtime_error(opt.dataset + ": dataset is empty");

    nlohmann::json config = nlohmann::json::object();
    if (!opt.config_path.empty()) config = load_json(opt.config_path);

    nlohmann::json search = config.value("search", nlohmann::json::object());
    if (opt.seed) search["seed"] = *opt.seed;
    if (opt.delta) search["delta"] = *opt.delta;
    if (opt.n0) search["n0"] = *opt.n0;
    if (opt.iters) search["iterations"] = *opt.iters;
    if (opt.mc_samples) search["mc_samples"] = *opt.mc_samples;
    if (opt.seed_mode) search["seed_mode"] = *opt.seed_mode;
    if (opt.absorb_passes) search["absorb_passes"] = *opt.absorb_passes;
    if (!search.contains("seed"))
        throw std::runtime_error("no seed: pass --seed or put one in the config's search section");
    const SearchConfig cfg = SearchConfig::from_json(search);

    BackgroundNoise noise = [&] {
        if (config.contains("noise")) return BackgroundNoise::from_json(config.at("noise"));
        // default reference measure: uniform on the data's bounding box
        Eigen::VectorXd lower = points.colwise().minCoeff();
        Eigen::VectorXd upper = points.colwise().maxCoeff();
        for (Eigen::Index i = 0; i < lower.size(); ++i) {
            const double pad = 0.05 * std::max(upper(i) - lower(i), 1e-6);
            lower(i) -= pad;
            upper(i) += pad;
        }
        return BackgroundNoise::uniform_box(lower, upper);
    }();
    if (noise.dim() != points.cols())
        throw std::runtime_error("noise dimension " + std::to_string(noise.dim()) +
                                 " does not match dataset dimension " + std::to_string(points.cols()));

    const nlohmann::json feature = config.value("feature", nlohmann::json::object());
    const int degree = feature.value("degree", opt.degree);
    const bool whiten_map = feature.value("whiten", !opt.no_whiten);
    const long whiten_samples = feature.value("whiten_samples", 50000L);
    FeatureMap map = FeatureMap::monomial(static_cast<int>(points.cols()), degree);
    if (whiten_map) map = make_whitened(map, noise, whiten_samples, cfg.seed);

    LabelAtlas atlas = label_search(points, map, noise, cfg);
    const auto before = atlas.records.size();
    if (opt.dedupe_tol > 0.0) atlas = dedupe_similar(atlas, opt.dedupe_tol);

    save_json(fs::path(opt.out) / "atlas.json", atlas.to_json());
    std::vector<std::vector<int>> record_members;
    for (const auto& r : atlas.records) record_members.push_back(r.members);
    write_membership_csv(fs::path(opt.out) / "membership.csv",
                         membership_from_records(record_members, points.rows()));
    std::cout << "atlas: " << atlas.records.size() << " records (" << before << " before dedupe) -> "
              << (fs::path(opt.out) / "atlas.json").string() << "\n";
    return 0;
}

int run_rmt_sim(const std::vector<long>& n_grid, int trials, std::uint64_t seed, double t, double gamma,
                const std::string& out) {
    const auto noise =
        BackgroundNoise::uniform_box(Eigen::Vector2d(-1.0, -1.0), Eigen::Vector2d(1.0, 1.0));
    const FeatureMap wmap = make_whitened(FeatureMap::monomial(2, 2), noise, 50000, seed);

    Table ratios{"smin_ratios", {"N", "seed", "smin_ratio"}, {}};
    for (long n : n_grid)
        for (int s = 0; s < trials; ++s)
            ratios.rows.push_back(
                {static_cast<double>(n), static_cast<double>(s),
                 smin_ratio(wmap, noise, n, rng::key(seed, rng::kSminTrial, (static_cast<std::uint64_t>(n) << 16) + s))});
    write_text_file(fs::path(out) / "smin_ratios.csv", ratios.to_csv());

    const std::vector<std::pair<std::string, BackgroundNoise>> measures = {
        {"uniform", noise}, {"gaussian", BackgroundNoise::standard_gaussian(2)}};
    for (std::size_t k = 0; k < measures.size(); ++k) {
        const FeatureMap map_k =
            make_whitened(FeatureMap::monomial(2, 2), measures[k].second, 50000, seed + k);
        const PotentialLabel f = label_from_raw(map_k, presets::circle_raw_coefficients());
        const MassSession session(map_k, measures[k].second, 200000, rng::key(seed, rng::kMass, k));
        Table curve{"delta_f_" + measures[k].first, {"N", "delta_f"}, {}};
        for (long n : n_grid)
            curve.rows.push_back({static_cast<double>(n), delta_f(session, f, n, t, gamma).value});
        write_text_file(fs::path(out) / (curve.name + ".csv"), curve.to_csv());
    }
    std::cout << "wrote smin_ratios.csv, delta_f_uniform.csv, delta_f_gaussian.csv to " << out << "\n";
    return 0;
}

int run_experiment_cmd(const std::string& name, std::optional<std::uint64_t> seed, const std::string& out) {
    const auto start = std::chrono::steady_clock::now();
    const ExperimentBundle bundle = run_experiment(name, seed);
    const fs::path dir = fs::path(out) / bundle.name;
    write_experiment_bundle(dir, bundle);
    // wall-clock kept out of metrics.json so equal seeds give byte-identical metrics
    save_json(dir / "timings.json", {{"seconds", seconds_since(start)}});
    std::cout << bundle.name << ": metrics -> " << (dir / "metrics.json").string() << "\n";
    return 0;
}

int run_check(const std::string& atlas_path, const std::string& dataset_path, std::uint64_t seed) {
    const LabelAtlas atlas = LabelAtlas::from_json(load_json(atlas_path));
    const Eigen::MatrixXd points = read_points_csv(dataset_path);
    const VerifyReport report = verify_atlas(atlas, points, seed);
    if (!report.fingerprint_matches)
        std::cout << "fingerprint mismatch: atlas was not computed from this dataset\n";
    for (const auto& row : report.rows)
        std::cout << "record " << row.record << ": " << (row.accepted ? "ok" : "FAILED") << " (mass "
                  << row.mass << " vs bound " << row.bound << ", contains 0: "
                  << (row.interval_contains_zero ? "yes" : "no") << ")\n";
    std::cout << (report.all_ok && report.fingerprint_matches ? "atlas verified" : "atlas REJECTED")
              << "\n";
    return report.all_ok && report.fingerprint_matches ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"labelkit: discover functional relations in noisy point clouds"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a preset dataset (points.csv + truth.json)");
    std::string gen_preset;
    std::string gen_out = ".";
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--preset", gen_preset, "One of: two-circles, two-circles-noise, two-circles-lowsnr, three-conics-lowsnr, pendulums, pure-noise")
        ->required();
    gen->add_option("--seed", gen_seed, "Override the preset's pinned seed");
    gen->add_option("--out", gen_out, "Output directory");

    // label
    auto* lab = app.add_subcommand("label", "Run the label search on a dataset CSV");
    LabelOptions lopt;
    lab->add_option("dataset", lopt.dataset, "Point CSV (header x0,x1,...)")->required();
    lab->add_option("--config", lopt.config_path, "JSON config: {search:{...}, noise:{...}, feature:{...}}");
    lab->add_option("--seed", lopt.seed, "Search seed (required unless the config provides one)");
    lab->add_option("--delta", lopt.delta, "Label threshold delta");
    lab->add_option("--n0", lopt.n0, "Seed-subset size (0 = 3*D)");
    lab->add_option("--iters", lopt.iters, "Search iterations");
    lab->add_option("--mc-samples", lopt.mc_samples, "Monte Carlo samples per mass estimate");
    lab->add_option("--seed-mode", lopt.seed_mode, "uniform | local");
    lab->add_option("--absorb-passes", lopt.absorb_passes, "Greedy absorption sweeps per accepted seed");
    lab->add_option("--degree", lopt.degree, "Monomial degree of the feature map");
    lab->add_flag("--no-whiten", lopt.no_whiten, "Skip the whitening transformation");
    lab->add_option("--dedupe", lopt.dedupe_tol, "Cosine tolerance for dedupe (0 disables)");
    lab->add_option("--out", lopt.out, "Output directory");

    // rmt-sim
    auto* rmt = app.add_subcommand("rmt-sim", "Tabulate smin ratios and delta_f curves");
    std::vector<long> rmt_grid = {100, 200, 500, 1000, 2000, 5000};
    int rmt_trials = 20;
    std::uint64_t rmt_seed = 1;
    double rmt_t = 0.7, rmt_gamma = 0.3;
    std::string rmt_out = ".";
    rmt->add_option("--n-grid", rmt_grid, "Sample sizes N");
    rmt->add_option("--trials", rmt_trials, "Seeds per N for the smin table")->check(CLI::PositiveNumber);
    rmt->add_option("--seed", rmt_seed, "Master seed");
    rmt->add_option("--t", rmt_t, "Concentration t");
    rmt->add_option("--gamma", rmt_gamma, "Concentration gamma");
    rmt->add_option("--out", rmt_out, "Output directory");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run a named reproduction end to end");
    std::string exp_name;
    std::string exp_out = ".";
    std::optional<std::uint64_t> exp_seed;
    exp->add_option("name", exp_name, "Experiment name (see README)")->required();
    exp->add_option("--seed", exp_seed, "Override the pinned seed");
    exp->add_option("--out", exp_out, "Output directory (bundle goes to OUT/<name>/)");

    // check
    auto* chk = app.add_subcommand("check", "Re-verify an atlas against its dataset");
    std::string chk_atlas, chk_dataset;
    std::uint64_t chk_seed = 1;
    chk->add_option("atlas", chk_atlas, "atlas.json")->required();
    chk->add_option("dataset", chk_dataset, "points.csv")->required();
    chk->add_option("--seed", chk_seed, "Fresh Monte Carlo seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_generate(gen_preset, gen_seed, gen_out);
        if (lab->parsed()) return run_label(lopt);
        if (rmt->parsed()) return run_rmt_sim(rmt_grid, rmt_trials, rmt_seed, rmt_t, rmt_gamma, rmt_out);
        if (exp->parsed()) return run_experiment_cmd(exp_name, exp_seed, exp_out);
        if (chk->parsed()) return run_check(chk_atlas, chk_dataset, chk_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
