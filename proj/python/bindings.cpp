#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "labelkit/data.hpp"
#include "labelkit/experiments.hpp"
#include "labelkit/feature.hpp"
#include "labelkit/labelcore.hpp"
#include "labelkit/noise.hpp"
#include "labelkit/rmt.hpp"
#include "labelkit/search.hpp"

namespace py = pybind11;
using namespace labelkit;

namespace {

// JSON crosses the boundary as strings; callers use python's json module.
template <typename T>
std::string dump_json(const T& v) {
    return v.to_json().dump();
}

template <typename T>
T parse_json(const std::string& s) {
    return T::from_json(nlohmann::json::parse(s));
}

}  // namespace

PYBIND11_MODULE(_labelkit, m) {
    m.doc() = "Label discovery in noisy point clouds relative to a background measure";

    py::class_<Interval>(m, "Interval")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
        .def_readonly("lo", &Interval::lo)
        .def_readonly("hi", &Interval::hi)
        .def("contains", &Interval::contains)
        .def("width", &Interval::width)
        .def("midpoint", &Interval::midpoint)
        .def("shifted", &Interval::shifted)
        .def_static("hull", &Interval::hull)
        .def("__repr__", [](const Interval& i) {
            return "Interval(" + std::to_string(i.lo) + ", " + std::to_string(i.hi) + ")";
        });

    py::class_<MassEstimate>(m, "MassEstimate")
        .def_readonly("value", &MassEstimate::value)
        .def_readonly("std_error", &MassEstimate::std_error)
        .def_readonly("samples", &MassEstimate::samples);

    py::class_<BackgroundNoise>(m, "BackgroundNoise")
        .def_static("uniform_box", &BackgroundNoise::uniform_box, py::arg("lower"), py::arg("upper"))
        .def_static("gaussian", &BackgroundNoise::gaussian, py::arg("mean"), py::arg("covariance"))
        .def_static("standard_gaussian", &BackgroundNoise::standard_gaussian, py::arg("dim"))
        .def_static("empirical", &BackgroundNoise::empirical, py::arg("points"))
        .def_property_readonly("dim", &BackgroundNoise::dim)
        .def("sample", &BackgroundNoise::sample, py::arg("n"), py::arg("seed"))
        .def("empirical_points", &BackgroundNoise::empirical_points,
             py::return_value_policy::copy)
        .def("to_json", &dump_json<BackgroundNoise>)
        .def_static("from_json", &parse_json<BackgroundNoise>);

    py::class_<FeatureMap>(m, "FeatureMap")
        .def_static("monomial", &FeatureMap::monomial, py::arg("input_dim"), py::arg("degree"),
                    py::arg("dim_cap") = FeatureMap::kDefaultDimCap)
        .def_static("monomial_without_constant", &FeatureMap::monomial_without_constant,
                    py::arg("input_dim"), py::arg("degree"),
                    py::arg("dim_cap") = FeatureMap::kDefaultDimCap)
        .def_property_readonly("input_dim", &FeatureMap::input_dim)
        .def_property_readonly("output_dim", &FeatureMap::output_dim)
        .def_property_readonly("degree", &FeatureMap::degree)
        .def_property_readonly("has_constants", &FeatureMap::has_constants)
        .def_property_readonly("is_whitened", &FeatureMap::is_whitened)
        .def_property_readonly("exponents", &FeatureMap::exponents)
        .def("constant_index", &FeatureMap::constant_index)
        .def("evaluate", &FeatureMap::evaluate, py::arg("x"))
        .def("evaluate_rows", &FeatureMap::evaluate_rows, py::arg("points"))
        .def("with_transform", &FeatureMap::with_transform, py::arg("w"))
        .def("to_json", &dump_json<FeatureMap>)
        .def_static("from_json", &parse_json<FeatureMap>);

    py::class_<CovarianceEstimate>(m, "CovarianceEstimate")
        .def_readonly("matrix", &CovarianceEstimate::matrix)
        .def_readonly("sample_count", &CovarianceEstimate::sample_count)
        .def_readonly("condition_number", &CovarianceEstimate::condition_number);

    m.def("estimate_covariance", &estimate_covariance, py::arg("map"), py::arg("noise"),
          py::arg("samples"), py::arg("seed"), py::arg("condition_cap") = 1e12);
    m.def("inverse_sqrt_spd", &inverse_sqrt_spd, py::arg("m"), py::arg("eigen_floor") = 1e-12);
    m.def("whiten", &whiten, py::arg("map"), py::arg("cov"));
    m.def("make_whitened", &make_whitened, py::arg("map"), py::arg("noise"), py::arg("samples"),
          py::arg("seed"));

    py::class_<PotentialLabel>(m, "PotentialLabel")
        .def_static("from_functional", &PotentialLabel::from_functional, py::arg("ell"),
                    py::arg("offset") = 0.0)
        .def_property_readonly("ell", &PotentialLabel::ell)
        .def_property_readonly("offset", &PotentialLabel::offset)
        .def("value", &PotentialLabel::value, py::arg("map"), py::arg("x"))
        .def("values", &PotentialLabel::values, py::arg("feature_rows"))
        .def("shifted", &PotentialLabel::shifted)
        .def("negated", &PotentialLabel::negated)
        .def("to_json", &dump_json<PotentialLabel>)
        .def_static("from_json", &parse_json<PotentialLabel>);

    m.def("label_to_raw", &label_to_raw, py::arg("map"), py::arg("label"));
    m.def("label_from_raw", &label_from_raw, py::arg("map"), py::arg("raw"), py::arg("offset") = 0.0);

    py::class_<CandidateResult>(m, "CandidateResult")
        .def_readonly("label", &CandidateResult::label)
        .def_readonly("degenerate", &CandidateResult::degenerate)
        .def_readonly("smallest_singular", &CandidateResult::smallest_singular)
        .def_readonly("second_smallest", &CandidateResult::second_smallest);

    m.def("candidate_label",
          py::overload_cast<const FeatureMap&, const Eigen::Ref<const Eigen::MatrixXd>&>(
              &candidate_label),
          py::arg("map"), py::arg("points"));
    m.def(
        "candidate_label_rows",
        [](const Eigen::MatrixXd& rows) { return candidate_label(rows); }, py::arg("feature_rows"));
    m.def("tight_interval", &tight_interval, py::arg("label"), py::arg("feature_rows"));

    py::class_<MassSession>(m, "MassSession")
        .def(py::init<const FeatureMap&, const BackgroundNoise&, long, std::uint64_t>(),
             py::arg("map"), py::arg("noise"), py::arg("samples"), py::arg("seed"))
        .def("mass", &MassSession::mass, py::arg("label"), py::arg("interval"))
        .def_property_readonly("samples", &MassSession::samples)
        .def_property_readonly("map_has_constants", &MassSession::map_has_constants);

    m.def(
        "pushforward_mass",
        [](const PotentialLabel& f, const FeatureMap& map, const Interval& interval,
           const BackgroundNoise& noise, long samples, std::uint64_t seed) {
            return pushforward_mass(f, map, interval, noise, samples, seed);
        },
        py::arg("label"), py::arg("map"), py::arg("interval"), py::arg("noise"), py::arg("samples"),
        py::arg("seed"));

    py::class_<LabelCheck>(m, "LabelCheck")
        .def_readonly("accepted", &LabelCheck::accepted)
        .def_readonly("interval", &LabelCheck::interval)
        .def_readonly("mass", &LabelCheck::mass)
        .def_readonly("shifted_by", &LabelCheck::shifted_by)
        .def("to_json", &dump_json<LabelCheck>);

    m.def(
        "check_label",
        [](const PotentialLabel& f, const FeatureMap& map, const Eigen::MatrixXd& points,
           const BackgroundNoise& noise, double delta, long samples, std::uint64_t seed) {
            return check_label(f, map, points, noise, delta, MonteCarloParams{samples, seed});
        },
        py::arg("label"), py::arg("map"), py::arg("points"), py::arg("noise"), py::arg("delta"),
        py::arg("samples") = 20000, py::arg("seed") = 0);
    m.def("check_label_cached", &check_label_cached, py::arg("label"), py::arg("feature_rows"),
          py::arg("session"), py::arg("delta"));

    py::class_<LabelSetEstimate>(m, "LabelSetEstimate")
        .def_readonly("label", &LabelSetEstimate::label)
        .def_readonly("check", &LabelSetEstimate::check)
        .def_readonly("degenerate_candidate", &LabelSetEstimate::degenerate_candidate)
        .def("empty", &LabelSetEstimate::empty);

    m.def(
        "estimate_label_set",
        [](const FeatureMap& map, const Eigen::MatrixXd& points, const BackgroundNoise& noise,
           double delta, long samples, std::uint64_t seed) {
            return estimate_label_set(map, points, noise, delta, MonteCarloParams{samples, seed});
        },
        py::arg("map"), py::arg("points"), py::arg("noise"), py::arg("delta"),
        py::arg("samples") = 20000, py::arg("seed") = 0);
    m.def("estimate_label_set_cached", &estimate_label_set_cached, py::arg("feature_rows"),
          py::arg("session"), py::arg("delta"));

    py::enum_<AbsorbOrder>(m, "AbsorbOrder")
        .value("INDEX", AbsorbOrder::kIndex)
        .value("RANDOM_PERMUTATION", AbsorbOrder::kRandomPermutation);

    py::enum_<SeedMode>(m, "SeedMode")
        .value("UNIFORM", SeedMode::kUniform)
        .value("LOCAL_NEIGHBORHOOD", SeedMode::kLocalNeighborhood);

    py::class_<SearchConfig>(m, "SearchConfig")
        .def(py::init<>())
        .def_readwrite("n0", &SearchConfig::n0)
        .def_readwrite("iterations", &SearchConfig::iterations)
        .def_readwrite("delta", &SearchConfig::delta)
        .def_readwrite("seed", &SearchConfig::seed)
        .def_readwrite("absorb_order", &SearchConfig::absorb_order)
        .def_readwrite("seed_mode", &SearchConfig::seed_mode)
        .def_readwrite("absorb_passes", &SearchConfig::absorb_passes)
        .def_readwrite("mc_samples", &SearchConfig::mc_samples)
        .def("to_json", &dump_json<SearchConfig>)
        .def_static("from_json", &parse_json<SearchConfig>);

    py::class_<LabelRecord>(m, "LabelRecord")
        .def_readonly("members", &LabelRecord::members)
        .def_readonly("label", &LabelRecord::label)
        .def_readonly("check", &LabelRecord::check)
        .def_readonly("degenerate", &LabelRecord::degenerate)
        .def("to_json", &dump_json<LabelRecord>)
        .def_static("from_json", &parse_json<LabelRecord>);

    py::class_<LabelAtlas>(m, "LabelAtlas")
        .def_readonly("records", &LabelAtlas::records)
        .def_readonly("dataset_fingerprint", &LabelAtlas::dataset_fingerprint)
        .def_readonly("config", &LabelAtlas::config)
        .def_property_readonly("map",
                               [](const LabelAtlas& a) { return FeatureMap::from_json(a.map_descriptor); })
        .def_property_readonly(
            "noise", [](const LabelAtlas& a) { return BackgroundNoise::from_json(a.noise_descriptor); })
        .def("to_json", &dump_json<LabelAtlas>)
        .def_static("from_json", &parse_json<LabelAtlas>);

    m.def("dataset_fingerprint", &dataset_fingerprint, py::arg("points"));
    m.def("label_search", &label_search, py::arg("points"), py::arg("map"), py::arg("noise"),
          py::arg("config"));
    m.def("dedupe_similar", &dedupe_similar, py::arg("atlas"), py::arg("cosine_tol"));

    py::class_<VerifyRow>(m, "VerifyRow")
        .def_readonly("record", &VerifyRow::record)
        .def_readonly("accepted", &VerifyRow::accepted)
        .def_readonly("mass", &VerifyRow::mass)
        .def_readonly("bound", &VerifyRow::bound)
        .def_readonly("interval_contains_zero", &VerifyRow::interval_contains_zero);

    py::class_<VerifyReport>(m, "VerifyReport")
        .def_readonly("rows", &VerifyReport::rows)
        .def_readonly("all_ok", &VerifyReport::all_ok)
        .def_readonly("fingerprint_matches", &VerifyReport::fingerprint_matches);

    m.def("verify_atlas", &verify_atlas, py::arg("atlas"), py::arg("points"), py::arg("fresh_seed"),
          py::arg("mc_multiplier") = 16);

    py::class_<ConcentrationParams>(m, "ConcentrationParams")
        .def(py::init<>())
        .def_readwrite("t", &ConcentrationParams::t)
        .def_readwrite("gamma", &ConcentrationParams::gamma)
        .def_readwrite("alpha", &ConcentrationParams::alpha)
        .def_readwrite("psi_norm", &ConcentrationParams::psi_norm)
        .def_readwrite("rho", &ConcentrationParams::rho)
        .def_readwrite("lambda_norm", &ConcentrationParams::lambda_norm)
        .def("validate", &ConcentrationParams::validate);

    py::class_<ConcentrationExponents>(m, "ConcentrationExponents")
        .def_readonly("a", &ConcentrationExponents::a)
        .def_readonly("b", &ConcentrationExponents::b)
        .def_readonly("beta", &ConcentrationExponents::beta)
        .def_readonly("p_dn", &ConcentrationExponents::p_dn)
        .def_readonly("p", &ConcentrationExponents::p);

    m.def("concentration_probability_exponent", &concentration_probability_exponent,
          py::arg("feature_dim"), py::arg("n"), py::arg("params") = ConcentrationParams{});
    m.def("smin_ratio", &smin_ratio, py::arg("map"), py::arg("noise"), py::arg("n"), py::arg("seed"));
    m.def("smin_ratio_of", &smin_ratio_of, py::arg("map"), py::arg("points"));

    py::class_<DeltaF>(m, "DeltaF")
        .def_readonly("value", &DeltaF::value)
        .def_readonly("n", &DeltaF::n)
        .def_readonly("t", &DeltaF::t)
        .def_readonly("gamma", &DeltaF::gamma)
        .def_readonly("samples", &DeltaF::samples);

    m.def("delta_f",
          py::overload_cast<const PotentialLabel&, const FeatureMap&, const BackgroundNoise&, long,
                            double, double, long, std::uint64_t>(&delta_f),
          py::arg("label"), py::arg("map"), py::arg("noise"), py::arg("n"), py::arg("t"),
          py::arg("gamma"), py::arg("samples"), py::arg("seed"));
    m.def("recommend_delta", &recommend_delta, py::arg("label"), py::arg("map"), py::arg("noise"),
          py::arg("n"), py::arg("t"), py::arg("gamma"), py::arg("safety"), py::arg("samples"),
          py::arg("seed"));

    py::class_<ConicSpec>(m, "ConicSpec")
        .def_static("circle", &ConicSpec::circle, py::arg("cx"), py::arg("cy"), py::arg("r"),
                    py::arg("n"), py::arg("sigma"))
        .def_static("ellipse", &ConicSpec::ellipse, py::arg("cx"), py::arg("cy"), py::arg("rx"),
                    py::arg("ry"), py::arg("rotation"), py::arg("n"), py::arg("sigma"))
        .def_static("general", &ConicSpec::general, py::arg("coefficients"), py::arg("n"),
                    py::arg("sigma"))
        .def_readonly("coefficients", &ConicSpec::coefficients)
        .def_readonly("n", &ConicSpec::n)
        .def_readonly("sigma", &ConicSpec::sigma)
        .def("raw_feature_coefficients", &ConicSpec::raw_feature_coefficients)
        .def("residual", &ConicSpec::residual, py::arg("x"), py::arg("y"))
        .def("to_json", &dump_json<ConicSpec>)
        .def_static("from_json", &parse_json<ConicSpec>);

    py::class_<PendulumSpec>(m, "PendulumSpec")
        .def(py::init([](double centre, double amplitude, double mass, int n) {
                 return PendulumSpec{centre, amplitude, mass, n};
             }),
             py::arg("centre"), py::arg("amplitude"), py::arg("mass"), py::arg("n"))
        .def_readonly("centre", &PendulumSpec::centre)
        .def_readonly("amplitude", &PendulumSpec::amplitude)
        .def_readonly("mass", &PendulumSpec::mass)
        .def_readonly("n", &PendulumSpec::n)
        .def("conic_coefficients", &PendulumSpec::conic_coefficients)
        .def("to_json", &dump_json<PendulumSpec>)
        .def_static("from_json", &parse_json<PendulumSpec>);

    py::class_<GroundTruth>(m, "GroundTruth")
        .def_readonly("truth_raw", &GroundTruth::truth_raw)
        .def_readonly("members", &GroundTruth::members)
        .def_readonly("noise_points", &GroundTruth::noise_points)
        .def_property_readonly("specs", [](const GroundTruth& g) { return g.specs.dump(); })
        .def("to_json", &dump_json<GroundTruth>)
        .def_static("from_json", &parse_json<GroundTruth>);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("points", &Dataset::points)
        .def_readonly("truth", &Dataset::truth);

    m.def("generate_conics", &generate_conics, py::arg("specs"), py::arg("lower"), py::arg("upper"),
          py::arg("noise_count"), py::arg("seed"));
    m.def("generate_pendulums", &generate_pendulums, py::arg("specs"), py::arg("noise"),
          py::arg("noise_count"), py::arg("seed"));

    py::class_<PendulumParameters>(m, "PendulumParameters")
        .def_readonly("centre", &PendulumParameters::centre)
        .def_readonly("amplitude", &PendulumParameters::amplitude)
        .def_readonly("mass", &PendulumParameters::mass);

    m.def("pendulum_from_label", &pendulum_from_label, py::arg("map"), py::arg("label"),
          py::arg("cross_term_tol") = 0.05);
    m.def("match_label_to_truth", &match_label_to_truth, py::arg("map"), py::arg("label"),
          py::arg("truth_raw"));

    py::class_<TruthMatch>(m, "TruthMatch")
        .def_readonly("truth_index", &TruthMatch::truth_index)
        .def_readonly("record", &TruthMatch::record)
        .def_readonly("best_cosine", &TruthMatch::best_cosine)
        .def_readonly("chosen_cosine", &TruthMatch::chosen_cosine)
        .def_readonly("member_fraction", &TruthMatch::member_fraction)
        .def_readonly("noise_excluded_fraction", &TruthMatch::noise_excluded_fraction)
        .def("to_json", &dump_json<TruthMatch>);

    m.def("match_atlas_to_truth", &match_atlas_to_truth, py::arg("atlas"), py::arg("map"),
          py::arg("truth"), py::arg("cosine_threshold"), py::arg("prefer_cosine") = false);

    py::class_<Table>(m, "Table")
        .def_readonly("name", &Table::name)
        .def_readonly("columns", &Table::columns)
        .def_readonly("rows", &Table::rows)
        .def("to_csv", &Table::to_csv);

    py::class_<ExperimentBundle>(m, "ExperimentBundle")
        .def_readonly("name", &ExperimentBundle::name)
        .def_readonly("seed", &ExperimentBundle::seed)
        .def_property_readonly("metrics",
                               [](const ExperimentBundle& b) { return b.metrics.dump(); })
        .def_readonly("dataset", &ExperimentBundle::dataset)
        .def_readonly("atlas", &ExperimentBundle::atlas)
        .def_readonly("tables", &ExperimentBundle::tables);

    m.def("experiment_names", &experiment_names);
    m.def("canonical_experiment_name", &canonical_experiment_name, py::arg("name"));
    m.def("run_experiment", &run_experiment, py::arg("name"),
          py::arg("seed") = std::optional<std::uint64_t>{});
    m.def("generator_preset_names", &generator_preset_names);
    m.def("generate_preset", &generate_preset, py::arg("name"),
          py::arg("seed") = std::optional<std::uint64_t>{});
    m.def("write_experiment_bundle", &write_experiment_bundle, py::arg("dir"), py::arg("bundle"));
}
