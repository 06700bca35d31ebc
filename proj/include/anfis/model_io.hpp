#pragma once

#include <cstdint>
#include <ctime>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "anfis/errors.hpp"
#include "anfis/fuzzy.hpp"
#include "anfis/metrics.hpp"
#include "anfis/trainer.hpp"

namespace anfis {

/// How a saved model came to be. created_at is the only field that varies
/// between otherwise identical runs; consumers that diff artifacts should
/// ignore it.
struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string created_at;
    std::size_t n_tunable = 0;
};

/// A model plus the column names it was trained against. Prediction inputs
/// are matched to the model positionally; the names are carried for
/// reporting and for CSV header checks.
struct ModelFile {
    AnfisModel model;
    std::vector<std::string> feature_names;
    std::string target_name;
    Provenance provenance;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                std::initializer_list<const char*> allowed,
                                const std::string& context) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError(context + ": unknown key \"" + item.key() + "\"");
    }
}

/// FNV-1a over the canonical (sorted-key) JSON dump.
inline std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a:") + buf;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json parse_file(const std::string& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw DataError(what + ": cannot open \"" + path + "\"");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(what + ": invalid JSON in \"" + path + "\": " + e.what());
    }
}

inline void write_file(const std::string& path, const nlohmann::json& doc,
                       const std::string& what) {
    std::ofstream out(path);
    if (!out) throw DataError(what + ": cannot open \"" + path + "\" for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw DataError(what + ": write to \"" + path + "\" failed");
}

} // namespace detail

// --- training configuration -------------------------------------------------

inline nlohmann::json config_to_json(const TrainConfig& config) {
    return nlohmann::json{
        {"n_clusters", config.n_clusters},
        {"split_fraction", config.split_fraction},
        {"seed", config.seed},
        {"premise_bounds_scale", config.premise_bounds_scale},
        {"ridge", config.ridge},
        {"pso",
         {{"n_particles", config.pso.n_particles},
          {"c1", config.pso.c1},
          {"c2", config.pso.c2},
          {"inertia", config.pso.inertia},
          {"iterations", config.pso.iterations},
          {"v_max_fraction", config.pso.v_max_fraction}}},
    };
}

namespace detail {

/// Reads obj[key] into out (if present), naming the key on a type mismatch.
template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out, const std::string& context) {
    if (!obj.contains(key)) return;
    try {
        out = obj[key].get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(context + ": key \"" + key + "\": " + e.what());
    }
}

} // namespace detail

/// Parses a training configuration, starting from defaults. Every key is
/// optional; unknown keys are errors so typos cannot silently fall back to a
/// default.
inline TrainConfig parse_train_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
    detail::reject_unknown_keys(
        doc, {"n_clusters", "split_fraction", "seed", "premise_bounds_scale", "ridge", "pso"},
        "config");
    TrainConfig config;
    detail::read_field(doc, "n_clusters", config.n_clusters, "config");
    detail::read_field(doc, "split_fraction", config.split_fraction, "config");
    detail::read_field(doc, "seed", config.seed, "config");
    detail::read_field(doc, "premise_bounds_scale", config.premise_bounds_scale, "config");
    detail::read_field(doc, "ridge", config.ridge, "config");
    if (doc.contains("pso")) {
        const nlohmann::json& pso = doc["pso"];
        if (!pso.is_object()) throw ConfigError("config: key \"pso\" must be an object");
        detail::reject_unknown_keys(
            pso, {"n_particles", "c1", "c2", "inertia", "iterations", "v_max_fraction"},
            "config.pso");
        detail::read_field(pso, "n_particles", config.pso.n_particles, "config.pso");
        detail::read_field(pso, "c1", config.pso.c1, "config.pso");
        detail::read_field(pso, "c2", config.pso.c2, "config.pso");
        detail::read_field(pso, "inertia", config.pso.inertia, "config.pso");
        detail::read_field(pso, "iterations", config.pso.iterations, "config.pso");
        detail::read_field(pso, "v_max_fraction", config.pso.v_max_fraction, "config.pso");
    }
    config.validate();
    return config;
}

inline TrainConfig load_train_config(const std::string& path) {
    return parse_train_config(detail::parse_file(path, "config"));
}

// --- generator specs ----------------------------------------------------------

/// Settings for gen-data: the feature schema plus which analytic teacher to
/// sample and how much noise to add.
struct GeneratorSpec {
    SchemaSpec schema = SchemaSpec::mercury_default();
    std::string teacher = "blend";
    double noise_level = 0.0;
};

inline GeneratorSpec parse_generator_spec(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("spec: top level must be a JSON object");
    detail::reject_unknown_keys(
        doc, {"features", "target_name", "target_unit", "teacher", "noise_level"}, "spec");
    GeneratorSpec spec;
    if (doc.contains("features")) {
        if (!doc["features"].is_array() || doc["features"].empty()) {
            throw ConfigError("spec: key \"features\" must be a non-empty array");
        }
        spec.schema.features.clear();
        for (const nlohmann::json& f : doc["features"]) {
            if (!f.is_object()) throw ConfigError("spec: each feature must be an object");
            detail::reject_unknown_keys(f, {"name", "unit", "lo", "hi"}, "spec.features");
            FeatureSpec feature;
            detail::read_field(f, "name", feature.name, "spec.features");
            detail::read_field(f, "unit", feature.unit, "spec.features");
            detail::read_field(f, "lo", feature.lo, "spec.features");
            detail::read_field(f, "hi", feature.hi, "spec.features");
            spec.schema.features.push_back(std::move(feature));
        }
    }
    detail::read_field(doc, "target_name", spec.schema.target_name, "spec");
    detail::read_field(doc, "target_unit", spec.schema.target_unit, "spec");
    detail::read_field(doc, "teacher", spec.teacher, "spec");
    detail::read_field(doc, "noise_level", spec.noise_level, "spec");
    spec.schema.validate();
    if (!(spec.noise_level >= 0.0)) throw ConfigError("spec: noise_level must be >= 0");
    return spec;
}

inline GeneratorSpec load_generator_spec(const std::string& path) {
    return parse_generator_spec(detail::parse_file(path, "spec"));
}

/// Stable fingerprint of a configuration, independent of key order in the
/// source file.
inline std::string config_hash(const TrainConfig& config) {
    return detail::fnv1a_hex(config_to_json(config).dump());
}

// --- model files -------------------------------------------------------------

inline constexpr const char* kModelFormat = "anfis-model";
inline constexpr int kModelVersion = 1;

inline nlohmann::json model_to_json(const ModelFile& file) {
    const AnfisModel& model = file.model;
    nlohmann::json inputs = nlohmann::json::array();
    for (const FeatureScaling& s : model.input_scaling()) {
        inputs.push_back({{"mean", s.mean}, {"scale", s.scale}});
    }
    nlohmann::json rules = nlohmann::json::array();
    for (const Rule& r : model.rules()) {
        nlohmann::json centers = nlohmann::json::array();
        nlohmann::json widths = nlohmann::json::array();
        for (const GaussianMF& mf : r.premise) {
            centers.push_back(mf.center);
            widths.push_back(mf.width);
        }
        rules.push_back({{"centers", std::move(centers)},
                         {"widths", std::move(widths)},
                         {"consequent", r.consequent}});
    }
    return nlohmann::json{
        {"format", kModelFormat},
        {"version", kModelVersion},
        {"n_inputs", model.n_inputs()},
        {"feature_names", file.feature_names},
        {"target_name", file.target_name},
        {"normalization",
         {{"inputs", std::move(inputs)},
          {"target",
           {{"mean", model.target_scaling().mean}, {"scale", model.target_scaling().scale}}}}},
        {"rules", std::move(rules)},
        {"provenance",
         {{"config_hash", file.provenance.config_hash},
          {"seed", file.provenance.seed},
          {"created_at", file.provenance.created_at},
          {"n_tunable", file.provenance.n_tunable}}},
    };
}

inline ModelFile model_from_json(const nlohmann::json& doc) {
    try {
        if (!doc.is_object()) throw DataError("model: top level must be a JSON object");
        if (doc.value("format", "") != kModelFormat) {
            throw DataError("model: missing or unexpected \"format\" (want \"" +
                            std::string(kModelFormat) + "\")");
        }
        if (doc.value("version", -1) != kModelVersion) {
            throw DataError("model: unsupported \"version\"");
        }
        const auto n_inputs = doc.at("n_inputs").get<std::size_t>();
        auto feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        auto target_name = doc.at("target_name").get<std::string>();
        if (feature_names.size() != n_inputs) {
            throw DataError("model: feature_names length does not match n_inputs");
        }

        const nlohmann::json& norm = doc.at("normalization");
        std::vector<FeatureScaling> input_scaling;
        for (const nlohmann::json& s : norm.at("inputs")) {
            input_scaling.push_back({s.at("mean").get<double>(), s.at("scale").get<double>()});
        }
        const FeatureScaling target_scaling{norm.at("target").at("mean").get<double>(),
                                            norm.at("target").at("scale").get<double>()};

        std::vector<Rule> rules;
        for (const nlohmann::json& rj : doc.at("rules")) {
            const auto centers = rj.at("centers").get<std::vector<double>>();
            const auto widths = rj.at("widths").get<std::vector<double>>();
            if (centers.size() != widths.size()) {
                throw DataError("model: rule centers/widths length mismatch");
            }
            Rule rule;
            for (std::size_t j = 0; j < centers.size(); ++j) {
                rule.premise.emplace_back(centers[j], widths[j]);
            }
            rule.consequent = rj.at("consequent").get<std::vector<double>>();
            rules.push_back(std::move(rule));
        }

        const nlohmann::json& prov = doc.at("provenance");
        Provenance provenance{prov.at("config_hash").get<std::string>(),
                              prov.at("seed").get<std::uint64_t>(),
                              prov.at("created_at").get<std::string>(),
                              prov.at("n_tunable").get<std::size_t>()};

        return ModelFile{AnfisModel(n_inputs, std::move(rules), std::move(input_scaling),
                                    target_scaling),
                         std::move(feature_names), std::move(target_name),
                         std::move(provenance)};
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("model: ") + e.what());
    }
}

inline void save_model(const ModelFile& file, const std::string& path) {
    detail::write_file(path, model_to_json(file), "model");
}

inline ModelFile load_model(const std::string& path) {
    return model_from_json(detail::parse_file(path, "model"));
}

// --- training reports ---------------------------------------------------------

inline constexpr const char* kReportFormat = "anfis-report";

inline nlohmann::json metrics_to_json(const Metrics& m) {
    nlohmann::json out{{"mse", m.mse}, {"rmse", m.rmse}};
    out["mare_pct"] = m.mare_pct.has_value() ? nlohmann::json(*m.mare_pct) : nlohmann::json();
    out["mre_pct"] = m.mre_pct.has_value() ? nlohmann::json(*m.mre_pct) : nlohmann::json();
    out["r2"] = m.r2.has_value() ? nlohmann::json(*m.r2) : nlohmann::json();
    return out;
}

inline nlohmann::json report_to_json(const TrainReport& report, const TrainConfig& config,
                                     const std::vector<std::string>& feature_names,
                                     const std::string& target_name,
                                     const Provenance& provenance) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& [iteration, rmse] : report.rmse_history) {
        history.push_back({iteration, rmse});
    }
    const auto series = [](const std::vector<double>& actual,
                           const std::vector<double>& predicted,
                           const Metrics& metrics) {
        nlohmann::json out{{"actual", actual}, {"predicted", predicted}};
        out["deviation_pct"] = metrics.relative_defined()
                                   ? nlohmann::json(metrics.relative_deviations)
                                   : nlohmann::json();
        return out;
    };
    return nlohmann::json{
        {"format", kReportFormat},
        {"version", kModelVersion},
        {"config", config_to_json(config)},
        {"data",
         {{"feature_names", feature_names},
          {"target_name", target_name},
          {"n_train", report.train_indices.size()},
          {"n_test", report.test_indices.size()},
          {"train_indices", report.train_indices},
          {"test_indices", report.test_indices}}},
        {"model_summary",
         {{"n_rules", report.model.n_rules()},
          {"n_tunable", report.n_tunable},
          {"n_premise_parameters", report.n_premise_parameters},
          {"uncovered_training_points", report.uncovered_training_points}}},
        {"training",
         {{"initial_rmse", report.initial_rmse},
          {"final_rmse", report.final_rmse},
          {"rmse_history", std::move(history)}}},
        {"metrics",
         {{"train", metrics_to_json(report.train_metrics)},
          {"test", metrics_to_json(report.test_metrics)}}},
        {"series",
         {{"train", series(report.train_actual, report.train_predicted, report.train_metrics)},
          {"test", series(report.test_actual, report.test_predicted, report.test_metrics)}}},
        {"provenance",
         {{"config_hash", provenance.config_hash},
          {"seed", provenance.seed},
          {"created_at", provenance.created_at},
          {"n_tunable", provenance.n_tunable}}},
    };
}

inline void save_report(const nlohmann::json& report, const std::string& path) {
    detail::write_file(path, report, "report");
}

/// Provenance for a finished run; the timestamp is wall-clock UTC.
inline Provenance make_provenance(const TrainConfig& config, std::size_t n_tunable) {
    return Provenance{config_hash(config), config.seed, detail::utc_timestamp(), n_tunable};
}

} // namespace anfis
