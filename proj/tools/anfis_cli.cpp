// Command-line front end: train, evaluate, predict, and gen-data over CSV
// datasets, with JSON model and report files.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 numeric failure. Errors print a single "error: ..." line to stderr.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anfis/anfis.hpp"

namespace {

using namespace anfis;

struct TrainArgs {
    std::string config_path;
    std::string data_path;
    std::string target;
    std::string out_model;
    std::string out_report;
};

struct PredictArgs {
    std::string model_path;
    std::string data_path;
    std::string inline_input;
};

struct EvaluateArgs {
    std::string model_path;
    std::string data_path;
    std::string target;
};

struct GenDataArgs {
    std::string spec_path;
    std::size_t rows = 82;
    std::uint64_t seed = 0;
    std::string out_path;
};

int run_train(const TrainArgs& args) {
    const TrainConfig config =
        args.config_path.empty() ? TrainConfig{} : load_train_config(args.config_path);
    const Dataset data = load_csv(args.data_path, args.target);
    const TrainReport report = train(data, config);
    if (report.uncovered_training_points > 0) {
        std::cerr << "warning: " << report.uncovered_training_points
                  << " training points are far from every initial rule center\n";
    }

    const Provenance provenance = make_provenance(config, report.n_tunable);
    save_model(ModelFile{report.model, data.feature_names, data.target_name, provenance},
               args.out_model);
    save_report(report_to_json(report, config, data.feature_names, data.target_name, provenance),
                args.out_report);

    char line[256];
    std::snprintf(line, sizeof(line),
                  "train: %zu rules, rmse %.6g -> %.6g over %zu iterations",
                  report.model.n_rules(), report.initial_rmse, report.final_rmse,
                  report.rmse_history.size());
    std::cout << line << '\n';
    std::snprintf(line, sizeof(line), "train: wrote %s and %s", args.out_model.c_str(),
                  args.out_report.c_str());
    std::cout << line << '\n';
    return 0;
}

std::vector<double> parse_inline_input(const std::string& text) {
    std::vector<double> values;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find(',', begin);
        if (end == std::string::npos) end = text.size();
        const std::string cell = text.substr(begin, end - begin);
        try {
            std::size_t used = 0;
            values.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ConfigError("input: cannot parse '" + cell + "' as a number");
        }
        begin = end + 1;
        if (end == text.size()) break;
    }
    return values;
}

/// Drops the target column when the file carries one; accepts files with
/// exactly the model's inputs otherwise.
Matrix feature_matrix_for(const ModelFile& model_file, const std::string& path) {
    const std::size_t n = model_file.model.n_inputs();
    const NumericTable table = load_csv_table(path);
    std::optional<std::size_t> drop;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j] == model_file.target_name) drop = j;
    }
    if (!drop && table.header.size() == n + 1) drop = table.header.size() - 1;
    const std::size_t effective = table.header.size() - (drop ? 1 : 0);
    if (effective != n) {
        throw ShapeError("predict: model expects " + std::to_string(n) +
                         " feature columns, file has " + std::to_string(table.header.size()));
    }
    Matrix X(table.values.rows(), n);
    for (std::size_t k = 0; k < table.values.rows(); ++k) {
        std::size_t col = 0;
        for (std::size_t j = 0; j < table.header.size(); ++j) {
            if (drop && j == *drop) continue;
            X(k, col++) = table.values(k, j);
        }
    }
    return X;
}

int run_predict(const PredictArgs& args) {
    if (args.inline_input.empty() && args.data_path.empty()) {
        throw ConfigError("predict: provide --data or --input");
    }
    const ModelFile model_file = load_model(args.model_path);
    std::vector<double> predictions;
    if (!args.inline_input.empty()) {
        const std::vector<double> x = parse_inline_input(args.inline_input);
        if (x.size() != model_file.model.n_inputs()) {
            throw ShapeError("predict: model expects " +
                             std::to_string(model_file.model.n_inputs()) + " inputs, got " +
                             std::to_string(x.size()));
        }
        predictions.push_back(model_file.model.evaluate(x));
    } else {
        predictions = model_file.model.evaluate_batch(feature_matrix_for(model_file, args.data_path));
    }
    char buf[64];
    for (double p : predictions) {
        std::snprintf(buf, sizeof(buf), "%.17g", p);
        std::cout << buf << '\n';
    }
    return 0;
}

int run_evaluate(const EvaluateArgs& args) {
    const ModelFile model_file = load_model(args.model_path);

    std::string target = args.target;
    if (target.empty()) {
        // Prefer the model's own target column when the file carries it.
        const NumericTable table = load_csv_table(args.data_path);
        for (const std::string& name : table.header) {
            if (name == model_file.target_name) target = name;
        }
    }
    const Dataset data = load_csv(args.data_path, target);
    if (data.n_features() != model_file.model.n_inputs()) {
        throw ShapeError("evaluate: model expects " +
                         std::to_string(model_file.model.n_inputs()) +
                         " feature columns, file has " + std::to_string(data.n_features()));
    }
    const std::vector<double> predicted = model_file.model.evaluate_batch(data.X);
    const Metrics metrics = compute_metrics(data.y, predicted);

    nlohmann::json out{{"n_samples", data.n_samples()},
                       {"target", data.target_name},
                       {"metrics", metrics_to_json(metrics)}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

int run_gen_data(const GenDataArgs& args) {
    const GeneratorSpec spec =
        args.spec_path.empty() ? GeneratorSpec{} : load_generator_spec(args.spec_path);
    const TeacherFn teacher = named_teacher(spec.teacher, spec.schema);
    const Dataset data =
        generate_synthetic(spec.schema, args.rows, teacher, spec.noise_level, args.seed);
    save_csv(data, args.out_path);
    std::cout << "gen-data: wrote " << data.n_samples() << " rows x " << data.n_features()
              << " features to " << args.out_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ANFIS regression engine: Takagi-Sugeno fuzzy models with "
                 "swarm-tuned premises and least-squares consequents"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "Train a model on a CSV dataset");
    train_cmd->add_option("--config", train_args.config_path,
                          "JSON training configuration (defaults apply when omitted)");
    train_cmd->add_option("--data", train_args.data_path, "Training CSV")->required();
    train_cmd->add_option("--target", train_args.target,
                          "Target column name (default: last column)");
    train_cmd->add_option("--out-model", train_args.out_model, "Model JSON output path")
        ->required();
    train_cmd->add_option("--out-report", train_args.out_report, "Report JSON output path")
        ->required();

    PredictArgs predict_args;
    CLI::App* predict_cmd = app.add_subcommand("predict", "Predict with a saved model");
    predict_cmd->add_option("--model", predict_args.model_path, "Model JSON path")->required();
    CLI::Option* data_opt =
        predict_cmd->add_option("--data", predict_args.data_path, "CSV of feature rows");
    CLI::Option* input_opt = predict_cmd->add_option(
        "--input", predict_args.inline_input, "Single comma-separated feature vector");
    data_opt->excludes(input_opt);

    EvaluateArgs evaluate_args;
    CLI::App* evaluate_cmd =
        app.add_subcommand("evaluate", "Score a saved model on labeled data");
    evaluate_cmd->add_option("--model", evaluate_args.model_path, "Model JSON path")->required();
    evaluate_cmd->add_option("--data", evaluate_args.data_path, "Labeled CSV")->required();
    evaluate_cmd->add_option("--target", evaluate_args.target,
                             "Target column name (default: model's target, else last column)");

    GenDataArgs gen_args;
    CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic CSV dataset");
    gen_cmd->add_option("--spec", gen_args.spec_path,
                        "JSON generator spec (defaults to the six-feature flue-gas schema)");
    gen_cmd->add_option("--rows", gen_args.rows, "Number of rows (default 82)");
    gen_cmd->add_option("--seed", gen_args.seed, "Generator seed (default 0)");
    gen_cmd->add_option("--out", gen_args.out_path, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (train_cmd->parsed()) return run_train(train_args);
        if (predict_cmd->parsed()) return run_predict(predict_args);
        if (evaluate_cmd->parsed()) {
            return run_evaluate(evaluate_args);
        }
        if (gen_cmd->parsed()) return run_gen_data(gen_args);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
