// fwlog: command-line front end for ingesting firewall logs, training the four
// learners, evaluating and applying saved models, and running comparisons.

#include "fwlog/error.hpp"
#include "fwlog/pipeline.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace {

using fwlog::ExperimentConfig;

// Flags shared by every subcommand. Each one is stored verbatim and only
// applied when it was given, so the config file can supply anything omitted.
struct CommonFlags {
    std::vector<std::pair<std::string, CLI::Option*>> settings;
    std::vector<std::pair<std::string, std::string>> values;
    std::string config_file;
    std::vector<std::string> overrides;
    bool stratify = false;
    CLI::Option* stratify_opt = nullptr;
    bool per_split_scaler = false;
    CLI::Option* per_split_opt = nullptr;
};

void add_common(CLI::App& cmd, CommonFlags& f) {
    struct Flag {
        const char* name;
        const char* key;
        const char* help;
    };
    static const std::vector<Flag> flags{
        {"--data", "data", "Firewall log CSV (12-column export)"},
        {"--seed", "seed", "Seed for the split and every learner (default 42)"},
        {"--train-fraction", "train_fraction", "Training share of the holdout split (default 0.7)"},
        {"--algo", "algorithms", "Learners: rf, lr, knn, svm, a comma list or all"},
        {"--out-dir", "out_dir", "Directory for reports and models (default out)"},
        {"--zero-division", "zero_division", "Value for undefined metrics: one or zero"},
        {"--cv-folds", "cv_folds", "Run k-fold cross-validation instead of a holdout"},
        {"--eval-subsample", "eval_subsample", "Score a seeded subsample of N test rows"},
        {"--threads", "threads", "Worker threads (results do not depend on it)"},
        {"--schema", "schema", "Header policy: strict or header-mapped"},
    };
    f.values.resize(flags.size());
    for (std::size_t i = 0; i < flags.size(); ++i) {
        f.values[i].first = flags[i].key;
        auto* opt = cmd.add_option(flags[i].name, f.values[i].second, flags[i].help);
        f.settings.emplace_back(flags[i].key, opt);
    }
    f.stratify_opt = cmd.add_flag("--stratify", f.stratify, "Stratify the train/test split");
    f.per_split_opt = cmd.add_flag("--per-split-scaler", f.per_split_scaler,
                                   "Fit a separate scaler on the test split");
    cmd.add_option("--config", f.config_file, "Flat key = value config file");
    cmd.add_option("--set", f.overrides, "Extra setting, key=value (repeatable)");
}

ExperimentConfig build_config(const CommonFlags& f) {
    ExperimentConfig config;
    if (!f.config_file.empty()) {
        fwlog::apply_config_text(config, fwlog::read_file(f.config_file));
    }
    for (std::size_t i = 0; i < f.settings.size(); ++i) {
        if (f.settings[i].second->count() > 0) {
            fwlog::apply_setting(config, f.values[i].first, f.values[i].second);
        }
    }
    if (f.stratify_opt->count() > 0) {
        config.stratified = f.stratify;
    }
    if (f.per_split_opt->count() > 0) {
        config.per_split_scaler = f.per_split_scaler;
    }
    for (const auto& kv : f.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw fwlog::UsageError("--set expects key=value, got '" + kv + "'");
        }
        fwlog::apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return config;
}

int run(int argc, char** argv) {
    CLI::App app{"Firewall log action classification toolkit"};
    app.require_subcommand(1);

    CommonFlags ingest_f;
    auto* ingest = app.add_subcommand("ingest", "Parse and validate a firewall log CSV");
    add_common(*ingest, ingest_f);

    CommonFlags train_f;
    std::string train_model;
    auto* train = app.add_subcommand("train", "Train one learner and save its model artifact");
    add_common(*train, train_f);
    train->add_option("--model", train_model, "Destination of the model artifact");

    CommonFlags eval_f;
    std::string eval_model;
    std::string eval_subset = "all";
    bool held_out = false;
    auto* evaluate = app.add_subcommand("evaluate", "Score a saved model on a dataset");
    add_common(*evaluate, eval_f);
    evaluate->add_option("--model", eval_model, "Model artifact to evaluate")->required();
    evaluate->add_option("--subset", eval_subset, "Rows to score: all, train or test");
    evaluate->add_flag("--held-out", held_out, "Score the model's own held-out split");

    CommonFlags predict_f;
    std::string predict_model;
    std::string predict_input;
    std::string predict_output;
    auto* predict = app.add_subcommand("predict", "Predict actions for a feature CSV");
    add_common(*predict, predict_f);
    predict->add_option("--model", predict_model, "Model artifact")->required();
    predict->add_option("--input", predict_input, "CSV with the 11 feature columns")->required();
    predict->add_option("--output", predict_output, "Destination CSV")->required();

    CommonFlags exp_f;
    auto* experiment = app.add_subcommand("experiment", "Train and compare all selected learners");
    add_common(*experiment, exp_f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? fwlog::exit_code::ok : fwlog::exit_code::usage;
    }

    if (ingest->parsed()) {
        const auto config = build_config(ingest_f);
        if (config.data_path.empty()) {
            throw fwlog::UsageError("ingest needs --data");
        }
        const auto outcome = fwlog::run_ingest(config.data_path, config.out_dir, config.schema);
        std::cout << fmt::format("rows read {}, accepted {}, rejected {}\n",
                                 outcome.report.rows_read, outcome.report.rows_accepted,
                                 outcome.report.rows_rejected)
                  << fwlog::render_distribution(outcome.distribution);
        for (const auto& r : outcome.report.rejection_reasons) {
            std::cerr << fmt::format("line {}: {}\n", r.line, r.reason);
        }
        return fwlog::exit_code::ok;
    }

    if (train->parsed()) {
        const auto config = build_config(train_f);
        if (config.algorithms.size() != 1) {
            throw fwlog::UsageError("train needs exactly one --algo (rf, lr, knn or svm)");
        }
        const auto kind = config.algorithms.front();
        const std::filesystem::path model_path =
            train_model.empty()
                ? config.out_dir / ("model_" + std::string(fwlog::to_string(kind)) + ".json")
                : std::filesystem::path(train_model);
        const auto outcome = fwlog::run_train(config, kind, model_path);
        std::cout << fmt::format("{}: train {} rows, test {} rows, {:.2f} s -> {}\n",
                                 fwlog::to_string(kind), outcome.artifact.meta.train_size,
                                 outcome.artifact.meta.test_size, outcome.seconds,
                                 outcome.model_path.string());
        return fwlog::exit_code::ok;
    }

    if (evaluate->parsed()) {
        const auto config = build_config(eval_f);
        const auto subset =
            held_out ? fwlog::EvalSubset::test : fwlog::eval_subset_from_string(eval_subset);
        const auto outcome = fwlog::run_evaluate(eval_model, config.data_path, subset,
                                                 config.out_dir, config.zero_division,
                                                 config.schema, config.threads);
        std::cout << fwlog::render_report(outcome.report, fwlog::ReportFormat::text);
        return fwlog::exit_code::ok;
    }

    if (predict->parsed()) {
        const auto config = build_config(predict_f);
        fwlog::run_predict(predict_model, predict_input, predict_output, config.threads);
        return fwlog::exit_code::ok;
    }

    const auto config = build_config(exp_f);
    const auto outcome = fwlog::run_experiment(config);
    std::cout << outcome.text;
    return fwlog::exit_code::ok;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fwlog::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return fwlog::exit_code::usage;
    } catch (const fwlog::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return fwlog::exit_code::data;
    } catch (const fwlog::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return fwlog::exit_code::numeric;
    } catch (const fwlog::ArtifactError& e) {
        std::cerr << "artifact error: " << e.what() << '\n';
        return fwlog::exit_code::artifact;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fwlog::exit_code::io;
    }
}
