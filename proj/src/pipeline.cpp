#include "fwlog/pipeline.hpp"

#include "csv.hpp"
#include "fwlog/error.hpp"
#include "fwlog/random.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include <fmt/format.h>

namespace fwlog {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::uint64_t kEvalSubsampleStream = 0x4556414cULL;

void write_text(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw Error("failed writing '" + path.string() + "'");
    }
}

std::string csv_field(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (const char ch : field) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    out += '"';
    return out;
}

Dataset load_dataset(const fs::path& path, SchemaPolicy schema) {
    if (path.empty()) {
        throw UsageError("no input data given (use --data)");
    }
    return parse_csv_file(path, schema).dataset;
}

struct Scored {
    ClassificationReport report;
    ConfusionMatrix confusion;
};

Scored score(const Model& model, const Matrix& x, std::span<const int> y, ZeroDivision policy,
             std::size_t threads) {
    const auto scores = predict_scores(model, x, FitOptions{threads});
    std::vector<int> pred(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        pred[i] = argmax(scores.row(i));
    }
    return {evaluate_predictions(y, pred, &scores, policy), confusion_matrix(y, pred)};
}

json config_summary(const ExperimentConfig& c) {
    std::vector<std::string> algos;
    for (const auto k : c.algorithms) {
        algos.emplace_back(to_string(k));
    }
    return {{"seed", c.seed},
            {"train_fraction", c.train_fraction},
            {"stratified", c.stratified},
            {"algorithms", algos},
            {"zero_division", to_string(c.zero_division)},
            {"cv_folds", c.cv_folds ? json(*c.cv_folds) : json(nullptr)},
            {"eval_subsample", c.eval_subsample ? json(*c.eval_subsample) : json(nullptr)},
            {"per_split_scaler", c.per_split_scaler}};
}

double sample_stddev(const std::vector<double>& v, double mean) {
    if (v.size() < 2) {
        return 0.0;
    }
    double ss = 0.0;
    for (const double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::map<std::string, double> headline_metrics(const ClassificationReport& r) {
    std::map<std::string, double> m{{"accuracy", r.accuracy},
                                    {"macro_precision", r.macro_avg.precision},
                                    {"macro_recall", r.macro_avg.recall},
                                    {"macro_f1", r.macro_avg.f1},
                                    {"weighted_f1", r.weighted_avg.f1}};
    if (r.auc_macro_ovr) {
        m["auc_macro_ovr"] = *r.auc_macro_ovr;
    }
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string render_distribution(const ClassDistribution& dist) {
    std::string out = fmt::format("{:<12} {:>8} {:>10}\n", "class", "count", "fraction");
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        out += fmt::format("{:<12} {:>8} {:>10.6f}\n", kClassNames[k], dist.counts[k],
                           dist.fractions[k]);
    }
    return out;
}

IngestOutcome run_ingest(const fs::path& input, const fs::path& out_dir, SchemaPolicy policy) {
    auto parsed = parse_csv_file(input, policy);
    IngestOutcome outcome{std::move(parsed.report), class_distribution(parsed.dataset)};
    json dist = json::object();
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        dist[std::string(kClassNames[k])] = {{"count", outcome.distribution.counts[k]},
                                             {"fraction", outcome.distribution.fractions[k]}};
    }
    write_text(out_dir / "ingest_report.json", json(outcome.report).dump(2) + "\n");
    write_text(out_dir / "class_distribution.json", dist.dump(2) + "\n");
    write_text(out_dir / "class_distribution.txt", render_distribution(outcome.distribution));
    return outcome;
}

PreparedData prepare(const Dataset& ds, const ExperimentConfig& config) {
    PreparedData data;
    data.split = shuffle_split(ds, SplitSpec{config.train_fraction, config.seed, config.stratified});
    data.scaler = fit_scaler(data.split.train.features);
    data.train_x = transform(data.scaler, data.split.train.features);
    if (config.per_split_scaler) {
        data.test_x = transform(fit_scaler(data.split.test.features), data.split.test.features);
    } else {
        data.test_x = transform(data.scaler, data.split.test.features);
    }
    data.dataset_fingerprint = fingerprint(ds);
    data.train_fingerprint = fingerprint(data.split.train);
    return data;
}

ModelArtifact train_on(const PreparedData& data, const ExperimentConfig& config, LearnerKind kind,
                       const std::string& created_at) {
    const auto learner = config.learner_config(kind);
    ModelArtifact artifact;
    artifact.created_at = created_at;
    artifact.scaler = data.scaler;
    artifact.model = fit(learner, data.train_x, data.split.train.labels, config.seed,
                         FitOptions{config.threads});
    artifact.meta.seed = config.seed;
    artifact.meta.config = learner;
    artifact.meta.dataset_fingerprint = data.dataset_fingerprint;
    artifact.meta.train_fingerprint = data.train_fingerprint;
    artifact.meta.train_size = data.split.train.size();
    artifact.meta.test_size = data.split.test.size();
    artifact.meta.train_fraction = config.train_fraction;
    artifact.meta.stratified = config.stratified;
    return artifact;
}

TrainOutcome run_train(const ExperimentConfig& config, LearnerKind kind, const fs::path& model_path) {
    validate_experiment(config);
    const auto start = std::chrono::steady_clock::now();
    const auto ds = load_dataset(config.data_path, config.schema);
    const auto data = prepare(ds, config);
    TrainOutcome outcome;
    outcome.artifact = train_on(data, config, kind, utc_timestamp_now());
    if (model_path.has_parent_path()) {
        fs::create_directories(model_path.parent_path());
    }
    save(outcome.artifact, model_path);
    outcome.model_path = model_path;
    outcome.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return outcome;
}

// ---------------------------------------------------------------------------

EvalSubset eval_subset_from_string(std::string_view name) {
    if (name == "all") return EvalSubset::all;
    if (name == "train") return EvalSubset::train;
    if (name == "test" || name == "held-out") return EvalSubset::test;
    throw UsageError("subset must be one of all, train, test");
}

EvaluateOutcome evaluate_artifact(const ModelArtifact& artifact, const Dataset& ds,
                                  ZeroDivision policy, std::size_t threads) {
    if (ds.features.cols() != artifact.scaler.means.size()) {
        throw DataError("dataset has " + std::to_string(ds.features.cols()) +
                        " feature columns, model expects " +
                        std::to_string(artifact.scaler.means.size()));
    }
    const auto x = transform(artifact.scaler, ds.features);
    auto scored = score(artifact.model, x, ds.labels, policy, threads);
    return {std::move(scored.report), scored.confusion};
}

void write_evaluation(const EvaluateOutcome& outcome, const fs::path& out_dir,
                      const std::string& stem) {
    write_text(out_dir / ("report_" + stem + ".txt"), render_report(outcome.report, ReportFormat::text));
    write_text(out_dir / ("report_" + stem + ".json"), render_report(outcome.report, ReportFormat::json));
    write_text(out_dir / ("confusion_" + stem + ".csv"), confusion_matrix_csv(outcome.confusion));
    write_text(out_dir / ("confusion_" + stem + ".json"),
               confusion_matrix_json(outcome.confusion).dump(2) + "\n");
}

EvaluateOutcome run_evaluate(const fs::path& model_path, const fs::path& data_path,
                             EvalSubset subset, const fs::path& out_dir, ZeroDivision policy,
                             SchemaPolicy schema, std::size_t threads) {
    const auto artifact = load(model_path);
    auto ds = load_dataset(data_path, schema);
    if (subset != EvalSubset::all) {
        if (fingerprint(ds) != artifact.meta.dataset_fingerprint) {
            throw DataError("dataset fingerprint differs from the one the model was trained on; "
                            "train/test subsets cannot be reconstructed");
        }
        auto split = shuffle_split(ds, SplitSpec{artifact.meta.train_fraction, artifact.meta.seed,
                                                 artifact.meta.stratified});
        ds = subset == EvalSubset::train ? std::move(split.train) : std::move(split.test);
    }
    auto outcome = evaluate_artifact(artifact, ds, policy, threads);
    write_evaluation(outcome, out_dir, std::string(to_string(artifact.kind())));
    return outcome;
}

// ---------------------------------------------------------------------------

std::string predict_csv(const ModelArtifact& artifact, std::string_view input_csv,
                        std::size_t threads) {
    const auto table = parse_feature_csv(input_csv);
    const auto x = transform(artifact.scaler, table.features);
    const auto scores = predict_scores(artifact.model, x, FitOptions{threads});

    std::string out;
    for (const auto& h : table.header) {
        out += csv_field(h);
        out += ',';
    }
    out += "predicted_action";
    for (const auto name : kClassNames) {
        out += ",score_";
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < table.raw.size(); ++i) {
        for (const auto& field : table.raw[i]) {
            out += csv_field(field);
            out += ',';
        }
        const auto row = scores.row(i);
        out += decode_label(argmax(row));
        for (const double s : row) {
            out += ',';
            out += csv::format_number(s);
        }
        out += '\n';
    }
    return out;
}

void run_predict(const fs::path& model_path, const fs::path& input, const fs::path& output,
                 std::size_t threads) {
    const auto artifact = load(model_path);
    write_text(output, predict_csv(artifact, read_file(input), threads));
}

// ---------------------------------------------------------------------------

std::string render_comparison(const std::vector<MethodResult>& methods) {
    std::string out = fmt::format("{:<7} {:<11} {:>9} {:>7} {:>9} {:>6} {:>9}\n", "Method",
                                  "Class", "Precision", "Recall", "F1-Score", "AUC", "Accuracy");
    for (const auto& m : methods) {
        std::string method = std::string(to_string(m.kind));
        for (auto& ch : method) {
            ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        }
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            const auto& c = m.report.classes[k];
            const bool first = k == 0;
            const std::string auc =
                first && m.report.auc_macro_ovr ? format_2dp(*m.report.auc_macro_ovr) : "";
            out += fmt::format("{:<7} {:<11} {:>9} {:>7} {:>9} {:>6} {:>9}\n",
                               first ? method : "", m.report.class_names[k],
                               format_2dp(c.precision), format_2dp(c.recall), format_2dp(c.f1), auc,
                               first ? format_2dp(m.report.accuracy) : "");
        }
    }
    return out;
}

json comparison_json(const std::vector<MethodResult>& methods) {
    json out = json::array();
    for (const auto& m : methods) {
        out.push_back({{"method", to_string(m.kind)},
                       {"report", report_to_json(m.report)},
                       {"confusion_matrix", confusion_matrix_json(m.confusion)},
                       {"model_checksum", m.payload_checksum}});
    }
    return out;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
    validate_experiment(config);
    const auto ds = load_dataset(config.data_path, config.schema);
    fs::create_directories(config.out_dir);
    ExperimentOutcome outcome;

    if (config.cv_folds) {
        const auto folds = kfold_indices(ds.size(), *config.cv_folds, config.seed);
        outcome.folds.resize(config.algorithms.size());
        json fold_json = json::array();
        for (std::size_t f = 0; f < folds.size(); ++f) {
            std::vector<std::size_t> train_idx;
            for (std::size_t g = 0; g < folds.size(); ++g) {
                if (g != f) {
                    train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
                }
            }
            const auto train = ds.subset(train_idx);
            const auto test = ds.subset(folds[f]);
            const auto scaler = fit_scaler(train.features);
            const auto train_x = transform(scaler, train.features);
            const auto test_x = transform(
                config.per_split_scaler ? fit_scaler(test.features) : scaler, test.features);
            json per_method = json::object();
            for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
                const auto kind = config.algorithms[a];
                const auto model = fit(config.learner_config(kind), train_x, train.labels,
                                       derive_seed(config.seed, f), FitOptions{config.threads});
                auto scored = score(model, test_x, test.labels, config.zero_division, config.threads);
                per_method[std::string(to_string(kind))] = report_to_json(scored.report);
                outcome.folds[a].push_back(std::move(scored.report));
            }
            fold_json.push_back({{"fold", f}, {"test_size", test.size()}, {"methods", per_method}});
        }

        json summary = json::object();
        std::string text = fmt::format("{}-fold cross-validation (seed {})\n\n", folds.size(),
                                       config.seed);
        text += fmt::format("{:<7} {:<16} {:>8} {:>8}\n", "Method", "Metric", "Mean", "StdDev");
        for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
            FoldSummary fs_summary;
            std::map<std::string, std::vector<double>> values;
            for (const auto& r : outcome.folds[a]) {
                for (const auto& [name, v] : headline_metrics(r)) {
                    values[name].push_back(v);
                }
            }
            const auto method = std::string(to_string(config.algorithms[a]));
            for (const auto& [name, v] : values) {
                const double mean = std::accumulate(v.begin(), v.end(), 0.0) /
                                    static_cast<double>(v.size());
                fs_summary.mean[name] = mean;
                fs_summary.stddev[name] = sample_stddev(v, mean);
                text += fmt::format("{:<7} {:<16} {:>8.4f} {:>8.4f}\n", method, name, mean,
                                    fs_summary.stddev[name]);
            }
            summary[method] = {{"mean", fs_summary.mean}, {"stddev", fs_summary.stddev}};
            outcome.fold_summaries.push_back(std::move(fs_summary));
        }
        outcome.json = {{"mode", "cross-validation"},
                        {"config", config_summary(config)},
                        {"dataset_fingerprint", fingerprint(ds)},
                        {"rows", ds.size()},
                        {"folds", std::move(fold_json)},
                        {"summary", std::move(summary)}};
        outcome.text = std::move(text);
        write_text(config.out_dir / "cv_results.json", outcome.json.dump(2) + "\n");
        write_text(config.out_dir / "cv_summary.txt", outcome.text);
        return outcome;
    }

    const auto data = prepare(ds, config);
    outcome.train_size = data.split.train.size();
    outcome.test_size = data.split.test.size();

    Matrix eval_x = data.test_x;
    std::vector<int> eval_y = data.split.test.labels;
    if (config.eval_subsample) {
        const auto picked = subsample_indices(eval_y.size(), *config.eval_subsample,
                                              derive_seed(config.seed, kEvalSubsampleStream));
        eval_x = data.test_x.select_rows(picked);
        std::vector<int> y;
        for (const auto i : picked) {
            y.push_back(eval_y[i]);
        }
        eval_y = std::move(y);
    }
    outcome.evaluated = eval_y.size();

    const auto created_at = utc_timestamp_now();
    for (const auto kind : config.algorithms) {
        const auto artifact = train_on(data, config, kind, created_at);
        const auto stem = std::string(to_string(kind));
        save(artifact, config.out_dir / ("model_" + stem + ".json"));
        auto scored = score(artifact.model, eval_x, eval_y, config.zero_division, config.threads);
        MethodResult result{kind, std::move(scored.report), scored.confusion,
                            artifact_checksum(artifact_to_json(artifact))};
        write_evaluation(EvaluateOutcome{result.report, result.confusion}, config.out_dir, stem);
        outcome.methods.push_back(std::move(result));
    }

    outcome.text = fmt::format("train {} / test {} rows, evaluated {} (seed {})\n\n",
                               outcome.train_size, outcome.test_size, outcome.evaluated,
                               config.seed) +
                   render_comparison(outcome.methods);
    outcome.json = {{"mode", "holdout"},
                    {"config", config_summary(config)},
                    {"dataset_fingerprint", data.dataset_fingerprint},
                    {"train_fingerprint", data.train_fingerprint},
                    {"train_size", outcome.train_size},
                    {"test_size", outcome.test_size},
                    {"evaluated", outcome.evaluated},
                    {"methods", comparison_json(outcome.methods)}};
    write_text(config.out_dir / "comparison.txt", outcome.text);
    write_text(config.out_dir / "comparison.json", outcome.json.dump(2) + "\n");
    return outcome;
}

}  // namespace fwlog
