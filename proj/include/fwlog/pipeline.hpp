#pragma once

#include "fwlog/dataset.hpp"
#include "fwlog/learners.hpp"
#include "fwlog/metrics.hpp"
#include "fwlog/model_store.hpp"
#include "fwlog/preprocess.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fwlog {

struct ExperimentConfig {
    std::filesystem::path data_path;
    std::uint64_t seed = 42;
    double train_fraction = 0.7;
    bool stratified = false;
    std::vector<LearnerKind> algorithms{LearnerKind::rf, LearnerKind::lr, LearnerKind::knn,
                                        LearnerKind::svm};
    RfConfig rf;
    LrConfig lr;
    KnnConfig knn;
    SvmConfig svm;
    ZeroDivision zero_division = ZeroDivision::one;
    std::optional<std::size_t> cv_folds;
    std::optional<std::size_t> eval_subsample;
    bool per_split_scaler = false;
    SchemaPolicy schema = SchemaPolicy::strict;
    std::size_t threads = 1;
    std::filesystem::path out_dir = "out";

    LearnerConfig learner_config(LearnerKind kind) const;
};

/// Applies one `key = value` setting. Throws UsageError on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Parses the flat config grammar: `key = value` lines, `#` comments, blank lines.
void apply_config_text(ExperimentConfig& config, std::string_view text);

std::vector<LearnerKind> parse_algorithms(std::string_view list);

/// Throws UsageError when invariants do not hold.
void validate_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// ingest

struct IngestOutcome {
    IngestReport report;
    ClassDistribution distribution;
};

IngestOutcome run_ingest(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                         SchemaPolicy policy);

std::string render_distribution(const ClassDistribution& dist);

// ---------------------------------------------------------------------------
// train

/// Split + scaler shared by every learner of one run.
struct PreparedData {
    Split split;
    ScalerParams scaler;
    Matrix train_x;
    Matrix test_x;
    std::string dataset_fingerprint;
    std::string train_fingerprint;
};

PreparedData prepare(const Dataset& ds, const ExperimentConfig& config);

ModelArtifact train_on(const PreparedData& data, const ExperimentConfig& config,
                       LearnerKind kind, const std::string& created_at);

struct TrainOutcome {
    ModelArtifact artifact;
    std::filesystem::path model_path;
    double seconds = 0.0;
};

TrainOutcome run_train(const ExperimentConfig& config, LearnerKind kind,
                       const std::filesystem::path& model_path);

// ---------------------------------------------------------------------------
// evaluate

enum class EvalSubset { all, train, test };

EvalSubset eval_subset_from_string(std::string_view name);

struct EvaluateOutcome {
    ClassificationReport report;
    ConfusionMatrix confusion;
};

/// Scores raw (unscaled) rows with the artifact's scaler and model.
EvaluateOutcome evaluate_artifact(const ModelArtifact& artifact, const Dataset& ds,
                                  ZeroDivision policy, std::size_t threads = 1);

/// Re-derives the artifact's split when subset != all (fingerprint must match).
EvaluateOutcome run_evaluate(const std::filesystem::path& model_path,
                             const std::filesystem::path& data_path, EvalSubset subset,
                             const std::filesystem::path& out_dir, ZeroDivision policy,
                             SchemaPolicy schema, std::size_t threads);

void write_evaluation(const EvaluateOutcome& outcome, const std::filesystem::path& out_dir,
                      const std::string& stem);

// ---------------------------------------------------------------------------
// predict

/// Input columns + predicted_action + four score columns.
std::string predict_csv(const ModelArtifact& artifact, std::string_view input_csv,
                        std::size_t threads = 1);

void run_predict(const std::filesystem::path& model_path, const std::filesystem::path& input,
                 const std::filesystem::path& output, std::size_t threads);

// ---------------------------------------------------------------------------
// experiment

struct MethodResult {
    LearnerKind kind{};
    ClassificationReport report;
    ConfusionMatrix confusion;
    std::string payload_checksum;
};

struct FoldSummary {
    std::map<std::string, double> mean;
    std::map<std::string, double> stddev;
};

struct ExperimentOutcome {
    std::vector<MethodResult> methods;  ///< holdout mode
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::size_t evaluated = 0;
    // cv mode: per method, per fold reports
    std::vector<std::vector<ClassificationReport>> folds;
    std::vector<FoldSummary> fold_summaries;
    nlohmann::json json;
    std::string text;
};

ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Table-style comparison of per-class P/R/F1 plus per-method AUC and accuracy.
std::string render_comparison(const std::vector<MethodResult>& methods);
nlohmann::json comparison_json(const std::vector<MethodResult>& methods);

}  // namespace fwlog
