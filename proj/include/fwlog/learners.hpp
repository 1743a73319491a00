#pragma once

#include "fwlog/labels.hpp"
#include "fwlog/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fwlog {

// ---------------------------------------------------------------------------
// Hyperparameters

struct RfConfig {
    std::size_t n_trees = 100;
    std::optional<std::size_t> max_depth;  ///< unset = grow until pure
    std::size_t min_samples_split = 2;
    std::size_t mtry = 3;
    double bootstrap_size_fraction = 1.0;

    bool operator==(const RfConfig&) const = default;
};

struct LrConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 300;
    double l2_lambda = 1e-4;
    std::size_t batch_size = 0;  ///< 0 = full batch

    bool operator==(const LrConfig&) const = default;
};

struct KnnConfig {
    std::size_t k = 5;

    bool operator==(const KnnConfig&) const = default;
};

struct SvmConfig {
    double c = 1.0;
    std::size_t epochs = 50;

    bool operator==(const SvmConfig&) const = default;
};

using LearnerConfig = std::variant<RfConfig, LrConfig, KnnConfig, SvmConfig>;

enum class LearnerKind { rf, lr, knn, svm };

std::string_view to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(std::string_view name);
LearnerKind kind_of(const LearnerConfig& config);
LearnerConfig default_config(LearnerKind kind);

/// Throws UsageError on out-of-range hyperparameters.
void validate_config(const LearnerConfig& config, std::size_t n_features);

// ---------------------------------------------------------------------------
// Fitted models

/// Flattened binary tree. Node 0 is the root; a node with feature < 0 is a leaf.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;  ///< x[feature] <= threshold goes left
    int left = -1;
    int right = -1;
    double decrease = 0.0;  ///< weighted Gini decrease credited to this split
    std::array<double, kNumClasses> counts{};

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    std::uint64_t seed = 0;

    bool operator==(const DecisionTree&) const = default;
};

struct RfModel {
    std::vector<DecisionTree> trees;
    std::size_t n_features = 0;

    bool operator==(const RfModel&) const = default;
};

struct LrModel {
    Matrix weights;  ///< 4 x d
    std::vector<double> biases;

    bool operator==(const LrModel&) const = default;
};

struct KnnModel {
    Matrix train;
    std::vector<int> labels;
    std::size_t k = 5;

    bool operator==(const KnnModel&) const = default;
};

struct SvmModel {
    Matrix weights;  ///< 4 x d, one-vs-rest
    std::vector<double> biases;

    bool operator==(const SvmModel&) const = default;
};

using Model = std::variant<RfModel, LrModel, KnnModel, SvmModel>;

LearnerKind kind_of(const Model& model);
std::size_t n_features_of(const Model& model);

struct FitOptions {
    std::size_t threads = 1;
};

/// Trains on standardized rows. Output depends only on (config, data, seed).
Model fit(const LearnerConfig& config, const Matrix& x, std::span<const int> y,
          std::uint64_t seed, const FitOptions& options = {});

/// m x 4. RF/LR/KNN rows are probability vectors; SVM rows are raw OvR margins.
Matrix predict_scores(const Model& model, const Matrix& x, const FitOptions& options = {});

/// Row-wise argmax of predict_scores, ties to the lowest class index.
std::vector<int> predict(const Model& model, const Matrix& x, const FitOptions& options = {});

int argmax(std::span<const double> scores) noexcept;

// ---------------------------------------------------------------------------
// Random forest internals

/// 1 - sum_k p_k^2. Throws NumericError when the total is zero.
double gini_impurity(std::span<const double> class_counts);

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;

    bool operator==(const SplitChoice&) const = default;
};

/// Exhaustive midpoint search over the candidate features. Returns nothing
/// unless some split strictly decreases weighted Gini impurity. Ties go to the
/// lowest feature index, then the lowest threshold.
std::optional<SplitChoice> best_split(const Matrix& rows, std::span<const int> labels,
                                      std::span<const std::size_t> candidate_features);

/// Grows one tree on the given sample (row indices into x, duplicates allowed).
/// Candidate features per node are drawn from `seed`.
DecisionTree grow_tree(const RfConfig& config, const Matrix& x, std::span<const int> y,
                       std::span<const std::size_t> sample, std::uint64_t seed);

/// Bootstrap row indices for tree `tree_index`; depends only on (n, fraction, seed, index).
std::vector<std::size_t> bootstrap_indices(std::size_t n, double fraction, std::uint64_t seed,
                                           std::size_t tree_index);

/// Normalized class distribution of the leaf reached by `row`.
std::array<double, kNumClasses> tree_leaf_distribution(const DecisionTree& tree,
                                                       std::span<const double> row);

/// Mean per-tree Gini decrease per feature, normalized to sum 1.
std::vector<double> feature_importance(const Model& model);

// ---------------------------------------------------------------------------
// Logistic regression internals

std::array<double, kNumClasses> softmax(std::span<const double> logits);

struct LossAndGradient {
    double loss = 0.0;
    Matrix weight_gradient;  ///< same shape as weights
    std::vector<double> bias_gradient;
};

/// Mean softmax cross-entropy plus (lambda/2)||W||^2; the bias is not penalized.
LossAndGradient lr_loss_and_gradient(const Matrix& weights, std::span<const double> biases,
                                     const Matrix& x, const Matrix& one_hot_y, double l2_lambda);

/// Fits multinomial logistic regression; when `loss_history` is given it
/// receives the training objective before the first and after every epoch.
LrModel fit_logistic(const LrConfig& config, const Matrix& x, std::span<const int> y,
                     std::uint64_t seed, std::vector<double>* loss_history = nullptr);

// ---------------------------------------------------------------------------
// SVM internals

struct BinarySvm {
    std::vector<double> weights;
    double bias = 0.0;
};

/// Pegasos sub-gradient descent on (lambda/2)||(w,b)||^2 + mean hinge loss with
/// lambda = 1/(C n). Labels are +1/-1; both must be present.
BinarySvm svm_binary_train(const Matrix& x, std::span<const int> y_pm, double c,
                           std::size_t epochs, std::uint64_t seed);

}  // namespace fwlog
