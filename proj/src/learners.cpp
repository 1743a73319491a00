#include "fwlog/learners.hpp"

#include "fwlog/error.hpp"
#include "learners_internal.hpp"

#include <string>

namespace fwlog {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_training_data(const Matrix& x, std::span<const int> y) {
    if (x.rows() == 0) {
        throw DataError("cannot fit on an empty training set");
    }
    if (x.rows() != y.size()) {
        throw DataError("training matrix has " + std::to_string(x.rows()) + " rows but " +
                        std::to_string(y.size()) + " labels");
    }
    for (const int label : y) {
        if (!valid_label(label)) {
            throw DataError("training label " + std::to_string(label) + " not in {0,1,2,3}");
        }
    }
}

}  // namespace

std::string_view to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::rf: return "rf";
        case LearnerKind::lr: return "lr";
        case LearnerKind::knn: return "knn";
        case LearnerKind::svm: return "svm";
    }
    return "unknown";
}

LearnerKind learner_kind_from_string(std::string_view name) {
    for (const auto kind : {LearnerKind::rf, LearnerKind::lr, LearnerKind::knn, LearnerKind::svm}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw UsageError("unknown algorithm '" + std::string(name) + "' (valid: rf, lr, knn, svm)");
}

LearnerKind kind_of(const LearnerConfig& config) {
    return static_cast<LearnerKind>(config.index());
}

LearnerKind kind_of(const Model& model) { return static_cast<LearnerKind>(model.index()); }

LearnerConfig default_config(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::rf: return RfConfig{};
        case LearnerKind::lr: return LrConfig{};
        case LearnerKind::knn: return KnnConfig{};
        case LearnerKind::svm: return SvmConfig{};
    }
    throw UsageError("unknown learner kind");
}

void validate_config(const LearnerConfig& config, std::size_t n_features) {
    std::visit(overloaded{
                   [&](const RfConfig& c) {
                       if (c.n_trees < 1) throw UsageError("rf: n_trees must be >= 1");
                       if (c.mtry < 1 || c.mtry > n_features)
                           throw UsageError("rf: mtry must lie in [1, " +
                                            std::to_string(n_features) + "]");
                       if (c.min_samples_split < 2)
                           throw UsageError("rf: min_samples_split must be >= 2");
                       if (!(c.bootstrap_size_fraction > 0.0))
                           throw UsageError("rf: bootstrap fraction must be positive");
                   },
                   [](const LrConfig& c) {
                       if (!(c.learning_rate > 0.0))
                           throw UsageError("lr: learning_rate must be positive");
                       if (c.epochs < 1) throw UsageError("lr: epochs must be >= 1");
                       if (!(c.l2_lambda >= 0.0)) throw UsageError("lr: l2_lambda must be >= 0");
                   },
                   [](const KnnConfig& c) {
                       if (c.k < 1) throw UsageError("knn: k must be >= 1");
                   },
                   [](const SvmConfig& c) {
                       if (!(c.c > 0.0)) throw UsageError("svm: C must be positive");
                       if (c.epochs < 1) throw UsageError("svm: epochs must be >= 1");
                   },
               },
               config);
}

std::size_t n_features_of(const Model& model) {
    return std::visit(overloaded{
                          [](const RfModel& m) { return m.n_features; },
                          [](const LrModel& m) { return m.weights.cols(); },
                          [](const KnnModel& m) { return m.train.cols(); },
                          [](const SvmModel& m) { return m.weights.cols(); },
                      },
                      model);
}

Model fit(const LearnerConfig& config, const Matrix& x, std::span<const int> y,
          std::uint64_t seed, const FitOptions& options) {
    check_training_data(x, y);
    validate_config(config, x.cols());
    return std::visit(overloaded{
                          [&](const RfConfig& c) -> Model {
                              return fit_forest(c, x, y, seed, options.threads);
                          },
                          [&](const LrConfig& c) -> Model { return fit_logistic(c, x, y, seed); },
                          [&](const KnnConfig& c) -> Model { return fit_knn(c, x, y); },
                          [&](const SvmConfig& c) -> Model {
                              return fit_svm(c, x, y, seed, options.threads);
                          },
                      },
                      config);
}

Matrix predict_scores(const Model& model, const Matrix& x, const FitOptions& options) {
    const auto d = n_features_of(model);
    if (x.cols() != d && x.rows() > 0) {
        throw DataError("model expects " + std::to_string(d) + " feature columns, got " +
                        std::to_string(x.cols()));
    }
    if (x.rows() == 0) {
        return Matrix(0, kNumClasses);
    }
    return std::visit(overloaded{
                          [&](const RfModel& m) { return forest_scores(m, x, options.threads); },
                          [&](const LrModel& m) { return logistic_scores(m, x); },
                          [&](const KnnModel& m) { return knn_scores(m, x, options.threads); },
                          [&](const SvmModel& m) { return svm_scores(m, x); },
                      },
                      model);
}

int argmax(std::span<const double> scores) noexcept {
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k] > scores[best]) {
            best = k;
        }
    }
    return static_cast<int>(best);
}

std::vector<int> predict(const Model& model, const Matrix& x, const FitOptions& options) {
    const auto scores = predict_scores(model, x, options);
    std::vector<int> out(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        out[i] = argmax(scores.row(i));
    }
    return out;
}

}  // namespace fwlog
