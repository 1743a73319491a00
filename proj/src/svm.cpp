#include "fwlog/error.hpp"
#include "fwlog/learners.hpp"
#include "fwlog/random.hpp"
#include "learners_internal.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>

namespace fwlog {

namespace {

constexpr double kAbsentClassBias = -1.0;

}  // namespace

// Pegasos: at step t, eta = 1/(lambda t); the bias rides along as the weight of
// a constant feature 1 so every coordinate shares the same shrink and projection.
BinarySvm svm_binary_train(const Matrix& x, std::span<const int> y_pm, double c,
                           std::size_t epochs, std::uint64_t seed) {
    const auto n = x.rows();
    const auto d = x.cols();
    const bool has_pos = std::find(y_pm.begin(), y_pm.end(), 1) != y_pm.end();
    const bool has_neg = std::find(y_pm.begin(), y_pm.end(), -1) != y_pm.end();
    if (!has_pos || !has_neg) {
        throw DataError("svm: both +1 and -1 labels are required");
    }
    if (!(c > 0.0)) {
        throw UsageError("svm: C must be positive");
    }
    const double lambda = 1.0 / (c * static_cast<double>(n));
    const double radius = 1.0 / std::sqrt(lambda);

    std::vector<double> w(d + 1, 0.0);  // last slot is the bias
    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        const auto order = permutation(n, derive_seed(seed, epoch));
        for (const auto i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const auto row = x.row(i);
            double score = w[d];
            for (std::size_t j = 0; j < d; ++j) {
                score += w[j] * row[j];
            }
            const double y = static_cast<double>(y_pm[i]);
            const double shrink = 1.0 - 1.0 / static_cast<double>(t);
            for (auto& v : w) {
                v *= shrink;
            }
            if (y * score < 1.0) {
                for (std::size_t j = 0; j < d; ++j) {
                    w[j] += eta * y * row[j];
                }
                w[d] += eta * y;
            }
            double norm_sq = 0.0;
            for (const double v : w) {
                norm_sq += v * v;
            }
            if (norm_sq > radius * radius) {
                const double scale = radius / std::sqrt(norm_sq);
                for (auto& v : w) {
                    v *= scale;
                }
            }
        }
    }
    BinarySvm out;
    out.bias = w[d];
    w.pop_back();
    out.weights = std::move(w);
    return out;
}

SvmModel fit_svm(const SvmConfig& config, const Matrix& x, std::span<const int> y,
                 std::uint64_t seed, std::size_t threads) {
    std::array<bool, kNumClasses> present{};
    for (const int label : y) {
        present[static_cast<std::size_t>(label)] = true;
    }
    if (std::count(present.begin(), present.end(), true) < 2) {
        throw DataError("svm needs at least two classes in the training data");
    }
    SvmModel model{Matrix(kNumClasses, x.cols()), std::vector<double>(kNumClasses, 0.0)};
    parallel_for(kNumClasses, threads, [&](std::size_t k) {
        if (!present[k]) {
            model.biases[k] = kAbsentClassBias;
            return;
        }
        std::vector<int> y_pm(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            y_pm[i] = y[i] == static_cast<int>(k) ? 1 : -1;
        }
        const auto fitted = svm_binary_train(x, y_pm, config.c, config.epochs, derive_seed(seed, k));
        std::copy(fitted.weights.begin(), fitted.weights.end(), model.weights.row(k).begin());
        model.biases[k] = fitted.bias;
    });
    return model;
}

Matrix svm_scores(const SvmModel& model, const Matrix& x) {
    Matrix out(x.rows(), kNumClasses);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto row = x.row(i);
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            const auto w = model.weights.row(k);
            double acc = model.biases[k];
            for (std::size_t j = 0; j < row.size(); ++j) {
                acc += w[j] * row[j];
            }
            out(i, k) = acc;
        }
    }
    return out;
}

}  // namespace fwlog
