#include "fwlog/error.hpp"
#include "fwlog/learners.hpp"
#include "fwlog/random.hpp"
#include "learners_internal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fwlog {

namespace {

// log of the softmax at every class, via log-sum-exp.
std::array<double, kNumClasses> log_softmax(std::span<const double> z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (const double v : z) {
        sum += std::exp(v - zmax);
    }
    const double lse = zmax + std::log(sum);
    std::array<double, kNumClasses> out{};
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        out[k] = z[k] - lse;
    }
    return out;
}

std::array<double, kNumClasses> logits(const Matrix& weights, std::span<const double> biases,
                                       std::span<const double> row) {
    std::array<double, kNumClasses> z{};
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        const auto w = weights.row(k);
        double acc = biases[k];
        for (std::size_t j = 0; j < row.size(); ++j) {
            acc += w[j] * row[j];
        }
        z[k] = acc;
    }
    return z;
}

Matrix one_hot_matrix(std::span<const int> y) {
    Matrix out(y.size(), kNumClasses);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto v = one_hot(y[i]);
        std::copy(v.begin(), v.end(), out.row(i).begin());
    }
    return out;
}

std::size_t distinct_classes(std::span<const int> y) {
    std::array<bool, kNumClasses> seen{};
    for (const int label : y) {
        seen[static_cast<std::size_t>(label)] = true;
    }
    return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

}  // namespace

std::array<double, kNumClasses> softmax(std::span<const double> logits) {
    const double zmax = *std::max_element(logits.begin(), logits.end());
    std::array<double, kNumClasses> p{};
    double sum = 0.0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        p[k] = std::exp(logits[k] - zmax);
        sum += p[k];
    }
    for (auto& v : p) {
        v /= sum;
    }
    return p;
}

LossAndGradient lr_loss_and_gradient(const Matrix& weights, std::span<const double> biases,
                                     const Matrix& x, const Matrix& one_hot_y, double l2_lambda) {
    const auto m = x.rows();
    const auto d = x.cols();
    LossAndGradient out;
    out.weight_gradient = Matrix(kNumClasses, d);
    out.bias_gradient.assign(kNumClasses, 0.0);

    double data_loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = x.row(i);
        const auto z = logits(weights, biases, row);
        const auto logp = log_softmax(z);
        const auto target = one_hot_y.row(i);
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            if (target[k] != 0.0) {
                data_loss -= target[k] * logp[k];
            }
            const double residual = std::exp(logp[k]) - target[k];
            out.bias_gradient[k] += residual;
            auto g = out.weight_gradient.row(k);
            for (std::size_t j = 0; j < d; ++j) {
                g[j] += residual * row[j];
            }
        }
    }

    const double inv_m = m > 0 ? 1.0 / static_cast<double>(m) : 0.0;
    double penalty = 0.0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        out.bias_gradient[k] *= inv_m;
        auto g = out.weight_gradient.row(k);
        const auto w = weights.row(k);
        for (std::size_t j = 0; j < d; ++j) {
            g[j] = g[j] * inv_m + l2_lambda * w[j];
            penalty += w[j] * w[j];
        }
    }
    out.loss = data_loss * inv_m + 0.5 * l2_lambda * penalty;
    return out;
}

LrModel fit_logistic(const LrConfig& config, const Matrix& x, std::span<const int> y,
                     std::uint64_t seed, std::vector<double>* loss_history) {
    if (distinct_classes(y) < 2) {
        throw DataError("logistic regression needs at least two classes in the training data");
    }
    const auto m = x.rows();
    LrModel model{Matrix(kNumClasses, x.cols()), std::vector<double>(kNumClasses, 0.0)};
    const Matrix targets = one_hot_matrix(y);

    const auto step = [&](const LossAndGradient& lg) {
        auto w = model.weights.values();
        const auto g = lg.weight_gradient.values();
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] -= config.learning_rate * g[i];
        }
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            model.biases[k] -= config.learning_rate * lg.bias_gradient[k];
        }
    };
    const auto full_loss = [&] {
        return lr_loss_and_gradient(model.weights, model.biases, x, targets, config.l2_lambda);
    };

    const bool full_batch = config.batch_size == 0 || config.batch_size >= m;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (full_batch) {
            const auto lg = full_loss();
            if (loss_history != nullptr) {
                loss_history->push_back(lg.loss);
            }
            step(lg);
            continue;
        }
        if (loss_history != nullptr) {
            loss_history->push_back(full_loss().loss);
        }
        const auto order = permutation(m, derive_seed(seed, epoch));
        for (std::size_t start = 0; start < m; start += config.batch_size) {
            const auto stop = std::min(m, start + config.batch_size);
            const std::span<const std::size_t> batch(order.data() + start, stop - start);
            step(lr_loss_and_gradient(model.weights, model.biases, x.select_rows(batch),
                                      targets.select_rows(batch), config.l2_lambda));
        }
    }
    if (loss_history != nullptr) {
        loss_history->push_back(full_loss().loss);
    }

    const auto is_finite = [](double v) { return std::isfinite(v); };
    const auto weights = model.weights.values();
    if (!std::all_of(weights.begin(), weights.end(), is_finite) ||
        !std::all_of(model.biases.begin(), model.biases.end(), is_finite)) {
        throw NumericError("logistic regression diverged (non-finite parameter); lower the "
                           "learning rate");
    }
    return model;
}

Matrix logistic_scores(const LrModel& model, const Matrix& x) {
    Matrix out(x.rows(), kNumClasses);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto p = softmax(logits(model.weights, model.biases, x.row(i)));
        std::copy(p.begin(), p.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace fwlog
