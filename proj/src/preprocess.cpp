#include "fwlog/preprocess.hpp"

#include "fwlog/error.hpp"
#include "fwlog/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fwlog {

namespace {

constexpr std::uint64_t kStratumStream = 0x5354524154ULL;
constexpr std::uint64_t kReshuffleTrain = 0x5452ULL;
constexpr std::uint64_t kReshuffleTest = 0x5445ULL;

void check_columns(const ScalerParams& params, const Matrix& x) {
    if (params.means.size() != x.cols() || params.scales.size() != x.cols()) {
        throw DataError("scaler expects " + std::to_string(params.means.size()) +
                        " columns, got " + std::to_string(x.cols()));
    }
}

}  // namespace

ScalerParams fit_scaler(const Matrix& train) {
    if (train.rows() == 0) {
        throw DataError("fit_scaler: empty training matrix");
    }
    const auto n = static_cast<double>(train.rows());
    const auto d = train.cols();
    ScalerParams params{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < train.rows(); ++i) {
            sum += train(i, j);
        }
        const double mean = sum / n;
        // Two-pass variance keeps large byte counts from cancelling.
        double ss = 0.0;
        for (std::size_t i = 0; i < train.rows(); ++i) {
            const double dev = train(i, j) - mean;
            ss += dev * dev;
        }
        const double sd = std::sqrt(ss / n);
        params.means[j] = mean;
        params.scales[j] = sd > 0.0 ? sd : 1.0;
    }
    return params;
}

Matrix transform(const ScalerParams& params, const Matrix& x) {
    check_columns(params, x);
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            out(i, j) = (x(i, j) - params.means[j]) / params.scales[j];
        }
    }
    return out;
}

Matrix inverse_transform(const ScalerParams& params, const Matrix& z) {
    check_columns(params, z);
    Matrix out(z.rows(), z.cols());
    for (std::size_t i = 0; i < z.rows(); ++i) {
        for (std::size_t j = 0; j < z.cols(); ++j) {
            out(i, j) = z(i, j) * params.scales[j] + params.means[j];
        }
    }
    return out;
}

std::size_t train_size_for(std::size_t n, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw UsageError("train fraction must lie in (0, 1)");
    }
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n) {
        throw DataError("degenerate split: " + std::to_string(n) + " rows at fraction " +
                        std::to_string(train_fraction) + " leaves one side empty");
    }
    return n_train;
}

Split shuffle_split(const Dataset& ds, const SplitSpec& spec) {
    const auto n = ds.size();
    if (n < 2) {
        throw DataError("degenerate split: need at least 2 rows, have " + std::to_string(n));
    }
    Split split;
    if (!spec.stratified) {
        const auto n_train = train_size_for(n, spec.train_fraction);
        const auto perm = permutation(n, spec.seed);
        split.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
        split.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    } else {
        if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
            throw UsageError("train fraction must lie in (0, 1)");
        }
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < n; ++i) {
                if (ds.labels[i] == static_cast<int>(k)) {
                    members.push_back(i);
                }
            }
            Rng rng(derive_seed(spec.seed, kStratumStream + k));
            fisher_yates(std::span<std::size_t>(members), rng);
            const auto cut = static_cast<std::size_t>(
                std::floor(spec.train_fraction * static_cast<double>(members.size())));
            split.train_indices.insert(split.train_indices.end(), members.begin(),
                                       members.begin() + static_cast<std::ptrdiff_t>(cut));
            split.test_indices.insert(split.test_indices.end(),
                                      members.begin() + static_cast<std::ptrdiff_t>(cut),
                                      members.end());
        }
        if (split.train_indices.empty() || split.test_indices.empty()) {
            throw DataError("degenerate stratified split: one side is empty");
        }
        Rng train_rng(derive_seed(spec.seed, kReshuffleTrain));
        fisher_yates(std::span<std::size_t>(split.train_indices), train_rng);
        Rng test_rng(derive_seed(spec.seed, kReshuffleTest));
        fisher_yates(std::span<std::size_t>(split.test_indices), test_rng);
    }
    split.train = ds.subset(split.train_indices);
    split.test = ds.subset(split.test_indices);
    return split;
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    std::uint64_t seed) {
    if (k < 2 || k > n) {
        throw UsageError("cv folds must satisfy 2 <= k <= n (k=" + std::to_string(k) +
                         ", n=" + std::to_string(n) + ")");
    }
    const auto perm = permutation(n, seed);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        const auto lo = f * n / k;
        const auto hi = (f + 1) * n / k;
        folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(lo),
                        perm.begin() + static_cast<std::ptrdiff_t>(hi));
    }
    return folds;
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t count, std::uint64_t seed) {
    if (count >= n) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    auto perm = permutation(n, seed);
    perm.resize(count);
    std::sort(perm.begin(), perm.end());
    return perm;
}

}  // namespace fwlog
