#pragma once

#include "fwlog/dataset.hpp"
#include "fwlog/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fwlog {

/// Per-feature standardization parameters, fitted on training rows only.
struct ScalerParams {
    std::vector<double> means;
    std::vector<double> scales;  ///< population std dev, or 1 for constant columns

    bool operator==(const ScalerParams&) const = default;
};

ScalerParams fit_scaler(const Matrix& train);

/// (x - mean) / scale, column-wise.
Matrix transform(const ScalerParams& params, const Matrix& x);
Matrix inverse_transform(const ScalerParams& params, const Matrix& z);

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    bool stratified = false;
};

struct Split {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_indices;  ///< rows of the source dataset
    std::vector<std::size_t> test_indices;
};

/// floor(train_fraction * n); throws DataError when either side would be empty.
std::size_t train_size_for(std::size_t n, double train_fraction);

/// Seeded shuffle followed by a head/tail cut; stratified mode cuts each class
/// separately and re-shuffles the concatenated parts.
Split shuffle_split(const Dataset& ds, const SplitSpec& spec);

/// k shuffled folds; fold f holds permuted positions [f*n/k, (f+1)*n/k).
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    std::uint64_t seed);

/// `count` rows drawn without replacement, returned in ascending order.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t count, std::uint64_t seed);

}  // namespace fwlog
