#pragma once

#include "fwlog/learners.hpp"

namespace fwlog {

RfModel fit_forest(const RfConfig& config, const Matrix& x, std::span<const int> y,
                   std::uint64_t seed, std::size_t threads);
Matrix forest_scores(const RfModel& model, const Matrix& x, std::size_t threads);

Matrix logistic_scores(const LrModel& model, const Matrix& x);

KnnModel fit_knn(const KnnConfig& config, const Matrix& x, std::span<const int> y);
Matrix knn_scores(const KnnModel& model, const Matrix& x, std::size_t threads);

SvmModel fit_svm(const SvmConfig& config, const Matrix& x, std::span<const int> y,
                 std::uint64_t seed, std::size_t threads);
Matrix svm_scores(const SvmModel& model, const Matrix& x);

}  // namespace fwlog
