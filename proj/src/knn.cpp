#include "fwlog/error.hpp"
#include "fwlog/learners.hpp"
#include "learners_internal.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <utility>

namespace fwlog {

namespace {

constexpr std::size_t kQueryBlock = 64;

}  // namespace

KnnModel fit_knn(const KnnConfig& config, const Matrix& x, std::span<const int> y) {
    if (config.k > x.rows()) {
        throw DataError("knn: k=" + std::to_string(config.k) + " exceeds the " +
                        std::to_string(x.rows()) + " training rows");
    }
    return KnnModel{x, std::vector<int>(y.begin(), y.end()), config.k};
}

// Neighbours are ranked by (squared distance, training index); the vote share
// of each class among the k nearest is the score.
Matrix knn_scores(const KnnModel& model, const Matrix& x, std::size_t threads) {
    Matrix out(x.rows(), kNumClasses);
    const auto k = model.k;
    const auto n = model.train.rows();
    const auto d = model.train.cols();
    const auto blocks = (x.rows() + kQueryBlock - 1) / kQueryBlock;

    parallel_for(blocks, threads, [&](std::size_t b) {
        std::vector<std::pair<double, std::size_t>> best;
        best.reserve(k + 1);
        const auto lo = b * kQueryBlock;
        const auto hi = std::min(x.rows(), lo + kQueryBlock);
        for (std::size_t q = lo; q < hi; ++q) {
            const auto query = x.row(q);
            best.clear();
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const double* r = model.train.row(i).data();
                double dist = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double diff = r[j] - query[j];
                    dist += diff * diff;
                }
                if (best.size() == k && !(dist < worst)) {
                    continue;  // equal distance keeps the lower index already held
                }
                const std::pair<double, std::size_t> entry{dist, i};
                best.insert(std::upper_bound(best.begin(), best.end(), entry), entry);
                if (best.size() > k) {
                    best.pop_back();
                }
                if (best.size() == k) {
                    worst = best.back().first;
                }
            }
            auto scores = out.row(q);
            for (const auto& [dist, idx] : best) {
                scores[static_cast<std::size_t>(model.labels[idx])] += 1.0;
            }
            for (auto& s : scores) {
                s /= static_cast<double>(k);
            }
        }
    });
    return out;
}

}  // namespace fwlog
