#include "fwlog/error.hpp"
#include "fwlog/labels.hpp"
#include "fwlog/learners.hpp"
#include "fwlog/preprocess.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace fwlog;

namespace {

Matrix one_hot_matrix(std::span<const int> y) {
    Matrix m(y.size(), kNumClasses);
    for (std::size_t i = 0; i < y.size(); ++i) m(i, static_cast<std::size_t>(y[i])) = 1.0;
    return m;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace

TEST(Softmax, Examples) {
    const double zeros[] = {0, 0, 0, 0};
    for (const double p : softmax(zeros)) EXPECT_EQ(p, 0.25);

    const double logs[] = {std::log(1.0), std::log(2.0), std::log(3.0), std::log(4.0)};
    const auto p = softmax(logs);
    EXPECT_NEAR(p[0], 0.1, 1e-15);
    EXPECT_NEAR(p[1], 0.2, 1e-15);
    EXPECT_NEAR(p[2], 0.3, 1e-15);
    EXPECT_NEAR(p[3], 0.4, 1e-15);
}

TEST(Softmax, ShiftInvarianceIsExact) {
    const double a[] = {1, 2, 3, 4};
    const double b[] = {101, 102, 103, 104};
    EXPECT_EQ(softmax(a), softmax(b));
}

TEST(Softmax, LargeLogitsStayFinite) {
    const double big[] = {1000, 999, -1000, 0};
    const auto p = softmax(big);
    double sum = 0.0;
    for (const double v : p) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GE(v, 0.0);
        sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(LrLoss, UniformPredictionIsLn4) {
    Rng rng(1);
    const auto x = fwlog::testing::random_matrix(40, 3, rng);
    std::vector<int> y(40);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 4);
    const Matrix w(kNumClasses, 3);
    const std::vector<double> b(kNumClasses, 0.0);
    const auto lg = lr_loss_and_gradient(w, b, x, one_hot_matrix(y), 0.0);
    EXPECT_NEAR(lg.loss, std::log(4.0), 1e-12);
}

TEST(LrLoss, ConfidentCorrectLeavesOnlyPenalty) {
    // One row, logits dominated by the true class through the bias.
    Matrix x(1, 2);
    x(0, 0) = 0.5;
    x(0, 1) = -0.5;
    Matrix w(kNumClasses, 2);
    w(0, 0) = 0.2;
    w(1, 1) = -0.3;
    const std::vector<double> b{800, 0, 0, 0};
    const int y[] = {0};
    const double lambda = 0.01;
    const auto lg = lr_loss_and_gradient(w, b, x, one_hot_matrix(y), lambda);
    const double penalty = 0.5 * lambda * (0.2 * 0.2 + 0.3 * 0.3);
    EXPECT_NEAR(lg.loss, penalty, 1e-12);
}

TEST(LrLoss, GradientMatchesCentralDifferences) {
    Rng rng(7);
    for (int point = 0; point < 20; ++point) {
        const auto x = fwlog::testing::random_matrix(25, 5, rng);
        std::vector<int> y(25);
        for (auto& v : y) v = static_cast<int>(uniform_below(rng, 4));
        const auto oh = one_hot_matrix(y);
        auto w = fwlog::testing::random_matrix(kNumClasses, 5, rng);
        std::vector<double> b(kNumClasses);
        for (auto& v : b) v = uniform_unit(rng) - 0.5;
        const double lambda = 0.05;
        const auto lg = lr_loss_and_gradient(w, b, x, oh, lambda);
        constexpr double h = 1e-5;
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            for (std::size_t j = 0; j < 5; ++j) {
                auto wp = w, wm = w;
                wp(k, j) += h;
                wm(k, j) -= h;
                const double fd = (lr_loss_and_gradient(wp, b, x, oh, lambda).loss -
                                   lr_loss_and_gradient(wm, b, x, oh, lambda).loss) /
                                  (2 * h);
                EXPECT_LT(relative_error(fd, lg.weight_gradient(k, j)), 1e-4);
            }
            auto bp = b, bm = b;
            bp[k] += h;
            bm[k] -= h;
            const double fd = (lr_loss_and_gradient(w, bp, x, oh, lambda).loss -
                               lr_loss_and_gradient(w, bm, x, oh, lambda).loss) /
                              (2 * h);
            EXPECT_LT(relative_error(fd, lg.bias_gradient[k]), 1e-4);
        }
    }
}

TEST(LrFit, SeparableToySetReachesFullAccuracy) {
    // 20 points, class by the sign of the first coordinate.
    Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) {
        const double a = (i < 10 ? -1.0 : 1.0) * (0.2 + 0.1 * (i % 10));
        const double row[] = {a, 0.05 * ((i * 7) % 5) - 0.1};
        x.push_row(row);
        y.push_back(a > 0 ? 1 : 0);
    }
    const auto model = fit(LrConfig{}, x, y, 1);
    EXPECT_EQ(predict(model, x), y);
}

TEST(LrFit, ZeroWeightsGiveUniformScores) {
    LrModel model{Matrix(kNumClasses, 3), std::vector<double>(kNumClasses, 0.0)};
    Rng rng(3);
    const auto x = fwlog::testing::random_matrix(5, 3, rng);
    const auto s = predict_scores(model, x);
    for (const double v : s.values()) EXPECT_EQ(v, 0.25);
}

TEST(LrFit, LossNonIncreasingOnStandardizedLogs) {
    const auto ds = fwlog::testing::synthetic_dataset(3000, 21);
    const auto x = transform(fit_scaler(ds.features), ds.features);
    std::vector<double> history;
    LrConfig config;
    config.epochs = 150;
    fit_logistic(config, x, ds.labels, 0, &history);
    ASSERT_EQ(history.size(), config.epochs + 1);
    for (std::size_t e = 1; e < history.size(); ++e) {
        EXPECT_LE(history[e], history[e - 1] + 1e-9) << "epoch " << e;
    }
    EXPECT_LT(history.back(), history.front());
}

TEST(LrFit, MinibatchModeLearns) {
    const auto ds = fwlog::testing::synthetic_dataset(1500, 22);
    const auto x = transform(fit_scaler(ds.features), ds.features);
    LrConfig config;
    config.batch_size = 64;
    config.epochs = 20;
    const auto a = fit(config, x, ds.labels, 5);
    EXPECT_EQ(a, fit(config, x, ds.labels, 5));
    const auto pred = predict(a, x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == ds.labels[i];
    EXPECT_GT(static_cast<double>(correct) / static_cast<double>(pred.size()), 0.7);
}

TEST(LrFit, SingleClassThrows) {
    Rng rng(4);
    const auto x = fwlog::testing::random_matrix(10, 2, rng);
    const std::vector<int> y(10, 2);
    EXPECT_THROW(fit(LrConfig{}, x, y, 1), DataError);
}

TEST(LrFit, DivergenceIsReported) {
    Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 8; ++i) {
        const double row[] = {1e200 * (i % 2 ? 1 : -1)};
        x.push_row(row);
        y.push_back(i % 2);
    }
    LrConfig config;
    config.learning_rate = 1e200;
    EXPECT_THROW(fit(config, x, y, 1), NumericError);
}
