#include "fwlog/error.hpp"
#include "fwlog/learners.hpp"
#include "fwlog/preprocess.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace fwlog;

namespace {

Matrix line_points(std::initializer_list<double> xs) {
    Matrix m;
    for (const double v : xs) {
        const double row[] = {v};
        m.push_row(row);
    }
    return m;
}

}  // namespace

TEST(Knn, MajorityOfThree) {
    // Query at 0: the three nearest are 0.1 (0), 0.2 (0), 0.3 (1).
    const auto x = line_points({0.1, 0.2, 0.3, 5, 6});
    const std::vector<int> y{0, 0, 1, 1, 1};
    KnnConfig config;
    config.k = 3;
    const auto model = fit(config, x, y, 0);
    const auto pred = predict(model, line_points({0.0}));
    EXPECT_EQ(pred, std::vector<int>{0});
    const auto s = predict_scores(model, line_points({0.0}));
    EXPECT_NEAR(s(0, 0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(s(0, 1), 1.0 / 3.0, 1e-15);
}

TEST(Knn, TiedVoteGoesToLowestClass) {
    const auto x = line_points({-1, -2, 1, 2, 50});
    const std::vector<int> y{1, 1, 0, 0, 3};
    KnnConfig config;
    config.k = 4;
    const auto model = fit(config, x, y, 0);
    EXPECT_EQ(predict(model, line_points({0.0})), std::vector<int>{0});
}

TEST(Knn, EqualDistanceKeepsLowerTrainingIndex) {
    const auto x = line_points({1, -1});
    const std::vector<int> y{2, 1};
    KnnConfig config;
    config.k = 1;
    const auto model = fit(config, x, y, 0);
    EXPECT_EQ(predict(model, line_points({0.0})), std::vector<int>{2});
}

TEST(Knn, KOneOnTrainingSetIsPerfect) {
    const auto ds = fwlog::testing::synthetic_dataset(800, 13);
    const auto x = transform(fit_scaler(ds.features), ds.features);
    KnnConfig config;
    config.k = 1;
    const auto model = fit(config, x, ds.labels, 0);
    EXPECT_EQ(predict(model, x), ds.labels);
    const auto& stored = std::get<KnnModel>(model);
    EXPECT_EQ(stored.train, x);
    EXPECT_EQ(stored.labels, ds.labels);
}

TEST(Knn, KLargerThanTrainingSetThrows) {
    const auto x = line_points({1, 2});
    const std::vector<int> y{0, 1};
    KnnConfig config;
    config.k = 3;
    EXPECT_THROW(fit(config, x, y, 0), DataError);
}

TEST(Svm, OneDimensionalSeparable) {
    const auto x = line_points({-2, -1, 1, 2});
    const int y[] = {-1, -1, 1, 1};
    const auto m = svm_binary_train(x, y, 1.0, 50, 3);
    for (std::size_t i = 0; i < 4; ++i) {
        const double f = m.weights[0] * x(i, 0) + m.bias;
        EXPECT_GT(f * y[i], 0.0) << i;
    }
}

TEST(Svm, SeparableToySetHasNoHingeViolationsWithLargeC) {
    Rng rng(8);
    Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
        const double sign = i % 2 ? 1.0 : -1.0;
        const double row[] = {sign * (1.0 + uniform_unit(rng)), uniform_unit(rng) - 0.5};
        x.push_row(row);
        y.push_back(static_cast<int>(sign));
    }
    const auto m = svm_binary_train(x, y, 100.0, 200, 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double f = m.weights[0] * x(i, 0) + m.weights[1] * x(i, 1) + m.bias;
        EXPECT_GE(y[i] * f, 1.0 - 1e-6) << i;
    }
}

TEST(Svm, LabelFlipNegatesDecision) {
    Rng rng(9);
    const auto x = fwlog::testing::random_matrix(60, 3, rng);
    std::vector<int> y(60), flipped(60);
    for (std::size_t i = 0; i < 60; ++i) {
        y[i] = x(i, 0) + 0.3 * x(i, 1) > 0 ? 1 : -1;
        flipped[i] = -y[i];
    }
    const auto a = svm_binary_train(x, y, 1.0, 20, 4);
    const auto b = svm_binary_train(x, flipped, 1.0, 20, 4);
    const auto probe = fwlog::testing::random_matrix(50, 3, rng);
    for (std::size_t i = 0; i < probe.rows(); ++i) {
        double fa = a.bias, fb = b.bias;
        for (std::size_t j = 0; j < 3; ++j) {
            fa += a.weights[j] * probe(i, j);
            fb += b.weights[j] * probe(i, j);
        }
        EXPECT_EQ(fa, -fb);
    }
}

TEST(Svm, TinyCShrinksWeights) {
    Rng rng(10);
    const auto x = fwlog::testing::random_matrix(100, 4, rng);
    std::vector<int> y(100);
    for (std::size_t i = 0; i < 100; ++i) y[i] = x(i, 2) > 0 ? 1 : -1;
    const auto norm = [](const BinarySvm& m) {
        double s = 0.0;
        for (const double w : m.weights) s += w * w;
        return std::sqrt(s);
    };
    const auto loose = svm_binary_train(x, y, 1.0, 20, 2);
    const auto tight = svm_binary_train(x, y, 1e-8, 20, 2);
    EXPECT_LT(norm(tight), 1e-5);
    EXPECT_LT(norm(tight), norm(loose));
}

TEST(Svm, SingleClassThrows) {
    const auto x = line_points({1, 2, 3});
    const int y[] = {1, 1, 1};
    EXPECT_THROW(svm_binary_train(x, y, 1.0, 5, 0), DataError);
    const std::vector<int> labels{2, 2, 2};
    EXPECT_THROW(fit(SvmConfig{}, x, labels, 0), DataError);
}

TEST(Svm, AbsentClassNeverWins) {
    Rng rng(11);
    const auto x = fwlog::testing::random_matrix(80, 2, rng);
    std::vector<int> y(80);
    for (std::size_t i = 0; i < 80; ++i) y[i] = x(i, 0) > 0 ? 0 : 2;
    const auto model = std::get<SvmModel>(fit(SvmConfig{}, x, y, 1));
    for (const double w : model.weights.row(3)) EXPECT_EQ(w, 0.0);
    EXPECT_EQ(model.biases[3], -1.0);
    for (const int p : predict(model, x)) EXPECT_NE(p, 3);
}

TEST(Svm, ScoresAreRawMargins) {
    SvmModel model{Matrix(kNumClasses, 2), {0.5, -0.25, 1.0, 0.0}};
    model.weights(0, 0) = 2.0;
    model.weights(2, 1) = -1.0;
    Matrix x(1, 2);
    x(0, 0) = 1.0;
    x(0, 1) = 3.0;
    const auto s = predict_scores(model, x);
    EXPECT_EQ(s(0, 0), 2.5);
    EXPECT_EQ(s(0, 1), -0.25);
    EXPECT_EQ(s(0, 2), -2.0);
    EXPECT_EQ(s(0, 3), 0.0);
}
