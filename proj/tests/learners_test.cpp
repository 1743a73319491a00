#include "fwlog/error.hpp"
#include "fwlog/learners.hpp"
#include "fwlog/preprocess.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fwlog;

namespace {

struct Fixture {
    Matrix train_x;
    std::vector<int> train_y;
    Matrix probe;
};

const Fixture& fixture() {
    static const Fixture f = [] {
        const auto ds = fwlog::testing::synthetic_dataset(700, 41);
        const auto scaler = fit_scaler(ds.features);
        Rng rng(42);
        return Fixture{transform(scaler, ds.features), ds.labels,
                       fwlog::testing::random_matrix(150, kNumFeatures, rng)};
    }();
    return f;
}

LearnerConfig small_config(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::rf: {
            RfConfig c;
            c.n_trees = 12;
            return c;
        }
        case LearnerKind::lr: {
            LrConfig c;
            c.epochs = 60;
            return c;
        }
        case LearnerKind::svm: {
            SvmConfig c;
            c.epochs = 5;
            return c;
        }
        default:
            return KnnConfig{};
    }
}

class EveryLearner : public ::testing::TestWithParam<LearnerKind> {};

}  // namespace

TEST_P(EveryLearner, DeterministicAcrossRunsAndThreads) {
    const auto& f = fixture();
    const auto config = small_config(GetParam());
    const auto a = fit(config, f.train_x, f.train_y, 17, {1});
    const auto b = fit(config, f.train_x, f.train_y, 17, {1});
    const auto c = fit(config, f.train_x, f.train_y, 17, {4});
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    EXPECT_EQ(predict_scores(a, f.probe, {1}), predict_scores(a, f.probe, {4}));
}

TEST_P(EveryLearner, PredictIsArgmaxOfScores) {
    const auto& f = fixture();
    const auto model = fit(small_config(GetParam()), f.train_x, f.train_y, 3);
    const auto scores = predict_scores(model, f.probe);
    const auto pred = predict(model, f.probe);
    ASSERT_EQ(pred.size(), f.probe.rows());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        int best = 0;
        for (int k = 1; k < 4; ++k) {
            if (scores(i, static_cast<std::size_t>(k)) > scores(i, static_cast<std::size_t>(best))) best = k;
        }
        EXPECT_EQ(pred[i], best);
    }
}

TEST_P(EveryLearner, ProbabilisticRowsSumToOne) {
    if (GetParam() == LearnerKind::svm) GTEST_SKIP() << "SVM scores are raw margins";
    const auto& f = fixture();
    const auto model = fit(small_config(GetParam()), f.train_x, f.train_y, 3);
    const auto scores = predict_scores(model, f.probe);
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        double sum = 0.0;
        for (const double v : scores.row(i)) {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST_P(EveryLearner, EmptyInputAndColumnMismatch) {
    const auto& f = fixture();
    const auto model = fit(small_config(GetParam()), f.train_x, f.train_y, 3);
    EXPECT_TRUE(predict(model, Matrix(0, kNumFeatures)).empty());
    EXPECT_THROW(predict(model, Matrix(2, 3)), DataError);
    EXPECT_EQ(n_features_of(model), kNumFeatures);
    EXPECT_EQ(kind_of(model), GetParam());
}

TEST_P(EveryLearner, SeedChangesRandomizedLearners) {
    if (GetParam() == LearnerKind::knn || GetParam() == LearnerKind::lr) {
        GTEST_SKIP() << "no randomness in this learner";
    }
    const auto& f = fixture();
    const auto config = small_config(GetParam());
    EXPECT_NE(fit(config, f.train_x, f.train_y, 1), fit(config, f.train_x, f.train_y, 2));
}

INSTANTIATE_TEST_SUITE_P(Learners, EveryLearner,
                         ::testing::Values(LearnerKind::rf, LearnerKind::lr, LearnerKind::knn,
                                           LearnerKind::svm),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(LearnerConfig, Defaults) {
    const auto rf = std::get<RfConfig>(default_config(LearnerKind::rf));
    EXPECT_EQ(rf.n_trees, 100u);
    EXPECT_FALSE(rf.max_depth);
    EXPECT_EQ(rf.min_samples_split, 2u);
    EXPECT_EQ(rf.mtry, 3u);
    EXPECT_EQ(rf.bootstrap_size_fraction, 1.0);
    const auto lr = std::get<LrConfig>(default_config(LearnerKind::lr));
    EXPECT_EQ(lr.learning_rate, 0.1);
    EXPECT_EQ(lr.epochs, 300u);
    EXPECT_EQ(lr.l2_lambda, 1e-4);
    EXPECT_EQ(std::get<KnnConfig>(default_config(LearnerKind::knn)).k, 5u);
    const auto svm = std::get<SvmConfig>(default_config(LearnerKind::svm));
    EXPECT_EQ(svm.c, 1.0);
    EXPECT_EQ(svm.epochs, 50u);
}

TEST(LearnerConfig, ValidationRejectsOutOfRange) {
    RfConfig rf;
    rf.mtry = 12;
    EXPECT_THROW(validate_config(rf, kNumFeatures), UsageError);
    rf.mtry = 0;
    EXPECT_THROW(validate_config(rf, kNumFeatures), UsageError);
    rf = {};
    rf.n_trees = 0;
    EXPECT_THROW(validate_config(rf, kNumFeatures), UsageError);
    LrConfig lr;
    lr.learning_rate = 0;
    EXPECT_THROW(validate_config(lr, kNumFeatures), UsageError);
    lr = {};
    lr.epochs = 0;
    EXPECT_THROW(validate_config(lr, kNumFeatures), UsageError);
    EXPECT_THROW(validate_config(KnnConfig{0}, kNumFeatures), UsageError);
    EXPECT_THROW(validate_config(SvmConfig{0.0, 5}, kNumFeatures), UsageError);
    EXPECT_THROW(validate_config(SvmConfig{1.0, 0}, kNumFeatures), UsageError);
    EXPECT_NO_THROW(validate_config(RfConfig{}, kNumFeatures));
}

TEST(LearnerConfig, KindNames) {
    for (const auto kind : {LearnerKind::rf, LearnerKind::lr, LearnerKind::knn, LearnerKind::svm}) {
        EXPECT_EQ(learner_kind_from_string(to_string(kind)), kind);
        EXPECT_EQ(kind_of(default_config(kind)), kind);
    }
    try {
        learner_kind_from_string("xgb");
        FAIL();
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("rf, lr, knn, svm"), std::string::npos);
    }
}

TEST(Fit, RejectsBadTrainingData) {
    Matrix x(3, 2);
    const std::vector<int> short_y{0, 1};
    EXPECT_THROW(fit(KnnConfig{1}, x, short_y, 0), DataError);
    const std::vector<int> bad_y{0, 1, 5};
    EXPECT_THROW(fit(KnnConfig{1}, x, bad_y, 0), DataError);
    EXPECT_THROW(fit(KnnConfig{1}, Matrix(0, 2), std::vector<int>{}, 0), DataError);
}

TEST(Argmax, TiesToLowestIndex) {
    const double s[] = {0.25, 0.5, 0.5, 0.1};
    EXPECT_EQ(argmax(s), 1);
    const double flat[] = {1, 1, 1, 1};
    EXPECT_EQ(argmax(flat), 0);
}
