#include "fwlog/error.hpp"
#include "fwlog/preprocess.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace fwlog;

namespace {

Matrix column(std::initializer_list<double> values) {
    Matrix m;
    for (const double v : values) {
        const double row[] = {v};
        m.push_row(row);
    }
    return m;
}

Dataset labelled(std::size_t n, std::span<const int> labels) {
    Dataset ds = make_empty_dataset();
    std::array<double, kNumFeatures> row{};
    for (std::size_t i = 0; i < n; ++i) {
        row[0] = static_cast<double>(i);
        ds.features.push_row(row);
        ds.labels.push_back(labels[i % labels.size()]);
    }
    return ds;
}

}  // namespace

TEST(Scaler, PopulationStdDev) {
    const auto p = fit_scaler(column({2, 4, 6}));
    EXPECT_DOUBLE_EQ(p.means[0], 4.0);
    // Hand evaluation: ((2-4)^2 + 0 + (6-4)^2) / 3 = 8/3.
    EXPECT_NEAR(p.scales[0], 1.632993161855452, 1e-12);
}

TEST(Scaler, ConstantColumnGetsUnitScale) {
    const auto p = fit_scaler(column({5, 5, 5}));
    EXPECT_EQ(p.means[0], 5.0);
    EXPECT_EQ(p.scales[0], 1.0);
    const auto z = transform(p, column({5, 5, 5}));
    for (const double v : z.values()) EXPECT_EQ(v, 0.0);
}

TEST(Scaler, SingleRow) {
    Matrix m;
    const double row[] = {3, -1, 7};
    m.push_row(row);
    const auto p = fit_scaler(m);
    EXPECT_EQ(p.means, (std::vector<double>{3, -1, 7}));
    EXPECT_EQ(p.scales, (std::vector<double>{1, 1, 1}));
}

TEST(Scaler, EmptyInputThrows) { EXPECT_THROW(fit_scaler(Matrix{}), DataError); }

TEST(Scaler, TransformExamples) {
    const auto x = column({2, 4, 6});
    const auto z = transform(fit_scaler(x), x);
    EXPECT_NEAR(z(0, 0), -1.2247, 1e-4);
    EXPECT_NEAR(z(1, 0), 0.0, 1e-12);
    EXPECT_NEAR(z(2, 0), 1.2247, 1e-4);
    const auto means_row = transform(fit_scaler(x), column({4}));
    EXPECT_EQ(means_row(0, 0), 0.0);
}

TEST(Scaler, ColumnMismatchThrows) {
    const auto p = fit_scaler(column({1, 2}));
    Matrix two(1, 2);
    EXPECT_THROW(transform(p, two), DataError);
    EXPECT_THROW(inverse_transform(p, two), DataError);
}

TEST(Scaler, ContractOnSyntheticLogs) {
    const auto ds = fwlog::testing::synthetic_dataset(2000, 12);
    const auto p = fit_scaler(ds.features);
    const auto z = transform(p, ds.features);
    for (std::size_t j = 0; j < z.cols(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < z.rows(); ++i) mean += z(i, j);
        mean /= static_cast<double>(z.rows());
        double var = 0.0;
        for (std::size_t i = 0; i < z.rows(); ++i) var += (z(i, j) - mean) * (z(i, j) - mean);
        var /= static_cast<double>(z.rows());
        EXPECT_LT(std::abs(mean), 1e-9) << j;
        EXPECT_LT(std::abs(var - 1.0), 1e-6) << j;
    }
    const auto back = inverse_transform(p, z);
    for (std::size_t i = 0; i < back.values().size(); ++i) {
        const double x = ds.features.values()[i];
        EXPECT_LE(std::abs(back.values()[i] - x), 1e-9 * std::max(1.0, std::abs(x)));
    }
}

TEST(Split, FullDatasetArithmetic) {
    EXPECT_EQ(train_size_for(65532, 0.7), 45872u);
    EXPECT_EQ(65532u - train_size_for(65532, 0.7), 19660u);
    EXPECT_EQ(train_size_for(10, 0.7), 7u);
}

TEST(Split, DegenerateAndInvalid) {
    EXPECT_THROW(train_size_for(1, 0.7), DataError);
    EXPECT_THROW(train_size_for(2, 0.2), DataError);  // floor(0.4) = 0
    EXPECT_THROW(train_size_for(10, 0.0), UsageError);
    EXPECT_THROW(train_size_for(10, 1.0), UsageError);
}

TEST(Split, TenRowsSevenThree) {
    const int labels[] = {0, 1};
    const auto s = shuffle_split(labelled(10, labels), {0.7, 5, false});
    EXPECT_EQ(s.train.size(), 7u);
    EXPECT_EQ(s.test.size(), 3u);
}

TEST(Split, PartitionAndDeterminism) {
    const auto ds = fwlog::testing::synthetic_dataset(997, 2);
    for (const bool stratified : {false, true}) {
        const SplitSpec spec{0.7, 99, stratified};
        const auto a = shuffle_split(ds, spec);
        const auto b = shuffle_split(ds, spec);
        EXPECT_EQ(a.train_indices, b.train_indices);
        EXPECT_EQ(a.test_indices, b.test_indices);
        EXPECT_EQ(a.train, b.train);

        std::vector<std::size_t> all = a.train_indices;
        all.insert(all.end(), a.test_indices.begin(), a.test_indices.end());
        std::sort(all.begin(), all.end());
        for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);

        EXPECT_EQ(a.train, ds.subset(a.train_indices));
        EXPECT_EQ(a.test, ds.subset(a.test_indices));
    }
}

TEST(Split, SeedChangesPermutation) {
    const auto ds = fwlog::testing::synthetic_dataset(200, 2);
    EXPECT_NE(shuffle_split(ds, {0.7, 1, false}).train_indices,
              shuffle_split(ds, {0.7, 2, false}).train_indices);
}

TEST(Split, StratifiedProportionsWithinOneRow) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto ds = fwlog::testing::synthetic_dataset(300 + seed * 37, seed);
        const auto s = shuffle_split(ds, {0.7, seed, true});
        const auto total = class_distribution(ds).counts;
        const auto train = class_distribution(s.train).counts;
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            const double expected = 0.7 * static_cast<double>(total[k]);
            EXPECT_LE(std::abs(static_cast<double>(train[k]) - expected), 1.0)
                << "seed " << seed << " class " << k;
        }
    }
}

TEST(Split, StratifiedOrderIsShuffled) {
    const int labels[] = {0, 1, 2, 3};
    const auto s = shuffle_split(labelled(400, labels), {0.5, 3, true});
    EXPECT_FALSE(std::is_sorted(s.train.labels.begin(), s.train.labels.end()));
}

TEST(KFold, PartitionsAllRows) {
    const auto folds = kfold_indices(103, 10, 4);
    ASSERT_EQ(folds.size(), 10u);
    std::set<std::size_t> seen;
    for (const auto& f : folds) {
        EXPECT_TRUE(f.size() == 10 || f.size() == 11);
        for (const auto i : f) EXPECT_TRUE(seen.insert(i).second);
    }
    EXPECT_EQ(seen.size(), 103u);
    EXPECT_EQ(kfold_indices(103, 10, 4), folds);
    EXPECT_THROW(kfold_indices(5, 10, 1), UsageError);
    EXPECT_THROW(kfold_indices(50, 1, 1), UsageError);
}

TEST(Subsample, SortedDistinctDeterministic) {
    const auto s = subsample_indices(19660, 6000, 7);
    EXPECT_EQ(s.size(), 6000u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
    EXPECT_LT(s.back(), 19660u);
    EXPECT_EQ(subsample_indices(19660, 6000, 7), s);
    EXPECT_EQ(subsample_indices(10, 50, 1).size(), 10u);
}
