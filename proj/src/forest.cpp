#include "fwlog/error.hpp"
#include "fwlog/learners.hpp"
#include "fwlog/random.hpp"
#include "learners_internal.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace fwlog {

namespace {

using Counts = std::array<double, kNumClasses>;

constexpr std::uint64_t kBootstrapStream = 0;
constexpr std::uint64_t kFeatureStream = 1;

double weighted_children(double n, double n_left, const Counts& left, const Counts& right) {
    const double n_right = n - n_left;
    return (n_left / n) * gini_impurity(left) + (n_right / n) * gini_impurity(right);
}

struct Candidate {
    double threshold = 0.0;
    double decrease = 0.0;
};

// Split quality as the exact fraction sum_child sum_k c_k^2 / n_child. Larger
// is better, and comparing these fractions in integers keeps mathematically
// tied splits tied, so the lowest-feature, lowest-threshold rule holds exactly.
__extension__ using int128 = __int128;

struct ExactScore {
    int128 num = 0;
    int128 den = 1;
};

bool beats(const ExactScore& a, const ExactScore& b) { return a.num * b.den > b.num * a.den; }

std::int64_t sum_squares(const std::array<std::int64_t, kNumClasses>& c) {
    std::int64_t s = 0;
    for (const auto v : c) {
        s += v * v;
    }
    return s;
}

// The no-split baseline: the parent alone.
ExactScore parent_score(const Counts& parent) {
    std::array<std::int64_t, kNumClasses> c{};
    std::int64_t n = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        c[k] = static_cast<std::int64_t>(parent[k]);
        n += c[k];
    }
    return {sum_squares(c), n};
}

// Scans one feature's (value, label) pairs, already sorted by value, and keeps
// the first midpoint that strictly beats `best`, updating it.
std::optional<Candidate> scan_sorted(const std::vector<std::pair<double, int>>& sorted,
                                     const Counts& parent, double parent_gini, ExactScore& best) {
    const auto n = static_cast<std::int64_t>(sorted.size());
    std::array<std::int64_t, kNumClasses> left{};
    std::array<std::int64_t, kNumClasses> right{};
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        right[k] = static_cast<std::int64_t>(parent[k]);
    }
    std::int64_t left_sq = 0;
    std::int64_t right_sq = sum_squares(right);
    std::optional<Candidate> found;
    std::size_t found_at = 0;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto k = static_cast<std::size_t>(sorted[i].second);
        left_sq += 2 * left[k] + 1;
        right_sq -= 2 * right[k] - 1;
        ++left[k];
        --right[k];
        const double a = sorted[i].first;
        const double b = sorted[i + 1].first;
        if (a == b) {
            continue;
        }
        const auto n_left = static_cast<std::int64_t>(i + 1);
        const auto n_right = n - n_left;
        const ExactScore score{static_cast<int128>(left_sq) * n_right +
                                   static_cast<int128>(right_sq) * n_left,
                               static_cast<int128>(n_left) * n_right};
        if (beats(score, best)) {
            double mid = 0.5 * (a + b);
            if (!(mid < b)) {
                mid = a;
            }
            best = score;
            found = Candidate{mid, 0.0};
            found_at = i;
        }
    }
    if (found) {
        Counts l{};
        Counts r = parent;
        for (std::size_t i = 0; i <= found_at; ++i) {
            const auto k = static_cast<std::size_t>(sorted[i].second);
            l[k] += 1.0;
            r[k] -= 1.0;
        }
        found->decrease = parent_gini - weighted_children(static_cast<double>(n),
                                                          static_cast<double>(found_at + 1), l, r);
    }
    return found;
}

Counts count_labels(std::span<const int> y, std::span<const std::size_t> idx) {
    Counts c{};
    for (const auto i : idx) {
        c[static_cast<std::size_t>(y[i])] += 1.0;
    }
    return c;
}

bool is_pure(const Counts& c) {
    return std::count_if(c.begin(), c.end(), [](double v) { return v > 0.0; }) <= 1;
}

}  // namespace

double gini_impurity(std::span<const double> class_counts) {
    double total = 0.0;
    for (const double c : class_counts) {
        total += c;
    }
    if (!(total > 0.0)) {
        throw NumericError("gini_impurity: total count must be positive");
    }
    double sum_sq = 0.0;
    for (const double c : class_counts) {
        const double p = c / total;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

std::optional<SplitChoice> best_split(const Matrix& rows, std::span<const int> labels,
                                      std::span<const std::size_t> candidate_features) {
    const auto m = rows.rows();
    if (m < 2 || labels.size() != m) {
        return std::nullopt;
    }
    Counts parent{};
    for (const int label : labels) {
        parent[static_cast<std::size_t>(label)] += 1.0;
    }
    const double parent_gini = gini_impurity(parent);

    std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
    std::sort(features.begin(), features.end());

    std::optional<SplitChoice> best;
    ExactScore best_score = parent_score(parent);
    std::vector<std::pair<double, int>> sorted(m);
    for (const auto f : features) {
        for (std::size_t i = 0; i < m; ++i) {
            sorted[i] = {rows(i, f), labels[i]};
        }
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (const auto c = scan_sorted(sorted, parent, parent_gini, best_score)) {
            best = SplitChoice{f, c->threshold, c->decrease};
        }
    }
    return best;
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, double fraction, std::uint64_t seed,
                                           std::size_t tree_index) {
    const auto tree_seed = derive_seed(seed, tree_index);
    const auto size = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n))));
    Rng rng(derive_seed(tree_seed, kBootstrapStream));
    std::vector<std::size_t> sample(size);
    for (auto& s : sample) {
        s = static_cast<std::size_t>(uniform_below(rng, n));
    }
    return sample;
}

DecisionTree grow_tree(const RfConfig& config, const Matrix& x, std::span<const int> y,
                       std::span<const std::size_t> sample, std::uint64_t seed) {
    DecisionTree tree;
    tree.seed = seed;
    if (sample.empty()) {
        throw DataError("grow_tree: empty sample");
    }
    const auto d = x.cols();
    const auto mtry = std::min(config.mtry, d);
    const double root_size = static_cast<double>(sample.size());
    Rng rng(derive_seed(seed, kFeatureStream));

    std::vector<std::size_t> idx(sample.begin(), sample.end());
    std::vector<std::size_t> feature_pool(d);
    std::vector<std::pair<double, int>> sorted;
    sorted.reserve(idx.size());

    struct Task {
        int node;
        std::size_t begin;
        std::size_t end;
        std::size_t depth;
    };
    std::vector<Task> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, 0, idx.size(), 0});

    while (!stack.empty()) {
        const Task task = stack.back();
        stack.pop_back();
        const std::span<const std::size_t> members(idx.data() + task.begin, task.end - task.begin);
        const Counts counts = count_labels(y, members);
        tree.nodes[static_cast<std::size_t>(task.node)].counts = counts;

        const bool depth_reached = config.max_depth && task.depth >= *config.max_depth;
        if (depth_reached || members.size() < config.min_samples_split || is_pure(counts)) {
            continue;
        }

        std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < mtry; ++i) {
            const auto j = i + static_cast<std::size_t>(uniform_below(rng, d - i));
            std::swap(feature_pool[i], feature_pool[j]);
        }
        std::vector<std::size_t> candidates(feature_pool.begin(),
                                            feature_pool.begin() + static_cast<std::ptrdiff_t>(mtry));
        std::sort(candidates.begin(), candidates.end());

        const double parent_gini = gini_impurity(counts);
        ExactScore best_score = parent_score(counts);
        std::optional<SplitChoice> best;
        sorted.resize(members.size());
        for (const auto f : candidates) {
            for (std::size_t i = 0; i < members.size(); ++i) {
                sorted[i] = {x(members[i], f), y[members[i]]};
            }
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (const auto c = scan_sorted(sorted, counts, parent_gini, best_score)) {
                best = SplitChoice{f, c->threshold, c->decrease};
            }
        }
        if (!best) {
            continue;
        }

        const auto first = idx.begin() + static_cast<std::ptrdiff_t>(task.begin);
        const auto last = idx.begin() + static_cast<std::ptrdiff_t>(task.end);
        const auto mid = std::stable_partition(first, last, [&](std::size_t r) {
            return x(r, best->feature) <= best->threshold;
        });
        const auto split_at = static_cast<std::size_t>(mid - idx.begin());

        const int left = static_cast<int>(tree.nodes.size());
        const int right = left + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[static_cast<std::size_t>(task.node)];
        node.feature = static_cast<int>(best->feature);
        node.threshold = best->threshold;
        node.left = left;
        node.right = right;
        node.decrease = best->impurity_decrease * static_cast<double>(members.size()) / root_size;

        // Right pushed first so the left subtree is grown (and draws features) first.
        stack.push_back({right, split_at, task.end, task.depth + 1});
        stack.push_back({left, task.begin, split_at, task.depth + 1});
    }
    return tree;
}

std::array<double, kNumClasses> tree_leaf_distribution(const DecisionTree& tree,
                                                       std::span<const double> row) {
    std::size_t at = 0;
    while (!tree.nodes[at].is_leaf()) {
        const auto& node = tree.nodes[at];
        at = static_cast<std::size_t>(
            row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
    }
    auto dist = tree.nodes[at].counts;
    const double total = dist[0] + dist[1] + dist[2] + dist[3];
    for (auto& v : dist) {
        v /= total;
    }
    return dist;
}

RfModel fit_forest(const RfConfig& config, const Matrix& x, std::span<const int> y,
                   std::uint64_t seed, std::size_t threads) {
    RfModel model;
    model.n_features = x.cols();
    model.trees.resize(config.n_trees);
    parallel_for(config.n_trees, threads, [&](std::size_t t) {
        const auto sample = bootstrap_indices(x.rows(), config.bootstrap_size_fraction, seed, t);
        model.trees[t] = grow_tree(config, x, y, sample, derive_seed(seed, t));
    });
    return model;
}

Matrix forest_scores(const RfModel& model, const Matrix& x, std::size_t threads) {
    Matrix out(x.rows(), kNumClasses);
    const double n_trees = static_cast<double>(model.trees.size());
    parallel_for(x.rows(), threads, [&](std::size_t i) {
        const auto row = x.row(i);
        Counts sum{};
        for (const auto& tree : model.trees) {
            const auto dist = tree_leaf_distribution(tree, row);
            for (std::size_t k = 0; k < kNumClasses; ++k) {
                sum[k] += dist[k];
            }
        }
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            out(i, k) = sum[k] / n_trees;
        }
    });
    return out;
}

std::vector<double> feature_importance(const Model& model) {
    const auto* rf = std::get_if<RfModel>(&model);
    if (rf == nullptr) {
        throw UsageError("feature_importance requires a random forest model");
    }
    const auto d = rf->n_features;
    std::vector<double> importance(d, 0.0);
    for (const auto& tree : rf->trees) {
        for (const auto& node : tree.nodes) {
            if (!node.is_leaf()) {
                importance[static_cast<std::size_t>(node.feature)] += node.decrease;
            }
        }
    }
    const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
    if (!(total > 0.0)) {
        std::fill(importance.begin(), importance.end(), 1.0 / static_cast<double>(d));
        return importance;
    }
    for (auto& v : importance) {
        v /= total;
    }
    return importance;
}

}  // namespace fwlog
