#pragma once

#include "fwlog/labels.hpp"
#include "fwlog/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace fwlog {

/// counts[t][p]: samples of true class t predicted as p.
struct ConfusionMatrix {
    std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> counts{};

    std::int64_t total() const noexcept;
    std::int64_t trace() const noexcept;
    std::int64_t support(std::size_t cls) const noexcept;    ///< row sum
    std::int64_t predicted(std::size_t cls) const noexcept;  ///< column sum

    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred);

/// Grid CSV with a header of class names; first column is the true class.
std::string confusion_matrix_csv(const ConfusionMatrix& cm);
nlohmann::json confusion_matrix_json(const ConfusionMatrix& cm);

enum class ZeroDivision { zero, one };

std::string_view to_string(ZeroDivision policy);
ZeroDivision zero_division_from_string(std::string_view name);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;

    bool operator==(const ClassMetrics&) const = default;
};

struct PerClassResult {
    std::array<ClassMetrics, kNumClasses> rows{};
    bool zero_division_used = false;
    std::vector<std::string> warnings;
};

PerClassResult per_class_prf(const ConfusionMatrix& cm, ZeroDivision policy);

struct AverageMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const AverageMetrics&) const = default;
};

struct Aggregates {
    AverageMetrics macro;
    AverageMetrics weighted;
};

/// Unweighted and support-weighted means of per-class rows.
Aggregates aggregate(std::span<const ClassMetrics> rows);

struct AucResult {
    double macro = 0.0;
    std::array<std::optional<double>, kNumClasses> per_class{};
    std::vector<int> skipped_classes;  ///< classes lacking positives or negatives
};

/// Rank-based (Mann-Whitney, midrank ties) AUC for one binary problem.
/// `positive[i]` is nonzero for the positive class.
double binary_auc(std::span<const double> scores, std::span<const std::uint8_t> positive);

/// One-vs-rest AUC per class from an n x 4 score matrix, macro-averaged over
/// non-degenerate classes. Throws NumericError if every class is degenerate.
AucResult roc_auc_ovr(std::span<const int> y_true, const Matrix& scores);

struct ClassificationReport {
    std::array<std::string, kNumClasses> class_names{};
    std::array<ClassMetrics, kNumClasses> classes{};
    double accuracy = 0.0;
    std::int64_t total = 0;
    AverageMetrics macro_avg;
    AverageMetrics weighted_avg;
    ZeroDivision zero_division = ZeroDivision::one;
    bool zero_division_warning = false;
    std::vector<std::string> warnings;
    std::optional<double> auc_macro_ovr;
    std::array<std::optional<double>, kNumClasses> auc_per_class{};
    std::vector<int> auc_skipped_classes;
    std::string auc_averaging = "macro-ovr";

    bool operator==(const ClassificationReport&) const = default;
};

/// Assembles the full report from a confusion matrix and optional scores.
ClassificationReport make_report(const ConfusionMatrix& cm, ZeroDivision policy,
                                 const AucResult* auc = nullptr);

ClassificationReport evaluate_predictions(std::span<const int> y_true,
                                          std::span<const int> y_pred, const Matrix* scores,
                                          ZeroDivision policy);

/// 2-decimal rendering, rounding half-up on the exact binary value of `x`.
std::string format_2dp(double x);

enum class ReportFormat { text, json };

std::string render_report(const ClassificationReport& report, ReportFormat format);
nlohmann::json report_to_json(const ClassificationReport& report);
ClassificationReport report_from_json(const nlohmann::json& j);

}  // namespace fwlog
