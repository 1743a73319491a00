#include "fwlog/metrics.hpp"

#include "fwlog/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace fwlog {

std::int64_t ConfusionMatrix::total() const noexcept {
    std::int64_t t = 0;
    for (const auto& row : counts) {
        for (const auto v : row) {
            t += v;
        }
    }
    return t;
}

std::int64_t ConfusionMatrix::trace() const noexcept {
    std::int64_t t = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        t += counts[k][k];
    }
    return t;
}

std::int64_t ConfusionMatrix::support(std::size_t cls) const noexcept {
    return std::accumulate(counts[cls].begin(), counts[cls].end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::predicted(std::size_t cls) const noexcept {
    std::int64_t t = 0;
    for (const auto& row : counts) {
        t += row[cls];
    }
    return t;
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw DataError("confusion_matrix: " + std::to_string(y_true.size()) + " true labels vs " +
                        std::to_string(y_pred.size()) + " predictions");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (!valid_label(y_true[i]) || !valid_label(y_pred[i])) {
            throw DataError("confusion_matrix: class index out of range at sample " +
                            std::to_string(i));
        }
        ++cm.counts[static_cast<std::size_t>(y_true[i])][static_cast<std::size_t>(y_pred[i])];
    }
    return cm;
}

std::string confusion_matrix_csv(const ConfusionMatrix& cm) {
    std::string out = "true\\pred";
    for (const auto name : kClassNames) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t t = 0; t < kNumClasses; ++t) {
        out += kClassNames[t];
        for (std::size_t p = 0; p < kNumClasses; ++p) {
            out += ',';
            out += std::to_string(cm.counts[t][p]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json confusion_matrix_json(const ConfusionMatrix& cm) {
    nlohmann::json j;
    j["class_names"] = std::vector<std::string>(kClassNames.begin(), kClassNames.end());
    j["counts"] = cm.counts;
    j["layout"] = "rows=true class, columns=predicted class";
    return j;
}

std::string_view to_string(ZeroDivision policy) {
    return policy == ZeroDivision::one ? "one" : "zero";
}

ZeroDivision zero_division_from_string(std::string_view name) {
    if (name == "one" || name == "1") {
        return ZeroDivision::one;
    }
    if (name == "zero" || name == "0") {
        return ZeroDivision::zero;
    }
    throw UsageError("zero-division policy must be 'zero' or 'one', got '" + std::string(name) +
                     "'");
}

PerClassResult per_class_prf(const ConfusionMatrix& cm, ZeroDivision policy) {
    const double fallback = policy == ZeroDivision::one ? 1.0 : 0.0;
    PerClassResult result;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        const auto tp = cm.counts[k][k];
        const auto predicted = cm.predicted(k);
        const auto support = cm.support(k);
        auto& row = result.rows[k];
        row.support = support;
        if (predicted == 0) {
            row.precision = fallback;
            result.zero_division_used = true;
            result.warnings.push_back(fmt::format(
                "precision of '{}' is ill-defined (no predicted samples); set to {}",
                kClassNames[k], fallback));
        } else {
            row.precision = static_cast<double>(tp) / static_cast<double>(predicted);
        }
        if (support == 0) {
            row.recall = fallback;
            result.zero_division_used = true;
            result.warnings.push_back(fmt::format(
                "recall of '{}' is ill-defined (no true samples); set to {}", kClassNames[k],
                fallback));
        } else {
            row.recall = static_cast<double>(tp) / static_cast<double>(support);
        }
        const double denom = row.precision + row.recall;
        row.f1 = denom > 0.0 ? 2.0 * row.precision * row.recall / denom : 0.0;
    }
    return result;
}

Aggregates aggregate(std::span<const ClassMetrics> rows) {
    Aggregates out;
    if (rows.empty()) {
        return out;
    }
    double total_support = 0.0;
    for (const auto& r : rows) {
        out.macro.precision += r.precision;
        out.macro.recall += r.recall;
        out.macro.f1 += r.f1;
        const auto s = static_cast<double>(r.support);
        out.weighted.precision += s * r.precision;
        out.weighted.recall += s * r.recall;
        out.weighted.f1 += s * r.f1;
        total_support += s;
    }
    const auto n = static_cast<double>(rows.size());
    out.macro.precision /= n;
    out.macro.recall /= n;
    out.macro.f1 /= n;
    if (total_support > 0.0) {
        out.weighted.precision /= total_support;
        out.weighted.recall /= total_support;
        out.weighted.f1 /= total_support;
    } else {
        out.weighted = {};
    }
    return out;
}

double binary_auc(std::span<const double> scores, std::span<const std::uint8_t> positive) {
    const auto n = scores.size();
    if (positive.size() != n) {
        throw DataError("binary_auc: length mismatch");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double pos_rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) {
            ++j;
        }
        // ranks i+1 .. j+1 share their mean
        const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t r = i; r <= j; ++r) {
            if (positive[order[r]] != 0) {
                pos_rank_sum += midrank;
                ++n_pos;
            }
        }
        i = j + 1;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw NumericError("binary_auc: needs at least one positive and one negative sample");
    }
    const double p = static_cast<double>(n_pos);
    const double u = pos_rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(n_neg));
}

AucResult roc_auc_ovr(std::span<const int> y_true, const Matrix& scores) {
    if (scores.rows() != y_true.size() || scores.cols() != kNumClasses) {
        throw DataError("roc_auc_ovr: score matrix must be n x 4");
    }
    AucResult result;
    std::vector<double> column(y_true.size());
    std::vector<std::uint8_t> flags(y_true.size());
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            column[i] = scores(i, k);
            flags[i] = y_true[i] == static_cast<int>(k) ? 1 : 0;
            n_pos += flags[i];
        }
        if (n_pos == 0 || n_pos == y_true.size()) {
            result.skipped_classes.push_back(static_cast<int>(k));
            continue;
        }
        const double auc = binary_auc(column, flags);
        result.per_class[k] = auc;
        sum += auc;
        ++used;
    }
    if (used == 0) {
        throw NumericError("roc_auc_ovr: every class lacks positives or negatives");
    }
    result.macro = sum / static_cast<double>(used);
    return result;
}

ClassificationReport make_report(const ConfusionMatrix& cm, ZeroDivision policy,
                                 const AucResult* auc) {
    ClassificationReport report;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        report.class_names[k] = std::string(kClassNames[k]);
    }
    auto prf = per_class_prf(cm, policy);
    report.classes = prf.rows;
    report.total = cm.total();
    report.accuracy = report.total > 0
                          ? static_cast<double>(cm.trace()) / static_cast<double>(report.total)
                          : 0.0;
    const auto agg = aggregate(report.classes);
    report.macro_avg = agg.macro;
    report.weighted_avg = agg.weighted;
    report.zero_division = policy;
    report.zero_division_warning = prf.zero_division_used;
    report.warnings = std::move(prf.warnings);
    if (auc != nullptr) {
        report.auc_macro_ovr = auc->macro;
        report.auc_per_class = auc->per_class;
        report.auc_skipped_classes = auc->skipped_classes;
        for (const int k : auc->skipped_classes) {
            report.warnings.push_back(
                fmt::format("AUC for '{}' skipped: class lacks positive or negative samples",
                            kClassNames[static_cast<std::size_t>(k)]));
        }
    }
    return report;
}

ClassificationReport evaluate_predictions(std::span<const int> y_true,
                                          std::span<const int> y_pred, const Matrix* scores,
                                          ZeroDivision policy) {
    const auto cm = confusion_matrix(y_true, y_pred);
    if (scores == nullptr) {
        return make_report(cm, policy);
    }
    try {
        const auto auc = roc_auc_ovr(y_true, *scores);
        return make_report(cm, policy, &auc);
    } catch (const NumericError& e) {
        auto report = make_report(cm, policy);
        report.warnings.emplace_back(e.what());
        return report;
    }
}

std::string format_2dp(double x) {
    if (!std::isfinite(x)) {
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    }
    // Exact decimal expansion of the binary value; the digit after the second
    // decimal decides, so an exact ...5 rounds up and 0.70499.. rounds down.
    std::vector<char> buf(1400);
    std::snprintf(buf.data(), buf.size(), "%.1100f", std::fabs(x));
    const std::string digits(buf.data());
    const auto dot = digits.find('.');
    const long long whole = std::stoll(digits.substr(0, dot));
    long long cents = whole * 100 + (digits[dot + 1] - '0') * 10 + (digits[dot + 2] - '0');
    if (digits[dot + 3] >= '5') {
        ++cents;
    }
    const bool negative = x < 0 && cents != 0;
    return fmt::format("{}{}.{:02d}", negative ? "-" : "", cents / 100, cents % 100);
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json& j) {
    return j.is_null() ? std::nullopt : std::optional<double>(j.get<double>());
}

nlohmann::json average_json(const AverageMetrics& a) {
    return {{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}};
}

AverageMetrics average_from(const nlohmann::json& j) {
    return {j.at("precision").get<double>(), j.at("recall").get<double>(),
            j.at("f1").get<double>()};
}

std::string render_text(const ClassificationReport& r) {
    std::size_t width = std::string_view("weighted avg").size();
    for (const auto& name : r.class_names) {
        width = std::max(width, name.size());
    }
    std::string out;
    out += fmt::format("{:>{}} ", "", width);
    for (const auto* h : {"precision", "recall", "f1-score", "support"}) {
        out += fmt::format(" {:>9}", h);
    }
    out += "\n\n";
    const auto line = [&](std::string_view label, double p, double rc, double f, std::int64_t s) {
        out += fmt::format("{:>{}}  {:>9} {:>9} {:>9} {:>9}\n", label, width, format_2dp(p),
                           format_2dp(rc), format_2dp(f), s);
    };
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        const auto& c = r.classes[k];
        line(r.class_names[k], c.precision, c.recall, c.f1, c.support);
    }
    out += '\n';
    out += fmt::format("{:>{}}  {:>9} {:>9} {:>9} {:>9}\n", "accuracy", width, "", "",
                       format_2dp(r.accuracy), r.total);
    line("macro avg", r.macro_avg.precision, r.macro_avg.recall, r.macro_avg.f1, r.total);
    line("weighted avg", r.weighted_avg.precision, r.weighted_avg.recall, r.weighted_avg.f1,
         r.total);
    if (r.auc_macro_ovr) {
        out += fmt::format("\n{:>{}}  {:>9}\n", "auc (macro ovr)", width, format_2dp(*r.auc_macro_ovr));
    }
    return out;
}

}  // namespace

nlohmann::json report_to_json(const ClassificationReport& r) {
    nlohmann::json classes = nlohmann::json::array();
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        const auto& c = r.classes[k];
        classes.push_back({{"name", r.class_names[k]},
                           {"precision", c.precision},
                           {"recall", c.recall},
                           {"f1", c.f1},
                           {"support", c.support},
                           {"auc", optional_json(r.auc_per_class[k])}});
    }
    return {{"classes", std::move(classes)},
            {"accuracy", r.accuracy},
            {"total", r.total},
            {"macro_avg", average_json(r.macro_avg)},
            {"weighted_avg", average_json(r.weighted_avg)},
            {"auc_macro_ovr", optional_json(r.auc_macro_ovr)},
            {"metadata",
             {{"zero_division_policy", to_string(r.zero_division)},
              {"zero_division_warning", r.zero_division_warning},
              {"auc_averaging", r.auc_averaging},
              {"auc_skipped_classes", r.auc_skipped_classes},
              {"warnings", r.warnings}}}};
}

ClassificationReport report_from_json(const nlohmann::json& j) {
    ClassificationReport r;
    const auto& classes = j.at("classes");
    if (classes.size() != kNumClasses) {
        throw DataError("report JSON must list exactly 4 classes");
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        const auto& c = classes[k];
        r.class_names[k] = c.at("name").get<std::string>();
        r.classes[k] = {c.at("precision").get<double>(), c.at("recall").get<double>(),
                        c.at("f1").get<double>(), c.at("support").get<std::int64_t>()};
        r.auc_per_class[k] = optional_from(c.at("auc"));
    }
    r.accuracy = j.at("accuracy").get<double>();
    r.total = j.at("total").get<std::int64_t>();
    r.macro_avg = average_from(j.at("macro_avg"));
    r.weighted_avg = average_from(j.at("weighted_avg"));
    r.auc_macro_ovr = optional_from(j.at("auc_macro_ovr"));
    const auto& meta = j.at("metadata");
    r.zero_division = zero_division_from_string(meta.at("zero_division_policy").get<std::string>());
    r.zero_division_warning = meta.at("zero_division_warning").get<bool>();
    r.auc_averaging = meta.at("auc_averaging").get<std::string>();
    r.auc_skipped_classes = meta.at("auc_skipped_classes").get<std::vector<int>>();
    r.warnings = meta.at("warnings").get<std::vector<std::string>>();
    return r;
}

std::string render_report(const ClassificationReport& report, ReportFormat format) {
    if (format == ReportFormat::json) {
        return report_to_json(report).dump(2) + "\n";
    }
    return render_text(report);
}

}  // namespace fwlog
