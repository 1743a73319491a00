#include "csv.hpp"
#include "fwlog/error.hpp"
#include "fwlog/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>
#include <system_error>

namespace fwlog {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) {
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto text = csv::trim(value);
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
        throw UsageError("setting '" + std::string(key) + "': cannot parse '" + std::string(value) +
                         "' as a number");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    const auto v = lower(csv::trim(value));
    if (v == "1" || v == "true" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "0" || v == "false" || v == "no" || v == "off") {
        return false;
    }
    throw UsageError("setting '" + std::string(key) + "': expected a boolean, got '" +
                     std::string(value) + "'");
}

// 0, "none" and "off" disable optional counts.
std::optional<std::size_t> parse_optional_count(std::string_view key, std::string_view value) {
    const auto v = lower(csv::trim(value));
    if (v.empty() || v == "none" || v == "off") {
        return std::nullopt;
    }
    const auto n = parse_number<std::size_t>(key, v);
    return n == 0 ? std::nullopt : std::optional<std::size_t>(n);
}

}  // namespace

LearnerConfig ExperimentConfig::learner_config(LearnerKind kind) const {
    switch (kind) {
        case LearnerKind::rf: return rf;
        case LearnerKind::lr: return lr;
        case LearnerKind::knn: return knn;
        case LearnerKind::svm: return svm;
    }
    throw UsageError("unknown learner kind");
}

std::vector<LearnerKind> parse_algorithms(std::string_view list) {
    std::vector<LearnerKind> out;
    const auto text = csv::trim(list);
    if (text == "all") {
        return {LearnerKind::rf, LearnerKind::lr, LearnerKind::knn, LearnerKind::svm};
    }
    for (const auto& item : csv::split_fields(text)) {
        const auto name = csv::trim(item);
        if (name.empty()) {
            continue;
        }
        const auto kind = learner_kind_from_string(name);
        if (std::find(out.begin(), out.end(), kind) == out.end()) {
            out.push_back(kind);
        }
    }
    if (out.empty()) {
        throw UsageError("no algorithms selected (valid: rf, lr, knn, svm)");
    }
    return out;
}

void apply_setting(ExperimentConfig& c, std::string_view raw_key, std::string_view raw_value) {
    const auto key = lower(csv::trim(raw_key));
    const auto value = csv::trim(raw_value);
    if (key == "data" || key == "data_path") {
        c.data_path = std::string(value);
    } else if (key == "seed") {
        c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "train_fraction") {
        c.train_fraction = parse_number<double>(key, value);
    } else if (key == "stratify" || key == "stratified") {
        c.stratified = parse_bool(key, value);
    } else if (key == "algo" || key == "algorithms") {
        c.algorithms = parse_algorithms(value);
    } else if (key == "out_dir") {
        c.out_dir = std::string(value);
    } else if (key == "zero_division") {
        c.zero_division = zero_division_from_string(value);
    } else if (key == "cv_folds") {
        c.cv_folds = parse_optional_count(key, value);
    } else if (key == "eval_subsample") {
        c.eval_subsample = parse_optional_count(key, value);
    } else if (key == "per_split_scaler") {
        c.per_split_scaler = parse_bool(key, value);
    } else if (key == "schema") {
        if (value == "strict") {
            c.schema = SchemaPolicy::strict;
        } else if (value == "header-mapped" || value == "header_mapped") {
            c.schema = SchemaPolicy::header_mapped;
        } else {
            throw UsageError("schema must be 'strict' or 'header-mapped'");
        }
    } else if (key == "threads") {
        c.threads = parse_number<std::size_t>(key, value);
    } else if (key == "rf.n_trees") {
        c.rf.n_trees = parse_number<std::size_t>(key, value);
    } else if (key == "rf.max_depth") {
        c.rf.max_depth = parse_optional_count(key, value);
    } else if (key == "rf.min_samples_split") {
        c.rf.min_samples_split = parse_number<std::size_t>(key, value);
    } else if (key == "rf.mtry") {
        c.rf.mtry = parse_number<std::size_t>(key, value);
    } else if (key == "rf.bootstrap_fraction" || key == "rf.bootstrap_size_fraction") {
        c.rf.bootstrap_size_fraction = parse_number<double>(key, value);
    } else if (key == "lr.learning_rate") {
        c.lr.learning_rate = parse_number<double>(key, value);
    } else if (key == "lr.epochs") {
        c.lr.epochs = parse_number<std::size_t>(key, value);
    } else if (key == "lr.l2_lambda") {
        c.lr.l2_lambda = parse_number<double>(key, value);
    } else if (key == "lr.batch_size") {
        const auto v = lower(value);
        c.lr.batch_size = v == "full" ? 0 : parse_number<std::size_t>(key, value);
    } else if (key == "knn.k") {
        c.knn.k = parse_number<std::size_t>(key, value);
    } else if (key == "svm.c") {
        c.svm.c = parse_number<double>(key, value);
    } else if (key == "svm.epochs") {
        c.svm.epochs = parse_number<std::size_t>(key, value);
    } else {
        throw UsageError("unknown setting '" + std::string(raw_key) + "'");
    }
}

void apply_config_text(ExperimentConfig& config, std::string_view text) {
    for (const auto& line : csv::split_lines(text)) {
        const auto body = csv::trim(line.text);
        if (body.empty() || body.front() == '#' || body.front() == ';') {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw UsageError("config line " + std::to_string(line.number) +
                             ": expected 'key = value'");
        }
        try {
            apply_setting(config, body.substr(0, eq), body.substr(eq + 1));
        } catch (const UsageError& e) {
            throw UsageError("config line " + std::to_string(line.number) + ": " + e.what());
        }
    }
}

void validate_experiment(const ExperimentConfig& config) {
    if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
        throw UsageError("train_fraction must lie in (0, 1)");
    }
    if (config.cv_folds && *config.cv_folds < 2) {
        throw UsageError("cv_folds must be >= 2");
    }
    if (config.algorithms.empty()) {
        throw UsageError("no algorithms selected (valid: rf, lr, knn, svm)");
    }
    if (config.threads < 1) {
        throw UsageError("threads must be >= 1");
    }
    for (const auto kind : config.algorithms) {
        validate_config(config.learner_config(kind), kNumFeatures);
    }
}

}  // namespace fwlog
