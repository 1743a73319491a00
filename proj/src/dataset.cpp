#include "fwlog/dataset.hpp"

#include "csv.hpp"
#include "fwlog/error.hpp"
#include "fwlog/hash.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <system_error>

namespace fwlog {

namespace {

std::vector<std::string> export_header() {
    std::vector<std::string> header(kFeatureNames.begin(), kFeatureNames.end());
    header.insert(header.begin() + kActionPosition, std::string(kActionColumn));
    return header;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) {
            out += ',';
        }
        out += item;
    }
    return out;
}

std::optional<std::size_t> feature_position(std::string_view name) {
    const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
    if (it == kFeatureNames.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - kFeatureNames.begin());
}

// Parses one feature cell. Returns an error message on failure.
std::optional<std::string> parse_feature(std::string_view raw, std::size_t feature, double& out) {
    const auto text = csv::trim(raw);
    const auto& name = kFeatureNames[feature];
    if (text.empty()) {
        return "missing value in column '" + std::string(name) + "'";
    }
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) {
        return "non-numeric value '" + std::string(raw) + "' in column '" + std::string(name) + "'";
    }
    if (value < 0.0) {
        return "negative value '" + std::string(raw) + "' in column '" + std::string(name) + "'";
    }
    if (feature < kNumPortFeatures && (value > kMaxPort || value != std::floor(value))) {
        return "port value '" + std::string(raw) + "' out of range in column '" +
               std::string(name) + "'";
    }
    out = value == 0.0 ? 0.0 : value;  // folds -0 into +0
    return std::nullopt;
}

struct ColumnMap {
    std::array<std::size_t, kNumFeatures> feature_columns{};
    std::optional<std::size_t> action_column;
    std::size_t width = 0;
};

ColumnMap map_labelled_header(const std::vector<std::string>& header, SchemaPolicy policy) {
    ColumnMap map;
    map.width = header.size();
    std::vector<std::string> names;
    names.reserve(header.size());
    for (const auto& h : header) {
        names.emplace_back(csv::trim(h));
    }

    const auto expected = export_header();
    if (policy == SchemaPolicy::strict) {
        if (names != expected) {
            throw DataError("header mismatch (strict schema): expected '" + join(expected) +
                            "', got '" + join(names) + "'");
        }
    }

    std::array<std::optional<std::size_t>, kNumFeatures> found{};
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c] == kActionColumn) {
            if (map.action_column) {
                throw DataError("duplicate column 'Action' in header");
            }
            map.action_column = c;
        } else if (const auto f = feature_position(names[c])) {
            if (found[*f]) {
                throw DataError("duplicate column '" + names[c] + "' in header");
            }
            found[*f] = c;
        }
    }

    std::vector<std::string> missing;
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
        if (!found[f]) {
            missing.emplace_back(kFeatureNames[f]);
        } else {
            map.feature_columns[f] = *found[f];
        }
    }
    if (!map.action_column) {
        missing.emplace_back(kActionColumn);
    }
    if (missing.size() == kNumFeatures + 1) {
        throw DataError("missing header row: expected '" + join(expected) + "'");
    }
    if (!missing.empty()) {
        throw DataError("header is missing required column(s): " + join(missing));
    }
    return map;
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.features = features.select_rows(indices);
    out.labels.reserve(indices.size());
    for (const auto i : indices) {
        out.labels.push_back(labels[i]);
    }
    out.feature_names = feature_names;
    return out;
}

Dataset make_empty_dataset() {
    Dataset ds;
    ds.features = Matrix(0, kNumFeatures);
    ds.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
    return ds;
}

void to_json(nlohmann::json& j, const IngestReport& report) {
    auto reasons = nlohmann::json::array();
    for (const auto& r : report.rejection_reasons) {
        reasons.push_back({{"line", r.line}, {"reason", r.reason}});
    }
    nlohmann::json counts = nlohmann::json::object();
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        counts[std::string(kClassNames[k])] = report.class_counts[k];
    }
    j = {{"rows_read", report.rows_read},
         {"rows_accepted", report.rows_accepted},
         {"rows_rejected", report.rows_rejected},
         {"rejection_reasons", std::move(reasons)},
         {"class_counts", std::move(counts)}};
}

void from_json(const nlohmann::json& j, IngestReport& report) {
    report.rows_read = j.at("rows_read").get<std::size_t>();
    report.rows_accepted = j.at("rows_accepted").get<std::size_t>();
    report.rows_rejected = j.at("rows_rejected").get<std::size_t>();
    report.rejection_reasons.clear();
    for (const auto& r : j.at("rejection_reasons")) {
        report.rejection_reasons.push_back(
            {r.at("line").get<std::size_t>(), r.at("reason").get<std::string>()});
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        report.class_counts[k] =
            j.at("class_counts").at(std::string(kClassNames[k])).get<std::size_t>();
    }
}

ParseResult parse_csv(std::string_view text, SchemaPolicy policy) {
    if (csv::is_blank(text)) {
        throw DataError("empty input: no header row");
    }
    const auto lines = csv::split_lines(text);
    const auto map = map_labelled_header(csv::split_fields(lines.front().text), policy);

    ParseResult result;
    auto& ds = result.dataset;
    auto& report = result.report;
    ds = make_empty_dataset();

    std::array<double, kNumFeatures> row{};
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        if (csv::is_blank(line.text)) {
            continue;
        }
        ++report.rows_read;
        const auto reject = [&](std::string reason) {
            ++report.rows_rejected;
            report.rejection_reasons.push_back({line.number, std::move(reason)});
        };

        const auto fields = csv::split_fields(line.text);
        if (fields.size() != map.width) {
            reject("expected " + std::to_string(map.width) + " fields, got " +
                   std::to_string(fields.size()));
            continue;
        }
        const auto& action_raw = fields[*map.action_column];
        const auto action = csv::trim(action_raw);
        const auto it = std::find(kClassNames.begin(), kClassNames.end(), action);
        if (it == kClassNames.end()) {
            reject("unknown action '" + action_raw + "'");
            continue;
        }
        std::optional<std::string> error;
        for (std::size_t f = 0; f < kNumFeatures && !error; ++f) {
            error = parse_feature(fields[map.feature_columns[f]], f, row[f]);
        }
        if (error) {
            reject(std::move(*error));
            continue;
        }
        const int label = static_cast<int>(it - kClassNames.begin());
        ds.features.push_row(row);
        ds.labels.push_back(label);
        ++report.rows_accepted;
        ++report.class_counts[static_cast<std::size_t>(label)];
    }
    return result;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

ParseResult parse_csv_file(const std::filesystem::path& path, SchemaPolicy policy) {
    return parse_csv(read_file(path), policy);
}

std::string render_csv(const Dataset& ds) {
    std::string out = join(export_header());
    out += '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto row = ds.features.row(i);
        for (std::size_t f = 0; f < kNumFeatures; ++f) {
            if (f == kActionPosition) {
                out += decode_label(ds.labels[i]);
                out += ',';
            }
            out += csv::format_number(row[f]);
            if (f + 1 < kNumFeatures) {
                out += ',';
            }
        }
        out += '\n';
    }
    return out;
}

FeatureTable parse_feature_csv(std::string_view text) {
    if (csv::is_blank(text)) {
        throw DataError("empty input: no header row");
    }
    const auto lines = csv::split_lines(text);
    FeatureTable table;
    table.header = csv::split_fields(lines.front().text);
    table.features = Matrix(0, kNumFeatures);

    const auto expected_header = [] {
        return std::string("expected header columns: ") +
               join(std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end()));
    };

    std::array<std::optional<std::size_t>, kNumFeatures> found{};
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        const auto name = csv::trim(table.header[c]);
        if (name == kActionColumn) {
            continue;
        }
        const auto f = feature_position(name);
        if (!f) {
            throw DataError("unknown column '" + std::string(name) + "'; " + expected_header());
        }
        if (found[*f]) {
            throw DataError("duplicate column '" + std::string(name) + "'");
        }
        found[*f] = c;
    }
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
        if (!found[f]) {
            throw DataError("missing column '" + std::string(kFeatureNames[f]) + "'; " +
                            expected_header());
        }
    }

    std::array<double, kNumFeatures> row{};
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        if (csv::is_blank(line.text)) {
            continue;
        }
        auto fields = csv::split_fields(line.text);
        if (fields.size() != table.header.size()) {
            throw DataError("line " + std::to_string(line.number) + ": expected " +
                            std::to_string(table.header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        for (std::size_t f = 0; f < kNumFeatures; ++f) {
            if (const auto error = parse_feature(fields[*found[f]], f, row[f])) {
                throw DataError("line " + std::to_string(line.number) + ": " + *error);
            }
        }
        table.features.push_row(row);
        table.raw.push_back(std::move(fields));
    }
    return table;
}

ClassDistribution class_distribution(const Dataset& ds) {
    ClassDistribution dist;
    for (const int label : ds.labels) {
        if (valid_label(label)) {
            ++dist.counts[static_cast<std::size_t>(label)];
        }
    }
    if (ds.size() > 0) {
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            dist.fractions[k] =
                static_cast<double>(dist.counts[k]) / static_cast<double>(ds.size());
        }
    }
    return dist;
}

std::vector<Violation> validate(const Dataset& ds) {
    std::vector<Violation> out;
    if (ds.features.rows() != ds.labels.size()) {
        out.push_back({0, "shape: matrix has " + std::to_string(ds.features.rows()) +
                              " rows but there are " + std::to_string(ds.labels.size()) +
                              " labels"});
    }
    if (ds.features.cols() != kNumFeatures) {
        out.push_back({0, "shape: expected 11 feature columns, found " +
                              std::to_string(ds.features.cols())});
    }
    if (ds.feature_names.size() != kNumFeatures) {
        out.push_back({0, "feature-names: expected 11 names, found " +
                              std::to_string(ds.feature_names.size())});
    } else if (std::set<std::string>(ds.feature_names.begin(), ds.feature_names.end()).size() !=
               kNumFeatures) {
        out.push_back({0, "feature-names: names must be unique"});
    }

    const auto rows = std::min(ds.features.rows(), ds.labels.size());
    const auto cols = std::min(ds.features.cols(), kNumFeatures);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!valid_label(ds.labels[i])) {
            out.push_back({i, "label-range: label " + std::to_string(ds.labels[i]) +
                                  " not in {0,1,2,3}"});
        }
        const auto row = ds.features.row(i);
        bool bad_value = false;
        bool bad_port = false;
        for (std::size_t f = 0; f < cols; ++f) {
            const double v = row[f];
            if (!std::isfinite(v) || v < 0.0) {
                bad_value = true;
            } else if (f < kNumPortFeatures && (v > kMaxPort || v != std::floor(v))) {
                bad_port = true;
            }
        }
        if (bad_value) {
            out.push_back({i, "feature-value: values must be finite and non-negative"});
        }
        if (bad_port) {
            out.push_back({i, "port-range: port fields must be integers in [0, 65535]"});
        }
    }
    return out;
}

std::string fingerprint(const Dataset& ds) { return sha256_hex(render_csv(ds)); }

}  // namespace fwlog
