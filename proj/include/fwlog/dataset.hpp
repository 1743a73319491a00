#pragma once

#include "fwlog/labels.hpp"
#include "fwlog/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace fwlog {

inline constexpr std::size_t kNumFeatures = 11;

/// Predictor columns in canonical order (the public export's order with Action removed).
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "Source Port",  "Destination Port", "NAT Source Port",    "NAT Destination Port",
    "Bytes",        "Bytes Sent",       "Bytes Received",     "Packets",
    "Elapsed Time (sec)", "pkts_sent",  "pkts_received"};

inline constexpr std::string_view kActionColumn = "Action";

/// Position of Action among the 12 columns of the public export.
inline constexpr std::size_t kActionPosition = 4;

/// The first four predictors are TCP/UDP ports.
inline constexpr std::size_t kNumPortFeatures = 4;
inline constexpr double kMaxPort = 65535.0;

enum class SchemaPolicy {
    strict,         ///< exact 12-column header in export order
    header_mapped,  ///< columns located by name; order free, extra columns ignored
};

/// Feature matrix with a parallel label vector. Immutable by convention once built.
struct Dataset {
    Matrix features;  ///< n x 11, canonical column order
    std::vector<int> labels;
    std::vector<std::string> feature_names;

    std::size_t size() const noexcept { return labels.size(); }

    Dataset subset(std::span<const std::size_t> indices) const;

    bool operator==(const Dataset&) const = default;
};

/// Empty dataset carrying the canonical feature names.
Dataset make_empty_dataset();

struct Rejection {
    std::size_t line = 0;  ///< 1-based physical line, header is line 1
    std::string reason;

    bool operator==(const Rejection&) const = default;
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_accepted = 0;
    std::size_t rows_rejected = 0;
    std::vector<Rejection> rejection_reasons;
    std::array<std::size_t, kNumClasses> class_counts{};

    bool operator==(const IngestReport&) const = default;
};

void to_json(nlohmann::json& j, const IngestReport& report);
void from_json(const nlohmann::json& j, IngestReport& report);

struct ParseResult {
    Dataset dataset;
    IngestReport report;
};

/// Parses a labelled firewall-log CSV. Fatal problems (empty input, missing or
/// malformed header) throw DataError; bad rows are rejected into the report.
ParseResult parse_csv(std::string_view text, SchemaPolicy policy = SchemaPolicy::strict);
ParseResult parse_csv_file(const std::filesystem::path& path,
                           SchemaPolicy policy = SchemaPolicy::strict);

/// Writes a Dataset in the export's 12-column layout; parse_csv reads it back unchanged.
std::string render_csv(const Dataset& ds);

/// Unlabelled rows as consumed by `predict`.
struct FeatureTable {
    std::vector<std::string> header;            ///< input header, verbatim
    std::vector<std::vector<std::string>> raw;  ///< input fields, verbatim
    Matrix features;                            ///< canonical column order
};

/// Reads a CSV whose header names the 11 predictors in any order (an Action
/// column is tolerated and ignored). Unknown columns or bad values throw DataError.
FeatureTable parse_feature_csv(std::string_view text);

struct ClassDistribution {
    std::array<std::size_t, kNumClasses> counts{};
    std::array<double, kNumClasses> fractions{};
};

ClassDistribution class_distribution(const Dataset& ds);

struct Violation {
    std::size_t row = 0;
    std::string rule;

    bool operator==(const Violation&) const = default;
};

/// Every broken Dataset invariant, one entry per (row, rule). Shape problems use row 0.
std::vector<Violation> validate(const Dataset& ds);

/// SHA-256 hex of render_csv(ds).
std::string fingerprint(const Dataset& ds);

std::string read_file(const std::filesystem::path& path);

}  // namespace fwlog
