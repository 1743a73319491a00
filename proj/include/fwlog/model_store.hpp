#pragma once

#include "fwlog/learners.hpp"
#include "fwlog/preprocess.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace fwlog {

inline constexpr int kFormatVersion = 1;

struct TrainingMeta {
    std::uint64_t seed = 0;
    LearnerConfig config;
    std::string dataset_fingerprint;  ///< SHA-256 of the full input dataset
    std::string train_fingerprint;    ///< SHA-256 of the training partition
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    double train_fraction = 0.7;
    bool stratified = false;

    bool operator==(const TrainingMeta&) const = default;
};

/// Everything needed to score raw rows: scaler, fitted model and provenance.
struct ModelArtifact {
    int format_version = kFormatVersion;
    std::string created_at;  ///< ISO-8601 UTC; outside the checksum
    ScalerParams scaler;
    Model model;
    TrainingMeta meta;

    LearnerKind kind() const { return kind_of(model); }
    bool operator==(const ModelArtifact&) const = default;
};

std::string utc_timestamp_now();

/// JSON document body (without checksum) and the checksum over its canonical form.
nlohmann::json artifact_to_json(const ModelArtifact& artifact);
ModelArtifact artifact_from_json(const nlohmann::json& j);
std::string artifact_checksum(const nlohmann::json& body);

/// Serialized file contents, checksum included.
std::string serialize_artifact(const ModelArtifact& artifact);
ModelArtifact deserialize_artifact(std::string_view text);

/// Atomic write (temp file + rename).
void save(const ModelArtifact& artifact, const std::filesystem::path& destination);
ModelArtifact load(const std::filesystem::path& source);

}  // namespace fwlog
