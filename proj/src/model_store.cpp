#include "fwlog/model_store.hpp"

#include "fwlog/dataset.hpp"
#include "fwlog/error.hpp"
#include "fwlog/hash.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <string>
#include <system_error>

#include <unistd.h>

namespace fwlog {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kChecksumPrefix = "sha256:";

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// ---- matrices ---------------------------------------------------------------

json matrix_json(const Matrix& m) {
    return {{"rows", m.rows()},
            {"cols", m.cols()},
            {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

Matrix matrix_from(const json& j) {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) {
        throw CorruptionError("matrix payload has " + std::to_string(data.size()) +
                              " values, expected " + std::to_string(rows * cols));
    }
    Matrix m(rows, cols);
    std::copy(data.begin(), data.end(), m.values().begin());
    return m;
}

// ---- configs ----------------------------------------------------------------

json config_json(const LearnerConfig& config) {
    return std::visit(
        overloaded{
            [](const RfConfig& c) -> json {
                return {{"n_trees", c.n_trees},
                        {"max_depth", c.max_depth ? json(*c.max_depth) : json(nullptr)},
                        {"min_samples_split", c.min_samples_split},
                        {"mtry", c.mtry},
                        {"bootstrap_size_fraction", c.bootstrap_size_fraction}};
            },
            [](const LrConfig& c) -> json {
                return {{"learning_rate", c.learning_rate},
                        {"epochs", c.epochs},
                        {"l2_lambda", c.l2_lambda},
                        {"batch_size", c.batch_size}};
            },
            [](const KnnConfig& c) -> json {
                return {{"k", c.k}, {"distance", "euclidean"}, {"vote", "majority"}};
            },
            [](const SvmConfig& c) -> json {
                return {{"C", c.c}, {"epochs", c.epochs}, {"kernel", "linear"},
                        {"learning_rate_schedule", "1/(lambda*t), lambda=1/(C*n)"}};
            },
        },
        config);
}

LearnerConfig config_from(LearnerKind kind, const json& j) {
    switch (kind) {
        case LearnerKind::rf: {
            RfConfig c;
            c.n_trees = j.at("n_trees").get<std::size_t>();
            if (!j.at("max_depth").is_null()) {
                c.max_depth = j.at("max_depth").get<std::size_t>();
            }
            c.min_samples_split = j.at("min_samples_split").get<std::size_t>();
            c.mtry = j.at("mtry").get<std::size_t>();
            c.bootstrap_size_fraction = j.at("bootstrap_size_fraction").get<double>();
            return c;
        }
        case LearnerKind::lr:
            return LrConfig{j.at("learning_rate").get<double>(), j.at("epochs").get<std::size_t>(),
                            j.at("l2_lambda").get<double>(), j.at("batch_size").get<std::size_t>()};
        case LearnerKind::knn: return KnnConfig{j.at("k").get<std::size_t>()};
        case LearnerKind::svm:
            return SvmConfig{j.at("C").get<double>(), j.at("epochs").get<std::size_t>()};
    }
    throw CorruptionError("unknown learner kind");
}

// ---- trees ------------------------------------------------------------------

json node_json(const DecisionTree& tree, std::size_t at) {
    const auto& node = tree.nodes[at];
    json j = {{"counts", node.counts}};
    if (!node.is_leaf()) {
        j["feature"] = node.feature;
        j["threshold"] = node.threshold;
        j["decrease"] = node.decrease;
        j["left"] = node_json(tree, static_cast<std::size_t>(node.left));
        j["right"] = node_json(tree, static_cast<std::size_t>(node.right));
    }
    return j;
}

// Rebuilds the flat layout with the numbering grow_tree uses: children get
// consecutive ids when their parent is expanded, left subtree first.
DecisionTree tree_from(const json& j, std::size_t n_features) {
    DecisionTree tree;
    tree.seed = j.at("seed").get<std::uint64_t>();
    std::vector<std::pair<const json*, int>> stack{{&j.at("root"), 0}};
    tree.nodes.emplace_back();
    while (!stack.empty()) {
        const auto [nj, id] = stack.back();
        stack.pop_back();
        auto& node = tree.nodes[static_cast<std::size_t>(id)];
        node.counts = nj->at("counts").get<std::array<double, kNumClasses>>();
        double total = 0.0;
        for (const double c : node.counts) {
            if (!(c >= 0.0)) {
                throw CorruptionError("tree node has a negative class count");
            }
            total += c;
        }
        if (!(total > 0.0)) {
            throw CorruptionError("tree node has an empty class-count vector");
        }
        if (!nj->contains("feature")) {
            continue;
        }
        const int feature = nj->at("feature").get<int>();
        if (feature < 0 || static_cast<std::size_t>(feature) >= n_features) {
            throw CorruptionError("tree split uses feature " + std::to_string(feature));
        }
        const int left = static_cast<int>(tree.nodes.size());
        node.feature = feature;
        node.threshold = nj->at("threshold").get<double>();
        node.decrease = nj->at("decrease").get<double>();
        node.left = left;
        node.right = left + 1;
        const json* lj = &nj->at("left");
        const json* rj = &nj->at("right");
        tree.nodes.emplace_back();  // invalidates `node`
        tree.nodes.emplace_back();
        stack.push_back({rj, left + 1});
        stack.push_back({lj, left});
    }
    return tree;
}

// ---- models -----------------------------------------------------------------

json params_json(const Model& model) {
    return std::visit(
        overloaded{
            [](const RfModel& m) -> json {
                json trees = json::array();
                for (const auto& t : m.trees) {
                    trees.push_back({{"seed", t.seed}, {"root", node_json(t, 0)}});
                }
                return {{"n_features", m.n_features}, {"trees", std::move(trees)}};
            },
            [](const LrModel& m) -> json {
                return {{"weights", matrix_json(m.weights)}, {"biases", m.biases}};
            },
            [](const KnnModel& m) -> json {
                json rows = json::array();
                for (std::size_t i = 0; i < m.train.rows(); ++i) {
                    const auto r = m.train.row(i);
                    rows.push_back(std::vector<double>(r.begin(), r.end()));
                }
                return {{"k", m.k}, {"train_matrix", std::move(rows)}, {"labels", m.labels}};
            },
            [](const SvmModel& m) -> json {
                return {{"weights", matrix_json(m.weights)}, {"biases", m.biases}};
            },
        },
        model);
}

void check_linear(const Matrix& weights, const std::vector<double>& biases) {
    if (weights.rows() != kNumClasses || biases.size() != kNumClasses) {
        throw CorruptionError("linear model payload must hold 4 weight rows and 4 biases");
    }
    for (const double w : weights.values()) {
        if (!std::isfinite(w)) {
            throw CorruptionError("linear model payload has a non-finite weight");
        }
    }
}

Model params_from(LearnerKind kind, const json& j) {
    switch (kind) {
        case LearnerKind::rf: {
            RfModel m;
            m.n_features = j.at("n_features").get<std::size_t>();
            for (const auto& t : j.at("trees")) {
                m.trees.push_back(tree_from(t, m.n_features));
            }
            if (m.trees.empty()) {
                throw CorruptionError("random forest payload has no trees");
            }
            return m;
        }
        case LearnerKind::lr: {
            LrModel m{matrix_from(j.at("weights")), j.at("biases").get<std::vector<double>>()};
            check_linear(m.weights, m.biases);
            return m;
        }
        case LearnerKind::knn: {
            KnnModel m;
            m.k = j.at("k").get<std::size_t>();
            const auto& rows = j.at("train_matrix");
            for (const auto& r : rows) {
                m.train.push_row(r.get<std::vector<double>>());
            }
            m.labels = j.at("labels").get<std::vector<int>>();
            if (m.train.rows() != m.labels.size()) {
                throw CorruptionError("knn payload: " + std::to_string(m.train.rows()) +
                                      " rows but " + std::to_string(m.labels.size()) + " labels");
            }
            if (m.k < 1 || m.k > m.labels.size()) {
                throw CorruptionError("knn payload: k out of range");
            }
            for (const int label : m.labels) {
                if (!valid_label(label)) {
                    throw CorruptionError("knn payload: label out of range");
                }
            }
            return m;
        }
        case LearnerKind::svm: {
            SvmModel m{matrix_from(j.at("weights")), j.at("biases").get<std::vector<double>>()};
            check_linear(m.weights, m.biases);
            return m;
        }
    }
    throw CorruptionError("unknown learner kind");
}

json label_map_json() {
    json j = json::object();
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        j[std::string(kClassNames[k])] = k;
    }
    return j;
}

}  // namespace

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json artifact_to_json(const ModelArtifact& a) {
    const auto kind = a.kind();
    return {{"format_version", a.format_version},
            {"created_at", a.created_at},
            {"learner_kind", to_string(kind)},
            {"label_map", label_map_json()},
            {"feature_names", std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end())},
            {"scaler", {{"means", a.scaler.means}, {"scales", a.scaler.scales}}},
            {"params", params_json(a.model)},
            {"training_meta",
             {{"seed", a.meta.seed},
              {"config", config_json(a.meta.config)},
              {"dataset_fingerprint", a.meta.dataset_fingerprint},
              {"train_fingerprint", a.meta.train_fingerprint},
              {"train_size", a.meta.train_size},
              {"test_size", a.meta.test_size},
              {"train_fraction", a.meta.train_fraction},
              {"stratified", a.meta.stratified}}}};
}

std::string artifact_checksum(const json& body) {
    json canonical = body;
    canonical.erase("checksum");
    canonical.erase("created_at");
    return std::string(kChecksumPrefix) + sha256_hex(canonical.dump());
}

ModelArtifact artifact_from_json(const json& j) {
    ModelArtifact a;
    a.format_version = j.at("format_version").get<int>();
    if (a.format_version != kFormatVersion) {
        throw VersionError("unsupported artifact format_version " +
                           std::to_string(a.format_version) + " (this build reads " +
                           std::to_string(kFormatVersion) + ")");
    }
    if (j.at("label_map") != label_map_json()) {
        throw CompatibilityError("artifact label_map " + j.at("label_map").dump() +
                                 " differs from allow=0, deny=1, drop=2, reset-both=3");
    }
    const auto kind = learner_kind_from_string(j.at("learner_kind").get<std::string>());
    a.created_at = j.at("created_at").get<std::string>();
    a.scaler.means = j.at("scaler").at("means").get<std::vector<double>>();
    a.scaler.scales = j.at("scaler").at("scales").get<std::vector<double>>();
    a.model = params_from(kind, j.at("params"));

    const auto d = n_features_of(a.model);
    if (d != kNumFeatures || a.scaler.means.size() != d || a.scaler.scales.size() != d) {
        throw CorruptionError("payload shape mismatch: model and scaler must cover 11 features");
    }
    for (const double s : a.scaler.scales) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw CorruptionError("scaler has a non-positive scale");
        }
    }

    const auto& meta = j.at("training_meta");
    a.meta.seed = meta.at("seed").get<std::uint64_t>();
    a.meta.config = config_from(kind, meta.at("config"));
    a.meta.dataset_fingerprint = meta.at("dataset_fingerprint").get<std::string>();
    a.meta.train_fingerprint = meta.at("train_fingerprint").get<std::string>();
    a.meta.train_size = meta.at("train_size").get<std::size_t>();
    a.meta.test_size = meta.at("test_size").get<std::size_t>();
    a.meta.train_fraction = meta.at("train_fraction").get<double>();
    a.meta.stratified = meta.at("stratified").get<bool>();
    return a;
}

std::string serialize_artifact(const ModelArtifact& artifact) {
    const json body = artifact_to_json(artifact);
    // Same fields in a reading-friendly order, checksum last.
    ordered_json doc;
    for (const auto* key : {"format_version", "created_at", "learner_kind", "label_map",
                            "feature_names", "scaler", "training_meta", "params"}) {
        doc[key] = ordered_json::parse(body.at(key).dump());
    }
    doc["checksum"] = artifact_checksum(body);
    return doc.dump() + "\n";
}

ModelArtifact deserialize_artifact(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw CorruptionError(std::string("artifact is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object()) {
            throw CorruptionError("artifact root must be a JSON object");
        }
        if (const auto v = doc.at("format_version"); !v.is_number_integer() ||
                                                     v.get<int>() != kFormatVersion) {
            throw VersionError("unsupported artifact format_version " + v.dump() +
                               " (this build reads " + std::to_string(kFormatVersion) + ")");
        }
        if (doc.at("checksum").get<std::string>() != artifact_checksum(doc)) {
            throw CorruptionError("artifact checksum mismatch: file is corrupted or was edited");
        }
        return artifact_from_json(doc);
    } catch (const json::exception& e) {
        throw CorruptionError(std::string("artifact payload malformed: ") + e.what());
    }
}

void save(const ModelArtifact& artifact, const std::filesystem::path& destination) {
    const auto text = serialize_artifact(artifact);
    auto tmp = destination;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write model artifact to '" + destination.string() + "'");
        }
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("failed writing model artifact '" + destination.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, destination, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move model artifact into '" + destination.string() + "'");
    }
}

ModelArtifact load(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) {
        throw Error("cannot open model artifact '" + source.string() + "'");
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_artifact(text);
}

}  // namespace fwlog
