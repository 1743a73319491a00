#pragma once

#include "fwlog/dataset.hpp"
#include "fwlog/learners.hpp"
#include "fwlog/random.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>

namespace fwlog {

// Readable parameter names in test listings.
inline void PrintTo(LearnerKind kind, std::ostream* os) { *os << to_string(kind); }

}  // namespace fwlog

namespace fwlog::testing {

inline constexpr std::string_view kExportHeader =
    "Source Port,Destination Port,NAT Source Port,NAT Destination Port,Action,Bytes,"
    "Bytes Sent,Bytes Received,Packets,Elapsed Time (sec),pkts_sent,pkts_received";

inline std::int64_t draw(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

// Firewall-like rows. Allowed sessions carry NAT ports and two-way traffic,
// denied and dropped ones are single outbound packets that differ in size and
// destination, reset-both sessions are short NATed web sessions with no reply.
// Class mix roughly follows the public export (57/23/20/0.1 percent).
inline Dataset synthetic_dataset(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds = make_empty_dataset();
    std::array<double, kNumFeatures> row{};
    for (std::size_t i = 0; i < n; ++i) {
        const auto u = uniform_below(rng, 10000);
        const int label = u < 5740 ? 0 : u < 8030 ? 1 : u < 9985 ? 2 : 3;
        const auto sport = draw(rng, 1024, 65535);
        std::int64_t dport = 0, nsport = 0, ndport = 0, sent = 0, recv = 0, pkts = 1, elapsed = 0;
        switch (label) {
            case 0: {
                static constexpr std::int64_t ports[] = {53, 80, 443, 8080};
                dport = ports[uniform_below(rng, 4)];
                nsport = draw(rng, 1024, 65535);
                ndport = dport;
                pkts = draw(rng, 2, 60);
                sent = pkts * draw(rng, 60, 700);
                recv = pkts * draw(rng, 40, 1200);
                elapsed = draw(rng, 1, 120);
                break;
            }
            case 1:
                dport = uniform_below(rng, 2) == 0 ? 445 : draw(rng, 1, 1023);
                sent = draw(rng, 60, 80);
                break;
            case 2:
                dport = uniform_below(rng, 2) == 0 ? 23 : draw(rng, 1024, 65535);
                sent = draw(rng, 100, 140);
                break;
            default:
                dport = 443;
                nsport = draw(rng, 1024, 65535);
                ndport = 443;
                pkts = draw(rng, 1, 3);
                sent = draw(rng, 200, 400);
                elapsed = draw(rng, 20, 40);
                break;
        }
        const auto psent = recv > 0 ? (pkts + 1) / 2 : pkts;
        row = {static_cast<double>(sport),  static_cast<double>(dport),
               static_cast<double>(nsport), static_cast<double>(ndport),
               static_cast<double>(sent + recv), static_cast<double>(sent),
               static_cast<double>(recv),   static_cast<double>(pkts),
               static_cast<double>(elapsed), static_cast<double>(psent),
               static_cast<double>(pkts - psent)};
        ds.features.push_row(row);
        ds.labels.push_back(label);
    }
    return ds;
}

// Standard-normal-ish matrix (sum of uniforms), enough for property tests.
inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (auto& v : m.values()) {
        v = uniform_unit(rng) + uniform_unit(rng) + uniform_unit(rng) - 1.5;
    }
    return m;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(std::string_view tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("fwlog_" + std::string(tag) + "_" +
                 std::to_string(derive_seed(reinterpret_cast<std::uintptr_t>(this), ++counter)));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace fwlog::testing
