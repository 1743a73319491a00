#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fwlog {

/// All randomness in the toolkit flows through this engine type.
using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for a numbered sub-task (tree index, OvR class, fold, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Uniform integer in [0, bound). Portable across standard libraries, unlike
/// std::uniform_int_distribution. bound must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) from the top 53 bits.
double uniform_unit(Rng& rng);

/// In-place Fisher-Yates shuffle.
template <typename T>
void fisher_yates(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

/// Seeded permutation of 0..n-1.
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed);

}  // namespace fwlog
