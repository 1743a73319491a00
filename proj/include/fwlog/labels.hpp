#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace fwlog {

inline constexpr std::size_t kNumClasses = 4;

/// Firewall verdict, indexed allow=0, deny=1, drop=2, reset-both=3.
enum class ActionLabel : int { allow = 0, deny = 1, drop = 2, reset_both = 3 };

inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {"allow", "deny", "drop",
                                                                          "reset-both"};

/// Index for an action name; exact, case-sensitive match. Throws DataError naming the string.
int encode_label(std::string_view name);

/// Name for a class index. Throws DataError when index is outside [0, 4).
std::string_view decode_label(int index);

/// Indicator vector with a 1 at `index`.
std::array<double, kNumClasses> one_hot(int index);

constexpr bool valid_label(int index) noexcept {
    return index >= 0 && index < static_cast<int>(kNumClasses);
}

}  // namespace fwlog
