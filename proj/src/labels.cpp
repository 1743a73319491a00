#include "fwlog/labels.hpp"

#include "fwlog/error.hpp"

#include <string>

namespace fwlog {

int encode_label(std::string_view name) {
    for (std::size_t i = 0; i < kClassNames.size(); ++i) {
        if (kClassNames[i] == name) {
            return static_cast<int>(i);
        }
    }
    throw DataError("unknown action '" + std::string(name) + "'");
}

std::string_view decode_label(int index) {
    if (!valid_label(index)) {
        throw DataError("class index " + std::to_string(index) + " out of range [0, 4)");
    }
    return kClassNames[static_cast<std::size_t>(index)];
}

std::array<double, kNumClasses> one_hot(int index) {
    if (!valid_label(index)) {
        throw DataError("class index " + std::to_string(index) + " out of range [0, 4)");
    }
    std::array<double, kNumClasses> v{};
    v[static_cast<std::size_t>(index)] = 1.0;
    return v;
}

}  // namespace fwlog
