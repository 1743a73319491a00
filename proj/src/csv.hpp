#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fwlog::csv {

struct Line {
    std::size_t number = 0;  ///< 1-based
    std::string_view text;
};

/// Physical lines with CR stripped and a leading UTF-8 BOM removed.
std::vector<Line> split_lines(std::string_view text);

/// Comma-separated fields; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_fields(std::string_view line);

std::string_view trim(std::string_view s) noexcept;

bool is_blank(std::string_view s) noexcept;

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace fwlog::csv
