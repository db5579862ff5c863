// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blogflux::tsv {

std::vector<std::string_view> split(std::string_view line, char sep = '\t');

std::string join(const std::vector<std::string>& fields, char sep = '\t');

// Round-trippable decimal form of a double ("%.17g").
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Header and comment lines start with '#'.
inline bool is_comment(std::string_view line) { return !line.empty() && line.front() == '#'; }

// Reads the next non-empty, non-comment line; strips a trailing '\r'.
bool next_record(std::istream& in, std::string& line);

}  // namespace blogflux::tsv
