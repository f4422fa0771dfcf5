#pragma once

#include <istream>
#include <string>

#include <json.hpp>

namespace gbbm {

// Reader for the small TOML subset used by experiment configs: comments,
// [table] and [dotted.table] headers, bare or quoted keys, and values that
// are basic strings, literal strings, integers, floats (including inf/nan),
// booleans, or arrays of those (arrays may span lines). Inline tables,
// dates and multi-line strings are rejected. Throws ConfigError with the
// offending line number.
nlohmann::json parse_toml(std::istream& in);
nlohmann::json parse_toml_string(const std::string& text);
nlohmann::json parse_toml_file(const std::string& path);

}  // namespace gbbm
