#include "gbbm/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gbbm/error.hpp"

namespace gbbm {
namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(std::istream& in) : in_(in) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    while (next_line()) {
      skip_ws();
      if (at_end() || peek() == '#') continue;
      if (peek() == '[') {
        table = &open_table(root);
      } else {
        parse_pair(*table);
      }
      skip_ws();
      if (!at_end() && peek() != '#') fail("unexpected trailing characters");
    }
    return root;
  }

 private:
  bool next_line() {
    if (!std::getline(in_, line_)) return false;
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    pos_ = 0;
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << "config line " << line_no_ << ": " << what;
    throw ConfigError(msg.str());
  }

  bool at_end() const { return pos_ >= line_.size(); }
  char peek() const { return line_[pos_]; }
  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string parse_key_part() {
    skip_ws();
    if (at_end()) fail("missing key");
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("invalid key");
    return line_.substr(start, pos_ - start);
  }

  std::vector<std::string> parse_key() {
    std::vector<std::string> parts{parse_key_part()};
    skip_ws();
    while (!at_end() && peek() == '.') {
      ++pos_;
      parts.push_back(parse_key_part());
      skip_ws();
    }
    return parts;
  }

  json& descend(json& root, const std::vector<std::string>& path, std::size_t count) {
    json* node = &root;
    for (std::size_t i = 0; i < count; ++i) {
      json& child = (*node)[path[i]];
      if (child.is_null()) child = json::object();
      if (!child.is_object()) fail("key '" + path[i] + "' is not a table");
      node = &child;
    }
    return *node;
  }

  json& open_table(json& root) {
    expect('[');
    if (!at_end() && peek() == '[') fail("arrays of tables are not supported");
    const std::vector<std::string> path = parse_key();
    expect(']');
    return descend(root, path, path.size());
  }

  void parse_pair(json& table) {
    const std::vector<std::string> path = parse_key();
    expect('=');
    json& parent = descend(table, path, path.size() - 1);
    if (parent.contains(path.back())) fail("duplicate key '" + path.back() + "'");
    skip_ws();
    parent[path.back()] = parse_value();
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string");
      const char c = line_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated escape");
      switch (line_[pos_++]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail("unsupported escape sequence");
      }
    }
  }

  std::string parse_literal_string() {
    expect('\'');
    const std::size_t end = line_.find('\'', pos_);
    if (end == std::string::npos) fail("unterminated string");
    std::string out = line_.substr(pos_, end - pos_);
    pos_ = end + 1;
    return out;
  }

  // Skips whitespace, comments and line breaks inside an array.
  void skip_array_space() {
    while (true) {
      skip_ws();
      if (!at_end() && peek() != '#') return;
      if (!next_line()) fail("unterminated array");
    }
  }

  json parse_array() {
    expect('[');
    json out = json::array();
    while (true) {
      skip_array_space();
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      out.push_back(parse_value());
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json parse_value() {
    if (at_end()) fail("missing value");
    const char c = peek();
    if (c == '"') {
      if (line_.compare(pos_, 3, "\"\"\"") == 0) fail("multi-line strings are not supported");
      return parse_basic_string();
    }
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') fail("inline tables are not supported");

    const std::size_t start = pos_;
    while (!at_end() && peek() != ',' && peek() != ']' && peek() != '#' && peek() != ' ' && peek() != '\t') ++pos_;
    std::string token = line_.substr(start, pos_ - start);
    if (token == "true") return true;
    if (token == "false") return false;
    return parse_number(token);
  }

  json parse_number(std::string token) {
    if (token.empty()) fail("missing value");
    std::string digits;
    for (char c : token)
      if (c != '_') digits += c;
    std::string body = digits;
    double sign = 1.0;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
      sign = body[0] == '-' ? -1.0 : 1.0;
      body.erase(0, 1);
    }
    if (body == "inf") return sign * std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();

    const bool is_float = digits.find_first_of(".eE") != std::string::npos;
    const char* first = digits.data();
    const char* last = digits.data() + digits.size();
    if (*first == '+') ++first;
    if (is_float) {
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last) fail("invalid number '" + token + "'");
      return value;
    }
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail("invalid value '" + token + "'");
    return value;
  }

  std::istream& in_;
  std::string line_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

}  // namespace

nlohmann::json parse_toml(std::istream& in) { return Parser(in).parse(); }

nlohmann::json parse_toml_string(const std::string& text) {
  std::istringstream is(text);
  return parse_toml(is);
}

nlohmann::json parse_toml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_toml(in);
}

}  // namespace gbbm
