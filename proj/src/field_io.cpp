#include "gbbm/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "gbbm/error.hpp"

namespace gbbm {
namespace {

SpectralField from_triples(const std::map<int, Complex>& modes) {
  if (modes.empty()) throw DomainError("field: no modes");
  const int n_max = modes.rbegin()->first;
  std::vector<Complex> c(static_cast<std::size_t>(n_max));
  for (const auto& [n, value] : modes) c[n - 1] = value;
  return SpectralField(std::move(c));
}

void insert_mode(std::map<int, Complex>& modes, long long n, double re, double im) {
  if (n < 1) throw DomainError("field: mode index must be >= 1");
  if (!modes.emplace(static_cast<int>(n), Complex{re, im}).second)
    throw DomainError("field: duplicate mode " + std::to_string(n));
}

}  // namespace

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json field_to_json(const SpectralField& u) {
  nlohmann::json out = nlohmann::json::array();
  for (int n = 1; n <= u.n_max(); ++n) out.push_back({n, u[n].real(), u[n].imag()});
  return out;
}

SpectralField field_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DomainError("field JSON must be an array of [n, re, im]");
  std::map<int, Complex> modes;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != 3) throw DomainError("field JSON rows must be [n, re, im]");
    insert_mode(modes, row[0].get<long long>(), row[1].get<double>(), row[2].get<double>());
  }
  return from_triples(modes);
}

void write_field_csv(std::ostream& os, const SpectralField& u) {
  os << "n,re,im\n";
  for (int n = 1; n <= u.n_max(); ++n)
    os << n << ',' << format_double(u[n].real()) << ',' << format_double(u[n].imag()) << '\n';
}

SpectralField read_field_csv(std::istream& is) {
  std::map<int, Complex> modes;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("n,re,im", 0) != 0) throw DomainError("field CSV: expected header n,re,im");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
      throw DomainError("field CSV: malformed row '" + line + "'");
    insert_mode(modes, std::stoll(a), std::strtod(b.c_str(), nullptr), std::strtod(c.c_str(), nullptr));
  }
  return from_triples(modes);
}

SpectralField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open field file " + path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return field_from_json(nlohmann::json::parse(in));
  }
  return read_field_csv(in);
}

}  // namespace gbbm
