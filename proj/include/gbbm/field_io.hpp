#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbbm/spectral_field.hpp"

namespace gbbm {

// Field serialization: JSON array of [n, re, im] triples, or CSV with
// columns n,re,im. Doubles are written with 17 significant digits so that
// parsing restores them bit for bit. Modes missing from the input are zero;
// n_max is the largest n present.

nlohmann::json field_to_json(const SpectralField& u);
SpectralField field_from_json(const nlohmann::json& j);

void write_field_csv(std::ostream& os, const SpectralField& u);
SpectralField read_field_csv(std::istream& is);

/// Decimal representation with 17 significant digits.
std::string format_double(double x);

/// Reads a field from a .json or .csv file, chosen by extension.
SpectralField load_field(const std::string& path);

}  // namespace gbbm
