#include "gbbm/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace gbbm {
namespace {

using nlohmann::json;

constexpr std::pair<Experiment, std::string_view> kNames[] = {
    {Experiment::simulate, "simulate"},
    {Experiment::conservation, "conservation"},
    {Experiment::liouville, "liouville"},
    {Experiment::transport, "transport"},
    {Experiment::energy, "energy"},
    {Experiment::large_deviation, "large-deviation"},
    {Experiment::singular_demo, "singular-demo"},
    {Experiment::dk_diagnostic, "dk-diagnostic"},
};

[[noreturn]] void bad_type(const std::string& key, const char* expected) {
  throw ConfigError("config key '" + key + "' must be " + expected);
}

double as_real(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  bad_type(key, "a number");
}

std::int64_t as_integer(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e15) return static_cast<std::int64_t>(x);
  }
  bad_type(key, "an integer");
}

int as_int(const json& v, const std::string& key) {
  const std::int64_t x = as_integer(v, key);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) bad_type(key, "a 32-bit integer");
  return static_cast<int>(x);
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) bad_type(key, "a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& key) {
  if (!v.is_array()) bad_type(key, "an array");
  return v;
}

json real_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  for (const auto& [value, name] : kNames)
    if (value == e) return name;
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [value, spelled] : kNames)
    if (spelled == name) return value;
  return std::nullopt;
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> list = [] {
    std::vector<Experiment> out;
    for (const auto& entry : kNames) out.push_back(entry.first);
    return out;
  }();
  return list;
}

ValidationError::ValidationError(std::vector<std::string> diagnostics)
    : Error([&] {
        std::string msg = "invalid configuration:";
        for (const std::string& d : diagnostics) msg += "\n  " + d;
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

json set_to_json(const SetSpec& set) {
  if (const auto* ball = std::get_if<SobolevBall>(&set))
    return json{{"kind", "sobolev_ball"}, {"sigma", ball->sigma}, {"radius", real_to_json(ball->radius)}};
  const auto& half = std::get<HalfSpace>(set);
  return json{{"kind", "half_space"},
              {"mode", half.mode},
              {"component", half.component == Component::re ? "re" : "im"},
              {"threshold", half.threshold}};
}

SetSpec set_from_json(const json& j) {
  if (!j.is_object()) bad_type("set", "a table");
  const std::string kind = j.contains("kind") ? as_string(j.at("kind"), "set.kind") : "sobolev_ball";
  if (kind == "sobolev_ball") {
    SobolevBall ball;
    for (const auto& [key, value] : j.items()) {
      if (key == "kind") continue;
      if (key == "sigma") ball.sigma = as_real(value, "set.sigma");
      else if (key == "radius") ball.radius = as_real(value, "set.radius");
      else throw ConfigError("unknown config key 'set." + key + "' for a sobolev_ball");
    }
    return ball;
  }
  if (kind == "half_space") {
    HalfSpace half;
    for (const auto& [key, value] : j.items()) {
      if (key == "kind") continue;
      if (key == "mode") {
        half.mode = as_int(value, "set.mode");
      } else if (key == "threshold") {
        half.threshold = as_real(value, "set.threshold");
      } else if (key == "component") {
        const std::string c = as_string(value, "set.component");
        if (c != "re" && c != "im") throw ConfigError("config key 'set.component' must be \"re\" or \"im\"");
        half.component = c == "re" ? Component::re : Component::im;
      } else {
        throw ConfigError("unknown config key 'set." + key + "' for a half_space");
      }
    }
    return half;
  }
  throw ConfigError("config key 'set.kind' must be \"sobolev_ball\" or \"half_space\"");
}

double ExperimentConfig::effective_tolerance() const {
  if (tolerance) return *tolerance;
  switch (experiment) {
    case Experiment::simulate:
    case Experiment::conservation:
    case Experiment::liouville: return 1e-6;
    case Experiment::transport: return 3.0;
    case Experiment::energy: return 1e-9;
    case Experiment::large_deviation: return 0.6;
    case Experiment::singular_demo: return 0.05;
    case Experiment::dk_diagnostic: return 0.0;
  }
  return 0.0;
}

std::vector<int> ExperimentConfig::effective_basis_dims() const {
  if (!basis_dims.empty()) return basis_dims;
  std::vector<int> dims;
  for (int d = 1; d < n_modes; d *= 2) dims.push_back(d);
  dims.push_back(n_modes);
  return dims;
}

json ExperimentConfig::canonical_json() const {
  json j;
  j["experiment"] = std::string(experiment_name(experiment));
  j["gamma"] = gamma;
  j["s"] = s;
  j["n_modes"] = n_modes;
  j["t"] = t;
  j["dt"] = dt;
  j["samples"] = samples;
  j["seed"] = seed;
  j["r"] = real_to_json(r);
  j["eps"] = eps;
  j["eps1"] = eps1;
  j["kappa"] = kappa;
  j["safety"] = safety;
  j["oversample"] = oversample;
  j["p_list"] = p_list;
  j["n_list"] = n_list;
  j["basis_dims"] = basis_dims;
  j["set"] = set_to_json(set);
  j["initial"] = initial;
  j["stride"] = stride;
  j["tolerance"] = tolerance ? json(*tolerance) : json(nullptr);
  return j;
}

json ExperimentConfig::to_json() const {
  json j = canonical_json();
  j["out_dir"] = out_dir;
  j["workers"] = workers;
  return j;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig ExperimentConfig::merged(const json& overrides) const {
  if (!overrides.is_object()) throw ConfigError("config must be a table of keys");
  ExperimentConfig c = *this;
  for (const auto& [key, v] : overrides.items()) {
    if (key == "experiment") {
      const auto e = parse_experiment(as_string(v, key));
      if (!e) throw ConfigError("unknown experiment '" + v.get<std::string>() + "'");
      c.experiment = *e;
    } else if (key == "gamma") {
      c.gamma = as_real(v, key);
    } else if (key == "s") {
      c.s = as_int(v, key);
    } else if (key == "n_modes") {
      c.n_modes = as_int(v, key);
    } else if (key == "t") {
      c.t = as_real(v, key);
    } else if (key == "dt") {
      c.dt = as_real(v, key);
    } else if (key == "samples") {
      c.samples = as_integer(v, key);
    } else if (key == "seed") {
      if (v.is_number_unsigned()) {
        c.seed = v.get<std::uint64_t>();
      } else {
        const std::int64_t x = as_integer(v, key);
        if (x < 0) bad_type(key, "a nonnegative integer");
        c.seed = static_cast<std::uint64_t>(x);
      }
    } else if (key == "r") {
      c.r = as_real(v, key);
    } else if (key == "eps") {
      c.eps = as_real(v, key);
    } else if (key == "eps1") {
      c.eps1 = as_real(v, key);
    } else if (key == "kappa") {
      c.kappa = as_real(v, key);
    } else if (key == "safety") {
      c.safety = as_real(v, key);
    } else if (key == "oversample") {
      c.oversample = as_int(v, key);
    } else if (key == "p_list") {
      c.p_list.clear();
      for (const json& x : as_array(v, key)) c.p_list.push_back(as_real(x, key));
    } else if (key == "n_list") {
      c.n_list.clear();
      for (const json& x : as_array(v, key)) c.n_list.push_back(as_int(x, key));
    } else if (key == "basis_dims") {
      c.basis_dims.clear();
      for (const json& x : as_array(v, key)) c.basis_dims.push_back(as_int(x, key));
    } else if (key == "set") {
      c.set = set_from_json(v);
    } else if (key == "initial") {
      c.initial = as_string(v, key);
    } else if (key == "stride") {
      c.stride = as_int(v, key);
    } else if (key == "tolerance") {
      c.tolerance = v.is_null() ? std::nullopt : std::optional<double>(as_real(v, key));
    } else if (key == "out_dir") {
      c.out_dir = as_string(v, key);
    } else if (key == "workers") {
      const std::int64_t w = as_integer(v, key);
      if (w < 0) bad_type(key, "a nonnegative integer");
      c.workers = static_cast<unsigned>(w);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) { return ExperimentConfig{}.merged(j); }

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> out;
  auto add = [&out](const std::string& field, const std::string& what) { out.push_back(field + ": " + what); };
  auto num = [](double x) {
    std::ostringstream os;
    os << x;
    return os.str();
  };
  const Experiment e = c.experiment;

  if (!(c.gamma > 1.0)) add("gamma", "gamma = " + num(c.gamma) + " but the model requires gamma > 1");
  if (c.s < 1) add("s", "s = " + std::to_string(c.s) + " but s >= 1 is required");
  if (!(c.s >= 0.5 * c.gamma))
    add("s", "s = " + std::to_string(c.s) + " is below gamma/2 = " + num(0.5 * c.gamma) + "; need s >= gamma/2");
  if (c.n_modes < 1) add("n_modes", "must be >= 1");
  if (!std::isfinite(c.t)) add("t", "must be finite");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) add("dt", "must be positive and finite");
  if (!(c.r > 0.0)) add("r", "cutoff radius must be positive (inf disables it)");
  if (c.stride < 1) add("stride", "must be >= 1");
  if (c.tolerance && !(*c.tolerance >= 0.0)) add("tolerance", "must be nonnegative");
  if (c.initial != "sample" && c.initial != "smooth" && !std::filesystem::exists(c.initial))
    add("initial", "'" + c.initial + "' is neither \"sample\", \"smooth\" nor an existing field file");

  switch (e) {
    case Experiment::liouville:
      if (c.n_modes > 20) add("n_modes", "liouville builds a dense 2N x 2N Jacobian; need n_modes <= 20");
      break;
    case Experiment::transport: {
      if (c.samples < 1000) add("samples", "transport needs at least 1000 samples");
      if (const auto* half = std::get_if<HalfSpace>(&c.set)) {
        if (half->mode < 1 || half->mode > c.n_modes) add("set.mode", "must lie in [1, n_modes]");
      } else {
        const auto& ball = std::get<SobolevBall>(c.set);
        if (!(ball.radius > 0.0)) add("set.radius", "must be positive");
        if (!std::isfinite(ball.sigma)) add("set.sigma", "must be finite");
      }
      break;
    }
    case Experiment::energy:
      if (c.samples < 1) add("samples", "must be >= 1");
      if (c.oversample < 3) add("oversample", "the quadrature of v^2 needs oversample >= 3");
      if (!(c.safety >= 1.0)) add("safety", "must be >= 1");
      if (!(c.kappa >= 1.0 && c.kappa < 2.0)) add("kappa", "must lie in [1, 2)");
      if (!(c.eps > 0.0)) add("eps", "must be positive");
      if (!(c.eps1 > 0.0)) add("eps1", "must be positive");
      if (c.s == 1 && !(c.gamma > 4.0 / 3.0 + 10.0 * c.eps / 3.0))
        add("gamma", "the s = 1 estimate needs gamma > 4/3 + 10 eps/3");
      break;
    case Experiment::large_deviation:
      if (c.samples < 10000) add("samples", "large-deviation needs at least 10^4 samples");
      if (!(c.eps > 0.0)) add("eps", "must be positive");
      if (c.p_list.size() < 2) add("p_list", "needs at least two exponents for a slope");
      for (double p : c.p_list)
        if (!(p >= 2.0 && p <= 128.0)) {
          add("p_list", "every p must lie in [2, 128]");
          break;
        }
      break;
    case Experiment::singular_demo:
      if (!(c.gamma > 4.0 / 3.0 && c.gamma < 1.5))
        add("gamma", "gamma = " + num(c.gamma) +
                         " is outside the window (4/3, 3/2) where the transported shift leaves H^{s+gamma/2}");
      if (c.t == 0.0) add("t", "must be nonzero");
      if (c.n_list.size() < 3) add("n_list", "needs at least three cutoffs");
      for (std::size_t i = 0; i < c.n_list.size(); ++i)
        if (c.n_list[i] < 1 || (i > 0 && c.n_list[i] <= c.n_list[i - 1])) {
          add("n_list", "must be positive and strictly increasing");
          break;
        }
      break;
    case Experiment::dk_diagnostic:
      for (int d : c.basis_dims)
        if (d < 1 || d > c.n_modes) {
          add("basis_dims", "every dimension must lie in [1, n_modes]");
          break;
        }
      break;
    case Experiment::simulate:
    case Experiment::conservation:
      break;
  }
  return out;
}

}  // namespace gbbm
