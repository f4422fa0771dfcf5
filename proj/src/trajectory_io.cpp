#include "gbbm/trajectory_io.hpp"

#include <ostream>

#include "gbbm/error.hpp"
#include "gbbm/field_io.hpp"

namespace gbbm {
namespace {

template <class Fn>
void for_each_row(const Trajectory& traj, int stride, Fn&& fn) {
  if (stride < 1) throw DomainError("trajectory export: stride must be >= 1");
  const std::size_t last = traj.size() - 1;
  for (std::size_t k = 0; k < traj.size(); k += static_cast<std::size_t>(stride)) fn(k);
  if (last % static_cast<std::size_t>(stride) != 0) fn(last);
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int stride) {
  const int n_modes = traj.params.n_modes();
  os << "t,conserved,energy";
  for (int n = 1; n <= n_modes; ++n) os << ",n" << n << ",re" << n << ",im" << n;
  os << '\n';
  for_each_row(traj, stride, [&](std::size_t k) {
    os << format_double(traj.times[k]) << ',' << format_double(traj.conserved_log[k]) << ','
       << format_double(traj.energy_log[k]);
    const SpectralField& u = traj.states[k];
    for (int n = 1; n <= n_modes; ++n)
      os << ',' << n << ',' << format_double(u[n].real()) << ',' << format_double(u[n].imag());
    os << '\n';
  });
}

nlohmann::json trajectory_to_json(const Trajectory& traj, int stride) {
  nlohmann::json rows = nlohmann::json::array();
  for_each_row(traj, stride, [&](std::size_t k) {
    rows.push_back({{"t", traj.times[k]},
                    {"conserved", traj.conserved_log[k]},
                    {"energy", traj.energy_log[k]},
                    {"modes", field_to_json(traj.states[k].resized(traj.params.n_modes()))}});
  });
  return {{"params",
           {{"gamma", traj.params.gamma()},
            {"s", traj.params.s()},
            {"n_modes", traj.params.n_modes()},
            {"nonlinear", traj.params.nonlinear()}}},
          {"max_relative_drift", traj.max_relative_drift()},
          {"flagged", traj.flagged},
          {"rows", std::move(rows)}};
}

}  // namespace gbbm
