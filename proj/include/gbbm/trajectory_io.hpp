#pragma once

#include <iosfwd>

#include <json.hpp>

#include "gbbm/flow.hpp"

namespace gbbm {

/// One row per recorded state (every `stride`-th step plus the last):
/// t, conserved, energy, then n, re, im for each retained mode.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int stride = 1);

/// Same rows as the CSV: {"params": ..., "rows": [{"t", "conserved", "energy", "modes": [[n,re,im],...]}]}.
nlohmann::json trajectory_to_json(const Trajectory& traj, int stride = 1);

}  // namespace gbbm
