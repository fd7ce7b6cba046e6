#pragma once

#include <cstdint>
#include <vector>

#include "stvsa/error.hpp"

namespace stvsa::data {

/// One contingency: operating point, faulted line, fault position along the
/// line, and clearing time. The fault itself is applied at 0.1 s.
struct Scenario {
  int id = 0;
  double load_level = 1.0;     // fraction of base load: 0.8 / 1.0 / 1.2
  double motor_fraction = 0.7; // share of motor load: 0.6 / 0.7 / 0.8 / 0.9
  int line_id = 0;
  double fault_location = 0.0; // fraction along the line: 0, 0.2, ..., 0.8
  double clearing_time = 0.175; // seconds, in [0.15, 0.2]
  std::uint64_t seed = 0;
};

struct GridConfig {
  int line_count = 10;
  int clearing_time_count = 2;
  std::uint64_t seed = 1;
};

constexpr double kFaultOnsetSeconds = 0.1;

/// Cartesian product of the factor levels, deterministic ordering
/// (load, motor fraction, line, location, clearing time).
std::vector<Scenario> build_scenario_grid(const GridConfig &config);

} // namespace stvsa::data
