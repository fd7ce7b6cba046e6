#include "stvsa/data/scenario.hpp"

#include "stvsa/numerics/rng.hpp"

namespace stvsa::data {

std::vector<Scenario> build_scenario_grid(const GridConfig &config) {
  if (config.line_count <= 0)
    fail("config", "scenario grid needs at least one line");
  if (config.clearing_time_count <= 0)
    fail("config", "scenario grid needs at least one clearing time");

  static const double kLoads[] = {0.8, 1.0, 1.2};
  static const double kMotors[] = {0.6, 0.7, 0.8, 0.9};
  static const double kLocations[] = {0.0, 0.2, 0.4, 0.6, 0.8};

  std::vector<double> clearing_times;
  const int k = config.clearing_time_count;
  for (int i = 0; i < k; ++i) {
    clearing_times.push_back(
      k == 1 ? 0.175 : 0.15 + 0.05 * static_cast<double>(i) / (k - 1));
  }

  std::vector<Scenario> grid;
  grid.reserve(3 * 4 * config.line_count * 5 * k);
  int id = 0;
  for (double load : kLoads)
    for (double motor : kMotors)
      for (int line = 0; line < config.line_count; ++line)
        for (double loc : kLocations)
          for (double ct : clearing_times) {
            Scenario s;
            s.id = id;
            s.load_level = load;
            s.motor_fraction = motor;
            s.line_id = line;
            s.fault_location = loc;
            s.clearing_time = ct;
            s.seed = num::mix_seed(config.seed,
                                   static_cast<std::uint64_t>(id) + 1);
            grid.push_back(s);
            ++id;
          }
  return grid;
}

} // namespace stvsa::data
