#pragma once

#include <cstdint>
#include <string>

#include "stvsa/data/scenario.hpp"
#include "stvsa/numerics/array.hpp"

namespace stvsa::data {

enum class LabelState { kUnstable = 0, kStable = 1, kUnlabeled = -1 };
enum class Origin { kSimulated, kGenerated };

int label_to_int(LabelState s);
LabelState label_from_int(int v);
std::string origin_to_string(Origin o);
Origin origin_from_string(const std::string &s);

/// How a simulated contingency plays out. Clear draws settle inside the
/// decidable voltage bands; ambiguous draws leave a few buses in the
/// 0.75..0.9 pu gray zone so the rule-based prelabel abstains.
enum class DynamicsClass {
  kClearStable,
  kClearUnstable,
  kAmbiguousStable,
  kAmbiguousUnstable,
};
std::string dynamics_to_string(DynamicsClass d);

struct SimOutcome {
  bool unstable = false;
  DynamicsClass dynamics = DynamicsClass::kClearStable;
  double p_unstable = 0.0;
};

/// Post-disturbance multivariate time series for one contingency:
/// voltage / active power / reactive power per bus, row per time step.
struct TrajectorySample {
  long sample_id = -1;
  int bus_count = 0;
  double dt = 0.01;
  int horizon = 0;     // steps
  int clear_step = 0;  // first step after fault clearing
  num::DenseArray voltage;        // [horizon, L], per-unit
  num::DenseArray active_power;   // [horizon, L]
  num::DenseArray reactive_power; // [horizon, L]
  LabelState label = LabelState::kUnlabeled;
  Origin origin = Origin::kSimulated;
  long scenario_id = -1;
};

struct SimParams {
  double ambiguous_share = 0.30;
  double process_noise = 0.002;
};

/// Parametric surrogate for a time-domain contingency simulation. Every bus
/// voltage dips at the 0.1 s fault, then recovers (or collapses) after
/// clearing as v_final + (v_clear - v_final) * exp(-t/tau) plus a damped
/// oscillation. Heavier loading, more motor load, and longer faults skew the
/// outcome draw toward instability. Fully reproducible from scenario.seed.
TrajectorySample simulate_trajectory(const Scenario &scenario, int bus_count,
                                     double dt, int horizon,
                                     SimOutcome *outcome = nullptr,
                                     const SimParams &params = {});

/// Domain-knowledge rule over the final settling second: stable if every bus
/// voltage stays above 0.9 pu, unstable if every bus voltage stays below
/// 0.75 pu, otherwise unlabeled.
LabelState prelabel(const TrajectorySample &sample);

/// Observation window of T seconds starting at fault clearing. Row t is
/// (U_{t,1..L}, P_{t,1..L}, Q_{t,1..L}), so the result is [q, 3L] with
/// q = T / dt.
num::DenseArray extract_window(const TrajectorySample &sample,
                               double window_seconds);

/// Additive zero-mean Gaussian measurement noise, one noise power per
/// channel (bus x quantity), set from that channel's full-horizon signal
/// power and the target signal-to-noise ratio.
TrajectorySample add_noise(const TrajectorySample &sample, double snr_db,
                           std::uint64_t seed);

} // namespace stvsa::data
