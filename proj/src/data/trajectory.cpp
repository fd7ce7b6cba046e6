#include "stvsa/data/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "stvsa/numerics/rng.hpp"

namespace stvsa::data {

int label_to_int(LabelState s) { return static_cast<int>(s); }

LabelState label_from_int(int v) {
  switch (v) {
  case 0: return LabelState::kUnstable;
  case 1: return LabelState::kStable;
  case -1: return LabelState::kUnlabeled;
  }
  fail("format", "label value must be 1, 0 or -1, got " + std::to_string(v));
}

std::string origin_to_string(Origin o) {
  return o == Origin::kSimulated ? "simulated" : "gan";
}

Origin origin_from_string(const std::string &s) {
  if (s == "simulated") return Origin::kSimulated;
  if (s == "gan") return Origin::kGenerated;
  fail("format", "unknown origin '" + s + "'");
}

std::string dynamics_to_string(DynamicsClass d) {
  switch (d) {
  case DynamicsClass::kClearStable: return "clear-stable";
  case DynamicsClass::kClearUnstable: return "clear-unstable";
  case DynamicsClass::kAmbiguousStable: return "ambiguous-stable";
  case DynamicsClass::kAmbiguousUnstable: return "ambiguous-unstable";
  }
  return "?";
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct BusProfile {
  double v0 = 1.0;
  double v_dip = 0.4;
  double v_clear = 0.7;
  double v_final = 0.95;
  double tau = 0.3;
  double osc_amp = 0.0;
  double osc_freq = 1.5;
  double osc_phase = 0.0;
  double osc_tau = 0.3;
  double p_base = 0.8;
  double q_base = 0.3;
  double stall = 0.3;
};

// Recovery bands per dynamics class. Ambiguous draws put most buses on the
// true-class band and leave a couple of buses hanging in the 0.75..0.9 pu
// gray zone, so the trajectory cannot be decided by the prelabel rule while
// the sample as a whole still clusters with its class.
void draw_recovery(num::Rng &rng, DynamicsClass cls, bool gray_bus,
                   BusProfile &p) {
  switch (cls) {
  case DynamicsClass::kClearStable:
    p.v_final = rng.uniform(0.95, 0.99);
    p.v_clear = rng.uniform(0.72, 0.82);
    p.tau = rng.uniform(0.15, 0.35);
    p.stall = rng.uniform(0.2, 0.5);
    break;
  case DynamicsClass::kClearUnstable:
    p.v_final = rng.uniform(0.40, 0.60);
    p.v_clear = rng.uniform(0.52, 0.66);
    p.tau = rng.uniform(0.30, 0.60);
    p.stall = rng.uniform(2.0, 2.8);
    break;
  case DynamicsClass::kAmbiguousStable:
    if (gray_bus) {
      p.v_final = rng.uniform(0.78, 0.88);
      p.v_clear = rng.uniform(0.60, 0.70);
      p.tau = rng.uniform(0.6, 1.2);
      p.stall = rng.uniform(0.5, 0.9);
    } else {
      p.v_final = rng.uniform(0.915, 0.97);
      p.v_clear = rng.uniform(0.70, 0.80);
      p.tau = rng.uniform(0.20, 0.45);
      p.stall = rng.uniform(0.3, 0.6);
    }
    break;
  case DynamicsClass::kAmbiguousUnstable:
    if (gray_bus) {
      // sagging bus that never quite collapses: decays slowly from above
      p.v_final = rng.uniform(0.775, 0.85);
      p.v_clear = rng.uniform(0.86, 0.92);
      p.tau = rng.uniform(0.7, 1.4);
      p.stall = rng.uniform(1.0, 1.6);
    } else {
      p.v_final = rng.uniform(0.45, 0.65);
      p.v_clear = rng.uniform(0.55, 0.68);
      p.tau = rng.uniform(0.30, 0.60);
      p.stall = rng.uniform(1.8, 2.6);
    }
    break;
  }
}

} // namespace

TrajectorySample simulate_trajectory(const Scenario &scenario, int bus_count,
                                     double dt, int horizon,
                                     SimOutcome *outcome,
                                     const SimParams &params) {
  if (bus_count <= 0) fail("config", "bus count must be positive");
  if (dt <= 0.0) fail("config", "time step must be positive");
  const double clear_time = kFaultOnsetSeconds + scenario.clearing_time;
  if (horizon * dt < clear_time + 1.0 - 1e-9)
    fail("config", "horizon too short: fault clearing at " +
                     std::to_string(clear_time) +
                     " s needs at least 1 s of settling");
  if (horizon * dt < 3.0 - 1e-9)
    fail("config", "horizon must cover at least 3 s");

  num::Rng rng(scenario.seed);

  // Outcome draw: heavier loading, more motor load, longer faults, and
  // faults closer to the line head all push toward instability.
  const double x = -0.08 + 3.0 * (scenario.load_level - 1.0) +
                   4.0 * (scenario.motor_fraction - 0.75) +
                   16.0 * (scenario.clearing_time - 0.175) +
                   0.6 * (0.4 - scenario.fault_location);
  const double p_unstable = 1.0 / (1.0 + std::exp(-x));
  const bool unstable = rng.uniform() < p_unstable;
  const bool ambiguous = rng.uniform() < params.ambiguous_share;

  DynamicsClass cls;
  if (unstable)
    cls = ambiguous ? DynamicsClass::kAmbiguousUnstable
                    : DynamicsClass::kClearUnstable;
  else
    cls = ambiguous ? DynamicsClass::kAmbiguousStable
                    : DynamicsClass::kClearStable;

  // Buses left in the gray zone for ambiguous draws.
  std::vector<bool> gray(bus_count, false);
  if (ambiguous) {
    int n_gray = 2 + (rng.uniform() < 0.5 ? 1 : 0);
    n_gray = std::min(n_gray, std::max(1, bus_count / 3));
    int placed = 0;
    while (placed < n_gray) {
      std::size_t b = rng.below(static_cast<std::size_t>(bus_count));
      if (!gray[b]) {
        gray[b] = true;
        ++placed;
      }
    }
  }

  const int fault_bus =
    (scenario.line_id * 3 +
     static_cast<int>(scenario.fault_location * bus_count)) %
    bus_count;

  std::vector<BusProfile> prof(bus_count);
  for (int b = 0; b < bus_count; ++b) {
    BusProfile &p = prof[b];
    p.v0 = 1.0 + rng.uniform(-0.01, 0.015);
    const double dist =
      std::abs(b - fault_bus) / static_cast<double>(bus_count);
    p.v_dip = std::clamp(rng.uniform(0.25, 0.45) + 0.3 * dist, 0.2, 0.7);
    draw_recovery(rng, cls, gray[b], p);
    p.osc_amp = rng.uniform(0.005, 0.025);
    p.osc_freq = rng.uniform(1.0, 2.5);
    p.osc_phase = rng.uniform(0.0, kTwoPi);
    p.osc_tau = rng.uniform(0.25, 0.45);
    p.p_base = rng.uniform(0.5, 1.0) * scenario.load_level;
    p.q_base = rng.uniform(0.2, 0.5) * scenario.load_level;
  }

  TrajectorySample s;
  s.bus_count = bus_count;
  s.dt = dt;
  s.horizon = horizon;
  s.scenario_id = scenario.id;
  s.origin = Origin::kSimulated;
  const int fault_step = static_cast<int>(std::lround(kFaultOnsetSeconds / dt));
  s.clear_step = static_cast<int>(std::lround(clear_time / dt));
  s.voltage = num::DenseArray({static_cast<std::size_t>(horizon),
                               static_cast<std::size_t>(bus_count)});
  s.active_power = num::DenseArray(s.voltage.shape);
  s.reactive_power = num::DenseArray(s.voltage.shape);

  for (int t = 0; t < horizon; ++t) {
    const double time = t * dt;
    for (int b = 0; b < bus_count; ++b) {
      const BusProfile &p = prof[b];
      double v;
      if (t < fault_step) {
        v = p.v0;
      } else if (t < s.clear_step) {
        v = p.v_dip;
      } else {
        const double e = time - clear_time;
        v = p.v_final + (p.v_clear - p.v_final) * std::exp(-e / p.tau) +
            p.osc_amp * std::exp(-e / p.osc_tau) *
              std::sin(kTwoPi * p.osc_freq * e + p.osc_phase);
      }
      v += rng.normal(0.0, params.process_noise);
      v = std::max(v, 0.0);
      const bool faulted = t >= fault_step;
      double pw = p.p_base * v * v + rng.normal(0.0, params.process_noise);
      double qw = p.q_base * v * (1.0 - v) +
                  (faulted ? p.stall * scenario.motor_fraction * p.q_base *
                               (1.0 - v) * (1.0 - v)
                           : 0.0) +
                  rng.normal(0.0, params.process_noise);
      s.voltage.at(t, b) = v;
      s.active_power.at(t, b) = pw;
      s.reactive_power.at(t, b) = qw;
    }
  }

  if (outcome) {
    outcome->unstable = unstable;
    outcome->dynamics = cls;
    outcome->p_unstable = p_unstable;
  }
  return s;
}

LabelState prelabel(const TrajectorySample &sample) {
  if (sample.horizon <= 0 || sample.voltage.numel() == 0)
    fail("data", "prelabel requires a full-horizon trajectory");
  const int settle =
    std::min(sample.horizon, static_cast<int>(std::lround(1.0 / sample.dt)));
  const int start = sample.horizon - settle;
  bool all_above = true, all_below = true;
  for (int t = start; t < sample.horizon; ++t)
    for (int b = 0; b < sample.bus_count; ++b) {
      const double v = sample.voltage.at(t, b);
      if (v <= 0.9) all_above = false;
      if (v >= 0.75) all_below = false;
    }
  if (all_above) return LabelState::kStable;
  if (all_below) return LabelState::kUnstable;
  return LabelState::kUnlabeled;
}

num::DenseArray extract_window(const TrajectorySample &sample,
                               double window_seconds) {
  const double ratio = window_seconds / sample.dt;
  const long q = std::lround(ratio);
  if (q < 1 || std::abs(ratio - static_cast<double>(q)) > 1e-9)
    fail("config", "window length " + std::to_string(window_seconds) +
                     " s is not a positive multiple of dt");
  if (sample.clear_step + q > sample.horizon)
    fail("config", "window of " + std::to_string(q) +
                     " steps from clearing exceeds the horizon");
  const std::size_t L = static_cast<std::size_t>(sample.bus_count);
  num::DenseArray w({static_cast<std::size_t>(q), 3 * L});
  for (long t = 0; t < q; ++t) {
    const int src = sample.clear_step + static_cast<int>(t);
    for (std::size_t b = 0; b < L; ++b) {
      w.at(t, b) = sample.voltage.at(src, b);
      w.at(t, L + b) = sample.active_power.at(src, b);
      w.at(t, 2 * L + b) = sample.reactive_power.at(src, b);
    }
  }
  return w;
}

TrajectorySample add_noise(const TrajectorySample &sample, double snr_db,
                           std::uint64_t seed) {
  if (!std::isfinite(snr_db)) fail("config", "SNR must be finite");
  TrajectorySample out = sample;
  num::Rng rng(seed);
  const double ratio = std::pow(10.0, snr_db / 10.0);
  num::DenseArray *channels[3] = {&out.voltage, &out.active_power,
                                  &out.reactive_power};
  for (num::DenseArray *m : channels) {
    const std::size_t T = m->shape[0], L = m->shape[1];
    for (std::size_t b = 0; b < L; ++b) {
      double power = 0.0;
      for (std::size_t t = 0; t < T; ++t)
        power += m->at(t, b) * m->at(t, b);
      power /= static_cast<double>(T);
      if (power <= 0.0) continue; // degenerate channel, no noise
      const double sigma = std::sqrt(power / ratio);
      for (std::size_t t = 0; t < T; ++t)
        m->at(t, b) += rng.normal(0.0, sigma);
    }
  }
  for (double &v : out.voltage.values) v = std::max(v, 0.0);
  return out;
}

} // namespace stvsa::data
