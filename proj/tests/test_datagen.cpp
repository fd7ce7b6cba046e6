#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "stvsa/data/dataset.hpp"
#include "stvsa/data/scenario.hpp"
#include "stvsa/data/trajectory.hpp"
#include "stvsa/numerics/rng.hpp"

using namespace stvsa;
using data::DynamicsClass;
using data::LabelState;
using data::Scenario;
using data::SimOutcome;
using data::TrajectorySample;

namespace {

Scenario default_scenario(std::uint64_t seed) {
  Scenario s;
  s.id = 1;
  s.load_level = 1.0;
  s.motor_fraction = 0.7;
  s.line_id = 2;
  s.fault_location = 0.4;
  s.clearing_time = 0.18;
  s.seed = seed;
  return s;
}

double final_second_min(const TrajectorySample &s) {
  const int settle = static_cast<int>(std::lround(1.0 / s.dt));
  double m = 1e30;
  for (int t = s.horizon - settle; t < s.horizon; ++t)
    for (int b = 0; b < s.bus_count; ++b) m = std::min(m, s.voltage.at(t, b));
  return m;
}

double final_second_max(const TrajectorySample &s) {
  const int settle = static_cast<int>(std::lround(1.0 / s.dt));
  double m = -1e30;
  for (int t = s.horizon - settle; t < s.horizon; ++t)
    for (int b = 0; b < s.bus_count; ++b) m = std::max(m, s.voltage.at(t, b));
  return m;
}

} // namespace

TEST_CASE("scenario grid sizes follow the factor product") {
  data::GridConfig cfg;
  cfg.line_count = 1;
  cfg.clearing_time_count = 1;
  CHECK(data::build_scenario_grid(cfg).size() == 60); // 3 * 4 * 1 * 5 * 1

  cfg.line_count = 4;
  cfg.clearing_time_count = 2;
  CHECK(data::build_scenario_grid(cfg).size() == 480);

  cfg.line_count = 0;
  CHECK_THROWS_AS(data::build_scenario_grid(cfg), Error);
}

TEST_CASE("scenario grid values stay in the enumerated ranges") {
  data::GridConfig cfg;
  cfg.line_count = 3;
  cfg.clearing_time_count = 4;
  auto grid = data::build_scenario_grid(cfg);
  std::set<std::uint64_t> seeds;
  for (const Scenario &s : grid) {
    CHECK((s.load_level == 0.8 || s.load_level == 1.0 || s.load_level == 1.2));
    CHECK(s.motor_fraction >= 0.6);
    CHECK(s.motor_fraction <= 0.9);
    CHECK(s.fault_location >= 0.0);
    CHECK(s.fault_location <= 0.8);
    CHECK(s.clearing_time >= 0.15);
    CHECK(s.clearing_time <= 0.2);
    seeds.insert(s.seed);
  }
  CHECK(seeds.size() == grid.size()); // every scenario owns its seed
}

TEST_CASE("surrogate: clear draws settle inside the decidable bands") {
  int seen_stable = 0, seen_unstable = 0;
  for (std::uint64_t seed = 1; seed < 200 &&
                               (seen_stable < 20 || seen_unstable < 20);
       ++seed) {
    SimOutcome outcome;
    TrajectorySample s =
      data::simulate_trajectory(default_scenario(seed), 10, 0.01, 300,
                                &outcome);
    if (outcome.dynamics == DynamicsClass::kClearStable) {
      ++seen_stable;
      CHECK(final_second_min(s) >= 0.9);
      CHECK(data::prelabel(s) == LabelState::kStable);
      CHECK_FALSE(outcome.unstable);
    } else if (outcome.dynamics == DynamicsClass::kClearUnstable) {
      ++seen_unstable;
      CHECK(final_second_max(s) <= 0.75);
      CHECK(data::prelabel(s) == LabelState::kUnstable);
      CHECK(outcome.unstable);
    }
  }
  CHECK(seen_stable >= 20);
  CHECK(seen_unstable >= 20);
}

TEST_CASE("surrogate: ambiguous draws abstain and agree with ground truth") {
  int seen = 0;
  for (std::uint64_t seed = 1; seed < 400 && seen < 40; ++seed) {
    SimOutcome outcome;
    TrajectorySample s =
      data::simulate_trajectory(default_scenario(seed), 10, 0.01, 300,
                                &outcome);
    if (outcome.dynamics == DynamicsClass::kAmbiguousStable ||
        outcome.dynamics == DynamicsClass::kAmbiguousUnstable) {
      ++seen;
      CHECK(data::prelabel(s) == LabelState::kUnlabeled);
    }
  }
  CHECK(seen >= 40);
}

TEST_CASE("surrogate: determinism and validity") {
  SimOutcome o1, o2;
  TrajectorySample a =
    data::simulate_trajectory(default_scenario(7), 10, 0.01, 300, &o1);
  TrajectorySample b =
    data::simulate_trajectory(default_scenario(7), 10, 0.01, 300, &o2);
  CHECK(a.voltage.values == b.voltage.values);
  CHECK(a.active_power.values == b.active_power.values);
  CHECK(a.reactive_power.values == b.reactive_power.values);
  CHECK(o1.unstable == o2.unstable);
  for (double v : a.voltage.values) CHECK(v >= 0.0);

  // horizon too short for fault + settling
  CHECK_THROWS_AS(
    data::simulate_trajectory(default_scenario(7), 10, 0.01, 100, nullptr),
    Error);
}

TEST_CASE("prelabel applies the 0.9 / 0.75 rule on the final second") {
  TrajectorySample s;
  s.bus_count = 2;
  s.dt = 0.01;
  s.horizon = 300;
  s.clear_step = 28;
  s.voltage = num::DenseArray({300, 2});
  s.active_power = num::DenseArray({300, 2});
  s.reactive_power = num::DenseArray({300, 2});

  s.voltage.fill(0.98);
  CHECK(data::prelabel(s) == LabelState::kStable);

  s.voltage.fill(0.5);
  CHECK(data::prelabel(s) == LabelState::kUnstable);

  // final window spans 0.8..0.95: neither band
  for (int t = 0; t < 300; ++t) {
    s.voltage.at(t, 0) = 0.8;
    s.voltage.at(t, 1) = 0.95;
  }
  CHECK(data::prelabel(s) == LabelState::kUnlabeled);
}

TEST_CASE("window extraction") {
  SimOutcome outcome;
  TrajectorySample s =
    data::simulate_trajectory(default_scenario(9), 10, 0.01, 300, &outcome);

  num::DenseArray w = data::extract_window(s, 0.03);
  CHECK(w.shape[0] == 3); // 30 ms at 10 ms sampling
  CHECK(w.shape[1] == 30);

  num::DenseArray w5 = data::extract_window(s, 0.05);
  CHECK(w5.shape[0] == 5);

  CHECK_THROWS_AS(data::extract_window(s, 0.025), Error); // not a multiple
  CHECK_THROWS_AS(data::extract_window(s, 10.0), Error);  // exceeds horizon

  // values preserved exactly, ordered (U..., P..., Q...) per step
  for (int t = 0; t < 3; ++t)
    for (int b = 0; b < 10; ++b) {
      CHECK(w.at(t, b) == s.voltage.at(s.clear_step + t, b));
      CHECK(w.at(t, 10 + b) == s.active_power.at(s.clear_step + t, b));
      CHECK(w.at(t, 20 + b) == s.reactive_power.at(s.clear_step + t, b));
    }
}

TEST_CASE("noise injection hits the requested signal-to-noise ratio") {
  SimOutcome outcome;
  TrajectorySample s =
    data::simulate_trajectory(default_scenario(13), 10, 0.01, 300, &outcome);

  for (double snr : {30.0, 20.0}) {
    TrajectorySample noisy = data::add_noise(s, snr, 99);
    // pooled over all channels: sum of signal power over sum of noise power
    double sig = 0.0, noise = 0.0;
    const num::DenseArray *clean[3] = {&s.voltage, &s.active_power,
                                       &s.reactive_power};
    const num::DenseArray *dirty[3] = {&noisy.voltage, &noisy.active_power,
                                       &noisy.reactive_power};
    for (int m = 0; m < 3; ++m)
      for (std::size_t i = 0; i < clean[m]->numel(); ++i) {
        sig += clean[m]->values[i] * clean[m]->values[i];
        const double d = dirty[m]->values[i] - clean[m]->values[i];
        noise += d * d;
      }
    const double measured = 10.0 * std::log10(sig / noise);
    CHECK(std::abs(measured - snr) < 0.5);
  }

  // very large SNR leaves the sample numerically unchanged
  TrajectorySample quiet = data::add_noise(s, 200.0, 99);
  for (std::size_t i = 0; i < s.voltage.numel(); ++i)
    CHECK(std::abs(quiet.voltage.values[i] - s.voltage.values[i]) < 1e-9);

  // determinism
  TrajectorySample n1 = data::add_noise(s, 30.0, 5);
  TrajectorySample n2 = data::add_noise(s, 30.0, 5);
  CHECK(n1.voltage.values == n2.voltage.values);
}

TEST_CASE("stratified split keeps the ratio per class") {
  data::WindowSet set;
  set.q = 1;
  set.feature_dim = 2;
  for (int i = 0; i < 1200; ++i) {
    data::WindowRecord r;
    r.sample_id = i;
    r.label = i % 2;
    r.features = {0.1 * i, -0.1 * i};
    set.records.push_back(r);
  }
  data::Partition p = data::stratified_split(set, 3, 1, 42);
  CHECK(p.train_ids.size() == 900);
  CHECK(p.test_ids.size() == 300);

  // disjoint and covering
  std::set<long> all(p.train_ids.begin(), p.train_ids.end());
  for (long id : p.test_ids) CHECK(all.insert(id).second);
  CHECK(all.size() == 1200);

  // per-class ratio within one sample
  long test_stable = 0;
  for (long id : p.test_ids)
    if (id % 2 == 1) ++test_stable;
  CHECK(std::abs(test_stable - 150) <= 1);

  // determinism
  data::Partition p2 = data::stratified_split(set, 3, 1, 42);
  CHECK(p.train_ids == p2.train_ids);
  CHECK(p.test_ids == p2.test_ids);

  // 4 samples, 2 per class: 3 train / 1 test overall
  data::WindowSet tiny;
  tiny.q = 1;
  tiny.feature_dim = 1;
  for (int i = 0; i < 4; ++i) {
    data::WindowRecord r;
    r.sample_id = i;
    r.label = i % 2;
    r.features = {static_cast<double>(i)};
    tiny.records.push_back(r);
  }
  data::Partition tp = data::stratified_split(tiny, 3, 1, 1);
  CHECK(tp.train_ids.size() == 3);
  CHECK(tp.test_ids.size() == 1);

  // a class with fewer than 2 samples rejects
  data::WindowSet bad = tiny;
  bad.records[1].label = 1;
  bad.records[3].label = 1;
  bad.records[0].label = 1;
  CHECK_THROWS_AS(data::stratified_split(bad, 3, 1, 1), Error);
}

TEST_CASE("normalization maps training extrema onto [-1, 1] exactly") {
  data::WindowSet set;
  set.q = 2;
  set.feature_dim = 3;
  num::Rng rng(3);
  std::vector<long> train_ids;
  for (int i = 0; i < 40; ++i) {
    data::WindowRecord r;
    r.sample_id = i;
    r.label = i % 2;
    for (int j = 0; j < 6; ++j)
      r.features.push_back(rng.uniform(-3.0, 7.0));
    set.records.push_back(r);
    if (i < 30) train_ids.push_back(i);
  }
  data::NormalizationBounds b = data::compute_bounds(set, train_ids);

  // locate the per-feature extrema and verify the exact mapping
  for (std::size_t j = 0; j < 6; ++j) {
    double lo = 1e30, hi = -1e30;
    for (long id : train_ids) {
      lo = std::min(lo, set.records[id].features[j]);
      hi = std::max(hi, set.records[id].features[j]);
    }
    CHECK(b.min[j] == lo);
    CHECK(b.max[j] == hi);
  }
  for (long id : train_ids) {
    auto n = data::normalize(set.records[id].features, b);
    for (double v : n) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
    auto back = data::denormalize(n, b);
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(std::abs(back[j] - set.records[id].features[j]) < 1e-12);
  }

  // constant feature maps to zero
  data::WindowSet flat;
  flat.q = 1;
  flat.feature_dim = 1;
  for (int i = 0; i < 3; ++i) {
    data::WindowRecord r;
    r.sample_id = i;
    r.label = 1;
    r.features = {2.5};
    flat.records.push_back(r);
  }
  auto fb = data::compute_bounds(flat, {0, 1, 2});
  CHECK(data::normalize({2.5}, fb)[0] == 0.0);
  CHECK(data::denormalize({0.0}, fb)[0] == doctest::Approx(2.5));
}

TEST_CASE("csv round trips preserve the dataset") {
  data::WindowSet set;
  set.q = 2;
  set.feature_dim = 3;
  num::Rng rng(5);
  for (int i = 0; i < 7; ++i) {
    data::WindowRecord r;
    r.sample_id = i;
    r.label = i % 3 == 0 ? -1 : i % 2;
    r.origin = i == 6 ? "gan" : "simulated";
    r.scenario_id = i == 6 ? -1 : i;
    for (int j = 0; j < 6; ++j) r.features.push_back(rng.uniform(-1, 1));
    set.records.push_back(r);
  }
  const std::string path = "test_tmp_windows.csv";
  data::write_windows_csv(path, set);
  data::WindowSet back = data::read_windows_csv(path);
  REQUIRE(back.size() == set.size());
  CHECK(back.q == 2);
  CHECK(back.feature_dim == 3);
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(back.records[i].sample_id == set.records[i].sample_id);
    CHECK(back.records[i].label == set.records[i].label);
    CHECK(back.records[i].origin == set.records[i].origin);
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(back.records[i].features[j] ==
            doctest::Approx(set.records[i].features[j]).epsilon(1e-9));
  }

  SimOutcome outcome;
  TrajectorySample s =
    data::simulate_trajectory(default_scenario(3), 4, 0.01, 300, &outcome);
  s.sample_id = 0;
  s.label = data::prelabel(s);
  data::write_trajectories_csv("test_tmp_traj.csv", {s});
  auto ts = data::read_trajectories_csv("test_tmp_traj.csv");
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].horizon == 300);
  CHECK(ts[0].bus_count == 4);
  CHECK(ts[0].clear_step == s.clear_step);
  for (std::size_t i = 0; i < s.voltage.numel(); ++i)
    CHECK(ts[0].voltage.values[i] ==
          doctest::Approx(s.voltage.values[i]).epsilon(1e-9));

  data::Partition p;
  p.train_ids = {0, 2, 4};
  p.test_ids = {1, 3};
  data::write_partition_csv("test_tmp_part.csv", p);
  data::Partition pb = data::read_partition_csv("test_tmp_part.csv");
  CHECK(pb.train_ids == p.train_ids);
  CHECK(pb.test_ids == p.test_ids);
}

TEST_CASE("outcome skew follows loading, motor share, and clearing time") {
  // Average instability probability over seeds must rise with stress.
  Scenario mild = default_scenario(1);
  mild.load_level = 0.8;
  mild.motor_fraction = 0.6;
  mild.clearing_time = 0.15;
  Scenario harsh = default_scenario(1);
  harsh.load_level = 1.2;
  harsh.motor_fraction = 0.9;
  harsh.clearing_time = 0.2;

  SimOutcome om, oh;
  data::simulate_trajectory(mild, 4, 0.01, 300, &om);
  data::simulate_trajectory(harsh, 4, 0.01, 300, &oh);
  CHECK(oh.p_unstable > om.p_unstable);
  CHECK(om.p_unstable > 0.0);
  CHECK(oh.p_unstable < 1.0);
}
