#include "stvsa/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "stvsa/numerics/rng.hpp"

namespace stvsa::data {

const WindowRecord *WindowSet::find(long sample_id) const {
  for (const WindowRecord &r : records)
    if (r.sample_id == sample_id) return &r;
  return nullptr;
}

// -------------------------------------------------------- normalization ----

NormalizationBounds compute_bounds(const WindowSet &set,
                                   const std::vector<long> &train_ids) {
  if (train_ids.empty()) fail("data", "cannot compute bounds without training samples");
  std::map<long, const WindowRecord *> by_id;
  for (const WindowRecord &r : set.records) by_id[r.sample_id] = &r;

  const std::size_t d = static_cast<std::size_t>(set.flat_dim());
  NormalizationBounds b;
  b.min.assign(d, 0.0);
  b.max.assign(d, 0.0);
  bool first = true;
  for (long id : train_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      fail("data", "partition references unknown sample " + std::to_string(id));
    const auto &f = it->second->features;
    if (f.size() != d) fail("shape", "window feature count mismatch");
    if (first) {
      b.min = f;
      b.max = f;
      first = false;
    } else {
      for (std::size_t j = 0; j < d; ++j) {
        b.min[j] = std::min(b.min[j], f[j]);
        b.max[j] = std::max(b.max[j], f[j]);
      }
    }
  }
  return b;
}

std::vector<double> normalize(const std::vector<double> &x,
                              const NormalizationBounds &b) {
  if (x.size() != b.min.size())
    fail("shape", "normalize dimension mismatch");
  std::vector<double> y(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double span = b.max[j] - b.min[j];
    y[j] = span == 0.0 ? 0.0 : 2.0 * (x[j] - b.min[j]) / span - 1.0;
  }
  return y;
}

std::vector<double> denormalize(const std::vector<double> &x,
                                const NormalizationBounds &b) {
  if (x.size() != b.min.size())
    fail("shape", "denormalize dimension mismatch");
  std::vector<double> y(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double span = b.max[j] - b.min[j];
    y[j] = b.min[j] + (x[j] + 1.0) * 0.5 * span;
  }
  return y;
}

// ---------------------------------------------------------------- split ----

Partition stratified_split(const WindowSet &set, int ratio_train,
                           int ratio_test, std::uint64_t seed) {
  if (ratio_train <= 0 || ratio_test <= 0)
    fail("config", "split ratio parts must be positive");
  if (set.records.empty()) fail("data", "cannot split an empty dataset");

  std::map<int, std::vector<long>> strata;
  for (const WindowRecord &r : set.records)
    strata[r.label].push_back(r.sample_id);
  for (const auto &[label, ids] : strata)
    if (ids.size() < 2)
      fail("data", "label " + std::to_string(label) +
                     " has fewer than 2 samples, cannot stratify");

  const double test_frac =
    static_cast<double>(ratio_test) / (ratio_train + ratio_test);
  const long total_test = std::lround(set.records.size() * test_frac);

  // Largest-remainder allocation of the test quota across strata.
  struct Quota {
    int label;
    std::vector<long> ids;
    long take;
    double frac;
  };
  std::vector<Quota> quotas;
  long assigned = 0;
  for (auto &[label, ids] : strata) {
    const double exact = ids.size() * test_frac;
    Quota q{label, ids, static_cast<long>(std::floor(exact)),
            exact - std::floor(exact)};
    assigned += q.take;
    quotas.push_back(std::move(q));
  }
  std::stable_sort(quotas.begin(), quotas.end(),
                   [](const Quota &a, const Quota &b) { return a.frac > b.frac; });
  for (std::size_t i = 0; assigned < total_test && i < quotas.size(); ++i) {
    ++quotas[i].take;
    ++assigned;
  }

  num::Rng rng(seed);
  Partition p;
  std::stable_sort(quotas.begin(), quotas.end(),
                   [](const Quota &a, const Quota &b) { return a.label < b.label; });
  for (Quota &q : quotas) {
    rng.shuffle(q.ids);
    for (std::size_t i = 0; i < q.ids.size(); ++i) {
      if (static_cast<long>(i) < q.take)
        p.test_ids.push_back(q.ids[i]);
      else
        p.train_ids.push_back(q.ids[i]);
    }
  }
  std::sort(p.train_ids.begin(), p.train_ids.end());
  std::sort(p.test_ids.begin(), p.test_ids.end());
  return p;
}

// ------------------------------------------------------------------ csv ----

namespace {

void format_double(std::string &out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  out += buf;
}

std::vector<std::string> split_line(const std::string &line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string &s, const std::string &path) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    fail("format", path + ": cannot parse number '" + s + "'");
  return v;
}

long parse_long(const std::string &s, const std::string &path) {
  long v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    fail("format", path + ": cannot parse integer '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string &s, const std::string &path) {
  std::uint64_t v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    fail("format", path + ": cannot parse unsigned integer '" + s + "'");
  return v;
}

std::ofstream open_out(const std::string &path) {
  std::ofstream f(path);
  if (!f) fail("io", "cannot open '" + path + "' for writing");
  return f;
}

std::ifstream open_in(const std::string &path) {
  std::ifstream f(path);
  if (!f) fail("io", "cannot open '" + path + "' for reading");
  return f;
}

} // namespace

void write_windows_csv(const std::string &path, const WindowSet &set) {
  std::ofstream f = open_out(path);
  std::string line = "sample_id,label,origin,scenario_id";
  for (int t = 0; t < set.q; ++t)
    for (int j = 0; j < set.feature_dim; ++j)
      line += ",f_" + std::to_string(t) + "_" + std::to_string(j);
  f << line << '\n';
  for (const WindowRecord &r : set.records) {
    line.clear();
    line += std::to_string(r.sample_id);
    line += ',';
    line += std::to_string(r.label);
    line += ',';
    line += r.origin;
    line += ',';
    line += std::to_string(r.scenario_id);
    for (double v : r.features) {
      line += ',';
      format_double(line, v);
    }
    f << line << '\n';
  }
  if (!f) fail("io", "write failed for '" + path + "'");
}

WindowSet read_windows_csv(const std::string &path) {
  std::ifstream f = open_in(path);
  std::string header;
  if (!std::getline(f, header)) fail("format", path + ": empty file");
  auto cols = split_line(header);
  if (cols.size() < 5 || cols[0] != "sample_id" || cols[1] != "label" ||
      cols[2] != "origin" || cols[3] != "scenario_id")
    fail("format", path + ": unexpected window header");

  int max_t = -1, max_j = -1;
  for (std::size_t i = 4; i < cols.size(); ++i) {
    int t = 0, j = 0;
    if (std::sscanf(cols[i].c_str(), "f_%d_%d", &t, &j) != 2)
      fail("format", path + ": bad feature column '" + cols[i] + "'");
    max_t = std::max(max_t, t);
    max_j = std::max(max_j, j);
  }
  WindowSet set;
  set.q = max_t + 1;
  set.feature_dim = max_j + 1;
  if (static_cast<std::size_t>(set.flat_dim()) + 4 != cols.size())
    fail("format", path + ": feature columns are not a dense t x j grid");

  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto parts = split_line(line);
    if (parts.size() != cols.size())
      fail("format", path + ": row with " + std::to_string(parts.size()) +
                       " columns, expected " + std::to_string(cols.size()));
    WindowRecord r;
    r.sample_id = parse_long(parts[0], path);
    r.label = static_cast<int>(parse_long(parts[1], path));
    label_from_int(r.label); // validates
    r.origin = parts[2];
    origin_from_string(r.origin); // validates
    r.scenario_id = parse_long(parts[3], path);
    r.features.reserve(set.flat_dim());
    for (std::size_t i = 4; i < parts.size(); ++i)
      r.features.push_back(parse_double(parts[i], path));
    set.records.push_back(std::move(r));
  }
  return set;
}

void write_partition_csv(const std::string &path, const Partition &p) {
  std::ofstream f = open_out(path);
  f << "sample_id,split\n";
  for (long id : p.train_ids) f << id << ",train\n";
  for (long id : p.test_ids) f << id << ",test\n";
  if (!f) fail("io", "write failed for '" + path + "'");
}

Partition read_partition_csv(const std::string &path) {
  std::ifstream f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || line != "sample_id,split")
    fail("format", path + ": unexpected partition header");
  Partition p;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto parts = split_line(line);
    if (parts.size() != 2) fail("format", path + ": malformed partition row");
    const long id = parse_long(parts[0], path);
    if (parts[1] == "train")
      p.train_ids.push_back(id);
    else if (parts[1] == "test")
      p.test_ids.push_back(id);
    else
      fail("format", path + ": unknown split '" + parts[1] + "'");
  }
  return p;
}

void write_trajectories_csv(const std::string &path,
                            const std::vector<TrajectorySample> &samples) {
  std::ofstream f = open_out(path);
  if (samples.empty()) fail("data", "no trajectories to write");
  const int T = samples.front().horizon;
  const int L = samples.front().bus_count;
  std::string line = "sample_id,label,origin,scenario_id,clear_step,dt";
  const char *prefixes[3] = {"v", "p", "q"};
  for (const char *pfx : prefixes)
    for (int t = 0; t < T; ++t)
      for (int b = 0; b < L; ++b)
        line += "," + std::string(pfx) + "_" + std::to_string(t) + "_" +
                std::to_string(b);
  f << line << '\n';
  for (const TrajectorySample &s : samples) {
    if (s.horizon != T || s.bus_count != L)
      fail("shape", "trajectories with mixed shapes cannot share a file");
    line.clear();
    line += std::to_string(s.sample_id);
    line += ',';
    line += std::to_string(label_to_int(s.label));
    line += ',';
    line += origin_to_string(s.origin);
    line += ',';
    line += std::to_string(s.scenario_id);
    line += ',';
    line += std::to_string(s.clear_step);
    line += ',';
    format_double(line, s.dt);
    const num::DenseArray *mats[3] = {&s.voltage, &s.active_power,
                                      &s.reactive_power};
    for (const num::DenseArray *m : mats)
      for (double v : m->values) {
        line += ',';
        format_double(line, v);
      }
    f << line << '\n';
  }
  if (!f) fail("io", "write failed for '" + path + "'");
}

std::vector<TrajectorySample> read_trajectories_csv(const std::string &path) {
  std::ifstream f = open_in(path);
  std::string header;
  if (!std::getline(f, header)) fail("format", path + ": empty file");
  auto cols = split_line(header);
  if (cols.size() < 7 || cols[0] != "sample_id" || cols[4] != "clear_step" ||
      cols[5] != "dt")
    fail("format", path + ": unexpected trajectory header");
  int max_t = -1, max_b = -1;
  for (std::size_t i = 6; i < cols.size(); ++i) {
    char pfx;
    int t = 0, b = 0;
    if (std::sscanf(cols[i].c_str(), "%c_%d_%d", &pfx, &t, &b) != 3)
      fail("format", path + ": bad trajectory column '" + cols[i] + "'");
    max_t = std::max(max_t, t);
    max_b = std::max(max_b, b);
  }
  const int T = max_t + 1, L = max_b + 1;
  if (cols.size() != 6 + 3 * static_cast<std::size_t>(T) * L)
    fail("format", path + ": trajectory columns are not a dense grid");

  std::vector<TrajectorySample> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto parts = split_line(line);
    if (parts.size() != cols.size())
      fail("format", path + ": malformed trajectory row");
    TrajectorySample s;
    s.sample_id = parse_long(parts[0], path);
    s.label = label_from_int(static_cast<int>(parse_long(parts[1], path)));
    s.origin = origin_from_string(parts[2]);
    s.scenario_id = parse_long(parts[3], path);
    s.clear_step = static_cast<int>(parse_long(parts[4], path));
    s.dt = parse_double(parts[5], path);
    s.horizon = T;
    s.bus_count = L;
    const num::Shape shape = {static_cast<std::size_t>(T),
                              static_cast<std::size_t>(L)};
    s.voltage = num::DenseArray(shape);
    s.active_power = num::DenseArray(shape);
    s.reactive_power = num::DenseArray(shape);
    num::DenseArray *mats[3] = {&s.voltage, &s.active_power,
                                &s.reactive_power};
    std::size_t idx = 6;
    for (num::DenseArray *m : mats)
      for (std::size_t k = 0; k < m->values.size(); ++k)
        m->values[k] = parse_double(parts[idx++], path);
    out.push_back(std::move(s));
  }
  return out;
}

void write_scenarios_csv(const std::string &path,
                         const std::vector<ScenarioRecord> &records) {
  std::ofstream f = open_out(path);
  f << "scenario_id,load_level,motor_fraction,line_id,fault_location,"
       "clearing_time,seed,ground_truth,dynamics,p_unstable\n";
  std::string line;
  for (const ScenarioRecord &r : records) {
    line.clear();
    line += std::to_string(r.scenario.id);
    line += ',';
    format_double(line, r.scenario.load_level);
    line += ',';
    format_double(line, r.scenario.motor_fraction);
    line += ',';
    line += std::to_string(r.scenario.line_id);
    line += ',';
    format_double(line, r.scenario.fault_location);
    line += ',';
    format_double(line, r.scenario.clearing_time);
    line += ',';
    line += std::to_string(r.scenario.seed);
    line += ',';
    line += r.outcome.unstable ? "unstable" : "stable";
    line += ',';
    line += dynamics_to_string(r.outcome.dynamics);
    line += ',';
    format_double(line, r.outcome.p_unstable);
    f << line << '\n';
  }
  if (!f) fail("io", "write failed for '" + path + "'");
}

std::vector<ScenarioRecord> read_scenarios_csv(const std::string &path) {
  std::ifstream f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) fail("format", path + ": empty file");
  std::vector<ScenarioRecord> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto parts = split_line(line);
    if (parts.size() != 10) fail("format", path + ": malformed scenario row");
    ScenarioRecord r;
    r.scenario.id = static_cast<int>(parse_long(parts[0], path));
    r.scenario.load_level = parse_double(parts[1], path);
    r.scenario.motor_fraction = parse_double(parts[2], path);
    r.scenario.line_id = static_cast<int>(parse_long(parts[3], path));
    r.scenario.fault_location = parse_double(parts[4], path);
    r.scenario.clearing_time = parse_double(parts[5], path);
    r.scenario.seed = parse_u64(parts[6], path);
    r.outcome.unstable = parts[7] == "unstable";
    r.outcome.p_unstable = parse_double(parts[9], path);
    if (parts[8] == "clear-stable")
      r.outcome.dynamics = DynamicsClass::kClearStable;
    else if (parts[8] == "clear-unstable")
      r.outcome.dynamics = DynamicsClass::kClearUnstable;
    else if (parts[8] == "ambiguous-stable")
      r.outcome.dynamics = DynamicsClass::kAmbiguousStable;
    else
      r.outcome.dynamics = DynamicsClass::kAmbiguousUnstable;
    out.push_back(r);
  }
  return out;
}

} // namespace stvsa::data
