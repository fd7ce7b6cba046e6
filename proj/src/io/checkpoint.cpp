#include "stvsa/io/checkpoint.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace stvsa::io {

namespace {
constexpr const char *kMagic = "DLBAN1";
constexpr const char *kMagicPrefix = "DLBAN";
} // namespace

void save_checkpoint(const std::string &path, const Checkpoint &ckpt) {
  std::ofstream f(path);
  if (!f) fail("io", "cannot open '" + path + "' for writing");
  f << kMagic << '\n';
  for (const auto &[key, value] : ckpt.meta) {
    if (key.find(' ') != std::string::npos)
      fail("format", "meta key '" + key + "' contains a space");
    f << "meta " << key << ' ' << value << '\n';
  }
  char buf[40];
  for (const std::string &name : ckpt.params.names()) {
    const num::DenseArray &a = ckpt.params.at(name);
    f << "param " << name << ' ' << a.rank();
    for (std::size_t e : a.shape) f << ' ' << e;
    f << '\n';
    std::string line;
    for (std::size_t i = 0; i < a.numel(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", a.values[i]);
      if (i) line += ' ';
      line += buf;
    }
    f << line << '\n';
  }
  f << "end\n";
  if (!f) fail("io", "write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string &path) {
  std::ifstream f(path);
  if (!f) fail("io", "cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(f, line)) fail("format", path + ": empty checkpoint");
  if (line != kMagic) {
    if (line.rfind(kMagicPrefix, 0) == 0)
      fail("format", path + ": unsupported checkpoint version '" + line +
                       "', expected " + kMagic);
    fail("format", path + ": bad magic string");
  }

  Checkpoint ckpt;
  bool ended = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string kind;
    is >> kind;
    if (kind == "end") {
      ended = true;
      break;
    }
    if (kind == "meta") {
      std::string key;
      is >> key;
      std::string value;
      std::getline(is, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      if (key.empty()) fail("format", path + ": malformed meta line");
      ckpt.meta[key] = value;
      continue;
    }
    if (kind != "param") fail("format", path + ": unexpected line '" + line + "'");
    std::string name;
    std::size_t rank = 0;
    if (!(is >> name >> rank)) fail("format", path + ": malformed param header");
    num::Shape shape(rank);
    for (std::size_t i = 0; i < rank; ++i)
      if (!(is >> shape[i]) || shape[i] == 0)
        fail("format", path + ": bad shape for parameter '" + name + "'");
    std::string values_line;
    if (!std::getline(f, values_line))
      fail("format", path + ": truncated values for parameter '" + name + "'");
    num::DenseArray &a = ckpt.params.create(name, shape);
    std::istringstream vs(values_line);
    for (std::size_t i = 0; i < a.numel(); ++i)
      if (!(vs >> a.values[i]))
        fail("format", path + ": truncated values for parameter '" + name +
                         "' (expected " + std::to_string(a.numel()) + ")");
    double extra;
    if (vs >> extra)
      fail("format", path + ": excess values for parameter '" + name + "'");
  }
  if (!ended) fail("format", path + ": missing end marker, file truncated");
  return ckpt;
}

double checkpoint_roundtrip(const std::string &path, const Checkpoint &ckpt) {
  save_checkpoint(path, ckpt);
  Checkpoint loaded = load_checkpoint(path);
  double max_diff = 0.0;
  for (const std::string &name : ckpt.params.names()) {
    const num::DenseArray &a = ckpt.params.at(name);
    const num::DenseArray &b = loaded.params.at(name);
    if (!a.same_shape(b))
      fail("format", "roundtrip shape mismatch for '" + name + "'");
    for (std::size_t i = 0; i < a.numel(); ++i)
      max_diff = std::max(max_diff, std::abs(a.values[i] - b.values[i]));
  }
  save_checkpoint(path, loaded);
  return max_diff;
}

} // namespace stvsa::io
