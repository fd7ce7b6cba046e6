#pragma once

#include <map>
#include <string>

#include "stvsa/numerics/graph.hpp"

namespace stvsa::io {

/// Versioned named-array container. Text format:
///   DLBAN1
///   meta <key> <value>
///   param <name> <rank> <d0> <d1> ...
///   <values, space separated, one line>
///   ...
///   end
/// Values are written with 17 significant digits, so a round trip is
/// value-exact for doubles.
struct Checkpoint {
  std::map<std::string, std::string> meta;
  num::ParameterStore params;
};

void save_checkpoint(const std::string &path, const Checkpoint &ckpt);
Checkpoint load_checkpoint(const std::string &path);

/// save -> load -> compare against the original; returns the maximum
/// absolute difference across all parameter entries.
double checkpoint_roundtrip(const std::string &path, const Checkpoint &ckpt);

} // namespace stvsa::io
