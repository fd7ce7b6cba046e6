#pragma once

#include <stdexcept>
#include <string>

namespace stvsa {

/// Error with a machine-parsable category, surfaced by the CLI as a single
/// "error: <category>: <message>" line. Categories in use: config, usage, io,
/// format, shape, domain, data, train, infeasible.
class Error : public std::runtime_error {
public:
  Error(std::string category, const std::string &message)
    : std::runtime_error(message), category_(std::move(category)) {}

  const std::string &category() const noexcept { return category_; }

private:
  std::string category_;
};

[[noreturn]] inline void fail(const std::string &category,
                              const std::string &message) {
  throw Error(category, message);
}

} // namespace stvsa
