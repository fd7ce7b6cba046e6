#pragma once

// Central finite-difference oracle for reverse-mode gradients. Lives in test
// code only; evaluates the graph twice per perturbed entry and compares the
// analytic gradient against (f(x+h) - f(x-h)) / 2h.

#include <cmath>
#include <map>
#include <string>

#include "stvsa/numerics/graph.hpp"
#include "stvsa/numerics/rng.hpp"

namespace testsupport {

inline double rel_error(double a, double b, double floor = 1e-7) {
  const double denom = std::max(std::abs(a), std::abs(b));
  if (denom < floor) return 0.0; // both effectively zero
  return std::abs(a - b) / denom;
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst; // "param[i]" of the worst entry
};

/// Checks d(loss)/d(param) for every entry of every parameter.
inline GradCheckResult
check_gradients(stvsa::num::Graph &graph, stvsa::num::ParameterStore &params,
                std::map<std::string, stvsa::num::DenseArray> bindings,
                int loss_node, const stvsa::num::EvalOptions &opts = {},
                double h = 1e-5) {
  using stvsa::num::DenseArray;

  graph.evaluate(params, bindings, opts);
  graph.backward(loss_node);
  std::map<std::string, DenseArray> analytic = graph.parameter_gradients();

  GradCheckResult result;
  auto loss_with = [&]() {
    graph.evaluate(params, bindings, opts);
    return graph.value(loss_node).values[0];
  };

  for (const std::string &name : params.names()) {
    DenseArray &p = params.at(name);
    for (std::size_t i = 0; i < p.numel(); ++i) {
      const double saved = p.values[i];
      p.values[i] = saved + h;
      const double up = loss_with();
      p.values[i] = saved - h;
      const double down = loss_with();
      p.values[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double err = rel_error(analytic.at(name).values[i], fd);
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

/// FD check of d(loss)/d(input entries) for one named input whose node id is
/// known to the caller.
inline double check_input_gradient(stvsa::num::Graph &graph,
                                   stvsa::num::ParameterStore &params,
                                   std::map<std::string, stvsa::num::DenseArray>
                                     bindings,
                                   const std::string &input_name, int input_node,
                                   int loss_node,
                                   const stvsa::num::EvalOptions &opts = {},
                                   double h = 1e-5) {
  graph.evaluate(params, bindings, opts);
  graph.backward(loss_node);
  stvsa::num::DenseArray analytic = graph.gradient(input_node);

  double worst = 0.0;
  stvsa::num::DenseArray &x = bindings.at(input_name);
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double saved = x.values[i];
    x.values[i] = saved + h;
    graph.evaluate(params, bindings, opts);
    const double up = graph.value(loss_node).values[0];
    x.values[i] = saved - h;
    graph.evaluate(params, bindings, opts);
    const double down = graph.value(loss_node).values[0];
    x.values[i] = saved;
    worst = std::max(worst, rel_error(analytic.values[i],
                                      (up - down) / (2.0 * h)));
  }
  return worst;
}

inline void fill_uniform(stvsa::num::DenseArray &a, stvsa::num::Rng &rng,
                         double lo = -1.0, double hi = 1.0) {
  for (double &v : a.values) v = rng.uniform(lo, hi);
}

} // namespace testsupport
