#include "stvsa/numerics/adam.hpp"

#include <cmath>

namespace stvsa::num {

void adam_step(DenseArray &param, const DenseArray &grad, DenseArray &m,
               DenseArray &v, long step, const AdamConfig &cfg) {
  if (!param.same_shape(grad) || !param.same_shape(m) || !param.same_shape(v))
    fail("shape", "adam_step shape mismatch: param " + shape_str(param.shape) +
                    ", grad " + shape_str(grad.shape));
  if (cfg.learning_rate <= 0.0) fail("config", "learning rate must be > 0");
  if (step < 1) fail("config", "adam step counter must be >= 1");

  const double b1 = cfg.beta1, b2 = cfg.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < param.numel(); ++i) {
    const double g = grad.values[i];
    m.values[i] = b1 * m.values[i] + (1.0 - b1) * g;
    v.values[i] = b2 * v.values[i] + (1.0 - b2) * g * g;
    const double mhat = m.values[i] / corr1;
    const double vhat = v.values[i] / corr2;
    param.values[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

void AdamOptimizer::update(ParameterStore &params,
                           const std::map<std::string, DenseArray> &grads) {
  ++state_.step;
  for (const std::string &name : names_) {
    auto it = grads.find(name);
    if (it == grads.end())
      fail("shape", "missing gradient for parameter '" + name + "'");
    DenseArray &p = params.at(name);
    auto &m = state_.first_moment.try_emplace(name, DenseArray(p.shape))
                .first->second;
    auto &v = state_.second_moment.try_emplace(name, DenseArray(p.shape))
                .first->second;
    adam_step(p, it->second, m, v, state_.step, cfg_);
  }
}

} // namespace stvsa::num
