#include "nino/adam.hpp"

#include <cmath>

#include "nino/error.hpp"

namespace nino {

AdamState::AdamState(const ParameterSet& params, AdamHyper h) : hyper(h) {
  for (const auto& p : params) {
    m.emplace_back(p.value.shape(), 0.0);
    v.emplace_back(p.value.shape(), 0.0);
  }
}

void adam_step(ParameterSet& params, AdamState& state, double lr) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    fail(ErrorKind::ShapeMismatch, "Adam state tracks " + std::to_string(state.m.size()) + " tensors, model has " +
                                       std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(params[i].value, params[i].grad, "adam_step grad");
    require_same_shape(params[i].value, state.m[i], "adam_step moment");
  }
  ++state.step;
  const auto& h = state.hyper;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i].value.data();
    auto g = params[i].grad.data();
    auto m = state.m[i].data();
    auto v = state.v[i].data();
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = h.beta1 * m[k] + (1.0 - h.beta1) * g[k];
      v[k] = h.beta2 * v[k] + (1.0 - h.beta2) * g[k] * g[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      w[k] -= lr * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
  }
}

}  // namespace nino
