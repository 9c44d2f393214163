#pragma once

#include <cstdint>
#include <vector>

#include "nino/autodiff.hpp"

namespace nino {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates, one pair per parameter.
struct AdamState {
  AdamHyper hyper;
  std::int64_t step = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;

  AdamState() = default;
  explicit AdamState(const ParameterSet& params, AdamHyper h = {});
};

/// One bias-corrected Adam update of every parameter from its accumulated grad.
void adam_step(ParameterSet& params, AdamState& state, double lr);

}  // namespace nino
