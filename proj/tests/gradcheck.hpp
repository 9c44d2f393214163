#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "nino/autodiff.hpp"
#include "nino/rng.hpp"

namespace nino::testing {

struct GradCheck {
  double max_rel_error = 0.0;
  std::string worst;  // "name[index]"
  std::size_t checked = 0;
};

/// Relative error with a small absolute floor so that gradients that are zero
/// on both sides compare as equal.
inline double rel_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Compares the tape gradient of `build`'s scalar loss with respect to every
/// element of `params` against central differences with step `h`.
inline GradCheck check_gradients(ParameterSet& params, const std::function<Var(Tape&)>& build, double h = 1e-5) {
  params.zero_grad();
  {
    Tape tape;
    tape.backward(build(tape));
  }
  auto loss_at = [&] {
    Tape tape;
    return build(tape).value()[0];
  };
  GradCheck out;
  for (auto& p : params) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double keep = p.value[i];
      p.value[i] = keep + h;
      const double up = loss_at();
      p.value[i] = keep - h;
      const double down = loss_at();
      p.value[i] = keep;
      const double numeric = (up - down) / (2.0 * h);
      const double err = rel_error(p.grad[i], numeric);
      if (err > out.max_rel_error) {
        out.max_rel_error = err;
        out.worst = p.name + "[" + std::to_string(i) + "]";
      }
      ++out.checked;
    }
  }
  return out;
}

/// Scalar projection of any tensor through fixed pseudo-random weights, so that
/// every output element contributes a distinct amount to the loss.
inline Var project(Var y, std::uint64_t seed = 99) {
  Tape& tape = y.tape();
  const std::size_t n = y.value().size();
  Tensor w({1, n});
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) w[i] = rng.uniform(-1.0, 1.0);
  return dense(flatten(y), tape.constant(std::move(w)), tape.constant(Tensor({1}, 0.0)));
}

/// Uniform random tensor with every element at least `gap` away from zero,
/// keeping relu kinks out of the finite-difference stencil.
inline Tensor random_tensor(Rng& rng, Shape shape, double scale = 1.0, double gap = 0.0) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) {
    double x = rng.uniform(-scale, scale);
    if (std::abs(x) < gap) x = x < 0 ? x - gap : x + gap;
    t[i] = x;
  }
  return t;
}

}  // namespace nino::testing
