#include "nino/cnn.hpp"

#include <cmath>
#include <memory>

#include "nino/error.hpp"
#include "nino/rng.hpp"

namespace nino {

namespace {

Tensor uniform_tensor(Shape shape, double bound, Rng* rng) {
  Tensor t(std::move(shape), 0.0);
  if (rng) {
    for (auto& v : t.data()) v = rng->uniform(-bound, bound);
  }
  return t;
}

Var activate(Var x, Activation a) {
  switch (a) {
    case Activation::Relu: return relu(x);
    case Activation::Tanh: return tanh(x);
    case Activation::None: break;
  }
  return x;
}

}  // namespace

std::vector<CnnSample> build_cnn_samples(const SpatioTemporalGrid& anomaly_fields, const AnomalySeries& regional,
                                         std::size_t window, std::size_t stride) {
  if (regional.start != anomaly_fields.start() || regional.size() != anomaly_fields.steps()) {
    fail(ErrorKind::AxesMismatch, "regional anomaly series must cover the same months as the anomaly fields");
  }
  const std::size_t n = window_count(anomaly_fields.steps(), window, kQuarterSpan, stride);
  if (n == 0) fail(ErrorKind::TooShort, "not enough months for one CNN sample");
  if (anomaly_fields.has_missing()) fail(ErrorKind::MissingValues, "CNN samples require fields without missing cells");
  const std::size_t cells = anomaly_fields.cells();
  const std::span<const double> a(regional.values);
  std::vector<CnnSample> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t o = s * stride;
    std::vector<double> in(anomaly_fields.values().begin() + static_cast<std::ptrdiff_t>(o * cells),
                           anomaly_fields.values().begin() + static_cast<std::ptrdiff_t>((o + window) * cells));
    out.push_back({Tensor({window, anomaly_fields.axes().n_lat(), anomaly_fields.axes().n_lon()}, std::move(in)),
                   quarters_of(a.subspan(o + window, kQuarterSpan)), o, anomaly_fields.time_at(o + window)});
  }
  return out;
}

CnnForecaster::CnnForecaster(const CnnForecasterConfig& cfg, std::uint64_t seed)
    : CnnForecaster(cfg, std::make_unique<Rng>(seed).get()) {}

CnnForecaster CnnForecaster::zeros(const CnnForecasterConfig& cfg) { return CnnForecaster(cfg, static_cast<Rng*>(nullptr)); }

CnnForecaster::CnnForecaster(const CnnForecasterConfig& cfg, Rng* rng) : cfg_(cfg) {
  if (cfg_.conv.empty()) fail(ErrorKind::BadConfig, "CNN forecaster needs at least one conv layer");
  if (cfg_.window == 0 || cfg_.n_lat == 0 || cfg_.n_lon == 0) fail(ErrorKind::BadConfig, "CNN forecaster needs window and grid dims");
  std::size_t c_in = cfg_.window;
  for (std::size_t l = 0; l < cfg_.conv.size(); ++l) {
    const auto& spec = cfg_.conv[l];
    if (spec.kernel % 2 == 0 || spec.channels == 0) fail(ErrorKind::BadConfig, "conv layers need odd kernels and channels >= 1");
    const double bound = 1.0 / std::sqrt(static_cast<double>(c_in * spec.kernel * spec.kernel));
    const std::string name = "conv" + std::to_string(l + 1);
    conv_w_.push_back(params_.add(name + ".w", uniform_tensor({spec.channels, c_in, spec.kernel, spec.kernel}, bound, rng)));
    conv_b_.push_back(params_.add(name + ".b", Tensor({spec.channels}, 0.0)));
    c_in = spec.channels;
  }
  std::vector<std::size_t> dims{c_in * cfg_.n_lat * cfg_.n_lon};
  if (cfg_.head_hidden > 0) dims.push_back(cfg_.head_hidden);
  dims.push_back(kQuarters);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::string name = "head" + std::to_string(l + 1);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    dense_w_.push_back(params_.add(name + ".w", uniform_tensor({dims[l + 1], dims[l]}, bound, rng)));
    dense_b_.push_back(params_.add(name + ".b", Tensor({dims[l + 1]}, 0.0)));
  }
}

Var CnnForecaster::forward(Tape& tape, const Tensor& inputs) {
  if (inputs.rank() != 3 || inputs.extent(0) != cfg_.window || inputs.extent(1) != cfg_.n_lat ||
      inputs.extent(2) != cfg_.n_lon) {
    fail(ErrorKind::ShapeMismatch, "CNN forecaster expects [" + std::to_string(cfg_.window) + "][" +
                                       std::to_string(cfg_.n_lat) + "][" + std::to_string(cfg_.n_lon) + "], got " +
                                       shape_str(inputs.shape()));
  }
  Var x = tape.constant(inputs);
  for (std::size_t l = 0; l < conv_w_.size(); ++l) {
    x = activate(conv2d(x, tape.parameter(params_[conv_w_[l]]), tape.parameter(params_[conv_b_[l]])),
                 cfg_.conv[l].activation);
  }
  x = flatten(x);
  for (std::size_t l = 0; l < dense_w_.size(); ++l) {
    x = dense(x, tape.parameter(params_[dense_w_[l]]), tape.parameter(params_[dense_b_[l]]));
    if (l + 1 < dense_w_.size()) x = relu(x);
  }
  return x;
}

Var CnnForecaster::loss(Tape& tape, const CnnSample& sample, Mode, std::uint64_t) {
  const Var pred = forward(tape, sample.inputs);
  return mse(pred, tape.constant(Tensor({kQuarters}, std::vector<double>(sample.targets.begin(), sample.targets.end()))));
}

Quarters CnnForecaster::predict(const Tensor& inputs) {
  Tape tape;
  const Tensor& y = forward(tape, inputs).value();
  Quarters q{};
  for (std::size_t i = 0; i < kQuarters; ++i) q[i] = y[i];
  return q;
}

}  // namespace nino
