#include "nino/convlstm.hpp"

#include <cmath>
#include <memory>

#include "nino/error.hpp"

namespace nino {

namespace {

constexpr std::array<const char*, kGates> kGateNames{"i", "f", "o", "g"};

Tensor uniform_tensor(Shape shape, double bound, Rng* rng) {
  Tensor t(std::move(shape), 0.0);
  if (rng) {
    for (auto& v : t.data()) v = rng->uniform(-bound, bound);
  }
  return t;
}

}  // namespace

ConvLstmCellParams add_cell(ParameterSet& params, const std::string& prefix, std::size_t in_channels,
                            std::size_t hidden, std::size_t kernel, Rng* rng) {
  if (kernel % 2 == 0 || in_channels == 0 || hidden == 0) fail(ErrorKind::BadConfig, prefix + ": bad cell dimensions");
  ConvLstmCellParams cell{in_channels, hidden, kernel, {}, {}, {}};
  const double x_bound = 1.0 / std::sqrt(static_cast<double>(in_channels * kernel * kernel));
  const double h_bound = 1.0 / std::sqrt(static_cast<double>(hidden * kernel * kernel));
  for (std::size_t g = 0; g < kGates; ++g) {
    const std::string gate = prefix + "." + kGateNames[g];
    cell.w_x[g] = params.add(gate + ".w_x", uniform_tensor({hidden, in_channels, kernel, kernel}, x_bound, rng));
    cell.w_h[g] = params.add(gate + ".w_h", uniform_tensor({hidden, hidden, kernel, kernel}, h_bound, rng));
    const double b0 = (rng && g == kForgetGate) ? 1.0 : 0.0;
    cell.bias[g] = params.add(gate + ".b", Tensor({hidden}, b0));
  }
  return cell;
}

BoundCell bind(Tape& tape, ParameterSet& params, const ConvLstmCellParams& cell) {
  BoundCell b;
  for (std::size_t g = 0; g < kGates; ++g) {
    b.w_x[g] = tape.parameter(params[cell.w_x[g]]);
    b.w_h[g] = tape.parameter(params[cell.w_h[g]]);
    b.bias[g] = tape.parameter(params[cell.bias[g]]);
  }
  return b;
}

CellState cell_step(const BoundCell& cell, Var x, Var h_prev, Var c_prev) {
  if (x.value().rank() != 3 || h_prev.value().rank() != 3 || h_prev.shape() != c_prev.shape() ||
      x.value().extent(1) != h_prev.value().extent(1) || x.value().extent(2) != h_prev.value().extent(2)) {
    fail(ErrorKind::ShapeMismatch, "cell_step: X " + shape_str(x.shape()) + ", H " + shape_str(h_prev.shape()) +
                                       ", C " + shape_str(c_prev.shape()));
  }
  auto pre = [&](std::size_t g) { return add(conv2d(x, cell.w_x[g], cell.bias[g]), conv2d(h_prev, cell.w_h[g])); };
  const Var i = sigmoid(pre(kInputGate));
  const Var f = sigmoid(pre(kForgetGate));
  const Var o = sigmoid(pre(kOutputGate));
  const Var g = tanh(pre(kCandidate));
  const Var c = add(hadamard(f, c_prev), hadamard(i, g));
  const Var h = hadamard(o, tanh(c));
  return {h, c};
}

ConvLstmXt::ConvLstmXt(const ConvLstmXtConfig& cfg, std::uint64_t seed)
    : ConvLstmXt(cfg, std::make_unique<Rng>(seed).get()) {}

ConvLstmXt::ConvLstmXt(const ConvLstmXtConfig& cfg, Rng* rng) : cfg_(cfg) {
  if (cfg_.n_lat == 0 || cfg_.n_lon == 0 || cfg_.horizon == 0) fail(ErrorKind::BadConfig, "ConvLSTM-XT needs grid dims and horizon");
  if (!(cfg_.dropout >= 0.0 && cfg_.dropout < 1.0)) fail(ErrorKind::BadRate, "dropout must be in [0, 1)");
  blocks_[0] = add_cell(params_, "block1", cfg_.in_channels, cfg_.hidden[0], cfg_.kernel, rng);
  blocks_[1] = add_cell(params_, "block2", cfg_.hidden[0], cfg_.hidden[1], cfg_.kernel, rng);
  const std::size_t features = cfg_.hidden[1] * cfg_.n_lat * cfg_.n_lon;
  const std::size_t outputs = cfg_.horizon * cfg_.n_lat * cfg_.n_lon;
  fc_w_ = params_.add("head.w", uniform_tensor({outputs, features}, 1.0 / std::sqrt(static_cast<double>(features)), rng));
  fc_b_ = params_.add("head.b", Tensor({outputs}, 0.0));
}

ConvLstmXt ConvLstmXt::zeros(const ConvLstmXtConfig& cfg) { return ConvLstmXt(cfg, static_cast<Rng*>(nullptr)); }

Var ConvLstmXt::forward(Tape& tape, const Tensor& inputs, Mode mode, std::uint64_t dropout_seed) {
  if (inputs.rank() != 4 || inputs.extent(1) != cfg_.in_channels || inputs.extent(2) != cfg_.n_lat ||
      inputs.extent(3) != cfg_.n_lon) {
    fail(ErrorKind::ShapeMismatch, "ConvLSTM-XT expects [T][" + std::to_string(cfg_.in_channels) + "][" +
                                       std::to_string(cfg_.n_lat) + "][" + std::to_string(cfg_.n_lon) + "], got " +
                                       shape_str(inputs.shape()));
  }
  const std::size_t steps = inputs.extent(0);
  const std::size_t frame = inputs.size() / steps;
  const BoundCell b1 = bind(tape, params_, blocks_[0]);
  const BoundCell b2 = bind(tape, params_, blocks_[1]);
  const Var fc_w = tape.parameter(params_[fc_w_]);
  const Var fc_b = tape.parameter(params_[fc_b_]);

  CellState s1{tape.constant(Tensor({cfg_.hidden[0], cfg_.n_lat, cfg_.n_lon}, 0.0)),
               tape.constant(Tensor({cfg_.hidden[0], cfg_.n_lat, cfg_.n_lon}, 0.0))};
  CellState s2{tape.constant(Tensor({cfg_.hidden[1], cfg_.n_lat, cfg_.n_lon}, 0.0)),
               tape.constant(Tensor({cfg_.hidden[1], cfg_.n_lat, cfg_.n_lon}, 0.0))};
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> x(inputs.data().begin() + static_cast<std::ptrdiff_t>(t * frame),
                          inputs.data().begin() + static_cast<std::ptrdiff_t>((t + 1) * frame));
    const Var xt = tape.constant(Tensor({cfg_.in_channels, cfg_.n_lat, cfg_.n_lon}, std::move(x)));
    s1 = cell_step(b1, xt, s1.h, s1.c);
    s2 = cell_step(b2, s1.h, s2.h, s2.c);
  }
  const Var features = dropout(relu(flatten(s2.h)), cfg_.dropout, mode, dropout_seed);
  return reshape(dense(features, fc_w, fc_b), {cfg_.horizon, cfg_.n_lat, cfg_.n_lon});
}

Var ConvLstmXt::loss(Tape& tape, const WindowSample& sample, Mode mode, std::uint64_t dropout_seed) {
  const Var pred = forward(tape, sample.inputs, mode, dropout_seed);
  return mse(pred, tape.constant(sample.targets));
}

Tensor ConvLstmXt::predict(const Tensor& inputs) {
  Tape tape;
  return forward(tape, inputs, Mode::Eval, 0).value();
}

Tensor ConvLstmXt::predict(std::span<const WindowSample> batch) {
  if (batch.empty()) fail(ErrorKind::ShapeMismatch, "predict needs at least one sample");
  std::vector<double> out;
  out.reserve(batch.size() * cfg_.horizon * cfg_.n_lat * cfg_.n_lon);
  for (const auto& s : batch) {
    const Tensor y = predict(s.inputs);
    out.insert(out.end(), y.data().begin(), y.data().end());
  }
  return Tensor({batch.size(), cfg_.horizon, cfg_.n_lat, cfg_.n_lon}, std::move(out));
}

}  // namespace nino
