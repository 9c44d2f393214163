#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "nino/autodiff.hpp"
#include "nino/preprocess.hpp"
#include "nino/rng.hpp"

namespace nino {

enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kOutputGate = 2, kCandidate = 3 };
inline constexpr std::size_t kGates = 4;

/// Indices into a ParameterSet for one ConvLSTM cell. Per gate: input kernels
/// [C_h][C_in][k][k], hidden kernels [C_h][C_h][k][k], bias [C_h].
struct ConvLstmCellParams {
  std::size_t in_channels = 0;
  std::size_t hidden = 0;
  std::size_t kernel = 3;
  std::array<std::size_t, kGates> w_x{};
  std::array<std::size_t, kGates> w_h{};
  std::array<std::size_t, kGates> bias{};
};

/// Registers a cell's tensors under `prefix` and fills them: kernels uniform in
/// +-1/sqrt(fan_in), forget-gate bias 1, other biases 0. `rng == nullptr` zeroes all.
ConvLstmCellParams add_cell(ParameterSet& params, const std::string& prefix, std::size_t in_channels,
                            std::size_t hidden, std::size_t kernel, Rng* rng);

/// A cell's parameters as leaves of one tape.
struct BoundCell {
  std::array<Var, kGates> w_x;
  std::array<Var, kGates> w_h;
  std::array<Var, kGates> bias;
};

BoundCell bind(Tape& tape, ParameterSet& params, const ConvLstmCellParams& cell);

struct CellState {
  Var h;
  Var c;
};

/// One ConvLSTM step without peepholes:
///   i = sigmoid(Wxi*X + Whi*H + bi)    f = sigmoid(Wxf*X + Whf*H + bf)
///   o = sigmoid(Wxo*X + Who*H + bo)    g = tanh(Wxg*X + Whg*H + bg)
///   C' = f.C + i.g                     H' = o.tanh(C')
/// where * is same-padded 2D convolution and . the Hadamard product.
CellState cell_step(const BoundCell& cell, Var x, Var h_prev, Var c_prev);

struct ConvLstmXtConfig {
  std::size_t in_channels = 2;  // SST, OHC
  std::array<std::size_t, 2> hidden{8, 4};
  std::size_t kernel = 3;
  std::size_t horizon = kDefaultHorizon;
  std::size_t n_lat = 0;
  std::size_t n_lon = 0;
  double dropout = 0.3;
};

/// Two stacked ConvLSTM blocks and a fully-connected head that maps block 2's
/// final hidden state to `horizon` SST grids.
class ConvLstmXt {
 public:
  /// Random initialization from `seed`.
  ConvLstmXt(const ConvLstmXtConfig& cfg, std::uint64_t seed);
  /// All parameters zero.
  static ConvLstmXt zeros(const ConvLstmXtConfig& cfg);

  const ConvLstmXtConfig& config() const { return cfg_; }
  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }

  /// inputs [window][channels][lat][lon] -> [horizon][lat][lon] (normalized units).
  Var forward(Tape& tape, const Tensor& inputs, Mode mode, std::uint64_t dropout_seed);
  Var loss(Tape& tape, const WindowSample& sample, Mode mode, std::uint64_t dropout_seed);

  /// Eval-mode predictions for a batch: [batch][horizon][lat][lon].
  Tensor predict(std::span<const WindowSample> batch);
  Tensor predict(const Tensor& inputs);

 private:
  ConvLstmXt(const ConvLstmXtConfig& cfg, Rng* rng);

  ConvLstmXtConfig cfg_;
  ParameterSet params_;
  std::array<ConvLstmCellParams, 2> blocks_{};
  std::size_t fc_w_ = 0;
  std::size_t fc_b_ = 0;
};

}  // namespace nino
