#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nino/autodiff.hpp"
#include "nino/climatology.hpp"
#include "nino/preprocess.hpp"
#include "nino/rng.hpp"

namespace nino {

enum class Activation { None, Relu, Tanh };

struct ConvLayerSpec {
  std::size_t channels = 8;
  std::size_t kernel = 3;
  Activation activation = Activation::Relu;
};

/// Spatial forecaster: a window of SST anomaly fields stacked as channels goes
/// through the conv stack, then a dense head emits five quarterly anomalies (degC).
struct CnnForecasterConfig {
  std::size_t window = kDefaultWindow;
  std::size_t n_lat = 0;
  std::size_t n_lon = 0;
  std::vector<ConvLayerSpec> conv{{8, 3, Activation::Relu}, {8, 3, Activation::Relu}};
  std::size_t head_hidden = 32;  // 0: a single dense layer straight to the outputs
};

struct CnnSample {
  Tensor inputs;  // [window][lat][lon] anomaly fields, degC
  Quarters targets{};
  std::size_t offset = 0;  // time index of the first input month
  TimeStamp anchor;        // first forecast month
};

/// Samples aligned with build_windows(): input months [o, o+window), targets the
/// quarters of the observed regional anomaly over months [o+window, o+window+7).
std::vector<CnnSample> build_cnn_samples(const SpatioTemporalGrid& anomaly_fields, const AnomalySeries& regional,
                                         std::size_t window, std::size_t stride);

class CnnForecaster {
 public:
  CnnForecaster(const CnnForecasterConfig& cfg, std::uint64_t seed);
  static CnnForecaster zeros(const CnnForecasterConfig& cfg);

  const CnnForecasterConfig& config() const { return cfg_; }
  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }

  /// inputs [window][lat][lon] -> [5]
  Var forward(Tape& tape, const Tensor& inputs);
  Var loss(Tape& tape, const CnnSample& sample, Mode mode, std::uint64_t seed);

  Quarters predict(const Tensor& inputs);

 private:
  CnnForecaster(const CnnForecasterConfig& cfg, Rng* rng);

  CnnForecasterConfig cfg_;
  ParameterSet params_;
  std::vector<std::size_t> conv_w_;
  std::vector<std::size_t> conv_b_;
  std::vector<std::size_t> dense_w_;
  std::vector<std::size_t> dense_b_;
};

}  // namespace nino
