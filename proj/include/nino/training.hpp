#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "nino/autodiff.hpp"

namespace nino {

struct TrainConfig {
  std::size_t epochs = 50;
  double lr = 1e-3;
  std::size_t batch = 32;
  double split = 0.8;  // leading fraction of anchors used for training
  std::uint64_t seed = 42;
};

struct EpochLoss {
  std::size_t epoch = 0;  // 0 is the initialization
  double train_mse = 0.0;
  double test_mse = std::nan("");
};

struct TrainReport {
  std::vector<EpochLoss> curve;
  std::size_t batches_per_epoch = 0;
  std::size_t optimizer_steps = 0;
};

struct Split {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

/// First floor(fraction * n) anchors train, the rest test. Both sides must be nonempty.
Split chronological_split(std::size_t n, double fraction);

inline std::size_t batch_count(std::size_t n, std::size_t batch) { return batch == 0 ? 0 : (n + batch - 1) / batch; }

/// Builds the scalar loss of sample `index` on `tape`.
using SampleLoss = std::function<Var(Tape& tape, std::size_t index, Mode mode, std::uint64_t dropout_seed)>;

/// Minibatch Adam over `n_train` samples for cfg.epochs epochs. Each epoch visits
/// a seeded permutation of the training set; every minibatch averages per-sample
/// gradients in a fixed order, so results depend only on cfg.seed. The curve
/// records eval-mode MSE on both sets before training and after every epoch.
TrainReport train_loop(ParameterSet& params, std::size_t n_train, const SampleLoss& train_loss, std::size_t n_test,
                       const SampleLoss& test_loss, const TrainConfig& cfg);

/// Mean eval-mode loss over `n` samples.
double evaluate_loss(std::size_t n, const SampleLoss& loss);

template <class Model, class Sample>
TrainReport train(Model& model, std::span<const Sample> train_set, std::span<const Sample> test_set,
                  const TrainConfig& cfg) {
  auto make = [&model](std::span<const Sample> set) -> SampleLoss {
    return [&model, set](Tape& tape, std::size_t i, Mode mode, std::uint64_t seed) {
      return model.loss(tape, set[i], mode, seed);
    };
  };
  return train_loop(model.parameters(), train_set.size(), make(train_set), test_set.size(), make(test_set), cfg);
}

void write_loss_curve(const TrainReport& report, const std::filesystem::path& path);

}  // namespace nino
