#include "nino/training.hpp"

#include <fstream>
#include <numeric>

#include <spdlog/spdlog.h>

#include "nino/adam.hpp"
#include "nino/error.hpp"
#include "nino/grid_csv.hpp"
#include "nino/rng.hpp"

namespace nino {

Split chronological_split(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) fail(ErrorKind::BadConfig, "split fraction must be in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    fail(ErrorKind::EmptySplit, std::to_string(n) + " samples leave an empty side at split " + std::to_string(fraction));
  }
  return {n_train, n - n_train};
}

double evaluate_loss(std::size_t n, const SampleLoss& loss) {
  if (n == 0) return std::nan("");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Tape tape;
    sum += loss(tape, i, Mode::Eval, 0).value()[0];
  }
  return sum / static_cast<double>(n);
}

TrainReport train_loop(ParameterSet& params, std::size_t n_train, const SampleLoss& train_loss, std::size_t n_test,
                       const SampleLoss& test_loss, const TrainConfig& cfg) {
  if (n_train == 0) fail(ErrorKind::EmptySplit, "no training samples");
  if (cfg.batch == 0) fail(ErrorKind::BadConfig, "batch size must be >= 1");

  TrainReport report;
  report.batches_per_epoch = batch_count(n_train, cfg.batch);
  report.curve.push_back({0, evaluate_loss(n_train, train_loss), evaluate_loss(n_test, test_loss)});

  AdamState adam(params);
  std::vector<std::size_t> order(n_train);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle(hash_key({cfg.seed, epoch, 0x5u}));
    for (std::size_t i = n_train; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    for (std::size_t b = 0; b < report.batches_per_epoch; ++b) {
      const std::size_t first = b * cfg.batch;
      const std::size_t last = std::min(n_train, first + cfg.batch);
      const double weight = 1.0 / static_cast<double>(last - first);
      params.zero_grad();
      for (std::size_t k = first; k < last; ++k) {
        Tape tape;
        const std::uint64_t dropout_seed = hash_key({cfg.seed, epoch, order[k], 0xd0u});
        tape.backward(scale(train_loss(tape, order[k], Mode::Train, dropout_seed), weight));
      }
      adam_step(params, adam, cfg.lr);
      ++report.optimizer_steps;
    }
    report.curve.push_back({epoch, evaluate_loss(n_train, train_loss), evaluate_loss(n_test, test_loss)});
    spdlog::debug("epoch {}: train {:.6g} test {:.6g}", epoch, report.curve.back().train_mse, report.curve.back().test_mse);
  }
  return report;
}

void write_loss_curve(const TrainReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << "epoch,train_mse,test_mse\n";
  for (const auto& e : report.curve) {
    out << e.epoch << ',' << format_real(e.train_mse) << ',';
    if (!std::isnan(e.test_mse)) out << format_real(e.test_mse);
    out << '\n';
  }
  if (!out) fail(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace nino
