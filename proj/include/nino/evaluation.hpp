#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>

#include "nino/climatology.hpp"

namespace nino {

inline constexpr int kConfigurations = 6;  // k = 0..5 forecasted quarters

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Quarters 0..4-k observed, 5-k..4 forecast.
QuarterMatrix blend(const QuarterMatrix& observed, const QuarterMatrix& forecast, int k);

/// Row-wise event classification of `blended` against the observed truth.
ConfusionMatrix evaluate_config(const QuarterMatrix& blended, const QuarterMatrix& observed,
                                double threshold = kEventThreshold);

/// 100 * (tp + tn) / total.
double accuracy(const ConfusionMatrix& cm);

/// Two decimals, rounded half-up: 48/53 -> "90.57".
std::string format_percent(double percent);

struct ConfigResult {
  int k = 0;
  ConfusionMatrix cm;
  double accuracy = 0.0;  // percent, unrounded
};

struct EvalReport {
  std::size_t n_steps = 0;
  double threshold = kEventThreshold;
  std::array<ConfigResult, kConfigurations> configs{};
};

EvalReport run_all_configs(const QuarterMatrix& observed, const QuarterMatrix& forecast,
                           double threshold = kEventThreshold);

/// `config,tp,tn,fp,fn,accuracy`
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);
void write_report_json(const EvalReport& report, const std::filesystem::path& path);
/// Accuracy table, one line per configuration.
std::string format_report(const EvalReport& report);

}  // namespace nino
