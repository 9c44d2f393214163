#include "nino/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "nino/error.hpp"

namespace nino {

namespace {

void check_aligned(const QuarterMatrix& a, const QuarterMatrix& b) {
  if (a.n_steps() != b.n_steps()) {
    fail(ErrorKind::ShapeMismatch, "quarter matrices have " + std::to_string(a.n_steps()) + " and " +
                                       std::to_string(b.n_steps()) + " rows");
  }
}

std::string describe(int k) {
  if (k == 0) return "5 observed quarters (baseline)";
  const int obs = kConfigurations - 1 - k;
  return std::to_string(obs) + " observed + " + std::to_string(k) + " forecasted";
}

}  // namespace

QuarterMatrix blend(const QuarterMatrix& observed, const QuarterMatrix& forecast, int k) {
  check_aligned(observed, forecast);
  if (k < 0 || k > static_cast<int>(kQuarters)) fail(ErrorKind::BadK, "k must be in 0..5, got " + std::to_string(k));
  QuarterMatrix out = observed;
  const auto first_forecast = kQuarters - static_cast<std::size_t>(k);
  for (std::size_t t = 0; t < out.n_steps(); ++t) {
    for (std::size_t i = first_forecast; i < kQuarters; ++i) out.rows[t][i] = forecast.rows[t][i];
  }
  return out;
}

ConfusionMatrix evaluate_config(const QuarterMatrix& blended, const QuarterMatrix& observed, double threshold) {
  check_aligned(blended, observed);
  ConfusionMatrix cm;
  for (std::size_t t = 0; t < blended.n_steps(); ++t) {
    const bool pred = classify_event(blended.rows[t], threshold);
    const bool truth = classify_event(observed.rows[t], threshold);
    if (pred && truth) ++cm.tp;
    else if (!pred && !truth) ++cm.tn;
    else if (pred) ++cm.fp;
    else ++cm.fn;
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) fail(ErrorKind::EmptyMatrix, "accuracy of an empty confusion matrix");
  return 100.0 * static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

std::string format_percent(double percent) {
  // Half-up at the second decimal; the small nudge absorbs binary representation
  // error such as 90.565 stored as 90.56499...
  const double hundredths = std::floor(percent * 100.0 + 0.5 + 1e-9);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", hundredths / 100.0);
  return buf;
}

EvalReport run_all_configs(const QuarterMatrix& observed, const QuarterMatrix& forecast, double threshold) {
  check_aligned(observed, forecast);
  if (!(threshold > 0.0)) fail(ErrorKind::BadConfig, "threshold must be positive");
  EvalReport r;
  r.n_steps = observed.n_steps();
  r.threshold = threshold;
  for (int k = 0; k < kConfigurations; ++k) {
    const auto cm = evaluate_config(blend(observed, forecast, k), observed, threshold);
    r.configs[static_cast<std::size_t>(k)] = {k, cm, accuracy(cm)};
  }
  return r;
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << "config,tp,tn,fp,fn,accuracy\n";
  for (const auto& c : report.configs) {
    out << c.k << ',' << c.cm.tp << ',' << c.cm.tn << ',' << c.cm.fp << ',' << c.cm.fn << ','
        << format_percent(c.accuracy) << '\n';
  }
  if (!out) fail(ErrorKind::IoError, "write failed: " + path.string());
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
  nlohmann::json j;
  j["n_steps"] = report.n_steps;
  j["threshold"] = report.threshold;
  j["configurations"] = nlohmann::json::array();
  for (const auto& c : report.configs) {
    j["configurations"].push_back({{"config", c.k},
                                   {"observed_quarters", static_cast<int>(kQuarters) - c.k},
                                   {"forecast_quarters", c.k},
                                   {"tp", c.cm.tp},
                                   {"tn", c.cm.tn},
                                   {"fp", c.cm.fp},
                                   {"fn", c.cm.fn},
                                   {"accuracy", c.accuracy},
                                   {"accuracy_display", format_percent(c.accuracy)}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string format_report(const EvalReport& report) {
  std::string s;
  char line[160];
  std::snprintf(line, sizeof line, "%-4s %-34s %5s %5s %5s %5s %9s\n", "No.", "Forecast configuration", "TP", "TN",
                "FP", "FN", "Acc (%)");
  s += line;
  for (const auto& c : report.configs) {
    std::snprintf(line, sizeof line, "%-4d %-34s %5zu %5zu %5zu %5zu %9s\n", c.k, describe(c.k).c_str(), c.cm.tp,
                  c.cm.tn, c.cm.fp, c.cm.fn, format_percent(c.accuracy).c_str());
    s += line;
  }
  std::snprintf(line, sizeof line, "%zu evaluation steps, event threshold %.2f degC\n", report.n_steps, report.threshold);
  s += line;
  return s;
}

}  // namespace nino
