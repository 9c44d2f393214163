#include "nino/forecast.hpp"

#include "nino/error.hpp"

namespace nino {

SpatioTemporalGrid prediction_grid(const Tensor& predicted, const TimeStamp& first_month, const GridAxes& axes,
                                   const NormalizationParams& norm) {
  if (predicted.rank() != 3 || predicted.extent(1) != axes.n_lat() || predicted.extent(2) != axes.n_lon()) {
    fail(ErrorKind::ShapeMismatch, "predicted grids " + shape_str(predicted.shape()) + " do not match the axes");
  }
  std::vector<double> values(predicted.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = denormalize(predicted[i], norm);
  return SpatioTemporalGrid(norm.variable, axes, first_month, predicted.extent(0), std::move(values));
}

Quarters predict_quarter_anomalies(const Tensor& predicted, const TimeStamp& first_month, const GridAxes& axes,
                                   const NormalizationParams& norm, const ClimatologyTable& clim,
                                   const GeoBounds& bounds) {
  if (predicted.rank() != 3 || predicted.extent(0) != kQuarterSpan) {
    fail(ErrorKind::LengthMismatch, "quarter anomalies need exactly 7 predicted months, got " + shape_str(predicted.shape()));
  }
  const auto grid = prediction_grid(predicted, first_month, axes, norm);
  const auto anomalies = regional_anomaly(grid, clim, bounds);
  return quarters_of(anomalies.values);
}

Quarters ensemble(std::span<const double> cnn_quarters, std::span<const double> lstm_quarters) {
  if (cnn_quarters.size() != kQuarters || lstm_quarters.size() != kQuarters) {
    fail(ErrorKind::LengthMismatch, "ensemble needs two sets of 5 quarters");
  }
  Quarters out{};
  for (std::size_t i = 0; i < kQuarters; ++i) out[i] = 0.5 * (cnn_quarters[i] + lstm_quarters[i]);
  return out;
}

}  // namespace nino
