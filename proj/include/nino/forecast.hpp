#pragma once

#include <span>

#include "nino/climatology.hpp"
#include "nino/preprocess.hpp"

namespace nino {

/// Denormalizes 7 predicted grids [7][lat][lon] starting at `first_month`, takes
/// the regional anomaly of each month against `clim`, and returns the five
/// overlapping quarter means (degC).
Quarters predict_quarter_anomalies(const Tensor& predicted, const TimeStamp& first_month, const GridAxes& axes,
                                   const NormalizationParams& norm, const ClimatologyTable& clim,
                                   const GeoBounds& bounds);

/// Predicted grids back in physical units as a grid starting at `first_month`.
SpatioTemporalGrid prediction_grid(const Tensor& predicted, const TimeStamp& first_month, const GridAxes& axes,
                                   const NormalizationParams& norm);

/// Elementwise mean of the two models' quarterly anomalies.
Quarters ensemble(std::span<const double> cnn_quarters, std::span<const double> lstm_quarters);

}  // namespace nino
