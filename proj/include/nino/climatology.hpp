#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "nino/grid.hpp"

namespace nino {

inline constexpr double kEventThreshold = 0.5;  // degC
inline constexpr std::size_t kQuarters = 5;
/// Months covered by one row of five overlapping 3-month quarters.
inline constexpr std::size_t kQuarterSpan = kQuarters + 2;

using Quarters = std::array<double, kQuarters>;

/// Per-cell monthly means over a base period.
struct ClimatologyTable {
  GridAxes axes;
  Period base_period;
  std::array<std::vector<double>, 12> means;  // [month-1][lat*n_lon + lon]

  double mean(int month, std::size_t cell) const { return means[static_cast<std::size_t>(month - 1)][cell]; }
};

/// Monthly regional anomaly, one value per consecutive month.
struct AnomalySeries {
  TimeStamp start;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  TimeStamp time_at(std::size_t i) const { return start.plus_months(static_cast<long>(i)); }
};

/// 3-month running mean. `start` labels the last month of the first window.
struct OniSeries {
  TimeStamp start;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  TimeStamp time_at(std::size_t i) const { return start.plus_months(static_cast<long>(i)); }
};

/// Row t holds the five overlapping quarter means starting at month start + t.
struct QuarterMatrix {
  TimeStamp start;
  std::vector<Quarters> rows;

  std::size_t n_steps() const { return rows.size(); }
  TimeStamp time_at(std::size_t i) const { return start.plus_months(static_cast<long>(i)); }
};

/// January of the first complete calendar year through December of the last one.
Period complete_years(const SpatioTemporalGrid& grid);

/// The 30-year window centered on `year`: Jan (year-15) .. Dec (year+14).
Period centered_base_period(int year);

ClimatologyTable compute_climatology(const SpatioTemporalGrid& grid, const Period& base_period);

/// Per-cell anomaly fields T(t) - climatology(m(t)), same layout as `grid`.
SpatioTemporalGrid anomaly_fields(const SpatioTemporalGrid& grid, const ClimatologyTable& clim);

/// Spatial mean over in-bounds cells of the per-cell anomaly, for every month of `grid`.
AnomalySeries regional_anomaly(const SpatioTemporalGrid& grid, const ClimatologyTable& clim,
                               const GeoBounds& bounds);

/// Regional anomaly where each month uses the 30-year climatology centered on its own
/// year. Errors with InsufficientData when the grid does not cover that window.
AnomalySeries centered_regional_anomaly(const SpatioTemporalGrid& grid, const GeoBounds& bounds);

OniSeries oni(const AnomalySeries& anomalies);

QuarterMatrix quarter_matrix(const AnomalySeries& anomalies, std::size_t n_steps);

/// Five overlapping 3-month means of a 7-month anomaly run.
Quarters quarters_of(std::span<const double> seven_months);

/// El Nino event: every quarter meets or exceeds the threshold.
bool classify_event(const Quarters& quarters, double threshold = kEventThreshold);

void write_series_csv(const AnomalySeries& series, const std::filesystem::path& path);
void write_series_csv(const OniSeries& series, const std::filesystem::path& path);
void write_quarter_csv(const QuarterMatrix& matrix, const std::filesystem::path& path);

}  // namespace nino
