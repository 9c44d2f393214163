#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nino/time.hpp"

namespace nino {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

enum class Variable { SST, OHC };

std::string_view to_string(Variable v);
Variable parse_variable(std::string_view text);
std::string_view default_units(Variable v);

/// Normalizes a longitude into [-180, 180).
double normalize_lon(double lon);

/// Lat/lon box with inclusive bounds; longitudes normalized to [-180, 180).
struct GeoBounds {
  double lat_min = -90;
  double lat_max = 90;
  double lon_min = -180;
  double lon_max = 180;

  GeoBounds() = default;
  GeoBounds(double lat_lo, double lat_hi, double lon_lo, double lon_hi);

  bool contains(double lat, double lon) const;

  /// 5S-5N, 170W-120W.
  static GeoBounds nino34() { return {-5.0, 5.0, -170.0, -120.0}; }
};

/// Ascending, uniformly spaced cell-center coordinates.
class GridAxes {
 public:
  static constexpr double kSpacingTolerance = 1e-9;

  GridAxes() = default;
  GridAxes(std::vector<double> lats, std::vector<double> lons);

  /// Uniform axis: `count` centers starting at `first`.
  static std::vector<double> uniform(double first, double step, std::size_t count);

  const std::vector<double>& lats() const { return lats_; }
  const std::vector<double>& lons() const { return lons_; }
  std::size_t n_lat() const { return lats_.size(); }
  std::size_t n_lon() const { return lons_.size(); }
  std::size_t cells() const { return lats_.size() * lons_.size(); }
  bool empty() const { return lats_.empty() || lons_.empty(); }

  double lat_step() const { return lats_.size() > 1 ? lats_[1] - lats_[0] : 0.0; }
  double lon_step() const { return lons_.size() > 1 ? lons_[1] - lons_[0] : 0.0; }

  /// Same coordinates within the spacing tolerance.
  bool same_as(const GridAxes& other) const;

 private:
  std::vector<double> lats_;
  std::vector<double> lons_;
};

/// Time-ordered stack of monthly lat x lon fields, stored [time][lat][lon].
/// Immutable once constructed.
class SpatioTemporalGrid {
 public:
  SpatioTemporalGrid() = default;
  SpatioTemporalGrid(Variable variable, GridAxes axes, TimeStamp start, std::size_t steps,
                     std::vector<double> values, std::string units = {});

  Variable variable() const { return variable_; }
  const std::string& units() const { return units_; }
  const GridAxes& axes() const { return axes_; }
  TimeStamp start() const { return start_; }
  TimeStamp end() const { return start_.plus_months(static_cast<long>(steps_) - 1); }
  Period period() const { return {start(), end()}; }
  std::size_t steps() const { return steps_; }
  std::size_t cells() const { return axes_.cells(); }

  TimeStamp time_at(std::size_t step) const { return start_.plus_months(static_cast<long>(step)); }
  /// Step index of `t`; throws OutOfRange when outside the grid's period.
  std::size_t index_of(const TimeStamp& t) const;

  double at(std::size_t step, std::size_t lat, std::size_t lon) const {
    return values_[(step * axes_.n_lat() + lat) * axes_.n_lon() + lon];
  }
  std::span<const double> field(std::size_t step) const {
    return std::span<const double>(values_).subspan(step * cells(), cells());
  }
  const std::vector<double>& values() const { return values_; }

  bool has_missing() const;
  /// Count of SST values outside the physically plausible range [-5, 45] degC.
  std::size_t implausible_count() const;

  /// Sub-range of time steps [first, first + count).
  SpatioTemporalGrid slice_time(std::size_t first, std::size_t count) const;
  /// Same layout with new values (e.g. after normalization).
  SpatioTemporalGrid with_values(std::vector<double> values) const;

  friend bool operator==(const SpatioTemporalGrid& a, const SpatioTemporalGrid& b);

 private:
  Variable variable_ = Variable::SST;
  std::string units_;
  GridAxes axes_;
  TimeStamp start_;
  std::size_t steps_ = 0;
  std::vector<double> values_;
};

inline constexpr double kSstMin = -5.0;
inline constexpr double kSstMax = 45.0;

/// Cells whose centers fall inside `bounds` (inclusive); time range unchanged.
SpatioTemporalGrid extract_region(const SpatioTemporalGrid& grid, const GeoBounds& bounds);

/// Mean over the non-missing cells of the field at `t`.
double regional_mean(const SpatioTemporalGrid& grid, const TimeStamp& t);

/// Crops both grids to the shared months and resamples them onto a shared cell set.
/// Per axis the coarser of the two coordinate sets is kept (restricted to the other
/// grid's extent) and values are taken from the nearest source cell.
std::pair<SpatioTemporalGrid, SpatioTemporalGrid> align(const SpatioTemporalGrid& a,
                                                        const SpatioTemporalGrid& b);

}  // namespace nino
