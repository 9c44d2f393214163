#include "nino/grid.hpp"

#include <algorithm>

#include "nino/error.hpp"

namespace nino {

namespace {

constexpr double kEdgeTol = 1e-9;

void check_axis(const std::vector<double>& axis, const char* name) {
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      fail(ErrorKind::InconsistentAxes, std::string(name) + " axis is not strictly ascending");
    }
  }
  if (axis.size() > 2) {
    const double step = axis[1] - axis[0];
    for (std::size_t i = 2; i < axis.size(); ++i) {
      if (std::abs((axis[i] - axis[i - 1]) - step) > GridAxes::kSpacingTolerance) {
        fail(ErrorKind::InconsistentAxes, std::string(name) + " axis is not uniformly spaced");
      }
    }
  }
}

bool same_axis(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > GridAxes::kSpacingTolerance) return false;
  }
  return true;
}

// Index of the source coordinate nearest to x; ties go to the lower index.
std::size_t nearest_index(const std::vector<double>& source, double x) {
  auto it = std::lower_bound(source.begin(), source.end(), x);
  if (it == source.begin()) return 0;
  if (it == source.end()) return source.size() - 1;
  const auto hi = static_cast<std::size_t>(it - source.begin());
  const auto lo = hi - 1;
  return (x - source[lo] <= source[hi] - x) ? lo : hi;
}

double axis_step(const std::vector<double>& axis) { return axis.size() > 1 ? axis[1] - axis[0] : 0.0; }

// The coarser axis, restricted to the finer axis' extent.
std::vector<double> shared_axis(const std::vector<double>& a, const std::vector<double>& b) {
  if (same_axis(a, b)) return a;
  const bool a_coarse = axis_step(a) >= axis_step(b);
  const auto& coarse = a_coarse ? a : b;
  const auto& other = a_coarse ? b : a;
  std::vector<double> out;
  for (double x : coarse) {
    if (x >= other.front() - kEdgeTol && x <= other.back() + kEdgeTol) out.push_back(x);
  }
  return out;
}

SpatioTemporalGrid resample(const SpatioTemporalGrid& g, const GridAxes& target, std::size_t first_step,
                            std::size_t steps) {
  std::vector<std::size_t> lat_idx;
  std::vector<std::size_t> lon_idx;
  for (double lat : target.lats()) lat_idx.push_back(nearest_index(g.axes().lats(), lat));
  for (double lon : target.lons()) lon_idx.push_back(nearest_index(g.axes().lons(), lon));
  std::vector<double> values;
  values.reserve(steps * target.cells());
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t i : lat_idx) {
      for (std::size_t j : lon_idx) values.push_back(g.at(first_step + t, i, j));
    }
  }
  return SpatioTemporalGrid(g.variable(), target, g.time_at(first_step), steps, std::move(values), g.units());
}

}  // namespace

std::string_view to_string(Variable v) { return v == Variable::SST ? "SST" : "OHC"; }

Variable parse_variable(std::string_view text) {
  if (text == "SST" || text == "sst") return Variable::SST;
  if (text == "OHC" || text == "ohc") return Variable::OHC;
  fail(ErrorKind::FormatError, "unknown variable '" + std::string(text) + "'");
}

std::string_view default_units(Variable v) { return v == Variable::SST ? "degC" : "1"; }

double normalize_lon(double lon) {
  double x = std::fmod(lon + 180.0, 360.0);
  if (x < 0) x += 360.0;
  return x - 180.0;
}

GeoBounds::GeoBounds(double lat_lo, double lat_hi, double lon_lo, double lon_hi)
    : lat_min(lat_lo), lat_max(lat_hi), lon_min(normalize_lon(lon_lo)), lon_max(normalize_lon(lon_hi)) {
  // 180E normalizes to -180; keep an eastern edge at the dateline usable.
  if (lon_hi >= 180.0 && lon_max == -180.0) lon_max = 180.0;
  if (lat_min > lat_max) fail(ErrorKind::BadSpec, "lat_min > lat_max");
  if (lon_min > lon_max) fail(ErrorKind::BadSpec, "lon_min > lon_max after normalization (dateline crossing unsupported)");
}

bool GeoBounds::contains(double lat, double lon) const {
  return lat >= lat_min - kEdgeTol && lat <= lat_max + kEdgeTol && lon >= lon_min - kEdgeTol &&
         lon <= lon_max + kEdgeTol;
}

GridAxes::GridAxes(std::vector<double> lats, std::vector<double> lons) : lats_(std::move(lats)), lons_(std::move(lons)) {
  check_axis(lats_, "lat");
  check_axis(lons_, "lon");
}

std::vector<double> GridAxes::uniform(double first, double step, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = first + step * static_cast<double>(i);
  return out;
}

bool GridAxes::same_as(const GridAxes& other) const {
  return same_axis(lats_, other.lats_) && same_axis(lons_, other.lons_);
}

SpatioTemporalGrid::SpatioTemporalGrid(Variable variable, GridAxes axes, TimeStamp start, std::size_t steps,
                                       std::vector<double> values, std::string units)
    : variable_(variable),
      units_(units.empty() ? std::string(default_units(variable)) : std::move(units)),
      axes_(std::move(axes)),
      start_(start),
      steps_(steps),
      values_(std::move(values)) {
  if (values_.size() != steps_ * axes_.cells()) {
    fail(ErrorKind::ShapeMismatch, "grid has " + std::to_string(values_.size()) + " values, expected " +
                                       std::to_string(steps_ * axes_.cells()));
  }
}

std::size_t SpatioTemporalGrid::index_of(const TimeStamp& t) const {
  const long k = months_between(start_, t);
  if (k < 0 || k >= static_cast<long>(steps_)) {
    fail(ErrorKind::OutOfRange, t.str() + " outside " + period().str());
  }
  return static_cast<std::size_t>(k);
}

bool SpatioTemporalGrid::has_missing() const {
  return std::any_of(values_.begin(), values_.end(), [](double v) { return is_missing(v); });
}

std::size_t SpatioTemporalGrid::implausible_count() const {
  if (variable_ != Variable::SST) return 0;
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](double v) {
    return !is_missing(v) && (v < kSstMin || v > kSstMax);
  }));
}

SpatioTemporalGrid SpatioTemporalGrid::slice_time(std::size_t first, std::size_t count) const {
  if (first + count > steps_ || count == 0) fail(ErrorKind::OutOfRange, "time slice outside grid");
  std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(first * cells()),
                        values_.begin() + static_cast<std::ptrdiff_t>((first + count) * cells()));
  return SpatioTemporalGrid(variable_, axes_, time_at(first), count, std::move(v), units_);
}

SpatioTemporalGrid SpatioTemporalGrid::with_values(std::vector<double> values) const {
  return SpatioTemporalGrid(variable_, axes_, start_, steps_, std::move(values), units_);
}

bool operator==(const SpatioTemporalGrid& a, const SpatioTemporalGrid& b) {
  if (a.variable_ != b.variable_ || a.start_ != b.start_ || a.steps_ != b.steps_ || !a.axes_.same_as(b.axes_)) {
    return false;
  }
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    const double x = a.values_[i];
    const double y = b.values_[i];
    if (is_missing(x) != is_missing(y)) return false;
    if (!is_missing(x) && x != y) return false;
  }
  return true;
}

SpatioTemporalGrid extract_region(const SpatioTemporalGrid& grid, const GeoBounds& bounds) {
  if (grid.axes().empty()) fail(ErrorKind::EmptyRegion, "grid has no cells");
  std::vector<std::size_t> lat_idx;
  std::vector<std::size_t> lon_idx;
  const auto& lats = grid.axes().lats();
  const auto& lons = grid.axes().lons();
  for (std::size_t i = 0; i < lats.size(); ++i) {
    if (lats[i] >= bounds.lat_min - kEdgeTol && lats[i] <= bounds.lat_max + kEdgeTol) lat_idx.push_back(i);
  }
  for (std::size_t j = 0; j < lons.size(); ++j) {
    if (lons[j] >= bounds.lon_min - kEdgeTol && lons[j] <= bounds.lon_max + kEdgeTol) lon_idx.push_back(j);
  }
  if (lat_idx.empty() || lon_idx.empty()) fail(ErrorKind::EmptyRegion, "no cell centers inside bounds");

  std::vector<double> new_lats;
  std::vector<double> new_lons;
  for (auto i : lat_idx) new_lats.push_back(lats[i]);
  for (auto j : lon_idx) new_lons.push_back(lons[j]);

  std::vector<double> values;
  values.reserve(grid.steps() * lat_idx.size() * lon_idx.size());
  for (std::size_t t = 0; t < grid.steps(); ++t) {
    for (auto i : lat_idx) {
      for (auto j : lon_idx) values.push_back(grid.at(t, i, j));
    }
  }
  return SpatioTemporalGrid(grid.variable(), GridAxes(std::move(new_lats), std::move(new_lons)), grid.start(),
                            grid.steps(), std::move(values), grid.units());
}

double regional_mean(const SpatioTemporalGrid& grid, const TimeStamp& t) {
  const auto field = grid.field(grid.index_of(t));
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : field) {
    if (is_missing(v)) continue;
    sum += v;
    ++n;
  }
  if (n == 0) fail(ErrorKind::AllMissing, "every cell missing at " + t.str());
  return sum / static_cast<double>(n);
}

std::pair<SpatioTemporalGrid, SpatioTemporalGrid> align(const SpatioTemporalGrid& a, const SpatioTemporalGrid& b) {
  if (a.steps() == 0 || b.steps() == 0 || a.axes().empty() || b.axes().empty()) {
    fail(ErrorKind::NoOverlap, "cannot align an empty grid");
  }
  const TimeStamp first = std::max(a.start(), b.start());
  const TimeStamp last = std::min(a.end(), b.end());
  if (last < first) fail(ErrorKind::NoOverlap, a.period().str() + " and " + b.period().str() + " are disjoint");
  const auto steps = static_cast<std::size_t>(months_between(first, last) + 1);

  auto lats = shared_axis(a.axes().lats(), b.axes().lats());
  auto lons = shared_axis(a.axes().lons(), b.axes().lons());
  if (lats.empty() || lons.empty()) fail(ErrorKind::EmptyRegion, "grids share no cells");
  const GridAxes target(std::move(lats), std::move(lons));
  return {resample(a, target, a.index_of(first), steps), resample(b, target, b.index_of(first), steps)};
}

}  // namespace nino
