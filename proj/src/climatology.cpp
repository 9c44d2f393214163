#include "nino/climatology.hpp"

#include <fstream>
#include <optional>

#include "nino/error.hpp"
#include "nino/grid_csv.hpp"

namespace nino {

namespace {

std::vector<std::size_t> cells_in_bounds(const GridAxes& axes, const GeoBounds& bounds) {
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < axes.n_lat(); ++i) {
    for (std::size_t j = 0; j < axes.n_lon(); ++j) {
      if (bounds.contains(axes.lats()[i], axes.lons()[j])) cells.push_back(i * axes.n_lon() + j);
    }
  }
  return cells;
}

double mean_anomaly(std::span<const double> field, const ClimatologyTable& clim, int month,
                    const std::vector<std::size_t>& cells, const TimeStamp& t) {
  double sum = 0.0;
  std::size_t n = 0;
  for (auto c : cells) {
    const double v = field[c];
    const double m = clim.mean(month, c);
    if (is_missing(v) || is_missing(m)) continue;
    sum += v - m;
    ++n;
  }
  if (n == 0) fail(ErrorKind::AllMissing, "no valid cells in region at " + t.str());
  return sum / static_cast<double>(n);
}

template <class Series>
void write_two_column(const Series& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << "time,value\n";
  for (std::size_t i = 0; i < s.size(); ++i) out << s.time_at(i).str() << ',' << format_real(s.values[i]) << '\n';
  if (!out) fail(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace

Period complete_years(const SpatioTemporalGrid& grid) {
  const TimeStamp s = grid.start();
  const TimeStamp e = grid.end();
  const int first_year = s.month == 1 ? s.year : s.year + 1;
  const int last_year = e.month == 12 ? e.year : e.year - 1;
  if (last_year < first_year) fail(ErrorKind::InsufficientData, "no complete calendar year in " + grid.period().str());
  return {TimeStamp(first_year, 1), TimeStamp(last_year, 12)};
}

Period centered_base_period(int year) { return {TimeStamp(year - 15, 1), TimeStamp(year + 14, 12)}; }

ClimatologyTable compute_climatology(const SpatioTemporalGrid& grid, const Period& base_period) {
  if (!grid.period().contains(base_period.first) || !grid.period().contains(base_period.last)) {
    fail(ErrorKind::InsufficientData, "base period " + base_period.str() + " not within " + grid.period().str());
  }
  const std::size_t cells = grid.cells();
  ClimatologyTable table{grid.axes(), base_period, {}};
  std::array<std::vector<double>, 12> sums;
  std::array<std::vector<std::size_t>, 12> counts;
  std::array<std::size_t, 12> samples{};
  for (std::size_t m = 0; m < 12; ++m) {
    sums[m].assign(cells, 0.0);
    counts[m].assign(cells, 0);
  }
  const std::size_t first = grid.index_of(base_period.first);
  const std::size_t last = grid.index_of(base_period.last);
  for (std::size_t t = first; t <= last; ++t) {
    const auto m = static_cast<std::size_t>(grid.time_at(t).month - 1);
    ++samples[m];
    const auto field = grid.field(t);
    for (std::size_t c = 0; c < cells; ++c) {
      if (is_missing(field[c])) continue;
      sums[m][c] += field[c];
      ++counts[m][c];
    }
  }
  for (std::size_t m = 0; m < 12; ++m) {
    if (samples[m] == 0) {
      fail(ErrorKind::InsufficientData, "calendar month " + std::to_string(m + 1) + " has no samples in " +
                                            base_period.str());
    }
    table.means[m].resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      table.means[m][c] = counts[m][c] == 0 ? kMissing : sums[m][c] / static_cast<double>(counts[m][c]);
    }
  }
  return table;
}

SpatioTemporalGrid anomaly_fields(const SpatioTemporalGrid& grid, const ClimatologyTable& clim) {
  if (!grid.axes().same_as(clim.axes)) fail(ErrorKind::AxesMismatch, "grid and climatology axes differ");
  std::vector<double> values(grid.values().size());
  const std::size_t cells = grid.cells();
  for (std::size_t t = 0; t < grid.steps(); ++t) {
    const int month = grid.time_at(t).month;
    const auto field = grid.field(t);
    for (std::size_t c = 0; c < cells; ++c) values[t * cells + c] = field[c] - clim.mean(month, c);
  }
  return grid.with_values(std::move(values));
}

AnomalySeries regional_anomaly(const SpatioTemporalGrid& grid, const ClimatologyTable& clim, const GeoBounds& bounds) {
  if (!grid.axes().same_as(clim.axes)) fail(ErrorKind::AxesMismatch, "grid and climatology axes differ");
  const auto cells = cells_in_bounds(grid.axes(), bounds);
  if (cells.empty()) fail(ErrorKind::EmptyRegion, "no cell centers inside bounds");
  AnomalySeries out{grid.start(), {}};
  out.values.reserve(grid.steps());
  for (std::size_t t = 0; t < grid.steps(); ++t) {
    const TimeStamp ts = grid.time_at(t);
    out.values.push_back(mean_anomaly(grid.field(t), clim, ts.month, cells, ts));
  }
  return out;
}

AnomalySeries centered_regional_anomaly(const SpatioTemporalGrid& grid, const GeoBounds& bounds) {
  const auto cells = cells_in_bounds(grid.axes(), bounds);
  if (cells.empty()) fail(ErrorKind::EmptyRegion, "no cell centers inside bounds");
  AnomalySeries out{grid.start(), {}};
  std::optional<ClimatologyTable> clim;
  for (std::size_t t = 0; t < grid.steps(); ++t) {
    const TimeStamp ts = grid.time_at(t);
    const Period base = centered_base_period(ts.year);
    if (!clim || clim->base_period.first != base.first) clim = compute_climatology(grid, base);
    out.values.push_back(mean_anomaly(grid.field(t), *clim, ts.month, cells, ts));
  }
  return out;
}

OniSeries oni(const AnomalySeries& anomalies) {
  const auto& a = anomalies.values;
  if (a.size() < 3) fail(ErrorKind::TooShort, "ONI needs at least 3 anomaly months");
  OniSeries out{anomalies.time_at(2), {}};
  out.values.reserve(a.size() - 2);
  for (std::size_t t = 2; t < a.size(); ++t) out.values.push_back((a[t - 2] + a[t - 1] + a[t]) / 3.0);
  return out;
}

Quarters quarters_of(std::span<const double> seven_months) {
  if (seven_months.size() != kQuarterSpan) fail(ErrorKind::LengthMismatch, "quarters need exactly 7 months");
  Quarters q{};
  for (std::size_t i = 0; i < kQuarters; ++i) {
    q[i] = (seven_months[i] + seven_months[i + 1] + seven_months[i + 2]) / 3.0;
  }
  return q;
}

QuarterMatrix quarter_matrix(const AnomalySeries& anomalies, std::size_t n_steps) {
  if (anomalies.size() < n_steps + kQuarterSpan - 1) {
    fail(ErrorKind::TooShort, std::to_string(n_steps) + " rows need " + std::to_string(n_steps + kQuarterSpan - 1) +
                                  " anomaly months, have " + std::to_string(anomalies.size()));
  }
  QuarterMatrix m{anomalies.start, {}};
  m.rows.reserve(n_steps);
  const std::span<const double> a(anomalies.values);
  for (std::size_t t = 0; t < n_steps; ++t) m.rows.push_back(quarters_of(a.subspan(t, kQuarterSpan)));
  return m;
}

bool classify_event(const Quarters& quarters, double threshold) {
  for (double q : quarters) {
    if (!(q >= threshold)) return false;
  }
  return true;
}

void write_series_csv(const AnomalySeries& series, const std::filesystem::path& path) { write_two_column(series, path); }
void write_series_csv(const OniSeries& series, const std::filesystem::path& path) { write_two_column(series, path); }

void write_quarter_csv(const QuarterMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << "t,q0,q1,q2,q3,q4\n";
  for (std::size_t t = 0; t < matrix.n_steps(); ++t) {
    out << matrix.time_at(t).str();
    for (double q : matrix.rows[t]) out << ',' << format_real(q);
    out << '\n';
  }
  if (!out) fail(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace nino
