#include "nino/grid_csv.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include "nino/error.hpp"

namespace nino {

namespace {

constexpr std::string_view kHeader = "variable,units,lat,lon,time,value";

[[noreturn]] void format_error(const std::string& source, std::size_t line, const std::string& what) {
  fail(ErrorKind::FormatError, source + ":" + std::to_string(line) + ": " + what);
}

double parse_real(std::string_view field, const std::string& source, std::size_t line, const char* name) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto r = std::from_chars(field.data(), end, v);
  if (field.empty() || r.ec != std::errc{} || r.ptr != end) {
    format_error(source, line, std::string("bad ") + name + " '" + std::string(field) + "'");
  }
  return v;
}

struct Row {
  long serial;
  double lat;
  double lon;
  double value;
};

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

SpatioTemporalGrid read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    if (!std::filesystem::exists(path)) fail(ErrorKind::FileNotFound, path.string());
    fail(ErrorKind::IoError, "cannot open " + path.string());
  }
  return read_grid_csv(in, path.string());
}

SpatioTemporalGrid read_grid_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) format_error(source, line_no, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) format_error(source, line_no, "expected header '" + std::string(kHeader) + "'");

  std::optional<Variable> variable;
  std::string units;
  std::vector<Row> rows;
  std::set<double> lats;
  std::set<double> lons;
  std::set<std::tuple<long, double, double>> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::string_view rest(line);
    std::string_view fields[6];
    for (int f = 0; f < 6; ++f) {
      const auto comma = rest.find(',');
      if (f < 5) {
        if (comma == std::string_view::npos) format_error(source, line_no, "expected 6 fields");
        fields[f] = rest.substr(0, comma);
        rest.remove_prefix(comma + 1);
      } else {
        if (comma != std::string_view::npos) format_error(source, line_no, "expected 6 fields");
        fields[f] = rest;
      }
    }

    Variable v;
    try {
      v = parse_variable(fields[0]);
    } catch (const Error&) {
      format_error(source, line_no, "unknown variable '" + std::string(fields[0]) + "'");
    }
    if (!variable) {
      variable = v;
      units = std::string(fields[1]);
    } else if (*variable != v || units != fields[1]) {
      format_error(source, line_no, "variable/units differ from earlier rows");
    }

    Row row{};
    row.lat = parse_real(fields[2], source, line_no, "lat");
    row.lon = normalize_lon(parse_real(fields[3], source, line_no, "lon"));
    try {
      row.serial = TimeStamp::parse(fields[4]).serial();
    } catch (const Error&) {
      format_error(source, line_no, "bad time '" + std::string(fields[4]) + "'");
    }
    row.value = fields[5].empty() ? kMissing : parse_real(fields[5], source, line_no, "value");

    if (!seen.emplace(row.serial, row.lat, row.lon).second) {
      format_error(source, line_no, "duplicate row for (" + std::string(fields[4]) + ", " + std::string(fields[2]) +
                                        ", " + std::string(fields[3]) + ")");
    }
    lats.insert(row.lat);
    lons.insert(row.lon);
    rows.push_back(row);
  }
  if (rows.empty()) format_error(source, line_no, "no data rows");

  std::set<long> months;
  for (const auto& r : rows) months.insert(r.serial);
  const long first = *months.begin();
  const long last = *months.rbegin();
  if (static_cast<long>(months.size()) != last - first + 1) {
    long expect = first;
    for (long m : months) {
      if (m != expect) break;
      ++expect;
    }
    fail(ErrorKind::GapInTime, source + ": no rows for " + TimeStamp::from_serial(expect).str());
  }

  GridAxes axes(std::vector<double>(lats.begin(), lats.end()), std::vector<double>(lons.begin(), lons.end()));
  std::map<double, std::size_t> lat_index;
  std::map<double, std::size_t> lon_index;
  for (std::size_t i = 0; i < axes.n_lat(); ++i) lat_index[axes.lats()[i]] = i;
  for (std::size_t j = 0; j < axes.n_lon(); ++j) lon_index[axes.lons()[j]] = j;

  const auto steps = static_cast<std::size_t>(last - first + 1);
  std::vector<double> values(steps * axes.cells(), kMissing);
  for (const auto& r : rows) {
    const auto t = static_cast<std::size_t>(r.serial - first);
    values[(t * axes.n_lat() + lat_index[r.lat]) * axes.n_lon() + lon_index[r.lon]] = r.value;
  }
  return SpatioTemporalGrid(*variable, std::move(axes), TimeStamp::from_serial(first), steps, std::move(values),
                            units);
}

void write_grid_csv(const SpatioTemporalGrid& grid, std::ostream& out) {
  out << kHeader << '\n';
  const std::string prefix = std::string(to_string(grid.variable())) + "," + grid.units() + ",";
  std::vector<std::string> lat_text;
  std::vector<std::string> lon_text;
  for (double lat : grid.axes().lats()) lat_text.push_back(format_real(lat));
  for (double lon : grid.axes().lons()) lon_text.push_back(format_real(lon));
  for (std::size_t t = 0; t < grid.steps(); ++t) {
    const std::string time = grid.time_at(t).str();
    for (std::size_t i = 0; i < grid.axes().n_lat(); ++i) {
      for (std::size_t j = 0; j < grid.axes().n_lon(); ++j) {
        const double v = grid.at(t, i, j);
        out << prefix << lat_text[i] << ',' << lon_text[j] << ',' << time << ',';
        if (!is_missing(v)) out << format_real(v);
        out << '\n';
      }
    }
  }
}

void write_grid_csv(const SpatioTemporalGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  write_grid_csv(grid, out);
  if (!out) fail(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace nino
