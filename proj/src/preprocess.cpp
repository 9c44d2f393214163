#include "nino/preprocess.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "nino/error.hpp"

namespace nino {

NormalizationParams fit_minmax(const SpatioTemporalGrid& grid, std::size_t first, std::size_t count) {
  if (first + count > grid.steps()) fail(ErrorKind::OutOfRange, "fit range outside grid");
  NormalizationParams p{grid.variable(), 0.0, 0.0};
  bool any = false;
  const auto& v = grid.values();
  for (std::size_t i = first * grid.cells(); i < (first + count) * grid.cells(); ++i) {
    if (is_missing(v[i])) continue;
    if (!any) {
      p.min = p.max = v[i];
      any = true;
    } else {
      p.min = std::min(p.min, v[i]);
      p.max = std::max(p.max, v[i]);
    }
  }
  if (!any) fail(ErrorKind::AllMissing, "no values to fit min-max scaling");
  return p;
}

double normalize(double x, const NormalizationParams& p) {
  if (p.degenerate()) {
    spdlog::warn("DegenerateRange: {} min == max == {}, normalizing to 0", to_string(p.variable), p.min);
    return 0.0;
  }
  return std::clamp((x - p.min) / (p.max - p.min), 0.0, 1.0);
}

double denormalize(double y, const NormalizationParams& p) { return p.min + y * (p.max - p.min); }

NormalizedGrid normalize_grid(const SpatioTemporalGrid& grid, const NormalizationParams& p) {
  std::vector<double> out(grid.values().size());
  std::size_t clamped = 0;
  if (p.degenerate()) spdlog::warn("DegenerateRange: {} min == max == {}, normalizing to 0", to_string(p.variable), p.min);
  const double range = p.max - p.min;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = grid.values()[i];
    if (is_missing(x)) {
      out[i] = kMissing;
      continue;
    }
    if (x < p.min || x > p.max) ++clamped;
    out[i] = p.degenerate() ? 0.0 : std::clamp((x - p.min) / range, 0.0, 1.0);
  }
  if (clamped > 0) spdlog::info("{}: clamped {} values outside the fitted range", to_string(p.variable), clamped);
  return {grid.with_values(std::move(out)), clamped};
}

void save_normalization(const NormalizationParams& p, const std::filesystem::path& path) {
  nlohmann::json j{{"variable", std::string(to_string(p.variable))}, {"min", p.min}, {"max", p.max}};
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

NormalizationParams load_normalization(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::FileNotFound, path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    return {parse_variable(j.at("variable").get<std::string>()), j.at("min").get<double>(), j.at("max").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::FormatError, path.string() + ": " + e.what());
  }
}

std::size_t window_count(std::size_t months, std::size_t window_len, std::size_t horizon, std::size_t stride) {
  if (window_len == 0 || horizon == 0 || stride == 0) fail(ErrorKind::BadConfig, "window, horizon and stride must be >= 1");
  if (months < window_len + horizon) return 0;
  return (months - window_len - horizon) / stride + 1;
}

std::vector<WindowSample> build_windows(const SpatioTemporalGrid& sst, const SpatioTemporalGrid* ohc,
                                        std::size_t window_len, std::size_t horizon, std::size_t stride) {
  const std::size_t n = window_count(sst.steps(), window_len, horizon, stride);
  if (n == 0) {
    fail(ErrorKind::TooShort, std::to_string(sst.steps()) + " months cannot hold a " + std::to_string(window_len) +
                                  "+" + std::to_string(horizon) + " month window");
  }
  if (ohc && (ohc->start() != sst.start() || ohc->steps() != sst.steps() || !ohc->axes().same_as(sst.axes()))) {
    fail(ErrorKind::AxesMismatch, "SST and OHC grids must be aligned before windowing");
  }
  if (sst.has_missing() || (ohc && ohc->has_missing())) {
    fail(ErrorKind::MissingValues, "training windows require grids without missing cells");
  }
  const std::size_t channels = ohc ? 2 : 1;
  const std::size_t n_lat = sst.axes().n_lat();
  const std::size_t n_lon = sst.axes().n_lon();
  const std::size_t cells = sst.cells();

  std::vector<WindowSample> samples;
  samples.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t offset = s * stride;
    std::vector<double> in;
    in.reserve(window_len * channels * cells);
    for (std::size_t t = offset; t < offset + window_len; ++t) {
      const auto f = sst.field(t);
      in.insert(in.end(), f.begin(), f.end());
      if (ohc) {
        const auto g = ohc->field(t);
        in.insert(in.end(), g.begin(), g.end());
      }
    }
    std::vector<double> target;
    target.reserve(horizon * cells);
    for (std::size_t t = offset + window_len; t < offset + window_len + horizon; ++t) {
      const auto f = sst.field(t);
      target.insert(target.end(), f.begin(), f.end());
    }
    samples.push_back({Tensor({window_len, channels, n_lat, n_lon}, std::move(in)),
                       Tensor({horizon, n_lat, n_lon}, std::move(target)), offset, sst.time_at(offset + window_len)});
  }
  return samples;
}

}  // namespace nino
