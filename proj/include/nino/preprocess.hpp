#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "nino/grid.hpp"
#include "nino/tensor.hpp"

namespace nino {

/// Min-max scaling to [0, 1], fitted on training data only.
struct NormalizationParams {
  Variable variable = Variable::SST;
  double min = 0.0;
  double max = 1.0;

  bool degenerate() const { return max == min; }
};

/// Min/max over the non-missing values of time steps [first, first + count).
NormalizationParams fit_minmax(const SpatioTemporalGrid& grid, std::size_t first, std::size_t count);
inline NormalizationParams fit_minmax(const SpatioTemporalGrid& grid) { return fit_minmax(grid, 0, grid.steps()); }

/// (x - min) / (max - min), clamped to [0, 1]. Degenerate params map to 0.
double normalize(double x, const NormalizationParams& p);
double denormalize(double y, const NormalizationParams& p);

struct NormalizedGrid {
  SpatioTemporalGrid grid;
  std::size_t clamped = 0;  // values that fell outside [min, max]
};

/// Normalizes every value; missing cells stay missing. Logs the clamp count.
NormalizedGrid normalize_grid(const SpatioTemporalGrid& grid, const NormalizationParams& p);

void save_normalization(const NormalizationParams& p, const std::filesystem::path& path);
NormalizationParams load_normalization(const std::filesystem::path& path);

inline constexpr std::size_t kDefaultWindow = 12;
inline constexpr std::size_t kDefaultHorizon = 7;

/// One supervised example: `window_len` input months followed by `horizon` target months.
struct WindowSample {
  Tensor inputs;   // [window_len][channels][lat][lon]
  Tensor targets;  // [horizon][lat][lon], SST
  std::size_t offset = 0;  // time index of the first input month
  TimeStamp anchor;        // first target month (forecast origin)
};

/// Number of windows of `window_len + horizon` months at the given stride.
std::size_t window_count(std::size_t months, std::size_t window_len, std::size_t horizon, std::size_t stride);

/// Sliding windows over aligned SST (and optional OHC) grids. Channel 0 is SST,
/// channel 1 OHC. Grids must be free of missing values.
std::vector<WindowSample> build_windows(const SpatioTemporalGrid& sst, const SpatioTemporalGrid* ohc,
                                        std::size_t window_len, std::size_t horizon, std::size_t stride);

}  // namespace nino
