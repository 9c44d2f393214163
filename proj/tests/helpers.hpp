#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "nino/grid.hpp"
#include "nino/rng.hpp"

namespace nino::testing {

/// Grid with `steps` months of `values_per_step` fields (row-major per step).
inline SpatioTemporalGrid make_grid(std::vector<double> lats, std::vector<double> lons, TimeStamp start,
                                    std::size_t steps, std::vector<double> values, Variable v = Variable::SST) {
  return SpatioTemporalGrid(v, GridAxes(std::move(lats), std::move(lons)), start, steps, std::move(values));
}

inline SpatioTemporalGrid constant_grid(std::size_t n_lat, std::size_t n_lon, TimeStamp start, std::size_t steps,
                                        double value) {
  return make_grid(GridAxes::uniform(0, 1, n_lat), GridAxes::uniform(0, 1, n_lon), start, steps,
                   std::vector<double>(n_lat * n_lon * steps, value));
}

inline SpatioTemporalGrid random_grid(Rng& rng, std::size_t n_lat, std::size_t n_lon, TimeStamp start,
                                      std::size_t steps, double lo = 20.0, double hi = 30.0,
                                      double missing_fraction = 0.0) {
  std::vector<double> v(n_lat * n_lon * steps);
  for (auto& x : v) x = rng.uniform() < missing_fraction ? kMissing : rng.uniform(lo, hi);
  return make_grid(GridAxes::uniform(-2.0 * static_cast<double>(n_lat / 2), 2.0, n_lat),
                   GridAxes::uniform(-170.0, 2.0, n_lon), start, steps, std::move(v));
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nino_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace nino::testing
