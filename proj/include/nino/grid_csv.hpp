#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nino/grid.hpp"

namespace nino {

// Canonical exchange format:
//
//   variable,units,lat,lon,time,value
//   SST,degC,-4,-170,2000-01,26.91
//
// One row per (time, lat, lon), rows in any order. Time is YYYY-MM, an empty value
// marks a missing cell, and an absent row is read as missing. Axes and time range
// are inferred from the row set; months must be consecutive.

SpatioTemporalGrid read_grid_csv(const std::filesystem::path& path);
SpatioTemporalGrid read_grid_csv(std::istream& in, const std::string& source_name = "<stream>");

void write_grid_csv(const SpatioTemporalGrid& grid, const std::filesystem::path& path);
void write_grid_csv(const SpatioTemporalGrid& grid, std::ostream& out);

/// Shortest text that parses back to exactly `v`.
std::string format_real(double v);

}  // namespace nino
