#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "nino/autodiff.hpp"

namespace nino {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary layout, all integers and reals little-endian:
//   "NINO" | u32 version | per tensor: u32 name length, name bytes, u32 rank,
//   u64 extents[rank], f64 values[product(extents)]
// Tensors appear in ParameterSet order until end of file.

void save_checkpoint(const ParameterSet& params, std::ostream& out);
void save_checkpoint(const ParameterSet& params, const std::filesystem::path& path);

/// Reads every tensor of a checkpoint as a fresh ParameterSet.
ParameterSet read_checkpoint(std::istream& in);
ParameterSet read_checkpoint(const std::filesystem::path& path);

/// Copies checkpoint values into `params`; names and shapes must match exactly.
void load_checkpoint(ParameterSet& params, const std::filesystem::path& path);

/// JSON manifest listing {name, shape} per tensor, written next to a checkpoint.
void write_manifest(const ParameterSet& params, const std::filesystem::path& path);

}  // namespace nino
