#pragma once

// Binary codebook file, little-endian:
//
//   "SVQ1"  u32 version (=1)  u32 M  u32 d  u8 mode (0 affine, 1 thresholded)
//   f64 theta (0 if affine)  f64 w0 (0 if the norm constraint is inactive)
//   M x { d x f64 weight, f64 bias, d x f64 recon, f64 recon_scale }
//
// The parallel-reconstruction flag is runtime state and is not stored; a
// loaded codebook carries its recon vectors verbatim with the flag cleared.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "svq/codebook.hpp"

namespace svq {

inline constexpr std::uint32_t kCodebookFormatVersion = 1;

void write_codebook(std::ostream& out, const Codebook& cb);
Codebook read_codebook(std::istream& in);

void save_codebook(const Codebook& cb, const std::filesystem::path& path);
Codebook load_codebook(const std::filesystem::path& path);

}  // namespace svq
