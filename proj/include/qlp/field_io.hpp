#pragma once

#include "qlp/field.hpp"

#include <cstdint>
#include <filesystem>

namespace qlp {

/// Binary field dump: a 64-byte little-endian header followed by the M frame
/// times and the M frames (components of a frame stored component-major).
///
///   0  char[4]  magic "QLPF"
///   4  u32      version
///   8  u32      dim
///  12  u32      N
///  16  f64      L
///  24  u64      M
///  32  u32      vector rank
///  36  ...      zero padding to 64
inline constexpr std::uint32_t kFieldFormatVersion = 1;

void write_field(const std::filesystem::path& path, const SpaceTimeField& f);
SpaceTimeField read_field(const std::filesystem::path& path);

/// One row per (frame, cell): t, cell, x, y, then one column per component.
/// Only every `stride`-th frame is written, plus the last one.
void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& f, std::size_t stride = 1);

} // namespace qlp
