#pragma once

#include <string>

#include "fraclab/field.hpp"

namespace fraclab {

/// Flat little-endian field snapshot:
///   8 bytes  magic "WSPFIELD"
///   u32      format version (1)
///   u32      n, u32 N, u32 reserved (0)
///   u64 x3   lattice extents (1 for unused axes)
///   f64      h
///   f64 x3   lower corner of the interior box
///   u64      collar layers
///   u64      M, number of cells
///   f64 x M*N  values, cell-major, component fastest
///   u8  x M    frozen mask (1 = frozen)
/// The grid is rebuilt from the header; the interior box spans extents
/// minus two collar layers per axis.
void write_snapshot(const std::string& path, const FieldMap& field);
FieldMap read_snapshot(const std::string& path);

/// In-memory form of the same layout.
std::string encode_snapshot(const FieldMap& field);
FieldMap decode_snapshot(const std::string& bytes);

}  // namespace fraclab
