#pragma once

#include <filesystem>
#include <string>

#include "nemalab/field.hpp"

namespace nemalab {

// Snapshot layout: one line of JSON header terminated by '\n', followed by
// `count` little-endian IEEE-754 doubles in row-major order (last axis fastest).
//
//   {"format":"nemalab-field","version":1,"dim":3,"sizes":[32,32,32],
//    "periods":[50.26,50.26,50.26],"role":"scalar","encoding":"f64le","count":32768}

void write_field(const std::filesystem::path& path, const RealField& field);
RealField read_field(const std::filesystem::path& path);

/// Writes `contents` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace nemalab
