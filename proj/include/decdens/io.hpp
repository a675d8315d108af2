#pragma once

#include <cstdint>
#include <string>

#include "decdens/core.hpp"

namespace decdens {

/// Reads one decimal number per line (UTF-8, '\n' or '\r\n' endings).
/// Blank lines are skipped; any non-numeric or nonpositive line raises
/// DataError naming the line number.
SampleData read_sample_file(const std::string& path);

/// Serializes a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

/// Writes content to path via a temporary file in the same directory and an
/// atomic rename, so failures never leave partial output behind.
void atomic_write_file(const std::string& path, const std::string& content);

/// 64-bit FNV-1a content hash, as a hex string (manifest integrity record).
std::string fnv1a_hex(const std::string& content);

}  // namespace decdens
