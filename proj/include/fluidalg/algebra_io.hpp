#pragma once

// Custom algebra files (JSON):
//   {"dim": n,
//    "triple":  [[i, j, k, value], ...],   zero-based, i < j < k
//    "linking": [[...], ...],              n rows of n entries
//    "metric":  [[...], ...]}
// Keys are written in exactly this order. Matrices may also be read as a
// flat row-major list of n*n numbers.

#include "fluidalg/core_algebra.hpp"

#include <filesystem>
#include <string>

namespace fluidalg {

/// Parses without validating the algebra invariants. Throws StructuralError
/// for malformed documents and ValidationError for triple entries that are
/// not in canonical i < j < k order.
AlgebraArrays parse_algebra_json(const std::string& text);
AlgebraArrays read_algebra_file(const std::filesystem::path& path);

std::string algebra_to_json(const AlgebraArrays& arrays);
void write_algebra_file(const std::filesystem::path& path, const AlgebraArrays& arrays);

}  // namespace fluidalg
