#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace festcircuit::text {

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

/// Splits on `delim`, trims each piece, drops empties.
std::vector<std::string> split_list(std::string_view s, char delim);

/// Canonical film-title form: case-folded (Latin ranges), whitespace
/// collapsed to single spaces, trimmed, terminal punctuation stripped.
std::string normalize_title(std::string_view raw);

/// FNV-1a 64-bit over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

} // namespace festcircuit::text
