#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace salc {

/// FNV-1a over the bytes, run with two offset bases for a 128-bit hex digest.
/// Stable across platforms and runs; used for cache keys and run naming.
std::string stable_digest(std::string_view bytes);

}  // namespace salc
