#pragma once

// Content hashing: SHA-256 for cache keys and artifact fingerprints,
// FNV-1a for feature bucketing.

#include <cstdint>
#include <string>
#include <string_view>

namespace xclaim {

// Hex-encoded SHA-256 digest of the input bytes.
std::string sha256_hex(std::string_view data);

// 64-bit FNV-1a; fast, stable across platforms, not collision-safe.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace xclaim
