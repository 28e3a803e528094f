#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace asnkit {

/// SHA-256 of the bytes, lowercase hex.
std::string sha256_hex(std::string_view data);

/// First 8 digest bytes as a big-endian integer.
std::uint64_t sha256_u64(std::string_view data);

}  // namespace asnkit
