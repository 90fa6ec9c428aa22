#pragma once

#include <string>
#include <string_view>

namespace gapquest {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Hex string of `bytes` random bytes from the system CSPRNG.
std::string random_token(std::size_t bytes = 24);

/// Length-independent timing for equal-length inputs.
bool constant_time_equal(std::string_view a, std::string_view b);

} // namespace gapquest
