#pragma once

#include <string>
#include <string_view>

namespace truekit {

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view data);

/// Shortest decimal representation that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace truekit
