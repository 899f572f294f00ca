#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace vizlink {

// Wire documents keep key insertion order so datum fields render in attribute order.
using Json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::string_view bytes);
// Throws Error(InvalidRequest) on malformed input.
std::string base64_decode(std::string_view text);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
// Collapses every whitespace run to one space and trims the ends.
std::string normalize_whitespace(std::string_view s);

// Shortest round-trip decimal form ("412", "3.5", "1e-06").
std::string format_number(double value);
std::optional<double> parse_number(std::string_view s);

// Strict ISO-8601: YYYY-MM-DD, optionally followed by [T ]HH:MM[:SS[.fff]] and Z or +HH:MM.
// Returns milliseconds since the Unix epoch (UTC).
std::optional<std::int64_t> parse_iso_datetime(std::string_view s);
// Date-only when the time of day is midnight, otherwise YYYY-MM-DDTHH:MM:SS[.mmm].
std::string format_iso_datetime(std::int64_t epoch_ms);

} // namespace vizlink
