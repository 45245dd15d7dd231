#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "spatialprompt/error.hpp"
#include "spatialprompt/geometry.hpp"

namespace spatialprompt {

using Json = nlohmann::json;

/// Sorted keys, no whitespace, shortest round-trip doubles.
std::string canonical_dump(const Json& value);

/// Lowercase hex SHA-256 of `bytes` (64 chars).
std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::string_view bytes);
/// Throws Error{code} on invalid input.
std::string base64_decode(std::string_view text, ErrorCode code);

/// Shortest decimal that round-trips the double (e.g. "0.25", "1e-07").
std::string format_shortest(double value);

namespace json_io {

// Strict accessors used by every parser. Each throws Error{code} with a path hint.
const Json& field(const Json& obj, const char* key, ErrorCode code);
double number(const Json& value, ErrorCode code);
double finite_number(const Json& value, ErrorCode code);
std::int64_t integer(const Json& value, ErrorCode code);
std::uint64_t unsigned_integer(const Json& value, ErrorCode code);
std::string string(const Json& value, ErrorCode code);
Point3 point(const Json& value, ErrorCode code);

inline Json point(const Point3& p) { return Json::array({p.x, p.y, p.z}); }

/// Parses bytes into a JSON object, mapping syntax errors to `code`.
Json parse_object(std::string_view bytes, ErrorCode code);

}  // namespace json_io

}  // namespace spatialprompt
