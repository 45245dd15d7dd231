#include "spatialprompt/canonical.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <array>
#include <charconv>
#include <cmath>
#include <vector>

namespace spatialprompt {

std::string canonical_dump(const Json& value) { return value.dump(); }

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest.data());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(digest.size() * 2);
  for (unsigned char b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0f]);
  }
  return out;
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_decode(std::string_view text, ErrorCode code) {
  if (text.size() % 4 != 0) throw Error(code, "base64 length not a multiple of 4");
  std::string out(3 * (text.size() / 4), '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw Error(code, "invalid base64");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

std::string format_shortest(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

namespace json_io {

const Json& field(const Json& obj, const char* key, ErrorCode code) {
  if (!obj.is_object()) throw Error(code, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(code, std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& value, ErrorCode code) {
  if (!value.is_number()) throw Error(code, "expected number");
  return value.get<double>();
}

double finite_number(const Json& value, ErrorCode code) {
  const double v = number(value, code);
  if (!std::isfinite(v)) throw Error(code, "non-finite number");
  return v;
}

std::int64_t integer(const Json& value, ErrorCode code) {
  if (value.is_number_unsigned()) {
    const auto u = value.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) throw Error(code, "integer out of range");
    return static_cast<std::int64_t>(u);
  }
  if (!value.is_number_integer()) throw Error(code, "expected integer");
  return value.get<std::int64_t>();
}

std::uint64_t unsigned_integer(const Json& value, ErrorCode code) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(value.get<std::int64_t>());
  throw Error(code, "expected unsigned integer");
}

std::string string(const Json& value, ErrorCode code) {
  if (!value.is_string()) throw Error(code, "expected string");
  return value.get<std::string>();
}

Point3 point(const Json& value, ErrorCode code) {
  if (!value.is_array() || value.size() != 3) throw Error(code, "expected [x,y,z]");
  return {finite_number(value[0], code), finite_number(value[1], code),
          finite_number(value[2], code)};
}

Json parse_object(std::string_view bytes, ErrorCode code) {
  Json doc = Json::parse(bytes.begin(), bytes.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw Error(code, "invalid JSON");
  if (!doc.is_object()) throw Error(code, "top level must be an object");
  return doc;
}

}  // namespace json_io

}  // namespace spatialprompt
