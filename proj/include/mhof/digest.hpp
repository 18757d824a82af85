#ifndef MHOF_DIGEST_HPP
#define MHOF_DIGEST_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace mhof {

/// FNV-1a 64-bit hash of a canonical string, rendered as 16 hex digits.
/// Used to fingerprint problem and scheme configurations in trace metadata.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace mhof

#endif  // MHOF_DIGEST_HPP
