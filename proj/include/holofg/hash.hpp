#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace holofg {

/// 64-bit FNV-1a accumulator over raw little-endian bytes.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) {
    if (v == 0.0) v = 0.0;  // fold -0
    add_bytes(&v, sizeof v);
  }
  void add(std::int64_t v) { add_bytes(&v, sizeof v); }
  void add(std::uint64_t v) { add_bytes(&v, sizeof v); }
  void add(std::string_view s) { add_bytes(s.data(), s.size()); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace holofg
