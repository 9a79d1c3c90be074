#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace bdindex::detail {

// CRC-32C (Castagnoli), reflected polynomial 0x82F63B78; the variant used by
// iSCSI et al. Table-driven, byte at a time.
class Crc32c {
 public:
  void update(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint32_t c = state_;
    for (std::size_t i = 0; i < len; ++i) c = table()[(c ^ p[i]) & 0xffu] ^ (c >> 8);
    state_ = c;
  }

  std::uint32_t value() const { return state_ ^ 0xffffffffu; }

 private:
  static const std::array<std::uint32_t, 256>& table() {
    static const std::array<std::uint32_t, 256> t = [] {
      std::array<std::uint32_t, 256> out{};
      for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0x82f63b78u ^ (c >> 1) : c >> 1;
        out[i] = c;
      }
      return out;
    }();
    return t;
  }

  std::uint32_t state_ = 0xffffffffu;
};

}  // namespace bdindex::detail
