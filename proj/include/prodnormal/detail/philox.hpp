#pragma once

#include <array>
#include <cstdint>

namespace prodnormal::detail {

/// Philox4x32 with 10 rounds: a keyed bijection on 128-bit counters.
class philox4x32 {
 public:
  using block = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  explicit philox4x32(key_type key) : key_(key) {}

  block operator()(block ctr) const {
    key_type k = key_;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  key_type key_;
};

/// Maps 64 random bits to the open interval (0, 1): odd multiples of 2^-53,
/// all exactly representable.
inline double open_unit(std::uint64_t bits) {
  return static_cast<double>(((bits >> 12) << 1) | 1) * 0x1.0p-53;
}

}  // namespace prodnormal::detail
