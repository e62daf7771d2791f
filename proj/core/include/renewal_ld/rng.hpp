#pragma once

#include <array>
#include <cstdint>

namespace renewal_ld {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
  constexpr std::uint64_t kMul0 = 0xD2511F53u;
  constexpr std::uint64_t kMul1 = 0xCD9E8D57u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = kMul0 * c[0];
    const std::uint64_t p1 = kMul1 * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    k[0] += 0x9E3779B9u;
    k[1] += 0xBB67AE85u;
  }
  return c;
}

/// Uniform stream for one trajectory: block i of stream j under key `seed`
/// is philox(counter = {i_lo, i_hi, j_lo, j_hi}). Streams with distinct
/// indices never share a counter, so trajectories are reproducible no matter
/// how they are scheduled.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t stream);

  /// Uniform double on the open interval (0, 1); exact 0 is redrawn.
  double next() {
    for (;;) {
      if (available_ == 0) refill();
      const std::uint64_t bits = buffer_[2 - available_--];
      const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

 private:
  void refill() {
    const PhiloxCounter ctr{static_cast<std::uint32_t>(block_),
                            static_cast<std::uint32_t>(block_ >> 32),
                            static_cast<std::uint32_t>(stream_),
                            static_cast<std::uint32_t>(stream_ >> 32)};
    const auto r = philox4x32_10(ctr, key_);
    buffer_[0] = (static_cast<std::uint64_t>(r[1]) << 32) | r[0];
    buffer_[1] = (static_cast<std::uint64_t>(r[3]) << 32) | r[2];
    available_ = 2;
    ++block_;
  }

  PhiloxKey key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace renewal_ld
