#pragma once

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw, SC'11).
// Output is a pure function of (counter, key), so any round of a simulation
// can be regenerated independently of the others.  Known-answer vectors from
// the Random123 distribution are checked in tests/test_philox.cpp.

#include <array>
#include <cstddef>
#include <cstdint>

namespace smpfp {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr int kRounds = 10;

  static constexpr Counter block(Counter ctr, Key key) {
    for (int r = 0; r < kRounds; ++r) {
      if (r > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Random draws for one simulation round.  Block b of round r is
/// philox(counter = {r_lo, r_hi, b, stream}, key = {seed_lo, seed_hi}); each
/// block yields two 64-bit words, (w1 << 32 | w0) then (w3 << 32 | w2).
class RoundStream {
 public:
  RoundStream(std::uint64_t seed, std::uint64_t round, std::uint32_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        round_(round),
        stream_(stream) {}

  std::uint64_t next_u64() {
    if (used_ == 2) refill();
    const std::size_t i = 2 * used_++;
    return (std::uint64_t{buf_[i + 1]} << 32) | buf_[i];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by 128-bit multiply-shift.  The bias is
  /// below bound / 2^64.
  std::uint64_t below(std::uint64_t bound) {
    const unsigned __int128 product = static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(product >> 64);
  }

 private:
  void refill() {
    buf_ = Philox4x32::block({static_cast<std::uint32_t>(round_), static_cast<std::uint32_t>(round_ >> 32),
                              block_++, stream_},
                             key_);
    used_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t round_;
  std::uint32_t stream_;
  std::uint32_t block_ = 0;
  Philox4x32::Counter buf_{};
  std::size_t used_ = 2;
};

}  // namespace smpfp
