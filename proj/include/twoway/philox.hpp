#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// A RandomStream is identified by (seed, stream id): the seed is the Philox
// key and the stream id occupies the upper 64 bits of the counter, so every
// Monte-Carlo chunk gets an independent, replayable sequence.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace twoway {

struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t prod0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t prod1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(prod0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(prod0);
      const auto hi1 = static_cast<std::uint32_t>(prod1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(prod1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_id_(stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    if (cursor_ == 2) refill();
    return block_[cursor_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Exponential with the given mean.
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  /// Circularly-symmetric complex Gaussian CN(0, variance). The squared
  /// magnitude is exponential with the given mean and the phase is uniform.
  std::complex<double> complex_normal(double variance) {
    const double radius = std::sqrt(exponential(variance));
    const double phase = 2.0 * std::numbers::pi * uniform();
    return {radius * std::cos(phase), radius * std::sin(phase)};
  }

  bool coin() { return (next_u64() >> 63) != 0; }

 private:
  void refill() {
    const Philox4x32::Counter ctr = {
        static_cast<std::uint32_t>(block_index_), static_cast<std::uint32_t>(block_index_ >> 32),
        static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    const auto out = Philox4x32::generate(ctr, key_);
    block_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    block_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    ++block_index_;
    cursor_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_id_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 2> block_{};
  int cursor_ = 2;
};

}  // namespace twoway
