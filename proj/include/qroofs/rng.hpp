#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace qroofs {

// Philox 4x64-10 counter-based generator.  Each (seed, substream) pair owns an
// independent stream of 2^130 words; trials index substreams so parallel runs
// reproduce the sequential results bit for bit.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;

  explicit PhiloxEngine(std::uint64_t seed, std::uint64_t substream = 0)
      : key0_(seed), substream_(substream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (cursor_ == 4) {
      buffer_ = block({counter_lo_, counter_hi_, substream_, 0},
                      {key0_, key1_});
      cursor_ = 0;
      if (++counter_lo_ == 0) ++counter_hi_;
    }
    return buffer_[cursor_++];
  }

  std::uint64_t substream() const { return substream_; }

  // One full keyed block; exposed so known-answer vectors can pin the exact
  // variant (multipliers, key schedule, and word order).
  static std::array<std::uint64_t, 4> block(
      std::array<std::uint64_t, 4> counter, std::array<std::uint64_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      counter = scramble(counter, key);
      key[0] += 0x9E3779B97F4A7C15ULL;
      key[1] += 0xBB67AE8584CAA73BULL;
    }
    return counter;
  }

 private:
  static std::array<std::uint64_t, 4> scramble(
      const std::array<std::uint64_t, 4>& c,
      const std::array<std::uint64_t, 2>& key) {
    const auto product0 =
        static_cast<unsigned __int128>(0xD2E7470EE14C6C93ULL) * c[0];
    const auto product1 =
        static_cast<unsigned __int128>(0xCA5A826395121157ULL) * c[2];
    const auto hi0 = static_cast<std::uint64_t>(product0 >> 64);
    const auto lo0 = static_cast<std::uint64_t>(product0);
    const auto hi1 = static_cast<std::uint64_t>(product1 >> 64);
    const auto lo1 = static_cast<std::uint64_t>(product1);
    return {hi1 ^ c[1] ^ key[0], lo1, hi0 ^ c[3] ^ key[1], lo0};
  }

  std::uint64_t key0_;
  std::uint64_t key1_ = 0;
  std::uint64_t substream_;
  std::uint64_t counter_lo_ = 0;
  std::uint64_t counter_hi_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  int cursor_ = 4;
};

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_double(PhiloxEngine& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Box-Muller standard normals; the paired draw is cached.
class NormalSampler {
 public:
  double operator()(PhiloxEngine& gen) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform_double(gen);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qroofs
