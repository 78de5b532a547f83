#pragma once

// Reproducible random streams.
//
// Each (seed, stream) pair deterministically selects an independent
// xoshiro256** generator. The 256-bit state is filled with four outputs of
// SplitMix64 started at seed ^ mix(stream), where mix is the SplitMix64
// output function applied to the stream id. Both algorithms are
// bit-specified, so sequences are identical on every platform.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace rvspec {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class SplitMix64 {
 public:
  constexpr explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  constexpr std::uint64_t next() noexcept {
    state_ += detail::kGoldenGamma;
    return detail::splitmix64_mix(state_);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  constexpr explicit Xoshiro256StarStar(const std::array<std::uint64_t, 4>& state) noexcept
      : s_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = detail::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

 private:
  std::array<std::uint64_t, 4> s_;
};

class SeededRng {
 public:
  using result_type = std::uint64_t;

  SeededRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : seed_(seed), stream_(stream), engine_(initial_state(seed, stream)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  static constexpr result_type min() noexcept { return Xoshiro256StarStar::min(); }
  static constexpr result_type max() noexcept { return Xoshiro256StarStar::max(); }
  result_type operator()() noexcept { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential() noexcept { return -std::log(uniform_open()); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept {
    const auto product = static_cast<unsigned __int128>(engine_()) * bound;
    return static_cast<std::uint64_t>(product >> 64);
  }

 private:
  static std::array<std::uint64_t, 4> initial_state(std::uint64_t seed, std::uint64_t stream) noexcept {
    SplitMix64 sm(seed ^ detail::splitmix64_mix(stream + detail::kGoldenGamma));
    return {sm.next(), sm.next(), sm.next(), sm.next()};
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  Xoshiro256StarStar engine_;
};

}  // namespace rvspec
