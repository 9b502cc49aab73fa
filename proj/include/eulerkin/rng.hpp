#pragma once

// Counter-based random streams. A stream is named by (seed, tag, index) and
// its output depends on nothing else, so Monte Carlo sample i draws the same
// numbers no matter how the loop is scheduled or chunked across workers.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace eulerkin {

inline constexpr uint32_t kPhiloxW32A = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW32B = 0xBB67AE85u;
inline constexpr uint32_t kPhiloxM4x32A = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

// Philox 4x32-10 block function.
inline std::array<uint32_t, 4> philox_block(std::array<uint32_t, 4> ctr,
                                            std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    uint64_t p0 = uint64_t(kPhiloxM4x32A) * ctr[0];
    uint64_t p1 = uint64_t(kPhiloxM4x32B) * ctr[2];
    std::array<uint32_t, 4> next;
    next[0] = uint32_t(p1 >> 32) ^ ctr[1] ^ key[0];
    next[1] = uint32_t(p1);
    next[2] = uint32_t(p0 >> 32) ^ ctr[3] ^ key[1];
    next[3] = uint32_t(p0);
    ctr = next;
    key[0] += kPhiloxW32A;
    key[1] += kPhiloxW32B;
  }
  return ctr;
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t tag, uint64_t index) : buf_pos_(4) {
    uint64_t k = splitmix64(seed ^ splitmix64(tag));
    key_ = {uint32_t(k), uint32_t(k >> 32)};
    ctr_ = {uint32_t(index), uint32_t(index >> 32), 0, 0};
  }

  uint32_t next_u32() {
    if (buf_pos_ == 4) {
      buf_ = philox_block(ctr_, key_);
      if (++ctr_[2] == 0) ++ctr_[3];
      buf_pos_ = 0;
    }
    return buf_[buf_pos_++];
  }

  uint64_t next_u64() {
    uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform in {0, ..., n-1}; n must be positive. Modulo bias is below 2^-32
  // for the n used here (tiny), which is irrelevant for test generation.
  uint64_t below(uint64_t n) { return next_u64() % n; }

  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(t);
    has_cached_ = true;
    return r * std::cos(t);
  }

 private:
  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> ctr_;
  std::array<uint32_t, 4> buf_{};
  int buf_pos_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Stream tags, one per independent consumer of randomness. Never reuse a tag
// for a different purpose: streams with equal (seed, tag, index) coincide.
namespace stream_tag {
inline constexpr uint64_t kCrofton = 1;
inline constexpr uint64_t kRotationAverage = 2;
inline constexpr uint64_t kKinematicGroup = 3;
inline constexpr uint64_t kKinematicCrofton = 4;
inline constexpr uint64_t kTestGen = 100;
inline constexpr uint64_t kTestOracle = 101;
}  // namespace stream_tag

}  // namespace eulerkin
