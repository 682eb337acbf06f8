#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace gshs {

// Philox4x32-10 block function (Salmon et al. counter-based generator).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view s);
// Independent 64-bit id for (seed, tag) pairs; used to key sub-streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  return derive_seed(seed, fnv1a(tag));
}

// Maps 64 random bits to a double in the open interval (0, 1).
inline double u64_to_open01(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Random-access stream: block(i) is a pure function of (seed, stream, i).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);
  PhiloxCounter block(std::uint64_t index) const;
  // Two independent standard normals from one block (Box-Muller).
  std::array<double, 2> normal_pair(std::uint64_t index) const;
  // Fills out.size() normals belonging to slot; slots never overlap.
  void normals(std::uint64_t slot, std::span<double> out) const;

 private:
  PhiloxKey key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
};

// Sequential engine over a RandomStream. Satisfies UniformRandomBitGenerator,
// but callers should use the members below: std distributions are not
// reproducible across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;
  Rng(std::uint64_t seed, std::uint64_t stream) : stream_(seed, stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  double uniform() { return u64_to_open01(next_u64()); }
  double normal();
  // Uniform integer in [0, n), Lemire's unbiased method.
  std::uint64_t below(std::uint64_t n);

 private:
  RandomStream stream_;
  std::uint64_t counter_ = 0;
  PhiloxCounter buf_{};
  int avail_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Fisher-Yates shuffle driven by Rng::below.
template <class It>
void shuffle(It first, It last, Rng& rng) {
  auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    auto j = rng.below(i);
    std::swap(first[i - 1], first[j]);
  }
}

}  // namespace gshs
