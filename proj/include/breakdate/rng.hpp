#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace breakdate {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Tags used to derive independent substreams from one master seed. Every
// consumer of randomness owns a stream keyed by (master, tag, indices...),
// so results do not depend on scheduling or on how work is split across
// threads.
enum StreamTag : std::uint64_t {
  kTagPanelNoise = 1,
  kTagDenseDelta = 2,
  kTagBootstrapU3 = 3,
  kTagBootstrapU4 = 4,
  kTagBootstrapU5 = 5,
  kTagBootstrapLs2 = 6,
  kTagXiPath = 7,
  kTagGaussian = 8,
  kTagRep = 9,
};

// Collapses (master, path...) into one stream key; hash-combine style.
inline std::uint64_t derive_key(std::uint64_t master,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t st = master ^ 0x9e3779b97f4a7c15ULL;
  std::uint64_t k = detail::splitmix64(st);
  for (std::uint64_t e : path) {
    st ^= e + 0x9e3779b97f4a7c15ULL + (st << 6) + (st >> 2);
    k = detail::splitmix64(st);
  }
  return k;
}

// xoshiro256++ with counter-based key derivation. The state is a pure
// function of the key material; streams never share state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) {
    std::uint64_t s = key ^ 0x5851f42d4c957f2dULL;
    for (auto& w : state_) w = detail::splitmix64(s);
  }

  static RngStream derive(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) {
    return RngStream(derive_key(master, path));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; caches the paired draw.
  double next_gauss() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, bound), bound > 0. Unbiased via rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace breakdate
