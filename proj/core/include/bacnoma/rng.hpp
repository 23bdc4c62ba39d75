#ifndef BACNOMA_RNG_HPP
#define BACNOMA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>

namespace bacnoma::rng {

// splitmix64 finalizer. Used both to decorrelate raw seeds before they reach
// the engine and to derive child seeds from a master seed.
constexpr std::uint64_t mix(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ull;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
  return v ^ (v >> 31);
}

// Deterministic child-seed derivation: order-sensitive hash chain over the
// tags, so (master, a, b) and (master, b, a) give unrelated streams.
constexpr std::uint64_t derive(std::uint64_t master, std::uint64_t tag) {
  return mix(mix(master) ^ mix(tag ^ 0x6d0f27bd642b4d2cull));
}
constexpr std::uint64_t derive(std::uint64_t master, std::uint64_t tag_a,
                               std::uint64_t tag_b) {
  return derive(derive(master, tag_a), tag_b);
}

// Bit pattern of a double, for hashing sweep values into seed derivations.
inline std::uint64_t bits_of(double v) {
  std::uint64_t u = 0;
  std::memcpy(&u, &v, sizeof(u));
  return u;
}

// Seeded random stream. All variate transforms are spelled out here rather
// than taken from <random> distributions, whose output is
// implementation-defined; mt19937_64 itself is fully specified.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(mix(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Exp(1) by inversion. Also the law of |h|^2 for h ~ CN(0,1).
  double exponential() { return -std::log1p(-uniform01()); }

  // Standard normal, Marsaglia polar method with a cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bacnoma::rng

#endif  // BACNOMA_RNG_HPP
