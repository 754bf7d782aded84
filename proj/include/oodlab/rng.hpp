#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace oodlab::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (Vigna). All randomness in the project flows through
// this; integer-only state transitions keep streams bit-stable across
// platforms.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a + kGolden * (b + 1));
}

// Purpose streams. A generator for purpose P under seed S is seeded with
// combine(S, P), so e.g. weight init and epoch shuffling never share a
// sequence even under the same user seed.
enum class Stream : std::uint64_t {
  Init = 1,         // model weight initialization
  Shuffle = 2,      // epoch index shuffling
  DataMeans = 3,    // blob class-mean placement
  DataSamples = 4,  // blob sample noise
  Split = 5,        // known/unknown class split
};

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller with cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform in [0, n) via Lemire multiply-shift.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline SplitMix64 make(std::uint64_t seed, Stream stream) {
  return SplitMix64(combine(seed, static_cast<std::uint64_t>(stream)));
}

}  // namespace oodlab::rng
