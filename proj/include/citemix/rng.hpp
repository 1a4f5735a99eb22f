#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <vector>

namespace citemix {

// splitmix64 finalizer. All seed derivation in the project goes through this
// so that streams are stable across platforms and scheduling.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and an ordered list of
// tags (cell index, iteration index, subset index, ...). Order-sensitive:
// derive_seed(s, {a, b}) != derive_seed(s, {b, a}).
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t t : tags) {
    h = splitmix64(h ^ splitmix64(t + 0x9e3779b97f4a7c15ULL));
  }
  return h;
}

// Deterministic random stream. mt19937_64 has a fully specified output
// sequence; the uniform and normal transforms are spelled out here instead of
// using <random> distributions, whose algorithms are implementation-defined,
// so the same seed gives the same draws everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in (0, 1]; never returns 0 so log() is safe.
  double next_unit() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x < threshold);
    return x % bound;
  }

  // Standard normal via Box-Muller. Two uniforms per draw; the sine twin is
  // deliberately not cached so the stream has no hidden state.
  double next_normal() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 gen_;
};

// In-place Fisher-Yates shuffle driven by the stream above.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[rng.next_below(i)]);
  }
}

}  // namespace citemix
