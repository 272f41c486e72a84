#pragma once

#include <cmath>
#include <cstdint>

namespace embcal {

// Counter-based generator (splitmix64 finalizer over a keyed counter).
// Draw k of stream s under seed q is a pure function of (q, s, k), so
// generated datasets and chains do not depend on call interleaving.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(finalize(finalize(seed + 0x9e3779b97f4a7c15ULL) ^
                      finalize(stream + 0xbf58476d1ce4e5b9ULL))) {}

  // Independent substream; the parent's counter state is not shared.
  CounterRng substream(std::uint64_t id) const { return CounterRng(key_, id + 1); }

  std::uint64_t next_u64() { return finalize(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double low, double high) { return low + (high - low) * uniform(); }

  // Index in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller; draws two uniforms, caches the pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * pi() * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

 private:
  static constexpr double pi() { return 3.141592653589793238462643383279502884; }

  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace embcal
