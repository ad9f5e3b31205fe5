#ifndef GENDET_COMMON_RANDOM_H_
#define GENDET_COMMON_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace gendet {

// Seeded random source whose outputs are identical on every platform.
// std::*_distribution is implementation-defined, so the transforms from raw
// engine bits are written out here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, bound). bound must be positive.
  uint64_t Below(uint64_t bound);

  // Standard normal via Box-Muller; the second variate is cached.
  double Normal();

  bool Bernoulli() { return (engine_() >> 63) != 0; }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent child seed from (seed, index) with splitmix64, so
// per-item generation does not depend on iteration order.
uint64_t DeriveSeed(uint64_t seed, uint64_t index);

}  // namespace gendet

#endif  // GENDET_COMMON_RANDOM_H_
