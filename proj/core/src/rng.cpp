#include "cqrl/rng.hpp"

#include <limits>

namespace cqrl {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng Rng::stream(uint64_t seed, uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index ^ 0xD1B54A32D192ED03ULL)));
}

uint64_t Rng::below(uint64_t n) {
  if (n <= 1) return 0;
  const uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
  uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return x % n;
}

double Rng::uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

}  // namespace cqrl
