#pragma once

#include <cstdint>
#include <random>

namespace cqrl {

uint64_t splitmix64(uint64_t x);

// std::mt19937_64 (whose output sequence the C++ standard fixes) behind
// hand-written integer/real mappings, because the standard distributions are
// implementation-defined. Same seed ⇒ same stream on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  // Independent stream for (seed, index); used for per-trial / per-code
  // randomness so results do not depend on how work is split across threads.
  static Rng stream(uint64_t seed, uint64_t index);

  uint64_t next() { return eng_(); }
  uint64_t below(uint64_t n);  // uniform on [0, n), rejection sampling
  double uniform01();          // 53-bit grid on [0, 1)
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace cqrl
