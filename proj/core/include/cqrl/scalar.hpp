#pragma once

namespace cqrl {

// h_b(p) in bits; DomainError outside [0, 1].
double binary_entropy(double p);
// p ∗ q = p(1 − q) + (1 − p)q.
double binary_convolve(double p, double q);
// f(t) = (1 + √(1 − 4t(1 − t) sin²φ)) / 2, the larger eigenvalue of
// (1 − t)|0⟩⟨0| + t|v_φ⟩⟨v_φ|.
double fact1_f(double t, double phi);

// Shannon entropy (bits) of a probability vector; zero entries skipped.
template <class Range>
double shannon_entropy(const Range& probs);

}  // namespace cqrl

#include <cmath>

template <class Range>
double cqrl::shannon_entropy(const Range& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}
