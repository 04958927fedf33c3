#include "cqrl/scalar.hpp"

#include <cmath>
#include <string>

#include "cqrl/errors.hpp"

namespace cqrl {

namespace {
void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::DomainError, std::string(name) + " outside [0,1]: " + std::to_string(x));
}
}  // namespace

double binary_entropy(double p) {
  check_unit(p, "p");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double binary_convolve(double p, double q) {
  check_unit(p, "p");
  check_unit(q, "q");
  return p * (1.0 - q) + (1.0 - p) * q;
}

double fact1_f(double t, double phi) {
  check_unit(t, "t");
  const double s = std::sin(phi);
  const double disc = std::max(0.0, 1.0 - 4.0 * t * (1.0 - t) * s * s);
  return 0.5 * (1.0 + std::sqrt(disc));
}

}  // namespace cqrl
