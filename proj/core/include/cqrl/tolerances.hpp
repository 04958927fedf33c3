#pragma once

namespace cqrl {

struct Tolerances {
  double herm = 1e-9;
  double psd = 1e-9;
  double trace = 1e-9;
  double prob = 1e-9;
  double info = 1e-9;
  double eig = 1e-10;       // reconstruction error of eig_hermitian
  double eig_floor = 1e-12; // eigenvalues in [-psd, eig_floor] count as zero
  double rate = 1e-9;       // margin for strict rate inequalities
  double lp_residual = 1e-8;
  double commute = 1e-9;
};

// Process-wide table. Defaults are the values above; the CLI may replace it
// once at startup (CQRL_TOL), library code only reads it.
const Tolerances& tolerances();
void set_tolerances(const Tolerances& t);

// Parses "key=value,key=value" (keys: herm, psd, trace, prob, info, eig,
// eig_floor, rate, lp_residual, commute, or "all") on top of the defaults.
Tolerances parse_tolerances(const char* spec);

}  // namespace cqrl
