#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cqrl/linalg.hpp"

namespace cqrl {

// Probabilities over symbols 0..size−1.
struct Pmf {
  std::vector<double> probs;

  Pmf() = default;
  explicit Pmf(std::vector<double> p);  // validates (entries ≥ 0, sum 1 ± tol_prob)
  static Pmf point(int size, int symbol);
  static Pmf uniform(int size);
  static Pmf bernoulli(double p1);
  int size() const { return static_cast<int>(probs.size()); }
  double operator[](int i) const { return probs[static_cast<size_t>(i)]; }
};

struct Register {
  std::string name;
  int alphabet = 2;
};

struct EntropyQuery {
  std::vector<std::string> classical;
  bool include_quantum = false;
};

// Classical registers (insertion order) plus one quantum register. The joint
// pmf is stored sparsely as support points; each point references an operator
// in a shared pool, so families like ρ_{x₁x₂x₃} are not copied per tuple.
// Support points may repeat; they act as a mixture.
class CqState {
 public:
  CqState(std::vector<Register> registers, int quantum_dim, std::string quantum_name = "Y");

  int add_operator(const Mat& rho);              // validated as a DensityOperator
  int add_operator_unchecked(const Mat& rho);    // caller guarantees validity
  void add_point(const std::vector<int>& tuple, double prob, int operator_index);

  const std::vector<Register>& registers() const { return regs_; }
  int register_index(const std::string& name) const;  // UnknownRegister
  uint64_t mask_of(const std::vector<std::string>& names) const;
  int quantum_dim() const { return dq_; }
  const std::string& quantum_name() const { return qname_; }
  size_t support_size() const { return probs_.size(); }
  double total_mass() const;

  // H(S) or H(S, Y) in bits, S given as a register bitmask.
  double entropy_mask(uint64_t mask, bool include_quantum) const;
  double entropy(const EntropyQuery& q) const;

  // Conditional average output state given the registers in `mask`, keyed by
  // the projected tuple (mixed-radix code) together with its probability.
  struct Conditional {
    uint64_t key;
    double prob;
    Mat state;
  };
  std::vector<Conditional> conditionals(uint64_t mask) const;

  // Block-diagonal operator Σ p(x)|x⟩⟨x| ⊗ ρ_x over the support points in
  // insertion order; used as an independent entropy path in tests.
  Mat joint_operator() const;

 private:
  std::vector<Register> regs_;
  int dq_;
  std::string qname_;
  std::vector<int> tuples_;  // flattened, regs_.size() per point
  std::vector<double> probs_;
  std::vector<int> op_index_;
  std::vector<Mat> pool_;
};

// I(a; b | c) = H(a,c) + H(b,c) − H(a,b,c) − H(c).
double conditional_mutual_info(const CqState& s, const EntropyQuery& a, const EntropyQuery& b,
                               const EntropyQuery& c);
double mutual_info(const CqState& s, const EntropyQuery& a, const EntropyQuery& b);

}  // namespace cqrl
