#include "cqrl/cq_state.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cqrl/errors.hpp"
#include "cqrl/scalar.hpp"
#include "cqrl/tolerances.hpp"

namespace cqrl {

Pmf::Pmf(std::vector<double> p) : probs(std::move(p)) {
  const double tol = tolerances().prob;
  if (probs.empty()) throw Error(ErrorKind::InvalidState, "empty pmf");
  double s = 0.0;
  for (double x : probs) {
    if (!(x >= -tol)) throw Error(ErrorKind::InvalidState, "negative probability");
    s += x;
  }
  if (std::abs(s - 1.0) > tol) throw Error(ErrorKind::InvalidState, "pmf sums to " + std::to_string(s));
  for (double& x : probs) x = std::max(0.0, x);
}

Pmf Pmf::point(int size, int symbol) {
  std::vector<double> p(static_cast<size_t>(size), 0.0);
  p.at(static_cast<size_t>(symbol)) = 1.0;
  return Pmf(std::move(p));
}

Pmf Pmf::uniform(int size) { return Pmf(std::vector<double>(static_cast<size_t>(size), 1.0 / size)); }

Pmf Pmf::bernoulli(double p1) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw Error(ErrorKind::DomainError, "bernoulli parameter outside [0,1]");
  return Pmf({1.0 - p1, p1});
}

CqState::CqState(std::vector<Register> registers, int quantum_dim, std::string quantum_name)
    : regs_(std::move(registers)), dq_(quantum_dim), qname_(std::move(quantum_name)) {
  if (regs_.size() > 63) throw Error(ErrorKind::TooLarge, "at most 63 classical registers");
  if (dq_ <= 0) throw Error(ErrorKind::DimensionMismatch, "quantum dimension must be positive");
  for (size_t i = 0; i < regs_.size(); ++i) {
    if (regs_[i].alphabet <= 0) throw Error(ErrorKind::DimensionMismatch, "empty alphabet for " + regs_[i].name);
    for (size_t j = 0; j < i; ++j)
      if (regs_[j].name == regs_[i].name) throw Error(ErrorKind::ConfigMismatch, "duplicate register " + regs_[i].name);
  }
}

int CqState::add_operator(const Mat& rho) {
  DensityOperator d(rho);
  return add_operator_unchecked(d.matrix());
}

int CqState::add_operator_unchecked(const Mat& rho) {
  if (rho.rows() != dq_ || rho.cols() != dq_) throw Error(ErrorKind::DimensionMismatch, "operator dimension differs from quantum register");
  pool_.push_back(rho);
  return static_cast<int>(pool_.size()) - 1;
}

void CqState::add_point(const std::vector<int>& tuple, double prob, int operator_index) {
  if (tuple.size() != regs_.size()) throw Error(ErrorKind::DimensionMismatch, "tuple length differs from register count");
  if (operator_index < 0 || operator_index >= static_cast<int>(pool_.size()))
    throw Error(ErrorKind::InvalidState, "operator index out of range");
  if (prob < 0.0) throw Error(ErrorKind::InvalidState, "negative probability");
  for (size_t r = 0; r < tuple.size(); ++r)
    if (tuple[r] < 0 || tuple[r] >= regs_[r].alphabet) throw Error(ErrorKind::DomainError, "symbol outside alphabet of " + regs_[r].name);
  if (prob == 0.0) return;
  tuples_.insert(tuples_.end(), tuple.begin(), tuple.end());
  probs_.push_back(prob);
  op_index_.push_back(operator_index);
}

int CqState::register_index(const std::string& name) const {
  for (size_t i = 0; i < regs_.size(); ++i)
    if (regs_[i].name == name) return static_cast<int>(i);
  throw Error(ErrorKind::UnknownRegister, name);
}

uint64_t CqState::mask_of(const std::vector<std::string>& names) const {
  uint64_t m = 0;
  for (const auto& n : names) m |= uint64_t{1} << register_index(n);
  return m;
}

double CqState::total_mass() const {
  double s = 0.0;
  for (double p : probs_) s += p;
  return s;
}

std::vector<CqState::Conditional> CqState::conditionals(uint64_t mask) const {
  const size_t nr = regs_.size();
  std::vector<uint64_t> stride(nr, 0);
  uint64_t span = 1;
  for (size_t r = 0; r < nr; ++r) {
    if (!(mask >> r & 1)) continue;
    stride[r] = span;
    span *= static_cast<uint64_t>(regs_[r].alphabet);
  }
  std::unordered_map<uint64_t, size_t> slot;
  std::vector<Conditional> out;
  for (size_t i = 0; i < probs_.size(); ++i) {
    uint64_t key = 0;
    const int* t = tuples_.data() + i * nr;
    for (size_t r = 0; r < nr; ++r) key += stride[r] * static_cast<uint64_t>(t[r]);
    auto [it, fresh] = slot.try_emplace(key, out.size());
    if (fresh) out.push_back({key, 0.0, Mat::Zero(dq_, dq_)});
    auto& c = out[it->second];
    c.prob += probs_[i];
    c.state += probs_[i] * pool_[static_cast<size_t>(op_index_[i])];
  }
  for (auto& c : out)
    if (c.prob > 0) c.state /= c.prob;
  return out;
}

double CqState::entropy_mask(uint64_t mask, bool include_quantum) const {
  if (!include_quantum) {
    const size_t nr = regs_.size();
    std::unordered_map<uint64_t, double> acc;
    std::vector<uint64_t> stride(nr, 0);
    uint64_t span = 1;
    for (size_t r = 0; r < nr; ++r) {
      if (!(mask >> r & 1)) continue;
      stride[r] = span;
      span *= static_cast<uint64_t>(regs_[r].alphabet);
    }
    for (size_t i = 0; i < probs_.size(); ++i) {
      uint64_t key = 0;
      const int* t = tuples_.data() + i * nr;
      for (size_t r = 0; r < nr; ++r) key += stride[r] * static_cast<uint64_t>(t[r]);
      acc[key] += probs_[i];
    }
    std::vector<double> p;
    p.reserve(acc.size());
    for (auto& [k, v] : acc) p.push_back(v);
    std::sort(p.begin(), p.end());  // fixed summation order
    return shannon_entropy(p);
  }
  auto conds = conditionals(mask);
  std::sort(conds.begin(), conds.end(), [](const Conditional& a, const Conditional& b) { return a.key < b.key; });
  double h = 0.0;
  for (const auto& c : conds) {
    if (c.prob <= 0) continue;
    h += -c.prob * std::log2(c.prob) + c.prob * entropy_bits(hermitian_part(c.state));
  }
  return h;
}

double CqState::entropy(const EntropyQuery& q) const {
  return entropy_mask(mask_of(q.classical), q.include_quantum);
}

Mat CqState::joint_operator() const {
  const Eigen::Index n = static_cast<Eigen::Index>(probs_.size()) * dq_;
  Mat j = Mat::Zero(n, n);
  for (size_t i = 0; i < probs_.size(); ++i)
    j.block(static_cast<Eigen::Index>(i) * dq_, static_cast<Eigen::Index>(i) * dq_, dq_, dq_) =
        probs_[i] * pool_[static_cast<size_t>(op_index_[i])];
  return j;
}

double conditional_mutual_info(const CqState& s, const EntropyQuery& a, const EntropyQuery& b,
                               const EntropyQuery& c) {
  const uint64_t ma = s.mask_of(a.classical), mb = s.mask_of(b.classical), mc = s.mask_of(c.classical);
  if ((ma & mb) || (ma & mc) || (mb & mc))
    throw Error(ErrorKind::OverlappingQueries, "classical register sets overlap");
  if (int(a.include_quantum) + int(b.include_quantum) + int(c.include_quantum) > 1)
    throw Error(ErrorKind::OverlappingQueries, "quantum register requested more than once");
  const bool qa = a.include_quantum, qb = b.include_quantum, qc = c.include_quantum;
  return s.entropy_mask(ma | mc, qa || qc) + s.entropy_mask(mb | mc, qb || qc) -
         s.entropy_mask(ma | mb | mc, qa || qb || qc) - s.entropy_mask(mc, qc);
}

double mutual_info(const CqState& s, const EntropyQuery& a, const EntropyQuery& b) {
  return conditional_mutual_info(s, a, b, EntropyQuery{});
}

}  // namespace cqrl
