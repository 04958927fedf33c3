#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cqrl/lp.hpp"
#include "cqrl/regions.hpp"

namespace cqrl::regions::detail {

// Size of the layer owned by `owner` aimed at `target` (0-based users).
int u_size(const LayeredConfig& cfg, int owner, int target);
int v_size(const LayeredConfig& cfg, int owner, int target);
int x_size(const TxLayers& tx);

// Entropies of a receiver state by register name, cached.
class ReceiverEntropy {
 public:
  explicit ReceiverEntropy(CqState s) : s_(std::move(s)) {}
  double h(const std::vector<std::string>& names, bool quantum);
  // H(a | b), optionally with Y joined to the conditioning side.
  double cond(const std::vector<std::string>& a, const std::vector<std::string>& b, bool y_in_condition);
  const CqState& state() const { return s_; }

 private:
  CqState s_;
  std::map<std::pair<uint64_t, bool>, double> cache_;
};

// Accumulates named nonnegative variables and rows, then solves and reports.
class SystemBuilder {
 public:
  int var(const std::string& name);
  void row(std::string label, const std::vector<std::pair<std::string, double>>& terms, LinearConstraint::Sense sense,
           double rhs, bool strict = true);
  RegionReport solve(std::string system, const Rates& rates, const CostVector& used, const CostVector& tau) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
  struct Pending {
    std::string label;
    std::vector<std::pair<int, double>> terms;
    LinearConstraint::Sense sense;
    double rhs;
    bool strict;
  };
  std::vector<Pending> rows_;
};

CostVector layered_costs(const ChannelSpec& ch, const LayeredConfig& cfg);
std::string set_label(const std::vector<std::string>& members);

}  // namespace cqrl::regions::detail
