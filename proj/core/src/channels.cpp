#include "cqrl/channels.hpp"

#include <algorithm>
#include <cmath>

#include "cqrl/errors.hpp"
#include "cqrl/rng.hpp"
#include "cqrl/scalar.hpp"
#include "cqrl/tolerances.hpp"

namespace cqrl::channels {

namespace {
constexpr double kHalfPi = 1.5707963267948966;

void check_bit(int x) {
  if (x != 0 && x != 1) throw Error(ErrorKind::DomainError, "input symbol must be 0 or 1");
}
void check_delta(double d) {
  if (!(d >= 0.0 && d <= 0.5)) throw Error(ErrorKind::DomainError, "delta outside [0, 1/2]");
}
void check_phi(double phi) {
  if (!(phi >= 0.0 && phi <= kHalfPi + 1e-15)) throw Error(ErrorKind::DomainError, "phi outside [0, pi/2]");
}
void check_tau(double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::DomainError, "cost budget must be nonnegative");
}
}  // namespace

Mat sigma_state(double delta, int x) {
  check_delta(delta);
  check_bit(x);
  Mat m = Mat::Zero(2, 2);
  m(1 - x, 1 - x) = 1.0 - delta;
  m(x, x) += delta;
  return m;
}

Mat gamma_state(double phi, int x) {
  check_phi(phi);
  check_bit(x);
  Vec v(2);
  if (x == 0) v << 1.0, 0.0;
  else v << std::cos(phi), std::sin(phi);
  return ketbra(v);
}

ChannelSpec::ChannelSpec(std::array<int, 3> inputs, std::array<int, 3> output_dims, std::vector<Mat> states,
                         std::array<std::vector<double>, 3> costs, CostVector tau)
    : inputs_(inputs), dims_(output_dims), states_(std::move(states)), costs_(std::move(costs)), tau_(tau) {
  for (int j = 0; j < 3; ++j) {
    if (inputs_[j] <= 0 || dims_[j] <= 0) throw Error(ErrorKind::DimensionMismatch, "alphabet sizes and output dims must be positive");
    if (static_cast<int>(costs_[j].size()) != inputs_[j]) throw Error(ErrorKind::DimensionMismatch, "cost table size differs from alphabet");
    for (double c : costs_[j])
      if (!(c >= 0.0)) throw Error(ErrorKind::DomainError, "costs must be nonnegative");
    if (!(tau_[j] >= 0.0)) throw Error(ErrorKind::DomainError, "cost budgets must be nonnegative");
  }
  if (static_cast<int>(states_.size()) != input_count()) throw Error(ErrorKind::DimensionMismatch, "state family size differs from input tuples");
  const int d = dims_[0] * dims_[1] * dims_[2];
  std::vector<int> fd(dims_.begin(), dims_.end());
  for (auto& s : states_) {
    if (s.rows() != d) throw Error(ErrorKind::DimensionMismatch, "state dimension differs from product of output dims");
    s = DensityOperator(s).matrix();
    for (int j = 0; j < 3; ++j) marginals_[j].push_back(partial_trace(s, fd, {j}));
  }
}

const Mat& ChannelSpec::marginal(int j, int x1, int x2, int x3) const {
  return marginals_[static_cast<size_t>(j)][static_cast<size_t>(flat_index(x1, x2, x3))];
}

int ChannelSpec::zero_cost_symbol(int j) const {
  const auto& c = costs_[static_cast<size_t>(j)];
  return static_cast<int>(std::min_element(c.begin(), c.end()) - c.begin());
}

ChannelSpec build_ex1(double delta1, double delta2, double delta3, double tau) {
  check_tau(tau);
  std::vector<Mat> st;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3)
        st.push_back(tensor(tensor(sigma_state(delta1, x1 ^ x2 ^ x3), sigma_state(delta2, x2)), sigma_state(delta3, x3)));
  return ChannelSpec({2, 2, 2}, {2, 2, 2}, std::move(st), {std::vector<double>{0, 1}, {0, 0}, {0, 0}},
                     {tau, unconstrained, unconstrained});
}

ChannelSpec build_ex2(double phi, double delta2, double delta3, double tau) {
  check_tau(tau);
  std::vector<Mat> st;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3)
        st.push_back(tensor(tensor(gamma_state(phi, x1 ^ x2 ^ x3), sigma_state(delta2, x2)), sigma_state(delta3, x3)));
  return ChannelSpec({2, 2, 2}, {2, 2, 2}, std::move(st), {std::vector<double>{0, 1}, {0, 0}, {0, 0}},
                     {tau, unconstrained, unconstrained});
}

ChannelSpec build_ex3(double phi, double delta2, double delta3, double tau1, double tau2, double tau3) {
  check_tau(tau1);
  check_tau(tau2);
  check_tau(tau3);
  std::vector<Mat> st;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3)
        st.push_back(tensor(tensor(gamma_state(phi, x1 ^ (x2 | x3)), sigma_state(delta2, x2)), sigma_state(delta3, x3)));
  return ChannelSpec({2, 2, 2}, {2, 2, 2}, std::move(st), {std::vector<double>{0, 1}, {0, 1}, {0, 1}},
                     {tau1, tau2, tau3});
}

ChannelSpec build_3to1(const std::vector<Mat>& rx1_states, int n1, int n2, int n3, const std::vector<Mat>& rx2_states,
                       const std::vector<Mat>& rx3_states, std::array<std::vector<double>, 3> costs) {
  if (static_cast<int>(rx1_states.size()) != n1 * n2 * n3 || static_cast<int>(rx2_states.size()) != n2 ||
      static_cast<int>(rx3_states.size()) != n3)
    throw Error(ErrorKind::DimensionMismatch, "state list sizes differ from alphabets");
  std::vector<Mat> st;
  for (int x1 = 0; x1 < n1; ++x1)
    for (int x2 = 0; x2 < n2; ++x2)
      for (int x3 = 0; x3 < n3; ++x3)
        st.push_back(tensor(tensor(rx1_states[static_cast<size_t>((x1 * n2 + x2) * n3 + x3)], rx2_states[static_cast<size_t>(x2)]),
                            rx3_states[static_cast<size_t>(x3)]));
  const std::array<int, 3> dims{static_cast<int>(rx1_states.at(0).rows()), static_cast<int>(rx2_states.at(0).rows()),
                                static_cast<int>(rx3_states.at(0).rows())};
  return ChannelSpec({n1, n2, n3}, dims, std::move(st), std::move(costs));
}

std::variant<ClassicalIC, NonCommuting> classical_equivalent(const ChannelSpec& spec) {
  const double tol = tolerances().commute;
  const int nx = spec.input_count();
  double worst = 0.0;
  for (int a = 0; a < nx; ++a)
    for (int b = a + 1; b < nx; ++b) {
      const Mat& ra = spec.state_flat(a);
      const Mat& rb = spec.state_flat(b);
      worst = std::max(worst, operator_norm(ra * rb - rb * ra));
    }
  if (worst > tol) return NonCommuting{worst};

  ClassicalIC ic;
  ic.inputs = spec.inputs();
  ic.outputs = spec.output_dims();
  for (int j = 0; j < 3; ++j) {
    const int d = spec.output_dims()[j];
    std::vector<const Mat*> fam;
    for (int x1 = 0; x1 < spec.inputs()[0]; ++x1)
      for (int x2 = 0; x2 < spec.inputs()[1]; ++x2)
        for (int x3 = 0; x3 < spec.inputs()[2]; ++x3) fam.push_back(&spec.marginal(j, x1, x2, x3));
    // Standard basis when it already diagonalises the family, otherwise the
    // eigenbasis of a fixed pseudo-random combination.
    bool diagonal = true;
    for (const Mat* m : fam)
      for (int r = 0; r < d && diagonal; ++r)
        for (int c = 0; c < d; ++c)
          if (r != c && std::abs((*m)(r, c)) > tol) { diagonal = false; break; }
    Mat basis = Mat::Identity(d, d);
    if (!diagonal) {
      Mat comb = Mat::Zero(d, d);
      uint64_t s = 0x1234;
      for (const Mat* m : fam) {
        s = splitmix64(s);
        comb += (0.5 + static_cast<double>(s >> 11) * 0x1.0p-53) * (*m);
      }
      basis = eig_hermitian(comb).vectors;
    }
    for (const Mat* m : fam) {
      Mat rot = basis.adjoint() * (*m) * basis;
      std::vector<double> row(static_cast<size_t>(d));
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c)
          if (r != c && std::abs(rot(r, c)) > std::sqrt(tol)) return NonCommuting{std::abs(rot(r, c))};
        row[static_cast<size_t>(r)] = std::max(0.0, rot(r, r).real());
      }
      ic.trans[static_cast<size_t>(j)].push_back(std::move(row));
    }
  }
  return ic;
}

double user_information(const ChannelSpec& spec, int j, double t) {
  if (j < 0 || j > 2) throw Error(ErrorKind::DomainError, "user index must be 0, 1 or 2");
  if (spec.inputs()[j] != 2) throw Error(ErrorKind::Unsupported, "capacity search supports binary inputs only");
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::DomainError, "p(1) outside [0,1]");
  std::array<int, 3> x{spec.zero_cost_symbol(0), spec.zero_cost_symbol(1), spec.zero_cost_symbol(2)};
  x[j] = 0;
  const Mat& r0 = spec.marginal(j, x[0], x[1], x[2]);
  x[j] = 1;
  const Mat& r1 = spec.marginal(j, x[0], x[1], x[2]);
  const Mat avg = (1.0 - t) * r0 + t * r1;
  return entropy_bits(avg) - (1.0 - t) * entropy_bits(r0) - t * entropy_bits(r1);
}

CapacityResult user_capacity_cost(const ChannelSpec& spec, int j, double tau_j, double grid) {
  if (!(grid > 0.0)) throw Error(ErrorKind::DomainError, "grid resolution must be positive");
  if (!(tau_j >= 0.0)) throw Error(ErrorKind::DomainError, "cost budget must be nonnegative");
  if (spec.inputs()[j] != 2) throw Error(ErrorKind::Unsupported, "capacity search supports binary inputs only");
  const double k0 = spec.costs()[j][0], k1 = spec.costs()[j][1];
  double tmax = 1.0;
  if (k1 > k0) tmax = std::clamp((tau_j - k0) / (k1 - k0), 0.0, 1.0);
  if (k0 > k1) throw Error(ErrorKind::Unsupported, "cost of symbol 1 must not be below cost of symbol 0");
  if (k0 > tau_j) throw Error(ErrorKind::DomainError, "no input meets the cost budget");
  const double hi = std::min(tmax, 0.5);

  const int steps = std::max(1, static_cast<int>(std::ceil(hi / grid)));
  double best_t = 0.0, best = user_information(spec, j, 0.0);
  int best_i = 0;
  for (int i = 1; i <= steps; ++i) {
    const double t = (i == steps) ? hi : i * grid;
    const double v = user_information(spec, j, t);
    if (v > best) { best = v; best_t = t; best_i = i; }
  }
  double lo = best_i == 0 ? 0.0 : std::max(0.0, (best_i - 1) * grid);
  double up = std::min(hi, (best_i + 1) * grid);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = up - g * (up - lo), b = lo + g * (up - lo);
  double fa = user_information(spec, j, a), fb = user_information(spec, j, b);
  while (up - lo > 1e-9) {
    if (fa < fb) {
      lo = a; a = b; fa = fb;
      b = lo + g * (up - lo);
      fb = user_information(spec, j, b);
    } else {
      up = b; b = a; fb = fa;
      a = up - g * (up - lo);
      fa = user_information(spec, j, a);
    }
  }
  for (double t : {lo, up, 0.5 * (lo + up)}) {
    const double v = user_information(spec, j, t);
    if (v > best) { best = v; best_t = t; }
  }
  return {best, best_t, Pmf::bernoulli(best_t)};
}

bool condition_eq1(const std::array<double, 3>& caps, double c1_unconstrained) {
  return caps[0] + caps[1] + caps[2] > c1_unconstrained + tolerances().rate;
}

std::vector<OrRow> or_recovery_table() {
  std::vector<OrRow> rows;
  for (int x2 = 0; x2 < 2; ++x2)
    for (int x3 = 0; x3 < 2; ++x3) rows.push_back({x2, x3, (x2 + x3) % 3, x2 | x3});
  return rows;
}

double or_recovery_entropy(double p2, double p3) {
  // joint[s][o] over the ternary sum s and the OR value o
  double joint[3][2] = {};
  for (const auto& r : or_recovery_table()) {
    const double p = (r.x2 ? p2 : 1.0 - p2) * (r.x3 ? p3 : 1.0 - p3);
    joint[r.ternary_sum][r.logical_or] += p;
  }
  double h = 0.0;
  for (auto& row : joint) {
    const double ps = row[0] + row[1];
    for (double v : row)
      if (v > 0.0 && v < ps) h -= v * std::log2(v / ps);
  }
  return h;
}

bool or_recovery_check(int denominator) {
  int image[3] = {-1, -1, -1};
  for (const auto& r : or_recovery_table()) {
    if (image[r.ternary_sum] >= 0 && image[r.ternary_sum] != r.logical_or) return false;
    image[r.ternary_sum] = r.logical_or;
  }
  for (int a = 0; a <= denominator; ++a)
    for (int b = 0; b <= denominator; ++b)
      if (or_recovery_entropy(static_cast<double>(a) / denominator, static_cast<double>(b) / denominator) != 0.0) return false;
  return true;
}

double ex3_theta(double phi, double tau1, double tau2, double tau3) {
  auto xlogx = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
  const double beta = tau2 + tau3 - tau2 * tau3;
  const double hf1 = binary_entropy(fact1_f(tau1, phi));
  const double common = xlogx((1.0 - tau1) * (1.0 - tau2)) + xlogx(binary_convolve(tau1, tau2)) + xlogx(tau1 * tau2) -
                        hf1 + binary_entropy(fact1_f(binary_convolve(tau1, beta), phi));
  return std::min(binary_entropy(tau2), binary_entropy(tau3)) + common + hf1;
}

double ex3_theta_renamed(double phi, double tau1, double tau2, double tau3) {
  auto xlogx = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
  const double beta = tau2 + tau3 - tau2 * tau3;
  const double hf1 = binary_entropy(fact1_f(tau1, phi));
  const double common = xlogx((1.0 - tau2) * (1.0 - tau3)) + xlogx(binary_convolve(tau2, tau3)) + xlogx(tau2 * tau3) -
                        hf1 + binary_entropy(fact1_f(binary_convolve(tau1, beta), phi));
  return std::min(binary_entropy(tau2), binary_entropy(tau3)) + common + hf1;
}

ExampleCapacities ex2_closed_form(double phi, double delta2, double delta3, double tau) {
  ExampleCapacities c;
  c.cost_capacity = {binary_entropy(fact1_f(std::min(tau, 0.5), phi)), 1.0 - binary_entropy(delta2),
                     1.0 - binary_entropy(delta3)};
  c.c1 = binary_entropy((1.0 + std::cos(phi)) / 2.0);
  return c;
}

ExampleCapacities ex3_closed_form(double phi, double delta2, double delta3, double tau1, double tau2, double tau3) {
  ExampleCapacities c;
  auto user = [](double t, double d) {
    const double tt = std::min(t, 0.5);
    return binary_entropy(binary_convolve(tt, d)) - binary_entropy(d);
  };
  c.cost_capacity = {binary_entropy(fact1_f(std::min(tau1, 0.5), phi)), user(tau2, delta2), user(tau3, delta3)};
  const double beta = tau2 + tau3 - tau2 * tau3;
  c.c1 = binary_entropy(fact1_f(binary_convolve(tau1, beta), phi));
  return c;
}

void to_json(nlohmann::json& j, const ChannelSpec& c) {
  nlohmann::json states = nlohmann::json::array();
  for (int x1 = 0; x1 < c.inputs()[0]; ++x1)
    for (int x2 = 0; x2 < c.inputs()[1]; ++x2)
      for (int x3 = 0; x3 < c.inputs()[2]; ++x3) {
        const Mat& m = c.state(x1, x2, x3);
        std::vector<double> re, im;
        for (Eigen::Index r = 0; r < m.rows(); ++r)
          for (Eigen::Index s = 0; s < m.cols(); ++s) {
            re.push_back(m(r, s).real());
            im.push_back(m(r, s).imag());
          }
        states.push_back({{"x", {x1, x2, x3}}, {"matrix_re", re}, {"matrix_im", im}});
      }
  nlohmann::json tau = nlohmann::json::array();
  for (double t : c.tau()) tau.push_back(std::isinf(t) ? nlohmann::json(nullptr) : nlohmann::json(t));
  j = {{"inputs", c.inputs()}, {"output_dims", c.output_dims()}, {"states", states}, {"costs", c.costs()}, {"tau", tau}};
}

ChannelSpec channel_from_json(const nlohmann::json& j) {
  try {
    auto inputs = j.at("inputs").get<std::array<int, 3>>();
    auto dims = j.at("output_dims").get<std::array<int, 3>>();
    const int nx = inputs[0] * inputs[1] * inputs[2];
    const int d = dims[0] * dims[1] * dims[2];
    if (nx <= 0 || d <= 0) throw Error(ErrorKind::ConfigMismatch, "alphabets and dims must be positive");
    std::vector<Mat> states(static_cast<size_t>(nx));
    std::vector<bool> seen(static_cast<size_t>(nx), false);
    for (const auto& s : j.at("states")) {
      auto x = s.at("x").get<std::array<int, 3>>();
      for (int u = 0; u < 3; ++u)
        if (x[u] < 0 || x[u] >= inputs[u]) throw Error(ErrorKind::ConfigMismatch, "state input tuple outside alphabet");
      auto re = s.at("matrix_re").get<std::vector<double>>();
      std::vector<double> im = s.contains("matrix_im") ? s.at("matrix_im").get<std::vector<double>>()
                                                       : std::vector<double>(re.size(), 0.0);
      if (re.size() != static_cast<size_t>(d) * d || im.size() != re.size())
        throw Error(ErrorKind::ConfigMismatch, "matrix entry count differs from output dimension");
      Mat m(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = cplx(re[static_cast<size_t>(r * d + c)], im[static_cast<size_t>(r * d + c)]);
      const int idx = (x[0] * inputs[1] + x[1]) * inputs[2] + x[2];
      states[static_cast<size_t>(idx)] = m;
      seen[static_cast<size_t>(idx)] = true;
    }
    for (bool b : seen)
      if (!b) throw Error(ErrorKind::ConfigMismatch, "state family is not total");
    std::array<std::vector<double>, 3> costs;
    if (j.contains("costs")) costs = j.at("costs").get<std::array<std::vector<double>, 3>>();
    else
      for (int u = 0; u < 3; ++u) costs[u].assign(static_cast<size_t>(inputs[u]), 0.0);
    CostVector tau{unconstrained, unconstrained, unconstrained};
    if (j.contains("tau"))
      for (int u = 0; u < 3; ++u)
        if (!j.at("tau").at(u).is_null()) tau[u] = j.at("tau").at(u).get<double>();
    try {
      return ChannelSpec(inputs, dims, std::move(states), std::move(costs), tau);
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigMismatch, e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

nlohmann::json classical_to_json(const ClassicalIC& c) {
  nlohmann::json j{{"inputs", c.inputs}, {"outputs", c.outputs}};
  for (int r = 0; r < 3; ++r) j["transition_y" + std::to_string(r + 1)] = c.trans[static_cast<size_t>(r)];
  return j;
}

}  // namespace cqrl::channels
