#include "cqrl/tiltlab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "cqrl/errors.hpp"
#include "cqrl/tolerances.hpp"

namespace cqrl::tiltlab {

int TiltSpace::block_size(int b) const {
  long long s = 1;
  for (int t = 0; t < n; ++t) {
    s *= aux_dims.at(static_cast<size_t>(b));
    if (s > max_extended_dim) return max_extended_dim + 1;
  }
  return static_cast<int>(s);
}

int TiltSpace::extended_dim() const {
  long long total = 1;
  for (size_t b = 0; b < aux_dims.size(); ++b) total += block_size(static_cast<int>(b));
  total *= ground_dim();
  return total > max_extended_dim ? max_extended_dim + 1 : static_cast<int>(total);
}

int TiltSpace::block_offset(int b) const {
  int off = ground_dim();
  for (int c = 0; c < b; ++c) off += ground_dim() * block_size(c);
  return off;
}

void TiltSpace::validate() const {
  if (base_dim < 1 || n < 1) throw Error(ErrorKind::DomainError, "base dimension and n must be positive");
  if (aux_dims.size() != powers.size()) throw Error(ErrorKind::LengthMismatch, "one power per auxiliary block");
  for (size_t b = 0; b < aux_dims.size(); ++b)
    if (aux_dims[b] < 1 || powers[b] < 1) throw Error(ErrorKind::DomainError, "auxiliary sizes and powers must be positive");
  if (extended_dim() > max_extended_dim) throw Error(ErrorKind::DimOverflow, "extended space exceeds 4096 dimensions");
}

TiltSpace TiltSpace::three_to_one(int base_dim, int d1, int d2, int n) {
  TiltSpace s{base_dim, {d1, d2}, {1, 1}, n};
  s.validate();
  return s;
}

TiltSpace TiltSpace::four_user(int base_dim, const std::vector<int>& aux_dims, int n) {
  if (aux_dims.size() != 14) throw Error(ErrorKind::LengthMismatch, "four-user space needs 14 auxiliary sizes");
  TiltSpace s{base_dim, aux_dims, {}, n};
  for (unsigned S = 1; S < 15; ++S) s.powers.push_back(std::popcount(S));
  s.validate();
  return s;
}

double omega(const TiltSpace& s, double eta) {
  double w = 1.0;
  for (int p : s.powers) w += std::pow(eta, 2 * p);
  return w;
}

double omega_subset(int k, double eta) { return 1 + std::pow(eta, 2 * k); }

double omega_printed(double eta) {
  const double e2 = eta * eta;
  return 1 + 16 * e2 + 36 * e2 * e2 + 16 * e2 * e2 * e2;
}

namespace {

void check_eta(double eta) {
  if (!(eta >= 0 && eta <= 1)) throw Error(ErrorKind::DomainError, "eta outside [0, 1]");
}

void check_dirs(const TiltSpace& s, const std::vector<int>& dirs) {
  if (dirs.size() != s.aux_dims.size()) throw Error(ErrorKind::LengthMismatch, "one direction per auxiliary block");
  for (size_t b = 0; b < dirs.size(); ++b)
    if (dirs[b] < -1 || dirs[b] >= s.block_size(static_cast<int>(b))) throw Error(ErrorKind::DomainError, "direction index out of range");
}

// h ↦ h ⊗ |v⟩ into block b (b = −1: the ground block, v ignored).
Mat lift(const TiltSpace& s, int b, const Vec& v) {
  const int g = s.ground_dim();
  Mat L = Mat::Zero(s.extended_dim(), g);
  if (b < 0) {
    for (int i = 0; i < g; ++i) L(i, i) = 1.0;
    return L;
  }
  const int off = s.block_offset(b), size = s.block_size(b);
  for (int i = 0; i < g; ++i)
    for (int d = 0; d < size; ++d) L(off + i * size + d, i) = v(d);
  return L;
}

Vec basis(int size, int d) {
  Vec v = Vec::Zero(size);
  v(d) = 1.0;
  return v;
}

Mat ground_operator(const TiltSpace& s, const Mat& rho) {
  if (rho.rows() != s.base_dim || rho.cols() != s.base_dim) throw Error(ErrorKind::DimensionMismatch, "state dimension differs from the base space");
  Mat q = Mat::Zero(2, 2);
  q(0, 0) = 1.0;
  return tensor(rho, q);
}

double gaussian(Rng& rng) {
  const double u1 = 1.0 - rng.uniform01(), u2 = rng.uniform01();
  return std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

template <class F>
void parallel_cases(int cases, int threads, F body) {
  const int t = std::max(1, threads);
  if (t == 1) {
    for (int c = 0; c < cases; ++c) body(c);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(static_cast<size_t>(t));
  for (int w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int c = w; c < cases; c += t) body(c);
      } catch (...) {
        errs[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace

Mat tilt_isometry(const TiltSpace& s, const std::vector<int>& dirs, double eta) {
  s.validate();
  check_eta(eta);
  check_dirs(s, dirs);
  Mat V = lift(s, -1, Vec());
  double norm2 = 1.0;
  for (size_t b = 0; b < dirs.size(); ++b) {
    if (dirs[b] < 0) continue;
    const double w = std::pow(eta, s.powers[b]);
    V += w * lift(s, static_cast<int>(b), basis(s.block_size(static_cast<int>(b)), dirs[b]));
    norm2 += w * w;
  }
  return V / std::sqrt(norm2);
}

Vec tilt_vector(const TiltSpace& s, const Vec& h, const std::vector<int>& dirs, double eta) {
  if (h.size() != s.ground_dim()) throw Error(ErrorKind::DimensionMismatch, "vector dimension differs from the ground space");
  if (std::abs(h.norm() - 1.0) > 1e-9) throw Error(ErrorKind::NotUnit, "input vector is not normalized");
  return tilt_isometry(s, dirs, eta) * h;
}

Mat embed_ground(const TiltSpace& s, const Mat& rho) {
  s.validate();
  const Mat g = ground_operator(s, rho);
  Mat out = Mat::Zero(s.extended_dim(), s.extended_dim());
  out.topLeftCorner(g.rows(), g.cols()) = g;
  return out;
}

TiltedState tilt_state(const TiltSpace& s, const Mat& rho, const std::vector<int>& dirs, double eta) {
  DensityOperator valid(rho);
  const Mat V = tilt_isometry(s, dirs, eta);
  TiltedState t;
  t.op = V * ground_operator(s, valid.matrix()) * V.adjoint();
  t.original = valid.matrix();
  t.dirs = dirs;
  t.eta = eta;
  return t;
}

double closeness(const TiltSpace& s, const TiltedState& t) { return trace_norm(t.op - embed_ground(s, t.original)); }

double pure_case_bound(double eta) { return 2 * std::sqrt(2 - 2 / std::sqrt(1 + 2 * eta * eta)); }

SmoothingResult smoothing_residual(const TiltSpace& s, const std::vector<Mat>& family, const std::vector<double>& weights,
                                   int kept_block, int kept_dir, double eta) {
  s.validate();
  check_eta(eta);
  if (family.empty() || family.size() != weights.size()) throw Error(ErrorKind::LengthMismatch, "one weight per family member");
  const int blocks = static_cast<int>(s.aux_dims.size());
  if (kept_block < -1 || kept_block >= blocks) throw Error(ErrorKind::DomainError, "kept block out of range");
  if (kept_block >= 0 && (kept_dir < 0 || kept_dir >= s.block_size(kept_block))) throw Error(ErrorKind::DomainError, "kept direction out of range");
  if (kept_block < 0 && blocks == 0) throw Error(ErrorKind::DomainError, "nothing to average");

  Mat rho_bar = Mat::Zero(s.base_dim, s.base_dim);
  double wsum = 0.0;
  for (size_t i = 0; i < family.size(); ++i) {
    if (weights[i] < 0) throw Error(ErrorKind::DomainError, "negative family weight");
    rho_bar += weights[i] * DensityOperator(family[i]).matrix();
    wsum += weights[i];
  }
  if (std::abs(wsum - 1.0) > tolerances().prob) throw Error(ErrorKind::DomainError, "family weights do not sum to 1");
  const Mat X = ground_operator(s, rho_bar);
  const double om = omega(s, eta);

  // V_d = (L₀ + Σ_b w_b L_b(d_b)) / √Ω. Averaging over independent uniform
  // d_b replaces L_b by L_b(ū_b) in cross terms, ū_b the mean basis vector,
  // and L_b X L_b† by X ⊗ I/|D_b| on the diagonal.
  std::vector<Mat> L;
  std::vector<double> w;
  std::vector<bool> averaged;
  L.push_back(lift(s, -1, Vec()));
  w.push_back(1.0);
  averaged.push_back(false);
  int min_avg = 0;
  for (int b = 0; b < blocks; ++b) {
    const int size = s.block_size(b);
    const bool avg = b != kept_block;
    Vec v = avg ? Vec(Vec::Constant(size, 1.0 / size)) : basis(size, kept_dir);
    L.push_back(lift(s, b, v));
    w.push_back(std::pow(eta, s.powers[static_cast<size_t>(b)]));
    averaged.push_back(avg);
    if (avg) min_avg = min_avg == 0 ? size : std::min(min_avg, size);
  }
  const int dim = s.extended_dim();
  Mat avg = Mat::Zero(dim, dim);
  for (size_t a = 0; a < L.size(); ++a)
    for (size_t c = 0; c < L.size(); ++c) {
      if (a == c && averaged[a]) {
        const int b = static_cast<int>(a) - 1, off = s.block_offset(b), size = s.block_size(b);
        for (int i = 0; i < X.rows(); ++i)
          for (int j = 0; j < X.cols(); ++j)
            for (int d = 0; d < size; ++d) avg(off + i * size + d, off + j * size + d) += w[a] * w[a] * X(i, j) / static_cast<double>(size);
      } else {
        avg += w[a] * w[c] * (L[a] * X * L[c].adjoint());
      }
    }
  avg /= om;

  SmoothingResult r;
  r.average = avg;
  Mat K = L[0];
  if (kept_block >= 0) K += w[static_cast<size_t>(kept_block) + 1] * L[static_cast<size_t>(kept_block) + 1];
  r.structured = K * X * K.adjoint() / om;
  r.scale = (kept_block >= 0 ? omega_subset(s.powers[static_cast<size_t>(kept_block)], eta) : 1.0) / om;
  r.residual = r.average - r.structured;
  r.residual_norm = operator_norm(r.residual);
  r.averaged_size = min_avg;
  r.bound_3 = 3 * eta / std::sqrt(static_cast<double>(min_avg));
  r.bound_21 = 21 * eta / std::sqrt(static_cast<double>(min_avg));
  return r;
}

HnResult hayashi_nagaoka_check(const Mat& S, const Mat& T) {
  const auto& tol = tolerances();
  if (S.rows() != S.cols() || T.rows() != T.cols() || S.rows() != T.rows() || S.rows() == 0)
    throw Error(ErrorKind::InvalidOperands, "operands must be square of equal dimension");
  if (hermiticity_defect(S) > tol.herm || hermiticity_defect(T) > tol.herm) throw Error(ErrorKind::InvalidOperands, "operands must be Hermitian");
  const Mat Sh = hermitian_part(S), Th = hermitian_part(T);
  const auto es = eig_hermitian(Sh).values;
  const auto et = eig_hermitian(Th).values;
  if (es.minCoeff() < -tol.psd || es.maxCoeff() > 1 + tol.psd) throw Error(ErrorKind::InvalidOperands, "S must satisfy 0 <= S <= I");
  if (et.minCoeff() < -tol.psd) throw Error(ErrorKind::InvalidOperands, "T must be positive semidefinite");

  const Mat I = Mat::Identity(S.rows(), S.cols());
  const double floor = tol.eig_floor;
  const Mat inv_root = spectral_map(Sh + Th, [floor](double x) { return x > floor ? 1 / std::sqrt(x) : 0.0; });
  const Mat lhs = I - inv_root * Sh * inv_root;
  const Mat diff = 2 * (I - Sh) + 4 * Th - lhs;
  HnResult r;
  r.herm_defect = hermiticity_defect(diff);
  r.min_eig = eig_hermitian(hermitian_part(diff)).values.minCoeff();
  r.holds = r.herm_defect <= 1e-12 && r.min_eig >= -1e-9;
  return r;
}

SrmResult tiny_srm(const std::vector<Mat>& states, const std::vector<double>& priors) {
  if (states.empty()) throw Error(ErrorKind::DegenerateEnsemble, "empty ensemble");
  if (states.size() > 16) throw Error(ErrorKind::DimOverflow, "at most 16 states");
  if (states.size() != priors.size()) throw Error(ErrorKind::LengthMismatch, "one prior per state");
  const auto dim = states[0].rows();
  if (dim > 64) throw Error(ErrorKind::DimOverflow, "state dimension above 64");
  double psum = 0.0;
  for (double p : priors) {
    if (p < 0) throw Error(ErrorKind::DomainError, "negative prior");
    psum += p;
  }
  if (std::abs(psum - 1.0) > tolerances().prob) throw Error(ErrorKind::DomainError, "priors do not sum to 1");
  Mat theta = Mat::Zero(dim, dim);
  std::vector<Mat> rho;
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i].rows() != dim) throw Error(ErrorKind::DimensionMismatch, "states differ in dimension");
    rho.push_back(DensityOperator(states[i]).matrix());
    theta += priors[i] * rho.back();
  }
  const double floor = tolerances().eig_floor;
  if (eig_hermitian(theta).values.maxCoeff() <= floor) throw Error(ErrorKind::DegenerateEnsemble, "ensemble average has rank 0");
  const Mat inv_root = spectral_map(theta, [floor](double x) { return x > floor ? 1 / std::sqrt(x) : 0.0; });
  SrmResult r;
  r.support = spectral_map(theta, [floor](double x) { return x > floor ? 1.0 : 0.0; });
  Mat total = Mat::Zero(dim, dim);
  for (size_t i = 0; i < rho.size(); ++i) {
    Mat mu = hermitian_part(inv_root * (priors[i] * rho[i]) * inv_root);
    total += mu;
    r.success += priors[i] * (mu * rho[i]).trace().real();
    r.povm.push_back(std::move(mu));
  }
  r.completeness_defect = (total - r.support).cwiseAbs().maxCoeff();
  if (r.completeness_defect > 1e-9) throw Error(ErrorKind::NumericalFailure, "measurement does not resolve the support");
  return r;
}

Mat random_unitary(int dim, Rng& rng) {
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cplx(gaussian(rng), gaussian(rng));
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat R = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const double a = std::abs(R(j, j));
    if (a > 0) q.col(j) *= R(j, j) / a;
  }
  return q;
}

Vec random_unit(int dim, Rng& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cplx(gaussian(rng), gaussian(rng));
  return v / v.norm();
}

Mat random_density(int dim, Rng& rng) {
  std::vector<double> p(static_cast<size_t>(dim));
  double total = 0.0;
  for (auto& x : p) {
    x = -std::log(1.0 - rng.uniform01());
    total += x;
  }
  const Mat U = random_unitary(dim, rng);
  Mat d = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) d(i, i) = p[static_cast<size_t>(i)] / total;
  return hermitian_part(U * d * U.adjoint());
}

std::vector<ClosenessCase> closeness_suite(int cases, const std::vector<double>& etas, uint64_t seed, int threads) {
  if (etas.empty()) throw Error(ErrorKind::DomainError, "no eta values");
  std::vector<ClosenessCase> out(static_cast<size_t>(std::max(0, cases)));
  parallel_cases(cases, threads, [&](int c) {
    Rng rng = Rng::stream(seed, static_cast<uint64_t>(c));
    ClosenessCase& k = out[static_cast<size_t>(c)];
    k.eta = etas[static_cast<size_t>(c) % etas.size()];
    k.d1 = 1 + static_cast<int>(rng.below(4));
    k.d2 = 1 + static_cast<int>(rng.below(4));
    const auto s = TiltSpace::three_to_one(2, k.d1, k.d2);
    const std::vector<int> dirs = {static_cast<int>(rng.below(static_cast<uint64_t>(k.d1))), static_cast<int>(rng.below(static_cast<uint64_t>(k.d2)))};
    const auto t = tilt_state(s, random_density(2, rng), dirs, k.eta);
    k.distance = closeness(s, t);
    k.bound = 4 * k.eta;
    k.pure_bound = pure_case_bound(k.eta);
    k.pass = k.distance <= k.bound && k.distance <= k.pure_bound;
  });
  return out;
}

std::vector<HnCase> hn_suite(int cases, int max_dim, uint64_t seed, int threads) {
  if (max_dim < 1) throw Error(ErrorKind::DomainError, "max_dim must be positive");
  std::vector<HnCase> out(static_cast<size_t>(std::max(0, cases)));
  parallel_cases(cases, threads, [&](int c) {
    Rng rng = Rng::stream(seed, static_cast<uint64_t>(c));
    const int dim = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_dim)));
    // S with spectrum in [0, 1], sometimes pinned to the endpoints; T of random rank.
    Mat ds = Mat::Zero(dim, dim);
    const bool pin = rng.below(4) == 0;
    for (int i = 0; i < dim; ++i) ds(i, i) = pin ? static_cast<double>(rng.below(2)) : rng.uniform01();
    const Mat U = random_unitary(dim, rng);
    const Mat S = hermitian_part(U * ds * U.adjoint());
    const int rank = static_cast<int>(rng.below(static_cast<uint64_t>(dim) + 1));
    Mat G = Mat::Zero(dim, std::max(rank, 1));
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < rank; ++j) G(i, j) = cplx(gaussian(rng), gaussian(rng));
    const double scale = std::pow(10.0, -2.0 + 3.0 * rng.uniform01());
    const Mat T = hermitian_part(scale * G * G.adjoint());
    const auto r = hayashi_nagaoka_check(S, T);
    out[static_cast<size_t>(c)] = {dim, r.min_eig, r.holds};
  });
  return out;
}

namespace {

SmoothingCase summarize(int aux, double eta, const SmoothingResult& r) {
  SmoothingCase c;
  c.aux = aux;
  c.eta = eta;
  c.residual_norm = r.residual_norm;
  c.bound_3 = r.bound_3;
  c.bound_21 = r.bound_21;
  c.within_3 = r.residual_norm <= r.bound_3;
  c.within_21 = r.residual_norm <= r.bound_21;
  return c;
}

}  // namespace

std::vector<SmoothingCase> smoothing_suite(const std::vector<int>& sizes, double eta, uint64_t seed) {
  std::vector<SmoothingCase> out;
  for (size_t i = 0; i < sizes.size(); ++i) {
    Rng rng = Rng::stream(seed, i);
    const auto s = TiltSpace::three_to_one(2, sizes[i], 2);
    const std::vector<Mat> family = {random_density(2, rng), random_density(2, rng)};
    const double w = rng.uniform01();
    const int kept = static_cast<int>(rng.below(2));
    out.push_back(summarize(sizes[i], eta, smoothing_residual(s, family, {w, 1 - w}, 1, kept, eta)));
  }
  return out;
}

std::vector<SmoothingCase> four_user_smoothing_suite(const std::vector<int>& sizes, double eta, uint64_t seed) {
  std::vector<SmoothingCase> out;
  for (size_t i = 0; i < sizes.size(); ++i) {
    Rng rng = Rng::stream(seed, i);
    const auto s = TiltSpace::four_user(2, std::vector<int>(14, sizes[i]));
    const int kept_block = static_cast<int>(rng.below(14));
    const int kept_dir = static_cast<int>(rng.below(static_cast<uint64_t>(sizes[i])));
    out.push_back(summarize(sizes[i], eta, smoothing_residual(s, {random_density(2, rng)}, {1.0}, kept_block, kept_dir, eta)));
  }
  return out;
}

void to_json(nlohmann::json& j, const ClosenessCase& c) {
  j = {{"eta", c.eta}, {"d1", c.d1}, {"d2", c.d2}, {"distance", c.distance}, {"bound", c.bound}, {"pure_bound", c.pure_bound}, {"pass", c.pass}};
}

void to_json(nlohmann::json& j, const HnCase& c) { j = {{"dim", c.dim}, {"min_eig", c.min_eig}, {"pass", c.pass}}; }

void to_json(nlohmann::json& j, const SmoothingCase& c) {
  j = {{"aux", c.aux},           {"eta", c.eta},           {"residual_norm", c.residual_norm}, {"bound_3", c.bound_3},
       {"bound_21", c.bound_21}, {"within_3", c.within_3}, {"within_21", c.within_21}};
}

}  // namespace cqrl::tiltlab
