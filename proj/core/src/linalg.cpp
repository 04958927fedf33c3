#include "cqrl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cqrl/errors.hpp"
#include "cqrl/tolerances.hpp"

namespace cqrl {

double hermiticity_defect(const Mat& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix not square");
  double d = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j) d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
  return d;
}

Mat hermitian_part(const Mat& m) { return (m + m.adjoint()) * 0.5; }

EigenSystem eig_hermitian(const Mat& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw Error(ErrorKind::DimensionMismatch, "matrix not square");
  if (hermiticity_defect(m) > tolerances().herm) throw Error(ErrorKind::NotHermitian, "symmetry violated");

  Mat a = hermitian_part(m);
  Mat v = Mat::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = a(i, i).real();

  const double scale = std::max(a.norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-16 * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cplx z = a(p, q);
        const double r = std::abs(z);
        if (r <= 1e-300) continue;
        const cplx e = z / r;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J = diag(1, conj(e)) · [[c, s], [-s, c]] on the (p, q) plane.
        const cplx j_pp = c, j_pq = s, j_qp = -s * std::conj(e), j_qq = c * std::conj(e);
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * j_pp + akq * j_qp;
          a(k, q) = akp * j_pq + akq * j_qq;
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * j_pp + vkq * j_qp;
          v(k, q) = vkp * j_pq + vkq * j_qq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(j_pp) * apk + std::conj(j_qp) * aqk;
          a(q, k) = std::conj(j_pq) * apk + std::conj(j_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() > a(y, y).real(); });
  EigenSystem es;
  es.values.resize(n);
  es.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    es.values(i) = a(order[i], order[i]).real();
    es.vectors.col(i) = v.col(order[i]);
  }
  return es;
}

Mat tensor(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vec tensor(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Mat partial_trace(const Mat& rho, const std::vector<int>& dims, const std::vector<int>& keep) {
  const int nf = static_cast<int>(dims.size());
  long total = 1;
  for (int d : dims) {
    if (d <= 0) throw Error(ErrorKind::DimensionMismatch, "non-positive factor dimension");
    total *= d;
  }
  if (total != rho.rows() || rho.rows() != rho.cols())
    throw Error(ErrorKind::DimensionMismatch, "product of dims does not match operator");
  std::vector<bool> kept(static_cast<size_t>(nf), false);
  for (int k : keep) {
    if (k < 0 || k >= nf) throw Error(ErrorKind::DimensionMismatch, "keep index out of range");
    kept[static_cast<size_t>(k)] = true;
  }
  long dk = 1, dt = 1;
  for (int f = 0; f < nf; ++f) (kept[f] ? dk : dt) *= dims[f];

  // Split a full index into (kept index, traced index), both row-major.
  std::vector<long> kidx(static_cast<size_t>(total)), tidx(static_cast<size_t>(total));
  for (long i = 0; i < total; ++i) {
    long rem = i, kpos = 0, tpos = 0, kstride = 1, tstride = 1;
    for (int f = nf - 1; f >= 0; --f) {
      long digit = rem % dims[f];
      rem /= dims[f];
      if (kept[f]) { kpos += digit * kstride; kstride *= dims[f]; }
      else { tpos += digit * tstride; tstride *= dims[f]; }
    }
    kidx[i] = kpos;
    tidx[i] = tpos;
  }
  Mat out = Mat::Zero(dk, dk);
  for (long i = 0; i < total; ++i)
    for (long j = 0; j < total; ++j)
      if (tidx[i] == tidx[j]) out(kidx[i], kidx[j]) += rho(i, j);
  return out;
}

std::vector<double> singular_values(const Mat& a) {
  Mat g = a.adjoint() * a;
  g = hermitian_part(g);
  auto es = eig_hermitian(g);
  std::vector<double> s(static_cast<size_t>(es.values.size()));
  for (Eigen::Index i = 0; i < es.values.size(); ++i) s[i] = std::sqrt(std::max(0.0, es.values(i)));
  return s;
}

double trace_norm(const Mat& a) {
  if (hermiticity_defect(a) <= 1e-12) {
    auto es = eig_hermitian(a);
    return es.values.cwiseAbs().sum();
  }
  auto s = singular_values(a);
  return std::accumulate(s.begin(), s.end(), 0.0);
}

double operator_norm(const Mat& a) {
  if (hermiticity_defect(a) <= 1e-12) {
    auto es = eig_hermitian(a);
    return es.values.cwiseAbs().maxCoeff();
  }
  auto s = singular_values(a);
  return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
}

Mat spectral_map(const Mat& m, const std::function<double(double)>& f) {
  auto es = eig_hermitian(m);
  RVec fv(es.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(es.values(i));
  return es.vectors * fv.asDiagonal() * es.vectors.adjoint();
}

Mat ketbra(const Vec& v) { return v * v.adjoint(); }

Mat projector_from_kets(const std::vector<Vec>& kets) {
  if (kets.empty()) return Mat();
  Mat p = Mat::Zero(kets[0].size(), kets[0].size());
  for (const auto& k : kets) p += ketbra(k);
  return p;
}

double entropy_bits(const Mat& rho) {
  const auto& tol = tolerances();
  double h = 0.0;
  if (rho.rows() == 1) return 0.0;
  auto es = eig_hermitian(rho);
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    double l = es.values(i);
    if (l < -tol.psd) throw Error(ErrorKind::InvalidState, "negative eigenvalue " + std::to_string(l));
    if (l <= tol.eig_floor) continue;
    h -= l * std::log2(l);
  }
  return h;
}

DensityOperator::DensityOperator(Mat m) {
  const auto& tol = tolerances();
  if (m.rows() != m.cols() || m.rows() == 0) throw Error(ErrorKind::InvalidState, "operator must be square and non-empty");
  if (hermiticity_defect(m) > tol.herm) throw Error(ErrorKind::InvalidState, "operator not Hermitian");
  if (std::abs(m.trace() - cplx(1.0)) > tol.trace) throw Error(ErrorKind::InvalidState, "trace differs from 1");
  auto es = eig_hermitian(m);
  if (es.values(es.values.size() - 1) < -tol.psd) throw Error(ErrorKind::InvalidState, "operator not PSD");
  m_ = hermitian_part(m);
}

DensityOperator DensityOperator::pure(const Vec& v) {
  const double nrm = v.norm();
  if (std::abs(nrm - 1.0) > tolerances().trace) throw Error(ErrorKind::InvalidState, "ket not normalised");
  return DensityOperator(ketbra(v));
}

DensityOperator DensityOperator::diag(const std::vector<double>& d) {
  Mat m = Mat::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
  return DensityOperator(std::move(m));
}

double von_neumann_entropy(const DensityOperator& rho) { return entropy_bits(rho.matrix()); }

}  // namespace cqrl
