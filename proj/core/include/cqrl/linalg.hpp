#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace cqrl {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

struct EigenSystem {
  RVec values;   // descending
  Mat vectors;   // columns, unitary
};

// Cyclic Jacobi with a fixed (p, q) sweep order, so results are bit-identical
// across runs. Throws NotHermitian when ‖m − m†‖∞ exceeds tol_herm.
EigenSystem eig_hermitian(const Mat& m);

// Kronecker product; the index of `a` varies slowest.
Mat tensor(const Mat& a, const Mat& b);
Vec tensor(const Vec& a, const Vec& b);

// Reduced operator on the factors listed in `keep` (ascending order is used
// regardless of the order given).
Mat partial_trace(const Mat& rho, const std::vector<int>& dims, const std::vector<int>& keep);

std::vector<double> singular_values(const Mat& a);
double trace_norm(const Mat& a);
double operator_norm(const Mat& a);

double hermiticity_defect(const Mat& m);  // max |m_ij − conj(m_ji)|
Mat hermitian_part(const Mat& m);

// f applied to the spectrum of a Hermitian matrix.
Mat spectral_map(const Mat& m, const std::function<double(double)>& f);
Mat projector_from_kets(const std::vector<Vec>& kets);
Mat ketbra(const Vec& v);

// Von Neumann entropy in bits of a PSD operator with unit trace (not
// re-validated here; see DensityOperator for validation).
double entropy_bits(const Mat& rho);

class DensityOperator {
 public:
  // Validates hermiticity, PSD (eigenvalues ≥ −tol_psd) and trace.
  explicit DensityOperator(Mat m);
  static DensityOperator pure(const Vec& v);
  static DensityOperator diag(const std::vector<double>& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }

 private:
  Mat m_;
};

double von_neumann_entropy(const DensityOperator& rho);

}  // namespace cqrl
