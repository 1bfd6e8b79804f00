#include "mixtime/operators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cstdlib>
#include <string>

namespace mixtime {

long long max_doubled_dim() {
  if (const char* env = std::getenv("MIXTIME_MAX_DIM")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 1LL << 14;
}

double max_abs(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  double scale = std::max(1.0, max_abs(a));
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

void require_hermitian(const Mat& a, const std::string& what, double tol) {
  if (!is_hermitian(a, tol)) throw NotHermitian(what + " is not Hermitian");
}

DensityMatrix::DensityMatrix(Mat rho, double psd_tol, double trace_tol) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols()) throw NonSquareDim("density matrix must be square");
  require_hermitian(rho_, "density matrix");
  if (std::abs(rho_.trace() - Cplx(1.0, 0.0)) > trace_tol)
    throw PreconditionError("density matrix trace deviates from 1 beyond tolerance");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigFailure("eigenvalue check of density matrix failed");
  if (es.eigenvalues().minCoeff() < -psd_tol)
    throw PreconditionError("density matrix has an eigenvalue below the PSD tolerance");
}

CVec vectorize(const Mat& a) {
  if (a.rows() != a.cols()) throw NonSquareDim("vectorize expects a square matrix");
  const auto n = a.rows();
  CVec v(n * n);
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index k = 0; k < n; ++k) v(m * n + k) = a(m, k);
  return v;
}

Mat unvectorize(const CVec& v) {
  const auto len = v.size();
  auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
  if (n * n != len) throw NonSquareDim("unvectorize expects a perfect-square length");
  Mat a(n, n);
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index k = 0; k < n; ++k) a(m, k) = v(m * n + k);
  return a;
}

Mat kron(const Mat& a, const Mat& b, long long max_dim) {
  long long rows = static_cast<long long>(a.rows()) * b.rows();
  long long cols = static_cast<long long>(a.cols()) * b.cols();
  if (rows > max_dim || cols > max_dim)
    throw DimOverflow("kron result dimension " + std::to_string(std::max(rows, cols)) +
                      " exceeds cap " + std::to_string(max_dim));
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double trace_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() > 32) {
    Eigen::BDCSVD<Mat> svd(a);
    if (svd.info() != Eigen::Success) throw SvdFailure("BDCSVD did not converge");
    return svd.singularValues().sum();
  }
  Eigen::JacobiSVD<Mat> svd(a);
  if (svd.info() != Eigen::Success) throw SvdFailure("JacobiSVD did not converge");
  return svd.singularValues().sum();
}

double trace_distance_raw(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw DimMismatch("trace distance requires equal dimensions");
  return 0.5 * trace_norm(rho - sigma);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return trace_distance_raw(rho.matrix(), sigma.matrix());
}

}  // namespace mixtime
