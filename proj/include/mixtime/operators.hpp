#pragma once

#include "mixtime/errors.hpp"
#include "mixtime/types.hpp"

namespace mixtime {

// max |A(i,j)|; 0 for empty matrices.
double max_abs(const Mat& a);

// Hermiticity within tol * max(1, max|A|).
bool is_hermitian(const Mat& a, double tol = kHermTol);

// Throws NotHermitian naming `what` when the check fails.
void require_hermitian(const Mat& a, const std::string& what, double tol = kHermTol);

// Validated density matrix: square, Hermitian, unit trace, eigenvalues above -psd_tol.
class DensityMatrix {
 public:
  explicit DensityMatrix(Mat rho, double psd_tol = kPsdTol, double trace_tol = kTraceTol);

  const Mat& matrix() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

 private:
  Mat rho_;
};

// Row-major flattening: entry (m, n) of an N x N matrix lands at index m*N + n.
CVec vectorize(const Mat& a);

// Inverse of vectorize; throws NonSquareDim when the length is not a perfect square.
Mat unvectorize(const CVec& v);

// Kronecker product; refuses results wider than max_dim (DimOverflow).
Mat kron(const Mat& a, const Mat& b, long long max_dim = kKronMaxDim);

// Sum of singular values. Throws SvdFailure when the decomposition does not converge.
double trace_norm(const Mat& a);

// (1/2) || rho - sigma ||_1 on raw Hermitian matrices of equal dimension.
double trace_distance_raw(const Mat& rho, const Mat& sigma);

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace mixtime
