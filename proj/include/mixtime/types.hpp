#pragma once

#include <Eigen/Dense>
#include <complex>

namespace mixtime {

using Cplx = std::complex<double>;
using Mat  = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Validation tolerances shared across the library.
inline constexpr double kHermTol  = 1e-12;  // relative to max |entry|
inline constexpr double kPsdTol   = 1e-10;  // absolute floor on eigenvalues
inline constexpr double kTraceTol = 1e-10;

// Kronecker products refuse to allocate results wider than this.
inline constexpr long long kKronMaxDim = 1LL << 16;

// Cap on the doubled dimension N^2 accepted by dense decomposition and scans.
// Overridable through the MIXTIME_MAX_DIM environment variable.
long long max_doubled_dim();

}  // namespace mixtime
