#pragma once

#include "mixtime/liouvillian.hpp"

#include <Eigen/LU>

#include <optional>
#include <vector>

namespace mixtime {

// One eigenpair of H^D. epsilon = alpha - i*beta with beta >= 0 the decay rate;
// mode is Frobenius-normalized, Tr(mode^dagger mode) = 1.
struct SpectrumRecord {
  int index = 0;
  Cplx epsilon;
  double alpha = 0.0;
  double beta = 0.0;
  Mat mode;
  double mode_trace_norm = 0.0;
  bool is_steady = false;
};

class LindbladSpectrum {
 public:
  int dim() const { return n_; }
  int doubled_dim() const { return n_ * n_; }
  double zero_tol() const { return ztol_; }
  double generator_norm() const { return norm_; }

  const std::vector<SpectrumRecord>& records() const { return recs_; }
  int steady_dim() const { return steady_dim_; }

  // Smallest decay rate among non-steady modes.
  double gap() const { return gap_; }
  bool has_decaying_mode() const { return slowest_ >= 0; }
  const SpectrumRecord& slowest() const;

  bool has_unique_steady() const { return steady_dim_ == 1; }
  const DensityMatrix& sigma0() const;  // unique steady state; throws otherwise
  const std::vector<Mat>& steady_basis() const { return steady_basis_; }

  bool defective_flagged() const { return defective_; }
  double condition_estimate() const { return cond_; }

  // Generator matrix, retained only when the eigenbasis is flagged defective
  // so that evolution can fall back to a matrix exponential.
  const Mat& generator_matrix() const;

  // Expansion coefficients of vec(rho) in the sorted eigenvector basis.
  CVec expand(const Mat& rho) const;

  // Component of rho inside the steady manifold, hermitized and trace-renormalized.
  Mat steady_projection(const Mat& rho) const;

  const Mat& eigenvectors() const { return V_; }
  CVec eigenvalues() const;

  friend LindbladSpectrum decompose(const DoubledGenerator& gen);

 private:
  int n_ = 0;
  double ztol_ = 0.0;
  double norm_ = 0.0;
  std::vector<SpectrumRecord> recs_;
  Mat V_;
  Eigen::PartialPivLU<Mat> lu_;
  int steady_dim_ = 0;
  int slowest_ = -1;
  double gap_ = 0.0;
  bool defective_ = false;
  double cond_ = 0.0;
  std::optional<DensityMatrix> sigma0_;
  std::vector<Mat> steady_basis_;
  Mat HD_;
};

LindbladSpectrum decompose(const DoubledGenerator& gen);

// Hermitian representative of the slowest decaying mode, Frobenius-normalized.
// Real-gap modes are returned up to a fixed global phase; complex pairs are
// combined with the conjugate partner.
Mat hermitize_slowest(const LindbladSpectrum& spec);

std::vector<double> mode_trace_norms(const LindbladSpectrum& spec);

}  // namespace mixtime
