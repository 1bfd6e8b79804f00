#include "mixtime/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <numeric>

namespace mixtime {

const SpectrumRecord& LindbladSpectrum::slowest() const {
  if (slowest_ < 0) throw NoDecayingMode("spectrum has no decaying mode");
  return recs_[static_cast<std::size_t>(slowest_)];
}

const DensityMatrix& LindbladSpectrum::sigma0() const {
  if (!sigma0_)
    throw DegenerateSteadyManifold("steady manifold dimension is " + std::to_string(steady_dim_) +
                                   "; no unique steady state");
  return *sigma0_;
}

CVec LindbladSpectrum::expand(const Mat& rho) const {
  if (rho.rows() != n_ || rho.cols() != n_)
    throw DimMismatch("state dimension does not match the spectrum");
  return lu_.solve(vectorize(rho));
}

Mat LindbladSpectrum::steady_projection(const Mat& rho) const {
  CVec c = expand(rho);
  CVec acc = CVec::Zero(static_cast<Eigen::Index>(n_) * n_);
  for (const auto& r : recs_)
    if (r.is_steady) acc += c(r.index) * V_.col(r.index);
  Mat m = unvectorize(acc);
  m = 0.5 * (m + m.adjoint()).eval();
  Cplx tr = m.trace();
  if (std::abs(tr) < 1e-6)
    throw NumericalError("asymptotic state of this initial condition has vanishing trace");
  return m / tr;
}

const Mat& LindbladSpectrum::generator_matrix() const {
  if (HD_.size() == 0)
    throw PreconditionError("generator matrix retained only for defective spectra");
  return HD_;
}

CVec LindbladSpectrum::eigenvalues() const {
  CVec out(recs_.size());
  for (std::size_t j = 0; j < recs_.size(); ++j) out(static_cast<Eigen::Index>(j)) = recs_[j].epsilon;
  return out;
}

LindbladSpectrum decompose(const DoubledGenerator& gen) {
  const auto n = gen.model.H.rows();
  const auto nn = n * n;
  if (nn > max_doubled_dim())
    throw DimOverflow("doubled dimension " + std::to_string(nn) + " exceeds cap " +
                      std::to_string(max_doubled_dim()) + " (see MIXTIME_MAX_DIM)");

  Eigen::ComplexEigenSolver<Mat> ces(gen.HD, true);
  if (ces.info() != Eigen::Success) throw EigFailure("dense eigendecomposition failed");

  LindbladSpectrum s;
  s.n_ = static_cast<int>(n);
  s.norm_ = gen.norm_fro;
  s.ztol_ = 1e-9 * std::max(1.0, s.norm_);

  // Residuals of the raw eigenpairs, scaled by ||H^D||.
  Mat resid = gen.HD * ces.eigenvectors() -
              ces.eigenvectors() * ces.eigenvalues().asDiagonal();
  double resid_tol = 1e-8 * std::max(1.0, s.norm_);
  for (Eigen::Index j = 0; j < nn; ++j)
    if (resid.col(j).norm() > resid_tol)
      throw EigFailure("eigenpair residual exceeds tolerance at mode " + std::to_string(j));

  std::vector<int> order(static_cast<std::size_t>(nn));
  std::iota(order.begin(), order.end(), 0);
  const CVec& ev = ces.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ba = -ev(a).imag(), bb = -ev(b).imag();
    if (ba != bb) return ba < bb;
    if (ev(a).real() != ev(b).real()) return ev(a).real() < ev(b).real();
    return a < b;
  });

  s.V_.resize(nn, nn);
  for (Eigen::Index j = 0; j < nn; ++j) {
    CVec col = ces.eigenvectors().col(order[static_cast<std::size_t>(j)]);
    s.V_.col(j) = col / col.norm();
  }
  s.lu_ = Eigen::PartialPivLU<Mat>(s.V_);
  double rc = s.lu_.rcond();
  s.cond_ = (rc > 0.0) ? 1.0 / rc : std::numeric_limits<double>::infinity();
  s.defective_ = !(s.cond_ < 1e12);
  if (s.defective_) s.HD_ = gen.HD;

  s.recs_.reserve(static_cast<std::size_t>(nn));
  for (Eigen::Index j = 0; j < nn; ++j) {
    SpectrumRecord r;
    r.index = static_cast<int>(j);
    r.epsilon = ev(order[static_cast<std::size_t>(j)]);
    r.alpha = r.epsilon.real();
    r.beta = -r.epsilon.imag();
    if (r.beta < -10.0 * s.ztol_)
      throw NumericalError("negative decay rate beyond tolerance: complete positivity violated");
    r.mode = unvectorize(s.V_.col(j));
    r.mode_trace_norm = trace_norm(r.mode);
    r.is_steady = (r.beta <= s.ztol_) && (std::abs(r.alpha) <= s.ztol_);
    s.recs_.push_back(std::move(r));
  }

  std::vector<Eigen::Index> steady_cols;
  for (const auto& r : s.recs_) {
    if (r.is_steady) steady_cols.push_back(r.index);
    else if (s.slowest_ < 0) s.slowest_ = r.index;
  }
  s.steady_dim_ = static_cast<int>(steady_cols.size());
  if (s.slowest_ >= 0) {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& r : s.recs_)
      if (!r.is_steady) g = std::min(g, r.beta);
    s.gap_ = g;
  }

  if (!steady_cols.empty()) {
    Mat cols(nn, static_cast<Eigen::Index>(steady_cols.size()));
    for (std::size_t k = 0; k < steady_cols.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = s.V_.col(steady_cols[k]);
    Eigen::HouseholderQR<Mat> qr(cols);
    Mat q = qr.householderQ() * Mat::Identity(nn, static_cast<Eigen::Index>(steady_cols.size()));
    for (Eigen::Index k = 0; k < q.cols(); ++k) s.steady_basis_.push_back(unvectorize(q.col(k)));
  }

  if (s.steady_dim_ == 1) {
    Mat m = s.recs_[static_cast<std::size_t>(steady_cols[0])].mode;
    // Divide by the raw trace before hermitizing: the eigenvector carries an
    // arbitrary global phase, and hermitizing first can cancel the trace.
    Cplx tr = m.trace();
    if (std::abs(tr) < 1e-6) throw NumericalError("steady mode has vanishing trace");
    m /= tr;
    m = 0.5 * (m + m.adjoint()).eval();
    // Tolerance loosened to absorb eigensolver noise on ill-conditioned bases.
    s.sigma0_.emplace(std::move(m), 1e-8, 1e-8);
  }
  return s;
}

Mat hermitize_slowest(const LindbladSpectrum& spec) {
  const auto& s1 = spec.slowest();
  const Mat& sig = s1.mode;

  if (std::abs(s1.alpha) <= spec.zero_tol()) {
    // Try the pure phase fix first: works when the mode is Hermitian up to a phase.
    Eigen::Index imax = -1;
    double dmax = 0.0;
    for (Eigen::Index i = 0; i < sig.rows(); ++i)
      if (std::abs(sig(i, i)) > dmax) { dmax = std::abs(sig(i, i)); imax = i; }
    if (imax >= 0 && dmax > 1e-8) {
      Cplx phase = sig(imax, imax) / dmax;
      Mat cand = sig / phase;
      if ((cand - cand.adjoint()).norm() <= 1e-8 * cand.norm()) return cand / cand.norm();
    }
  }
  Mat h = sig + sig.adjoint();
  if (h.norm() <= 1e-8) h = Cplx(0.0, -1.0) * (sig - sig.adjoint());
  if (h.norm() <= 1e-12) throw NumericalError("slowest mode has no Hermitian content");
  return h / h.norm();
}

std::vector<double> mode_trace_norms(const LindbladSpectrum& spec) {
  std::vector<double> out;
  out.reserve(spec.records().size());
  for (const auto& r : spec.records()) out.push_back(r.mode_trace_norm);
  return out;
}

}  // namespace mixtime
