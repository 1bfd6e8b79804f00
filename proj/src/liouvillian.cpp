#include "mixtime/liouvillian.hpp"

namespace mixtime {

Mat build_coherent_part(const SystemModel& m) {
  const auto n = m.H.rows();
  Mat id = Mat::Identity(n, n);
  return kron(m.H, id) - kron(id, m.H.transpose());
}

Mat build_dissipative_part(const SystemModel& m) {
  const auto n = m.H.rows();
  Mat id = Mat::Identity(n, n);
  Mat hd = Mat::Zero(n * n, n * n);
  for (const auto& d : m.lindblads) {
    double rate = m.gamma * d.strength;
    if (rate == 0.0) continue;
    Mat kk = d.K.adjoint() * d.K;
    hd += rate * (-2.0 * kron(d.K, d.K.conjugate()) + kron(kk, id) + kron(id, kk.conjugate()));
  }
  return hd;
}

DoubledGenerator build_generator(const SystemModel& m) {
  DoubledGenerator gen;
  gen.model = m;
  gen.Hs = build_coherent_part(m);
  gen.Hd = build_dissipative_part(m);
  gen.HD = gen.Hs - Cplx(0.0, 1.0) * gen.Hd;
  gen.norm_fro = gen.HD.norm();

  // Trace preservation: vec(I)^dagger H^D must vanish.
  const auto n = m.H.rows();
  CVec left = vectorize(Mat::Identity(n, n));
  double resid = (left.adjoint() * gen.HD).cwiseAbs().maxCoeff();
  if (resid > 1e-9 * std::max(1.0, max_abs(gen.HD)))
    throw NumericalError("doubled generator violates trace preservation");
  return gen;
}

Mat apply_lindbladian(const DoubledGenerator& gen, const Mat& rho) {
  if (rho.rows() != gen.model.H.rows() || rho.cols() != gen.model.H.cols())
    throw DimMismatch("state dimension does not match the generator");
  return unvectorize(Cplx(0.0, -1.0) * (gen.HD * vectorize(rho)));
}

Mat lindblad_rhs(const SystemModel& m, const Mat& rho) {
  if (rho.rows() != m.H.rows() || rho.cols() != m.H.cols())
    throw DimMismatch("state dimension does not match the model");
  Cplx i(0.0, 1.0);
  Mat out = -i * (m.H * rho - rho * m.H);
  for (const auto& d : m.lindblads) {
    double rate = m.gamma * d.strength;
    if (rate == 0.0) continue;
    Mat kk = d.K.adjoint() * d.K;
    out += rate * (2.0 * d.K * rho * d.K.adjoint() - kk * rho - rho * kk);
  }
  return out;
}

}  // namespace mixtime
