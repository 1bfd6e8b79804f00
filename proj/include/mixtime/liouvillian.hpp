#pragma once

#include "mixtime/models.hpp"

namespace mixtime {

// H^D = Hs - i Hd acting on vectorized density matrices: the master equation
// reads d/dt vec(rho) = -i H^D vec(rho).
struct DoubledGenerator {
  SystemModel model;
  Mat Hs;  // H (x) I - I (x) H^T, Hermitian
  Mat Hd;  // dissipative part, in general non-Hermitian
  Mat HD;
  double norm_fro = 0.0;
};

Mat build_coherent_part(const SystemModel& m);
Mat build_dissipative_part(const SystemModel& m);

// Builds H^D and verifies that vec(I) is a left null vector (trace preservation).
DoubledGenerator build_generator(const SystemModel& m);

// Right-hand side of the master equation through the vectorized path.
Mat apply_lindbladian(const DoubledGenerator& gen, const Mat& rho);

// Same quantity assembled directly from H, K, gamma without vectorization.
Mat lindblad_rhs(const SystemModel& m, const Mat& rho);

}  // namespace mixtime
