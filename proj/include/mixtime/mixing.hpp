#pragma once

#include "mixtime/spectral.hpp"

#include <cstdint>
#include <string>

namespace mixtime {

enum class ProbeKind { paper, basis_pure, random_pure };

// Initial state plus its slow-mode content. For the paper probe c1 is the
// bisected PSD coefficient (in (0, 1]); for pure probes it is the l1 weight of
// all decaying modes in the eigenbasis expansion, which is what the upper
// bounds need to stay valid for arbitrary states.
struct ProbeState {
  DensityMatrix rho0;
  double c1 = 0.0;
  ProbeKind kind = ProbeKind::basis_pure;
  std::string label;
};

struct MixingParams {
  double eta = 0.01;
  double t_max_over_gap = 20.0;
  int grid_points = 400;
  double bisect_rel_tol = 1e-4;
};

// Propagates rho0 to time t through the spectral expansion; defective spectra
// fall back to a dense matrix exponential. Output is hermitized and
// trace-renormalized.
DensityMatrix evolve(const LindbladSpectrum& spec, const DensityMatrix& rho0, double t);

// l1 weight of the decaying modes in the eigenbasis expansion of rho. This is
// the coefficient the upper bounds certify, so bound comparisons should pass
// it rather than a ProbeState's c1 (the two differ for the paper probe when
// the slowest cluster is a complex pair).
double decaying_weight(const LindbladSpectrum& spec, const Mat& rho);

// sigma0 + c1 * hermitize_slowest with the largest PSD-feasible c1 in (0, 1],
// located by bisection (resolution 1e-6, floor 1e-4).
ProbeState paper_probe(const LindbladSpectrum& spec);

// Paper probe (when feasible) + all computational basis states + Haar-random
// pure states.
std::vector<ProbeState> default_probe_family(const LindbladSpectrum& spec, int n_random = 20,
                                             std::uint64_t seed = 20240817u);

// First time from which the trace distance to the asymptotic state stays at or
// below eta, on a geometric grid refined by bisection.
double measure_probe_mixing_time(const LindbladSpectrum& spec, const ProbeState& probe,
                                 const MixingParams& params = {});

// Worst case over a probe family.
double measure_mixing_time(const LindbladSpectrum& spec, const std::vector<ProbeState>& probes,
                           const MixingParams& params = {});

// gap^-1 [ log(trace_norm_sigma1) - log(2 eta / |c1|) ], clamped at zero.
double predict_mixing_time(double gap, double trace_norm_sigma1, double c1, double eta);

struct MixingBound {
  double by_dim = 0.0;      // (1/2) gap^-1 [ log N - 2 log(2 eta / |c1|) ]
  double by_lattice = 0.0;  // same with log N replaced by L log d0
  bool has_lattice = false;
};

MixingBound mixing_upper_bound(int N, double c1, double eta, double gap);
MixingBound mixing_upper_bound(int N, double c1, double eta, double gap, int L, int d0);

struct MixingReport {
  double eta = 0.0;
  double gap = 0.0;
  int dim = 0;
  int steady_dim = 0;
  double trace_norm_sigma1 = 0.0;
  bool paper_probe_feasible = false;
  double c1_used = 0.0;
  double tau_measured = 0.0;
  double tau_predicted = 0.0;
  double tau_bound_dim = 0.0;
  double tau_bound_lattice = 0.0;
  int n_probes = 0;
  std::uint64_t seed = 0;
  std::string notes;
};

// Full pipeline over the default probe family. Bounds are the worst case of
// the per-probe bounds, so tau_measured <= tau_bound holds for the family.
MixingReport mixing_report(const SystemModel& model, const LindbladSpectrum& spec,
                           const MixingParams& params = {}, int n_random = 20,
                           std::uint64_t seed = 20240817u);

}  // namespace mixtime
