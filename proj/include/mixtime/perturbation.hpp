#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mixtime/errors.hpp"
#include "mixtime/models.hpp"
#include "mixtime/types.hpp"

namespace mixtime {

// Strong-dissipation analysis treats the Hamiltonian superoperator as a
// perturbation on top of the purely dissipative generator. It requires a
// commuting set of Hermitian jump operators; all matrix structure below is
// expressed in their simultaneous eigenbasis.

struct StrongPTReport {
  double gamma_loc = 0.0;       // largest boundary dissipation rate, gamma * strength
  double J = 0.0;               // largest matrix element connecting the steady manifold to decaying modes
  double Jprime = 0.0;          // largest intra-manifold matrix element
  double c_fit = 0.0;           // gap_exact * gamma_loc / J^2 (NaN when J vanishes)
  double gap_predicted = 0.0;   // smallest positive second-order decay rate
  double gap_exact = 0.0;       // gap from full diagonalization of the same model
  long long zeroth_gs_degeneracy = 0;  // steady-manifold dimension of the dissipative generator
  Cplx first_excited_energy{0.0, 0.0}; // -i * smallest nonzero zeroth-order decay rate
  bool no_fast_mixing_mechanism = false;  // every second-order manifold rate vanished
  std::string warning;          // set outside the strong regime (gamma_loc / J < 10)
};

struct BulkZerothReport {
  long long gs_degeneracy = 0;            // zero-rate pair count, d0^L for nondegenerate local ladders
  Cplx first_excited_energy{0.0, 0.0};    // -i * smallest nonzero rate
  long long first_excited_multiplicity = 0;
  double J = 0.0;                          // largest element connecting ground to first-excited states
  double first_order_gap_estimate = 0.0;   // L * J^2 / gamma_loc scale
  bool diverges_with_L = true;             // the estimate grows linearly in L, so extrapolation fails
};

// First-order corrected slowest mode in the strong regime. `sigma1` carries the
// full degenerate-theory result (manifold eigenvector plus first-order
// correction); `appendix_form` restarts from the single dominant diagonal
// representative, whose correction populates one row and one column only.
struct StrongStateCorrection {
  Mat sigma1;             // original basis, Frobenius-normalized
  Mat coeffs_k_basis;     // the same operator written in the K eigenbasis
  Mat appendix_form;      // K-eigenbasis single-representative form, normalized
  int representative_m = 0;
  double trace_norm = 0.0;           // of sigma1
  double trace_norm_appendix = 0.0;  // of appendix_form
  long long nnz_appendix = 0;        // never exceeds 2 * dim
  int skipped_denominators = 0;
};

StrongPTReport strong_gap_estimate(const SystemModel& model);
BulkZerothReport bulk_zeroth_spectrum(const SystemModel& model);
StrongStateCorrection strong_state_correction(const SystemModel& model);

// Simultaneous eigenbasis of the embedded jump operators, with columns ordered
// by the joint eigenvalue tuples. Shared with the sparsity counters.
Mat commuting_k_eigenbasis(const SystemModel& model);

// Weak-dissipation analysis: dissipative first-order corrections on top of the
// Hamiltonian eigenbasis. Indices m, n refer to eigenstates of H sorted by
// ascending energy.
struct WeakPTRecord {
  int m = 0, n = 0;
  double Kbar_m = 0.0, Kbar_n = 0.0;   // strength-weighted diagonal expectations
  double deltaK2_m = 0.0, deltaK2_n = 0.0;
  double kbar_gap_sq = 0.0;            // sum_a s_a |Kbar_a,m - Kbar_a,n|^2
  double first_order_rate = 0.0;       // gamma * (deltaK2_m + deltaK2_n + kbar_gap_sq)
  double fluctuation_exponent_a = 0.0; // filled by fluctuation_exponent fits, NaN otherwise
};

struct WeakGapEstimate {
  double gap = 0.0;  // min first-order rate over nondegenerate m != n pairs, NaN if none
  int m = 0, n = 0;
  int skipped_degenerate_pairs = 0;
};

// Perturbed slowest-mode estimate for the pair (m, n). `sigma` is the
// normalized zeroth-plus-first-order operator in the original basis; the two
// sector matrices split the correction by structure (double-sum terms vs
// single-sum terms confined to row m and column n) and sum to the correction
// part of `coeffs_h_basis`.
struct WeakStateCorrection {
  Mat sigma;           // original basis, Frobenius-normalized
  Mat coeffs_h_basis;  // H-eigenbasis coefficients of sigma
  Mat b1_sector;       // double-sum coefficients, up to N^2 entries
  Mat b2_sector;       // single-sum coefficients, up to 2N entries
  double trace_norm = 0.0;
  long long nnz_b1 = 0, nnz_b2 = 0;
  int skipped_denominators = 0;
  int m = 0, n = 0;
};

WeakPTRecord weak_energy_correction(const SystemModel& model, int m, int n);
WeakGapEstimate weak_gap_estimate(const SystemModel& model);
WeakStateCorrection weak_state_correction(const SystemModel& model, int m, int n);

struct FluctuationFit {
  double a = 0.0;   // exponent in median deltaK^2 ~ L^a
  double r2 = 0.0;
  std::vector<std::pair<int, double>> medians;  // (L, median over m)
};

FluctuationFit weak_fluctuation_exponent(const nlohmann::json& config_template,
                                         const std::vector<int>& sizes);

// Cutoff split of a normalized mode into large entries A (magnitude > c) and
// the small remainder B, with the regime-specific trace-norm bounds.
enum class CutoffRegime { strong, weak };

struct CutoffReport {
  double cutoff_c = 0.0;
  long long N_large = 0;          // entries of sigma with magnitude > c
  double norm_A_bound = 0.0;      // sqrt(N_large)
  double norm_B_bound = 0.0;      // strong: sqrt(2)*N*c; weak: B1 + B2 bounds
  double norm_B1_bound = 0.0;     // weak only: N^{3/2} * c
  double norm_B2_bound = 0.0;     // weak only: N * c
  double trace_norm_exact = 0.0;  // of sigma itself
  double trace_norm_A_exact = 0.0;
  double trace_norm_B_exact = 0.0;
  long long nnz_B = 0;
  long long nnz_sigma = 0;
  // Strong regime only: the sqrt(2)*N*c bound presumes at most 2N nonzero
  // entries; false means the reported bound formula is not applicable.
  bool structure_ok = true;
  CutoffRegime regime = CutoffRegime::strong;
};

// Plain split by magnitude. In the weak regime without sector information the
// whole small part is bounded with the (larger) double-sum constant.
CutoffReport cutoff_bound(const Mat& sigma, double cutoff_c, CutoffRegime regime);
// Sector-aware weak bound: small entries are attributed to the stored sectors.
CutoffReport cutoff_bound(const WeakStateCorrection& correction, double cutoff_c);

}  // namespace mixtime
