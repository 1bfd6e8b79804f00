#pragma once

#include <string>
#include <vector>

#include "mixtime/models.hpp"
#include "mixtime/perturbation.hpp"
#include "mixtime/spectral.hpp"

namespace mixtime {

// Per-state counters behind the rapid-mixing sufficient conditions: in a fixed
// orthonormal basis, how many matrix elements of M in each row clear the
// size-dependent threshold e^{-alpha*L}.
enum class SparsityBasis { h_eigenbasis, k_eigenbasis };
const char* sparsity_basis_name(SparsityBasis b);

struct SparsityProfile {
  double alpha = 1.0;
  SparsityBasis basis = SparsityBasis::h_eigenbasis;
  std::vector<long long> counts;  // one entry per basis state
  long long max_count = 0;
  int L = 0;
};

// Deterministic orthonormal eigenbasis of H. A Hamiltonian that is already
// diagonal keeps the computational basis exactly, sorted by energy; otherwise
// degenerate clusters are resolved against a fixed probe so repeated runs and
// platforms agree.
Mat h_eigenbasis(const SystemModel& model);

// Joint eigenbasis of the embedded jump operators (commuting Hermitian set).
Mat k_eigenbasis(const SystemModel& model);

SparsityProfile sparsity_count(const Mat& M, const Mat& basis_states, double alpha, int L,
                               SparsityBasis label);

// Weak-regime condition: jump operators counted in the H eigenbasis, row-wise
// worst case over dissipators. Strong-regime condition: H counted in the K
// eigenbasis.
SparsityProfile weak_sparsity_profile(const SystemModel& model, double alpha);
SparsityProfile strong_sparsity_profile(const SystemModel& model, double alpha);

struct ScalingRecord {
  int L = 0;
  double inverse_gap = 0.0;
  double trace_norm_sigma1 = 0.0;
  long long max_sparsity_count = 0;
  double wall_time_s = 0.0;
  bool ok = false;
  std::string error;  // set when this size failed; values above are then unset
};

struct ScanOptions {
  double alpha = 2.0;
  SparsityBasis basis = SparsityBasis::k_eigenbasis;
};

// Builds the template at every size and records inverse gap, slowest-mode
// trace norm and the sparsity counter. Failures mark the row and the scan
// continues; rows come back sorted by L.
std::vector<ScalingRecord> scan_sizes(const nlohmann::json& tpl, const std::vector<int>& sizes,
                                      const ScanOptions& opts = {});

enum class ScalingQuantity { inverse_gap, trace_norm };
enum class GrowthClass { power_law, polylog, exponential };
const char* scaling_quantity_name(ScalingQuantity q);
const char* growth_class_name(GrowthClass g);

struct GrowthFit {
  double param = 0.0;  // exponent, polylog degree, or exponential rate
  double r2 = 0.0;
};

// Mandatory caveat attached to every verdict: nothing here is an asymptotic
// statement.
extern const char* const kFiniteSizeCaveat;

struct ScalingVerdict {
  ScalingQuantity quantity = ScalingQuantity::inverse_gap;
  GrowthFit power_law;
  GrowthFit polylog;
  GrowthFit exponential;
  GrowthClass best = GrowthClass::power_law;
  std::string assessment;  // rapid-compatible / fast-compatible / exponential growth
  std::string caveat;
};

ScalingVerdict classify_scaling(const std::vector<ScalingRecord>& records, ScalingQuantity q);

enum class ConditionStatus { pass, fail, indeterminate };
const char* condition_status_name(ConditionStatus s);

struct RapidConditionsReport {
  double inverse_gap = 0.0;
  ConditionStatus gap_status = ConditionStatus::indeterminate;
  double trace_norm_sigma1 = 0.0;
  double sqrt_dim = 0.0;
  ConditionStatus trace_norm_status = ConditionStatus::indeterminate;
  CutoffRegime regime = CutoffRegime::weak;
  double weak_first_order_gap = 0.0;  // NaN when the strong branch was taken
  std::vector<SparsityProfile> profiles;  // one per grid point
  ConditionStatus sparsity_status = ConditionStatus::indeterminate;
  std::string caveat;
};

RapidConditionsReport rapid_conditions_check(const SystemModel& model,
                                             const LindbladSpectrum& spec,
                                             const std::vector<double>& alpha_grid = {1.0, 2.0,
                                                                                      4.0});

}  // namespace mixtime
