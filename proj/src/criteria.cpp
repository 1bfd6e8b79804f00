#include "mixtime/criteria.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "fit_detail.hpp"
#include "mixtime/errors.hpp"
#include "mixtime/liouvillian.hpp"
#include "mixtime/operators.hpp"

namespace mixtime {

namespace {

constexpr double kOrthoTol = 1e-8;

// Stable refinement of a degenerate eigenvector cluster: diagonalize a fixed
// probe inside the cluster so the returned columns do not depend on solver
// internals.
void refine_cluster(Mat& V, long long lo, long long hi) {
  const long long w = hi - lo;
  if (w <= 1) return;
  const long long N = V.rows();
  Mat probe = Mat::Zero(N, N);
  for (long long i = 0; i < N; ++i) probe(i, i) = static_cast<double>(i);
  Mat block = V.middleCols(lo, w);
  Mat sub = block.adjoint() * probe * block;
  sub = Cplx(0.5, 0.0) * (sub + sub.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Mat> es(sub);
  if (es.info() != Eigen::Success) throw EigFailure("cluster refinement failed");
  V.middleCols(lo, w) = block * es.eigenvectors();
}

double dissipation_scale(const SystemModel& model) {
  double s = 0.0;
  for (const auto& d : model.lindblads) {
    const double k = max_abs(d.K);
    s = std::max(s, model.gamma * d.strength * k * k);
  }
  return s;
}

struct FitInput {
  std::vector<double> x, y;
};

GrowthFit run_fit(const FitInput& in) {
  GrowthFit out;
  if (in.x.size() < 2) return out;
  const auto f = detail::fit_line(in.x, in.y);
  out.param = f.slope;
  out.r2 = f.r2;
  return out;
}

}  // namespace

const char* sparsity_basis_name(SparsityBasis b) {
  return b == SparsityBasis::h_eigenbasis ? "h_eigenbasis" : "k_eigenbasis";
}

const char* scaling_quantity_name(ScalingQuantity q) {
  return q == ScalingQuantity::inverse_gap ? "inverse_gap" : "trace_norm";
}

const char* growth_class_name(GrowthClass g) {
  switch (g) {
    case GrowthClass::power_law: return "power_law";
    case GrowthClass::polylog: return "polylog";
    default: return "exponential";
  }
}

const char* condition_status_name(ConditionStatus s) {
  switch (s) {
    case ConditionStatus::pass: return "pass";
    case ConditionStatus::fail: return "fail";
    default: return "indeterminate";
  }
}

const char* const kFiniteSizeCaveat =
    "finite-size inference only: fits and thresholds describe the scanned sizes, not the "
    "asymptotic scaling";

Mat h_eigenbasis(const SystemModel& model) {
  const Mat& H = model.H;
  require_hermitian(H, "H");
  const long long N = H.rows();
  const double scale = max_abs(H);

  // Already-diagonal H: keep the computational basis exactly, ordered by
  // energy. This keeps sparsity counts of local operators free of rotation
  // noise.
  double offdiag = 0.0;
  for (long long i = 0; i < N; ++i)
    for (long long j = 0; j < N; ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(H(i, j)));
  if (offdiag <= 1e-12 * std::max(1.0, scale)) {
    std::vector<long long> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0LL);
    std::stable_sort(order.begin(), order.end(), [&](long long a, long long b) {
      return H(a, a).real() < H(b, b).real();
    });
    Mat V = Mat::Zero(N, N);
    for (long long s = 0; s < N; ++s) V(order[static_cast<std::size_t>(s)], s) = 1.0;
    return V;
  }

  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.info() != Eigen::Success) throw EigFailure("H eigendecomposition failed");
  Mat V = es.eigenvectors();
  const RVec ev = es.eigenvalues();
  const double tol = 1e-8 * (1.0 + std::abs(ev(N - 1) - ev(0)));
  long long lo = 0;
  for (long long i = 1; i <= N; ++i) {
    if (i == N || ev(i) - ev(i - 1) > tol) {
      refine_cluster(V, lo, i);
      lo = i;
    }
  }
  return V;
}

Mat k_eigenbasis(const SystemModel& model) { return commuting_k_eigenbasis(model); }

SparsityProfile sparsity_count(const Mat& M, const Mat& basis_states, double alpha, int L,
                               SparsityBasis label) {
  if (M.rows() != M.cols()) throw NonSquareDim("sparsity operator must be square");
  if (basis_states.rows() != M.rows() || basis_states.cols() != M.rows())
    throw DimMismatch("basis does not match operator dimension");
  if (alpha < 1.0) throw PreconditionError("alpha must be >= 1");
  if (L < 1) throw PreconditionError("L must be >= 1");

  const long long N = M.rows();
  const Mat gram = basis_states.adjoint() * basis_states;
  double dev = 0.0;
  for (long long i = 0; i < N; ++i)
    for (long long j = 0; j < N; ++j) {
      const Cplx want = (i == j) ? Cplx(1.0, 0.0) : Cplx(0.0, 0.0);
      dev = std::max(dev, std::abs(gram(i, j) - want));
    }
  if (dev > kOrthoTol) throw NonOrthonormalBasis("basis columns are not orthonormal");

  const Mat Mt = basis_states.adjoint() * M * basis_states;
  const double threshold = std::exp(-alpha * static_cast<double>(L));

  SparsityProfile out;
  out.alpha = alpha;
  out.basis = label;
  out.L = L;
  out.counts.assign(static_cast<std::size_t>(N), 0);
  // counts[s] = how many basis states the operator connects |s> to, i.e. the
  // support of column s of the rotated operator.
  for (long long s = 0; s < N; ++s) {
    long long c = 0;
    for (long long p = 0; p < N; ++p)
      if (std::abs(Mt(p, s)) >= threshold) ++c;
    out.counts[static_cast<std::size_t>(s)] = c;
    out.max_count = std::max(out.max_count, c);
  }
  return out;
}

SparsityProfile weak_sparsity_profile(const SystemModel& model, double alpha) {
  const Mat V = h_eigenbasis(model);
  SparsityProfile out;
  bool first = true;
  for (const auto& d : model.lindblads) {
    SparsityProfile p = sparsity_count(d.K, V, alpha, model.L, SparsityBasis::h_eigenbasis);
    if (first) {
      out = p;
      first = false;
    } else {
      for (std::size_t s = 0; s < out.counts.size(); ++s)
        out.counts[s] = std::max(out.counts[s], p.counts[s]);
      out.max_count = std::max(out.max_count, p.max_count);
    }
  }
  if (first) throw PreconditionError("model has no dissipators");
  return out;
}

SparsityProfile strong_sparsity_profile(const SystemModel& model, double alpha) {
  const Mat V = k_eigenbasis(model);
  return sparsity_count(model.H, V, alpha, model.L, SparsityBasis::k_eigenbasis);
}

std::vector<ScalingRecord> scan_sizes(const nlohmann::json& tpl, const std::vector<int>& sizes,
                                      const ScanOptions& opts) {
  if (sizes.empty()) throw PreconditionError("size list is empty");
  if (opts.alpha < 1.0) throw PreconditionError("alpha must be >= 1");
  std::vector<int> ls = sizes;
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());

  std::vector<ScalingRecord> out;
  out.reserve(ls.size());
  for (int L : ls) {
    ScalingRecord rec;
    rec.L = L;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const nlohmann::json inst = instantiate_template(tpl, L);
      const ModelConfig cfg = parse_config(inst);
      long long doubled = 1;
      const long long cap = max_doubled_dim();
      for (int i = 0; i < 2 * cfg.L; ++i) {
        doubled *= cfg.d0;
        if (doubled > cap)
          throw DimOverflow("doubled dimension exceeds cap at L = " + std::to_string(L));
      }
      const SystemModel model = build_model(cfg);
      const DoubledGenerator gen = build_generator(model);
      const LindbladSpectrum spec = decompose(gen);
      if (!spec.has_decaying_mode() || spec.gap() <= 0.0)
        throw NoDecayingMode("no decaying mode at L = " + std::to_string(L));
      rec.inverse_gap = 1.0 / spec.gap();
      rec.trace_norm_sigma1 = trace_norm(hermitize_slowest(spec));
      const SparsityProfile prof = (opts.basis == SparsityBasis::k_eigenbasis)
                                       ? strong_sparsity_profile(model, opts.alpha)
                                       : weak_sparsity_profile(model, opts.alpha);
      rec.max_sparsity_count = prof.max_count;
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
      rec.inverse_gap = std::numeric_limits<double>::quiet_NaN();
      rec.trace_norm_sigma1 = std::numeric_limits<double>::quiet_NaN();
      rec.max_sparsity_count = -1;
    }
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(rec));
  }
  return out;
}

ScalingVerdict classify_scaling(const std::vector<ScalingRecord>& records, ScalingQuantity q) {
  std::vector<double> lvals, yvals;
  for (const auto& r : records) {
    if (!r.ok) continue;
    const double y = (q == ScalingQuantity::inverse_gap) ? r.inverse_gap : r.trace_norm_sigma1;
    if (!std::isfinite(y) || y <= 0.0) continue;
    lvals.push_back(static_cast<double>(r.L));
    yvals.push_back(std::log(y));
  }
  std::vector<double> distinct = lvals;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3)
    throw InsufficientPoints("need at least 3 distinct sizes, have " +
                             std::to_string(distinct.size()));

  FitInput pw, pl, ex;
  for (std::size_t i = 0; i < lvals.size(); ++i) {
    pw.x.push_back(std::log(lvals[i]));
    pw.y.push_back(yvals[i]);
    ex.x.push_back(lvals[i]);
    ex.y.push_back(yvals[i]);
    if (lvals[i] >= 2.0) {
      pl.x.push_back(std::log(std::log(lvals[i])));
      pl.y.push_back(yvals[i]);
    }
  }

  ScalingVerdict v;
  v.quantity = q;
  v.power_law = run_fit(pw);
  v.exponential = run_fit(ex);
  v.polylog = (pl.x.size() >= 3) ? run_fit(pl) : GrowthFit{};

  // Highest R^2 wins; within 1e-6 the weaker growth class does (polylog <
  // power law < exponential), so flat data classifies as weak growth.
  struct Cand {
    GrowthClass cls;
    double r2;
    int weakness;
  };
  const Cand cands[] = {{GrowthClass::polylog, v.polylog.r2, 0},
                        {GrowthClass::power_law, v.power_law.r2, 1},
                        {GrowthClass::exponential, v.exponential.r2, 2}};
  double best_r2 = -1.0;
  for (const auto& c : cands) best_r2 = std::max(best_r2, c.r2);
  const Cand* pick = nullptr;
  for (const auto& c : cands) {
    if (c.r2 < best_r2 - 1e-6) continue;
    if (pick == nullptr || c.weakness < pick->weakness) pick = &c;
  }
  v.best = pick->cls;

  switch (v.best) {
    case GrowthClass::polylog:
      v.assessment = "rapid-compatible";
      break;
    case GrowthClass::power_law:
      v.assessment = std::abs(v.power_law.param) <= 0.05 ? "rapid-compatible" : "fast-compatible";
      break;
    default:
      v.assessment = "exponential growth";
      break;
  }
  v.caveat = kFiniteSizeCaveat;
  return v;
}

RapidConditionsReport rapid_conditions_check(const SystemModel& model,
                                             const LindbladSpectrum& spec,
                                             const std::vector<double>& alpha_grid) {
  if (alpha_grid.empty()) throw PreconditionError("alpha grid is empty");
  for (double a : alpha_grid)
    if (a < 1.0) throw PreconditionError("alpha must be >= 1");
  if (model.lindblads.empty()) throw PreconditionError("model has no dissipators");

  RapidConditionsReport rep;
  const long long N = model.dim();
  rep.sqrt_dim = std::sqrt(static_cast<double>(N));
  rep.caveat = kFiniteSizeCaveat;

  if (spec.has_decaying_mode() && spec.gap() > 0.0) {
    rep.inverse_gap = 1.0 / spec.gap();
    rep.gap_status = ConditionStatus::pass;
  } else {
    rep.inverse_gap = std::numeric_limits<double>::infinity();
    rep.gap_status = ConditionStatus::indeterminate;
  }

  if (spec.has_decaying_mode()) {
    rep.trace_norm_sigma1 = trace_norm(hermitize_slowest(spec));
    const double poly_budget = std::max(2.0, 2.0 * static_cast<double>(model.L));
    if (rep.trace_norm_sigma1 <= poly_budget)
      rep.trace_norm_status = ConditionStatus::pass;
    else if (N >= 16 && rep.trace_norm_sigma1 >= 0.95 * rep.sqrt_dim)
      rep.trace_norm_status = ConditionStatus::fail;
    else
      rep.trace_norm_status = ConditionStatus::indeterminate;
  } else {
    rep.trace_norm_sigma1 = std::numeric_limits<double>::quiet_NaN();
    rep.trace_norm_status = ConditionStatus::indeterminate;
  }

  rep.regime =
      dissipation_scale(model) >= max_abs(model.H) ? CutoffRegime::strong : CutoffRegime::weak;
  rep.weak_first_order_gap = std::numeric_limits<double>::quiet_NaN();
  if (rep.regime == CutoffRegime::weak) rep.weak_first_order_gap = weak_gap_estimate(model).gap;

  for (double a : alpha_grid) {
    rep.profiles.push_back(rep.regime == CutoffRegime::weak ? weak_sparsity_profile(model, a)
                                                            : strong_sparsity_profile(model, a));
  }

  const long long budget = std::max(4LL, 2LL * static_cast<long long>(model.L));
  bool any_small = false, all_dense = true;
  for (const auto& p : rep.profiles) {
    if (p.max_count <= budget) any_small = true;
    if (p.max_count < N / 2) all_dense = false;
  }
  if (any_small)
    rep.sparsity_status = ConditionStatus::pass;
  else if (all_dense)
    rep.sparsity_status = ConditionStatus::fail;
  else
    rep.sparsity_status = ConditionStatus::indeterminate;

  return rep;
}

}  // namespace mixtime
