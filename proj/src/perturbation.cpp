#include "mixtime/perturbation.hpp"

#include "mixtime/liouvillian.hpp"
#include "mixtime/operators.hpp"
#include "mixtime/spectral.hpp"

#include "fit_detail.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace mixtime {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Joint eigenstructure of the embedded jump operators. `rates` holds the
// decay rate of every doubled basis pair (p, q) under the dissipative
// generator alone; pairs with vanishing rate form the steady manifold.
struct KStructure {
  Mat U;
  std::vector<RVec> kvals;  // per dissipator, diagonal in the joint basis
  Eigen::MatrixXd rates;
  std::vector<std::pair<int, int>> manifold;
  std::vector<std::pair<int, int>> excited;
  std::vector<char> steady_mask;  // index p*N + q
  double rate_scale = 0.0;
  double gamma_loc = 0.0;
};

Mat simultaneous_eigenbasis(const std::vector<const Mat*>& ops) {
  const int n = static_cast<int>(ops.front()->rows());
  Mat U = Mat::Identity(n, n);
  std::vector<std::pair<int, int>> clusters{{0, n}};
  for (const Mat* K : ops) {
    std::vector<std::pair<int, int>> next;
    for (auto [b, e] : clusters) {
      const int w = e - b;
      if (w == 1) {
        next.emplace_back(b, e);
        continue;
      }
      Mat sub = U.middleCols(b, w).adjoint() * (*K) * U.middleCols(b, w);
      sub = 0.5 * (sub + sub.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Mat> es(sub);
      if (es.info() != Eigen::Success) throw EigFailure("joint eigenbasis refinement failed");
      U.middleCols(b, w) = (U.middleCols(b, w) * es.eigenvectors()).eval();
      const RVec& ev = es.eigenvalues();
      const double tol = 1e-8 * (1.0 + std::max(std::abs(ev(0)), std::abs(ev(w - 1))));
      int start = 0;
      for (int i = 1; i < w; ++i) {
        if (ev(i) - ev(i - 1) > tol) {
          next.emplace_back(b + start, b + i);
          start = i;
        }
      }
      next.emplace_back(b + start, b + w);
    }
    clusters = std::move(next);
  }
  return U;
}

KStructure build_k_structure(const SystemModel& model) {
  const int n = model.dim();
  const auto& ds = model.lindblads;
  for (std::size_t a = 0; a < ds.size(); ++a) {
    if (!is_hermitian(ds[a].K))
      throw NotCommutingKSet("jump operator " + std::to_string(a) +
                             " is not Hermitian; this analysis needs a commuting Hermitian set");
  }
  for (std::size_t a = 0; a < ds.size(); ++a) {
    for (std::size_t b = a + 1; b < ds.size(); ++b) {
      const Mat comm = ds[a].K * ds[b].K - ds[b].K * ds[a].K;
      const double tol = 1e-9 * std::max(1.0, ds[a].K.norm() * ds[b].K.norm());
      if (comm.norm() > tol)
        throw NotCommutingKSet("jump operators " + std::to_string(a) + " and " +
                               std::to_string(b) + " do not commute");
    }
  }

  KStructure ks;
  std::vector<const Mat*> ops;
  ops.reserve(ds.size());
  for (const auto& d : ds) ops.push_back(&d.K);
  ks.U = ops.empty() ? Mat::Identity(n, n) : simultaneous_eigenbasis(ops);

  ks.kvals.resize(ds.size());
  for (std::size_t a = 0; a < ds.size(); ++a) {
    Mat D = ks.U.adjoint() * ds[a].K * ks.U;
    double offdiag = 0.0, scale = max_abs(D);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) offdiag = std::max(offdiag, std::abs(D(i, j)));
    if (offdiag > 1e-7 * (1.0 + scale))
      throw NotCommutingKSet("joint eigenbasis failed to diagonalize jump operator " +
                             std::to_string(a));
    ks.kvals[a].resize(n);
    for (int i = 0; i < n; ++i) ks.kvals[a](i) = D(i, i).real();
  }

  ks.rates = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < ds.size(); ++a) {
    const double s = model.gamma * ds[a].strength;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const double dk = ks.kvals[a](p) - ks.kvals[a](q);
        ks.rates(p, q) += s * dk * dk;
      }
  }
  ks.rate_scale = ks.rates.maxCoeff();
  const double steady_tol = 1e-9 * ks.rate_scale;
  ks.steady_mask.assign(static_cast<std::size_t>(n) * n, 0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (ks.rates(p, q) <= steady_tol) {
        ks.manifold.emplace_back(p, q);
        ks.steady_mask[static_cast<std::size_t>(p) * n + q] = 1;
      } else {
        ks.excited.emplace_back(p, q);
      }
    }
  ks.gamma_loc = 0.0;
  for (const auto& d : ds) ks.gamma_loc = std::max(ks.gamma_loc, model.gamma * d.strength);
  return ks;
}

// Second-order degenerate analysis on the steady manifold: the Hamiltonian
// superoperator is diagonalized within the manifold first, then each
// degenerate block receives a positive-semidefinite rate matrix from virtual
// transitions into decaying pairs.
struct ManifoldMode {
  double rate = 0.0;
  CVec svec;  // coordinates over ks.manifold
};

struct StrongCore {
  KStructure ks;
  Mat Ht;  // H in the joint eigenbasis
  double J = 0.0;
  double Jprime = 0.0;
  std::vector<ManifoldMode> modes;  // sorted by rate ascending
  int skipped = 0;
  double rate_tol = 0.0;
};

StrongCore build_strong_core(const SystemModel& model) {
  StrongCore core;
  core.ks = build_k_structure(model);
  const KStructure& ks = core.ks;
  const int n = model.dim();
  core.Ht = ks.U.adjoint() * model.H * ks.U;
  core.Ht = 0.5 * (core.Ht + core.Ht.adjoint()).eval();

  const int m = static_cast<int>(ks.manifold.size());
  Mat W1 = Mat::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    const auto [pj, qj] = ks.manifold[static_cast<std::size_t>(j)];
    for (int j2 = 0; j2 < m; ++j2) {
      const auto [pk, qk] = ks.manifold[static_cast<std::size_t>(j2)];
      Cplx v = 0.0;
      if (qj == qk) v += core.Ht(pj, pk);
      if (pj == pk) v -= core.Ht(qk, qj);
      W1(j, j2) = v;
      if (j != j2) core.Jprime = std::max(core.Jprime, std::abs(v));
    }
  }
  W1 = 0.5 * (W1 + W1.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> wes(W1);
  if (wes.info() != Eigen::Success)
    throw EigFailure("intra-manifold Hamiltonian block diagonalization failed");
  const RVec& wvals = wes.eigenvalues();
  const Mat& wvecs = wes.eigenvectors();

  const double skip_tol = 1e-8 * ks.rate_scale;
  std::vector<std::pair<int, int>> usable;
  for (const auto& e : ks.excited) {
    if (ks.rates(e.first, e.second) >= skip_tol)
      usable.push_back(e);
    else
      ++core.skipped;
  }

  // Commutator columns for every manifold eigenvector; they carry both the
  // manifold-to-excited couplings and the rate matrix.
  std::vector<Mat> comms(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    Mat W = Mat::Zero(n, n);
    for (int j = 0; j < m; ++j) {
      const auto [p, q] = ks.manifold[static_cast<std::size_t>(j)];
      W(p, q) += wvecs(j, k);
    }
    Mat M = core.Ht * W - W * core.Ht;
    for (const auto& e : ks.excited)
      core.J = std::max(core.J, std::abs(M(e.first, e.second)));
    comms[static_cast<std::size_t>(k)] = std::move(M);
  }

  const double wtol =
      1e-8 * (1.0 + (m > 0 ? std::max(std::abs(wvals(0)), std::abs(wvals(m - 1))) : 0.0));
  int cb = 0;
  while (cb < m) {
    int ce = cb + 1;
    while (ce < m && wvals(ce) - wvals(ce - 1) <= wtol) ++ce;
    const int c = ce - cb;
    Mat X(static_cast<Eigen::Index>(usable.size()), c);
    for (int k = 0; k < c; ++k) {
      const Mat& M = comms[static_cast<std::size_t>(cb + k)];
      for (std::size_t e = 0; e < usable.size(); ++e)
        X(static_cast<Eigen::Index>(e), k) =
            M(usable[e].first, usable[e].second) /
            std::sqrt(ks.rates(usable[e].first, usable[e].second));
    }
    Mat R = X.adjoint() * X;
    R = 0.5 * (R + R.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> res(R);
    if (res.info() != Eigen::Success) throw EigFailure("second-order rate matrix diagonalization failed");
    for (int k = 0; k < c; ++k) {
      ManifoldMode mode;
      mode.rate = std::max(0.0, res.eigenvalues()(k));
      mode.svec = wvecs.middleCols(cb, c) * res.eigenvectors().col(k);
      core.modes.push_back(std::move(mode));
    }
    cb = ce;
  }
  std::stable_sort(core.modes.begin(), core.modes.end(),
                   [](const ManifoldMode& a, const ManifoldMode& b) { return a.rate < b.rate; });
  const double maxr = core.modes.empty() ? 0.0 : core.modes.back().rate;
  core.rate_tol = 1e-9 * maxr;
  return core;
}

void require_boundary_sites(const SystemModel& model) {
  if (model.lindblads.empty()) throw NotBoundaryGeometry("model has no dissipators");
  for (const auto& d : model.lindblads) {
    if (d.site != 1 && d.site != model.L)
      throw NotBoundaryGeometry("dissipator at site " + std::to_string(d.site) +
                                " is not on a chain edge");
  }
}

struct HEigen {
  RVec E;
  Mat V;
};

HEigen h_eigen(const SystemModel& model) {
  Eigen::SelfAdjointEigenSolver<Mat> es(model.H);
  if (es.info() != Eigen::Success) throw EigFailure("Hamiltonian eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Per-dissipator diagonal data in the H eigenbasis: expectation values and
// variances entering the first-order decay rates.
struct WeakDiagonals {
  std::vector<CVec> kbar;     // K_a diagonal expectations
  std::vector<RVec> delta2;   // (K^dag K)_mm - |K_mm|^2, nonnegative
};

WeakDiagonals weak_diagonals(const SystemModel& model, const HEigen& he) {
  const int n = model.dim();
  WeakDiagonals wd;
  wd.kbar.resize(model.lindblads.size());
  wd.delta2.resize(model.lindblads.size());
  for (std::size_t a = 0; a < model.lindblads.size(); ++a) {
    Mat Kt = he.V.adjoint() * model.lindblads[a].K * he.V;
    wd.kbar[a].resize(n);
    wd.delta2[a].resize(n);
    for (int i = 0; i < n; ++i) {
      wd.kbar[a](i) = Kt(i, i);
      wd.delta2[a](i) = std::max(0.0, Kt.col(i).squaredNorm() - std::norm(Kt(i, i)));
    }
  }
  return wd;
}

double check_index(const SystemModel& model, int idx, const char* name) {
  if (idx < 0 || idx >= model.dim())
    throw PreconditionError(std::string("eigenstate index ") + name + " = " +
                            std::to_string(idx) + " is out of range for dimension " +
                            std::to_string(model.dim()));
  return 0.0;
}

long long count_above(const Mat& a, double thresh) {
  long long c = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j)) > thresh) ++c;
  return c;
}

}  // namespace

Mat commuting_k_eigenbasis(const SystemModel& model) {
  return build_k_structure(model).U;
}

StrongPTReport strong_gap_estimate(const SystemModel& model) {
  require_boundary_sites(model);
  StrongCore core = build_strong_core(model);
  const KStructure& ks = core.ks;

  StrongPTReport rep;
  rep.gamma_loc = ks.gamma_loc;
  rep.J = core.J;
  rep.Jprime = core.Jprime;
  rep.zeroth_gs_degeneracy = static_cast<long long>(ks.manifold.size());

  double rmin = std::numeric_limits<double>::infinity();
  for (const auto& e : ks.excited) rmin = std::min(rmin, ks.rates(e.first, e.second));
  rep.first_excited_energy = ks.excited.empty() ? Cplx(0.0, 0.0) : Cplx(0.0, -rmin);

  rep.gap_predicted = 0.0;
  rep.no_fast_mixing_mechanism = true;
  for (const auto& mode : core.modes) {
    if (mode.rate > core.rate_tol) {
      rep.gap_predicted = mode.rate;
      rep.no_fast_mixing_mechanism = false;
      break;
    }
  }

  const DoubledGenerator gen = build_generator(model);
  const LindbladSpectrum spec = decompose(gen);
  rep.gap_exact = spec.has_decaying_mode() ? spec.gap() : 0.0;
  rep.c_fit = rep.J > 1e-14 ? rep.gap_exact * rep.gamma_loc / (rep.J * rep.J) : kNan;

  std::ostringstream warn;
  if (rep.no_fast_mixing_mechanism) {
    warn << "no second-order decay channel: the Hamiltonian does not couple the steady "
            "manifold to decaying pairs";
  } else if (rep.J > 1e-14) {
    const double ratio = rep.gamma_loc / rep.J;
    if (ratio < 3.0)
      warn << "dissipation is not strong (gamma_loc/J = " << ratio
           << " < 3); the perturbative gap is unreliable";
    else if (ratio < 10.0)
      warn << "marginally strong dissipation (gamma_loc/J = " << ratio << " < 10)";
  }
  rep.warning = warn.str();
  return rep;
}

BulkZerothReport bulk_zeroth_spectrum(const SystemModel& model) {
  std::vector<char> covered(static_cast<std::size_t>(model.L) + 1, 0);
  for (const auto& d : model.lindblads) covered[static_cast<std::size_t>(d.site)] = 1;
  for (int s = 1; s <= model.L; ++s)
    if (!covered[static_cast<std::size_t>(s)])
      throw NotBulkGeometry("site " + std::to_string(s) + " carries no dissipator");

  KStructure ks;
  try {
    ks = build_k_structure(model);
  } catch (const NotCommutingKSet& e) {
    throw NotBulkGeometry(e.what());
  }

  // Ladder structure: each jump operator must expose d0 distinct, equally
  // spaced local levels.
  for (std::size_t a = 0; a < ks.kvals.size(); ++a) {
    std::vector<double> vals(ks.kvals[a].data(), ks.kvals[a].data() + ks.kvals[a].size());
    std::sort(vals.begin(), vals.end());
    const double span = vals.back() - vals.front();
    const double tol = 1e-9 * (1.0 + span);
    std::vector<double> distinct{vals.front()};
    for (double v : vals)
      if (v - distinct.back() > tol) distinct.push_back(v);
    if (static_cast<int>(distinct.size()) != model.d0)
      throw NotBulkGeometry("jump operator " + std::to_string(a) +
                            " does not expose d0 distinct local levels");
    for (std::size_t i = 2; i < distinct.size(); ++i) {
      const double d1 = distinct[i - 1] - distinct[i - 2];
      const double d2 = distinct[i] - distinct[i - 1];
      if (std::abs(d2 - d1) > tol)
        throw NotBulkGeometry("jump operator " + std::to_string(a) +
                              " is not an equally spaced ladder");
    }
  }

  BulkZerothReport rep;
  rep.gs_degeneracy = static_cast<long long>(ks.manifold.size());

  double rmin = std::numeric_limits<double>::infinity();
  for (const auto& e : ks.excited) rmin = std::min(rmin, ks.rates(e.first, e.second));
  if (ks.excited.empty()) throw NotBulkGeometry("dissipative generator has no decaying pair");
  rep.first_excited_energy = Cplx(0.0, -rmin);

  const double tol = 1e-9 * std::max(1.0, rmin);
  std::vector<std::pair<int, int>> first;
  for (const auto& e : ks.excited)
    if (std::abs(ks.rates(e.first, e.second) - rmin) <= tol) first.push_back(e);
  rep.first_excited_multiplicity = static_cast<long long>(first.size());

  Mat Ht = ks.U.adjoint() * model.H * ks.U;
  Ht = 0.5 * (Ht + Ht.adjoint()).eval();
  for (const auto& s : ks.manifold) {
    for (const auto& e : first) {
      Cplx v = 0.0;
      if (e.second == s.second) v += Ht(e.first, s.first);
      if (e.first == s.first) v -= Ht(s.second, e.second);
      rep.J = std::max(rep.J, std::abs(v));
    }
  }
  rep.first_order_gap_estimate = model.L * rep.J * rep.J / rmin;
  rep.diverges_with_L = true;
  return rep;
}

StrongStateCorrection strong_state_correction(const SystemModel& model) {
  if (model.lindblads.empty()) throw NotCommutingKSet("model has no jump operators");
  StrongCore core = build_strong_core(model);
  const KStructure& ks = core.ks;
  const int n = model.dim();

  // Slowest decaying manifold direction; with every second-order rate at zero
  // the choice is immaterial (the correction vanishes), so take the first
  // non-leading direction deterministically.
  std::size_t pick = core.modes.size();
  for (std::size_t i = 0; i < core.modes.size(); ++i) {
    if (core.modes[i].rate > core.rate_tol) {
      pick = i;
      break;
    }
  }
  if (pick == core.modes.size()) pick = core.modes.size() > 1 ? 1 : 0;
  const CVec& w = core.modes[pick].svec;

  Mat W = Mat::Zero(n, n);
  for (int j = 0; j < static_cast<int>(ks.manifold.size()); ++j) {
    const auto [p, q] = ks.manifold[static_cast<std::size_t>(j)];
    W(p, q) += w(j);
  }
  const Mat M = core.Ht * W - W * core.Ht;
  const double skip_tol = 1e-8 * ks.rate_scale;

  Mat C = W;
  for (const auto& e : ks.excited) {
    const double r = ks.rates(e.first, e.second);
    if (r < skip_tol) continue;
    C(e.first, e.second) += Cplx(0.0, -1.0) * M(e.first, e.second) / r;
  }
  C /= C.norm();

  StrongStateCorrection res;
  res.coeffs_k_basis = C;
  res.sigma1 = ks.U * C * ks.U.adjoint();
  res.trace_norm = trace_norm(res.coeffs_k_basis);
  res.skipped_denominators = core.skipped;

  int mstar = 0;
  double best = -1.0;
  for (int p = 0; p < n; ++p) {
    if (std::abs(W(p, p)) > best) {
      best = std::abs(W(p, p));
      mstar = p;
    }
  }
  if (best < 1e-12) {
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        if (std::abs(W(p, q)) > best) {
          best = std::abs(W(p, q));
          mstar = p;
        }
  }
  Mat Capp = Mat::Zero(n, n);
  Capp(mstar, mstar) = 1.0;
  for (int p = 0; p < n; ++p) {
    if (p == mstar) continue;
    const double rp = ks.rates(p, mstar);
    if (!ks.steady_mask[static_cast<std::size_t>(p) * n + mstar] && rp >= skip_tol)
      Capp(p, mstar) = Cplx(0.0, -1.0) * core.Ht(p, mstar) / rp;
    const double rq = ks.rates(mstar, p);
    if (!ks.steady_mask[static_cast<std::size_t>(mstar) * n + p] && rq >= skip_tol)
      Capp(mstar, p) = Cplx(0.0, 1.0) * core.Ht(mstar, p) / rq;
  }
  Capp /= Capp.norm();
  res.appendix_form = Capp;
  res.representative_m = mstar;
  res.trace_norm_appendix = trace_norm(Capp);
  res.nnz_appendix = count_above(Capp, 1e-13);
  return res;
}

WeakPTRecord weak_energy_correction(const SystemModel& model, int m, int n) {
  check_index(model, m, "m");
  check_index(model, n, "n");
  const HEigen he = h_eigen(model);
  const WeakDiagonals wd = weak_diagonals(model, he);

  WeakPTRecord rec;
  rec.m = m;
  rec.n = n;
  rec.fluctuation_exponent_a = kNan;
  for (std::size_t a = 0; a < model.lindblads.size(); ++a) {
    const double s = model.lindblads[a].strength;
    rec.Kbar_m += s * wd.kbar[a](m).real();
    rec.Kbar_n += s * wd.kbar[a](n).real();
    rec.deltaK2_m += s * wd.delta2[a](m);
    rec.deltaK2_n += s * wd.delta2[a](n);
    rec.kbar_gap_sq += s * std::norm(wd.kbar[a](m) - wd.kbar[a](n));
  }
  rec.first_order_rate = model.gamma * (rec.deltaK2_m + rec.deltaK2_n + rec.kbar_gap_sq);
  return rec;
}

WeakGapEstimate weak_gap_estimate(const SystemModel& model) {
  const HEigen he = h_eigen(model);
  const WeakDiagonals wd = weak_diagonals(model, he);
  const int n = model.dim();
  const double spread = n > 0 ? he.E(n - 1) - he.E(0) : 0.0;
  const double deg_tol = 1e-9 * std::max(1.0, spread);

  WeakGapEstimate est;
  est.gap = kNan;
  est.m = est.n = -1;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(he.E(i) - he.E(j)) <= deg_tol) {
        ++est.skipped_degenerate_pairs;
        continue;
      }
      double rate = 0.0;
      for (std::size_t a = 0; a < model.lindblads.size(); ++a) {
        const double s = model.lindblads[a].strength;
        rate += s * (wd.delta2[a](i) + wd.delta2[a](j) +
                     std::norm(wd.kbar[a](i) - wd.kbar[a](j)));
      }
      rate *= model.gamma;
      if (std::isnan(est.gap) || rate < est.gap) {
        est.gap = rate;
        est.m = i;
        est.n = j;
      }
    }
  }
  return est;
}

WeakStateCorrection weak_state_correction(const SystemModel& model, int m, int n) {
  check_index(model, m, "m");
  check_index(model, n, "n");
  const HEigen he = h_eigen(model);
  const int N = model.dim();

  std::vector<Mat> Kts, K2ts;
  double kscale = 0.0;
  for (const auto& d : model.lindblads) {
    Mat Kt = he.V.adjoint() * d.K * he.V;
    kscale = std::max(kscale, max_abs(Kt));
    K2ts.push_back(Kt.adjoint() * Kt);
    Kts.push_back(std::move(Kt));
  }
  const double num_tol = 1e-13 * std::max(1.0, kscale * kscale);
  const double spread = N > 0 ? he.E(N - 1) - he.E(0) : 0.0;
  const double den_tol = 1e-8 * std::max(1.0, spread);

  WeakStateCorrection res;
  res.m = m;
  res.n = n;
  res.b1_sector = Mat::Zero(N, N);
  res.b2_sector = Mat::Zero(N, N);
  for (int p = 0; p < N; ++p) {
    for (int q = 0; q < N; ++q) {
      if (p == m && q == n) continue;
      Cplx b1 = 0.0, b2 = 0.0;
      for (std::size_t a = 0; a < model.lindblads.size(); ++a) {
        const double s = model.lindblads[a].strength;
        b1 += s * (-2.0 * Kts[a](p, m) * std::conj(Kts[a](q, n)));
        if (q == n) b2 += s * K2ts[a](p, m);
        if (p == m) b2 += s * std::conj(K2ts[a](q, n));
      }
      const double den = (he.E(m) - he.E(n)) - (he.E(p) - he.E(q));
      if (std::abs(den) <= den_tol) {
        if (std::abs(b1) + std::abs(b2) > num_tol) ++res.skipped_denominators;
        continue;
      }
      const Cplx pref = Cplx(0.0, -1.0) * model.gamma / den;
      res.b1_sector(p, q) = pref * b1;
      res.b2_sector(p, q) = pref * b2;
    }
  }
  Mat C = res.b1_sector + res.b2_sector;
  C(m, n) += 1.0;
  const double nrm = C.norm();
  C /= nrm;
  res.b1_sector /= nrm;
  res.b2_sector /= nrm;
  res.coeffs_h_basis = C;
  res.sigma = he.V * C * he.V.adjoint();
  res.trace_norm = trace_norm(C);
  res.nnz_b1 = count_above(res.b1_sector, 1e-13);
  res.nnz_b2 = count_above(res.b2_sector, 1e-13);
  return res;
}

FluctuationFit weak_fluctuation_exponent(const nlohmann::json& config_template,
                                         const std::vector<int>& sizes) {
  std::set<int> distinct(sizes.begin(), sizes.end());
  if (distinct.size() < 2)
    throw InsufficientPoints("fluctuation exponent fit needs at least 2 distinct sizes");

  FluctuationFit fit;
  std::vector<double> xs, ys;
  for (int L : distinct) {
    const SystemModel model = build_model(parse_config(instantiate_template(config_template, L)));
    const HEigen he = h_eigen(model);
    const WeakDiagonals wd = weak_diagonals(model, he);
    std::vector<double> deltas(static_cast<std::size_t>(model.dim()), 0.0);
    for (int i = 0; i < model.dim(); ++i)
      for (std::size_t a = 0; a < model.lindblads.size(); ++a)
        deltas[static_cast<std::size_t>(i)] += model.lindblads[a].strength * wd.delta2[a](i);
    std::sort(deltas.begin(), deltas.end());
    const std::size_t half = deltas.size() / 2;
    const double median = deltas.size() % 2 == 1
                              ? deltas[half]
                              : 0.5 * (deltas[half - 1] + deltas[half]);
    if (median <= 0.0)
      throw NumericalError("fluctuation median vanishes at L = " + std::to_string(L) +
                           "; no power law to fit");
    fit.medians.emplace_back(L, median);
    xs.push_back(std::log(static_cast<double>(L)));
    ys.push_back(std::log(median));
  }
  const detail::LineFit lf = detail::fit_line(xs, ys);
  fit.a = lf.slope;
  fit.r2 = lf.r2;
  return fit;
}

CutoffReport cutoff_bound(const Mat& sigma, double cutoff_c, CutoffRegime regime) {
  if (sigma.rows() != sigma.cols()) throw NonSquareDim("cutoff split needs a square operator");
  if (cutoff_c < 0.0) throw PreconditionError("cutoff must be nonnegative");
  if (sigma.norm() > 1.0 + 1e-6)
    throw PreconditionError("cutoff bounds assume a Frobenius-normalized operator");

  const int N = static_cast<int>(sigma.rows());
  CutoffReport rep;
  rep.cutoff_c = cutoff_c;
  rep.regime = regime;

  Mat A = Mat::Zero(N, N), B = Mat::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const double mag = std::abs(sigma(i, j));
      if (mag > cutoff_c) {
        A(i, j) = sigma(i, j);
        ++rep.N_large;
      } else {
        B(i, j) = sigma(i, j);
        if (mag > 0.0) ++rep.nnz_B;
      }
    }
  }
  rep.nnz_sigma = count_above(sigma, 0.0);
  rep.norm_A_bound = std::sqrt(static_cast<double>(rep.N_large));
  if (regime == CutoffRegime::strong) {
    rep.norm_B_bound = std::sqrt(2.0) * N * cutoff_c;
    rep.structure_ok = rep.nnz_sigma <= 2LL * N;
  } else {
    // Without sector attribution every small entry is treated as double-sum
    // population, which carries the larger constant.
    rep.norm_B1_bound = std::pow(static_cast<double>(N), 1.5) * cutoff_c;
    rep.norm_B2_bound = 0.0;
    rep.norm_B_bound = rep.norm_B1_bound;
  }
  rep.trace_norm_exact = trace_norm(sigma);
  rep.trace_norm_A_exact = trace_norm(A);
  rep.trace_norm_B_exact = trace_norm(B);
  return rep;
}

CutoffReport cutoff_bound(const WeakStateCorrection& correction, double cutoff_c) {
  CutoffReport rep = cutoff_bound(correction.coeffs_h_basis, cutoff_c, CutoffRegime::weak);
  const double N = static_cast<double>(correction.coeffs_h_basis.rows());
  rep.norm_B1_bound = std::pow(N, 1.5) * cutoff_c;
  rep.norm_B2_bound = N * cutoff_c;
  rep.norm_B_bound = rep.norm_B1_bound + rep.norm_B2_bound;
  return rep;
}

}  // namespace mixtime
