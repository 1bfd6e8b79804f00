#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mixtime/criteria.hpp"
#include "mixtime/errors.hpp"
#include "mixtime/liouvillian.hpp"
#include "mixtime/mixing.hpp"
#include "mixtime/models.hpp"
#include "mixtime/operators.hpp"
#include "mixtime/perturbation.hpp"
#include "mixtime/report_io.hpp"
#include "mixtime/spectral.hpp"

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw mixtime::ConfigError("cannot open config file: " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw mixtime::ParseError("invalid JSON in " + path + ": " + e.what());
  }
}

void check_doubled_cap(const mixtime::SystemModel& model) {
  const long long n = model.dim();
  const long long cap = mixtime::max_doubled_dim();
  if (n * n > cap)
    throw mixtime::DimOverflow("doubled dimension " + std::to_string(n * n) + " exceeds cap " +
                               std::to_string(cap) + " (override with MIXTIME_MAX_DIM)");
}

void emit_json(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty())
    std::cout << text;
  else
    mixtime::write_text_atomic(path, text);
}

void emit_csv(const std::string& text, const std::string& path) {
  if (path.empty())
    std::cout << text;
  else
    mixtime::write_text_atomic(path, text);
}

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

struct CommonArgs {
  std::string config_path;
  std::string csv_path;
  std::string json_path;
};

int run_spectrum(const CommonArgs& a) {
  const json doc = read_json_file(a.config_path);
  const mixtime::SystemModel model = mixtime::build_model(mixtime::parse_config(doc));
  check_doubled_cap(model);
  const mixtime::LindbladSpectrum spec = mixtime::decompose(mixtime::build_generator(model));

  const mixtime::RunManifest man = mixtime::make_manifest("spectrum", doc, json::object());
  if (!a.csv_path.empty()) {
    std::string csv =
        mixtime::csv_header(man, {"j", "alpha_j", "beta_j", "trace_norm", "is_steady"});
    for (const auto& r : spec.records()) {
      csv += std::to_string(r.index) + "," + mixtime::fmt17(r.alpha) + "," +
             mixtime::fmt17(r.beta) + "," + mixtime::fmt17(r.mode_trace_norm) + "," +
             (r.is_steady ? "1" : "0") + "\n";
    }
    emit_csv(csv, a.csv_path);
  }

  json summary{{"manifest", mixtime::manifest_json(man)},
               {"dim", spec.dim()},
               {"doubled_dim", spec.doubled_dim()},
               {"gap", spec.has_decaying_mode() ? json(spec.gap()) : json(nullptr)},
               {"steady_dim", spec.steady_dim()},
               {"has_unique_steady", spec.has_unique_steady()},
               {"has_decaying_mode", spec.has_decaying_mode()},
               {"zero_tol", spec.zero_tol()},
               {"generator_norm", spec.generator_norm()},
               {"defective_flagged", spec.defective_flagged()},
               {"condition_estimate", spec.condition_estimate()}};
  emit_json(summary, a.json_path);
  return 0;
}

int run_mix(const CommonArgs& a, double eta, std::uint64_t seed, int n_random) {
  const json doc = read_json_file(a.config_path);
  const mixtime::SystemModel model = mixtime::build_model(mixtime::parse_config(doc));
  check_doubled_cap(model);
  const mixtime::LindbladSpectrum spec = mixtime::decompose(mixtime::build_generator(model));

  mixtime::MixingParams params;
  params.eta = eta;
  const mixtime::MixingReport rep = mixtime::mixing_report(model, spec, params, n_random, seed);

  const mixtime::RunManifest man = mixtime::make_manifest(
      "mix", doc, json{{"eta", eta}, {"seed", seed}, {"random_probes", n_random}});
  json out{{"manifest", mixtime::manifest_json(man)},
           {"eta", rep.eta},
           {"gap", rep.gap},
           {"dim", rep.dim},
           {"steady_dim", rep.steady_dim},
           {"trace_norm_sigma1", rep.trace_norm_sigma1},
           {"paper_probe_feasible", rep.paper_probe_feasible},
           {"c1_used", rep.c1_used},
           {"tau_measured", rep.tau_measured},
           {"tau_predicted", rep.tau_predicted},
           {"tau_bound_dim", rep.tau_bound_dim},
           {"tau_bound_lattice", number_or_null(rep.tau_bound_lattice)},
           {"n_probes", rep.n_probes},
           {"seed", rep.seed},
           {"notes", rep.notes}};
  emit_json(out, a.json_path);
  return 0;
}

std::vector<double> default_cutoffs(int L) {
  return {std::exp(-1.0 * L), std::exp(-2.0 * L), 1e-3};
}

json cutoff_json(const mixtime::CutoffReport& c) {
  json j{{"cutoff_c", c.cutoff_c},
         {"N_large", c.N_large},
         {"norm_A_bound", c.norm_A_bound},
         {"norm_B_bound", c.norm_B_bound},
         {"trace_norm_exact", c.trace_norm_exact},
         {"trace_norm_A_exact", c.trace_norm_A_exact},
         {"trace_norm_B_exact", c.trace_norm_B_exact},
         {"nnz_B", c.nnz_B},
         {"nnz_sigma", c.nnz_sigma},
         {"regime", c.regime == mixtime::CutoffRegime::strong ? "strong" : "weak"}};
  if (c.regime == mixtime::CutoffRegime::strong) {
    j["structure_ok"] = c.structure_ok;
  } else {
    j["norm_B1_bound"] = c.norm_B1_bound;
    j["norm_B2_bound"] = c.norm_B2_bound;
  }
  return j;
}

int run_perturb(const CommonArgs& a, const std::string& regime) {
  const json doc = read_json_file(a.config_path);
  const mixtime::SystemModel model = mixtime::build_model(mixtime::parse_config(doc));
  check_doubled_cap(model);
  const mixtime::RunManifest man =
      mixtime::make_manifest("perturb", doc, json{{"regime", regime}});

  if (regime == "strong") {
    const mixtime::StrongPTReport rep = mixtime::strong_gap_estimate(model);
    const mixtime::StrongStateCorrection corr = mixtime::strong_state_correction(model);
    json cutoffs = json::array();
    for (double c : default_cutoffs(model.L))
      cutoffs.push_back(
          cutoff_json(mixtime::cutoff_bound(corr.appendix_form, c, mixtime::CutoffRegime::strong)));
    json out{{"manifest", mixtime::manifest_json(man)},
             {"regime", "strong"},
             {"gamma_loc", rep.gamma_loc},
             {"J", rep.J},
             {"Jprime", rep.Jprime},
             {"c_fit", number_or_null(rep.c_fit)},
             {"gap_predicted", rep.gap_predicted},
             {"gap_exact", rep.gap_exact},
             {"zeroth_gs_degeneracy", rep.zeroth_gs_degeneracy},
             {"first_excited_energy",
              json{{"re", rep.first_excited_energy.real()},
                   {"im", rep.first_excited_energy.imag()}}},
             {"no_fast_mixing_mechanism", rep.no_fast_mixing_mechanism},
             {"warning", rep.warning},
             {"state_correction",
              json{{"representative_m", corr.representative_m},
                   {"trace_norm", corr.trace_norm},
                   {"trace_norm_appendix", corr.trace_norm_appendix},
                   {"nnz_appendix", corr.nnz_appendix},
                   {"skipped_denominators", corr.skipped_denominators}}},
             {"cutoffs", cutoffs}};
    emit_json(out, a.json_path);
    return 0;
  }

  const mixtime::WeakGapEstimate est = mixtime::weak_gap_estimate(model);
  const long long N = model.dim();
  json records = json::array();
  std::string csv;
  const std::vector<std::string> cols = {"m",         "n",          "Kbar_m",      "Kbar_n",
                                         "deltaK2_m", "deltaK2_n",  "kbar_gap_sq", "first_order_rate"};
  csv = mixtime::csv_header(man, cols);
  for (long long m = 0; m < N; ++m) {
    for (long long n = m + 1; n < N; ++n) {
      const mixtime::WeakPTRecord r =
          mixtime::weak_energy_correction(model, static_cast<int>(m), static_cast<int>(n));
      records.push_back(json{{"m", r.m},
                             {"n", r.n},
                             {"Kbar_m", r.Kbar_m},
                             {"Kbar_n", r.Kbar_n},
                             {"deltaK2_m", r.deltaK2_m},
                             {"deltaK2_n", r.deltaK2_n},
                             {"kbar_gap_sq", r.kbar_gap_sq},
                             {"first_order_rate", r.first_order_rate}});
      csv += std::to_string(r.m) + "," + std::to_string(r.n) + "," + mixtime::fmt17(r.Kbar_m) +
             "," + mixtime::fmt17(r.Kbar_n) + "," + mixtime::fmt17(r.deltaK2_m) + "," +
             mixtime::fmt17(r.deltaK2_n) + "," + mixtime::fmt17(r.kbar_gap_sq) + "," +
             mixtime::fmt17(r.first_order_rate) + "\n";
    }
  }
  if (!a.csv_path.empty()) emit_csv(csv, a.csv_path);

  json out{{"manifest", mixtime::manifest_json(man)},
           {"regime", "weak"},
           {"gap_estimate",
            json{{"gap", number_or_null(est.gap)},
                 {"m", est.m},
                 {"n", est.n},
                 {"skipped_degenerate_pairs", est.skipped_degenerate_pairs}}},
           {"records", records}};
  if (est.m >= 0 && est.n >= 0 && std::isfinite(est.gap)) {
    const mixtime::WeakStateCorrection corr =
        mixtime::weak_state_correction(model, est.m, est.n);
    json cutoffs = json::array();
    for (double c : default_cutoffs(model.L))
      cutoffs.push_back(cutoff_json(mixtime::cutoff_bound(corr, c)));
    out["state_correction"] = json{{"m", corr.m},
                                   {"n", corr.n},
                                   {"trace_norm", corr.trace_norm},
                                   {"nnz_b1", corr.nnz_b1},
                                   {"nnz_b2", corr.nnz_b2},
                                   {"skipped_denominators", corr.skipped_denominators}};
    out["cutoffs"] = cutoffs;
  }
  emit_json(out, a.json_path);
  return 0;
}

int run_sparsity(const CommonArgs& a, double alpha, const std::string& basis) {
  const json doc = read_json_file(a.config_path);
  const mixtime::SystemModel model = mixtime::build_model(mixtime::parse_config(doc));
  const mixtime::SparsityProfile prof = (basis == "h")
                                            ? mixtime::weak_sparsity_profile(model, alpha)
                                            : mixtime::strong_sparsity_profile(model, alpha);
  const mixtime::RunManifest man = mixtime::make_manifest(
      "sparsity", doc,
      json{{"alpha", alpha}, {"basis", mixtime::sparsity_basis_name(prof.basis)}});
  std::string csv = mixtime::csv_header(man, {"s", "count"});
  for (std::size_t s = 0; s < prof.counts.size(); ++s)
    csv += std::to_string(s) + "," + std::to_string(prof.counts[s]) + "\n";
  emit_csv(csv, a.csv_path);
  return 0;
}

int run_scan(const CommonArgs& a, int l_min, int l_max, double alpha, const std::string& basis) {
  if (l_min < 1 || l_max < l_min)
    throw mixtime::PreconditionError("need 1 <= l-min <= l-max");
  const json tpl = read_json_file(a.config_path);
  std::vector<int> sizes;
  for (int L = l_min; L <= l_max; ++L) sizes.push_back(L);

  mixtime::ScanOptions opts;
  opts.alpha = alpha;
  opts.basis =
      basis == "h" ? mixtime::SparsityBasis::h_eigenbasis : mixtime::SparsityBasis::k_eigenbasis;
  const std::vector<mixtime::ScalingRecord> recs = mixtime::scan_sizes(tpl, sizes, opts);

  const mixtime::RunManifest man = mixtime::make_manifest(
      "scan", tpl,
      json{{"l_min", l_min}, {"l_max", l_max}, {"alpha", alpha}, {"basis", basis}});
  std::string csv = mixtime::csv_header(
      man, {"L", "inverse_gap", "trace_norm_sigma1", "max_sparsity_count", "ok", "error"});
  for (const auto& r : recs) {
    csv += std::to_string(r.L) + "," + mixtime::fmt17(r.inverse_gap) + "," +
           mixtime::fmt17(r.trace_norm_sigma1) + "," + std::to_string(r.max_sparsity_count) +
           "," + (r.ok ? "1" : "0") + "," + mixtime::csv_escape(r.error) + "\n";
  }
  emit_csv(csv, a.csv_path);

  json records = json::array();
  for (const auto& r : recs)
    records.push_back(json{{"L", r.L},
                           {"inverse_gap", number_or_null(r.inverse_gap)},
                           {"trace_norm_sigma1", number_or_null(r.trace_norm_sigma1)},
                           {"max_sparsity_count", r.max_sparsity_count},
                           {"wall_time_s", r.wall_time_s},
                           {"ok", r.ok},
                           {"error", r.error}});

  // A short scan still yields a useful table; only the growth verdict needs
  // three sizes, so degrade to a note instead of failing the whole run.
  json verdicts = json::object();
  try {
    for (auto q : {mixtime::ScalingQuantity::inverse_gap, mixtime::ScalingQuantity::trace_norm}) {
      const mixtime::ScalingVerdict v = mixtime::classify_scaling(recs, q);
      verdicts[mixtime::scaling_quantity_name(q)] =
          json{{"power_law", json{{"param", v.power_law.param}, {"r2", v.power_law.r2}}},
               {"polylog", json{{"param", v.polylog.param}, {"r2", v.polylog.r2}}},
               {"exponential", json{{"param", v.exponential.param}, {"r2", v.exponential.r2}}},
               {"best", mixtime::growth_class_name(v.best)},
               {"assessment", v.assessment},
               {"caveat", v.caveat}};
    }
  } catch (const mixtime::InsufficientPoints& e) {
    verdicts = json{{"note", std::string("no growth verdict: ") + e.what()}};
  }
  json out{{"manifest", mixtime::manifest_json(man)}, {"records", records},
           {"verdicts", verdicts}};
  emit_json(out, a.json_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral mixing-time analysis for Lindbladian open systems"};
  app.require_subcommand(1);

  CommonArgs spectrum_args, mix_args, perturb_args, sparsity_args, scan_args;
  double eta = 0.01;
  std::uint64_t seed = 20240817u;
  int n_random = 4;
  std::string perturb_regime;
  double sparsity_alpha = 2.0;
  std::string sparsity_basis = "h";
  int l_min = 2, l_max = 4;
  double scan_alpha = 2.0;
  std::string scan_basis = "k";

  auto* sp = app.add_subcommand("spectrum", "full decay-rate table and summary");
  sp->add_option("config", spectrum_args.config_path, "model config JSON")->required();
  sp->add_option("--csv", spectrum_args.csv_path, "write the spectrum table to this path");
  sp->add_option("--json", spectrum_args.json_path, "write the summary here instead of stdout");

  auto* mx = app.add_subcommand("mix", "measure, predict and bound the mixing time");
  mx->add_option("config", mix_args.config_path, "model config JSON")->required();
  mx->add_option("--eta", eta, "target trace-distance accuracy")->check(CLI::PositiveNumber);
  mx->add_option("--seed", seed, "seed for random probe states");
  mx->add_option("--random-probes", n_random, "number of random pure probes")
      ->check(CLI::NonNegativeNumber);
  mx->add_option("--json", mix_args.json_path, "write the report here instead of stdout");

  auto* pt = app.add_subcommand("perturb", "perturbative gap and slow-mode structure");
  pt->add_option("config", perturb_args.config_path, "model config JSON")->required();
  pt->add_option("--regime", perturb_regime, "strong or weak dissipation")
      ->required()
      ->check(CLI::IsMember({"strong", "weak"}));
  pt->add_option("--csv", perturb_args.csv_path, "weak regime: write the pair table here");
  pt->add_option("--json", perturb_args.json_path, "write the report here instead of stdout");

  auto* sy = app.add_subcommand("sparsity", "per-state sparsity counts in a fixed eigenbasis");
  sy->add_option("config", sparsity_args.config_path, "model config JSON")->required();
  sy->add_option("--alpha", sparsity_alpha, "threshold exponent, cutoff e^(-alpha L)")
      ->check(CLI::Range(1.0, 1e6));
  sy->add_option("--basis", sparsity_basis, "h: count K in the H eigenbasis; k: count H in the K eigenbasis")
      ->check(CLI::IsMember({"h", "k"}));
  sy->add_option("--csv", sparsity_args.csv_path, "write the profile here instead of stdout");

  auto* sc = app.add_subcommand("scan", "repeat the pipeline over a range of sizes");
  sc->add_option("config", scan_args.config_path, "model template JSON")->required();
  sc->add_option("--l-min", l_min, "smallest size")->required();
  sc->add_option("--l-max", l_max, "largest size")->required();
  sc->add_option("--alpha", scan_alpha, "sparsity threshold exponent")->check(CLI::Range(1.0, 1e6));
  sc->add_option("--basis", scan_basis, "sparsity basis per size, h or k")
      ->check(CLI::IsMember({"h", "k"}));
  sc->add_option("--csv", scan_args.csv_path, "write the per-size table to this path");
  sc->add_option("--json", scan_args.json_path, "write records and verdicts here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sp->parsed()) return run_spectrum(spectrum_args);
    if (mx->parsed()) return run_mix(mix_args, eta, seed, n_random);
    if (pt->parsed()) return run_perturb(perturb_args, perturb_regime);
    if (sy->parsed()) return run_sparsity(sparsity_args, sparsity_alpha, sparsity_basis);
    if (sc->parsed()) return run_scan(scan_args, l_min, l_max, scan_alpha, scan_basis);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const mixtime::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mixtime::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const mixtime::PreconditionError& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
