#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "mixtime/models.hpp"

// Path of the command-line binary, filled by main() from --cli=<path>.
extern std::string g_cli_path;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI with the given argument string through the shell, capturing
// stdout/stderr. Requires g_cli_path to be set.
CliResult run_cli(const std::string& args);

namespace testutil {

inline nlohmann::json amp_damp_doc() {
  return nlohmann::json{{"lattice", {{"l", 1}, {"d0", 2}}},
                        {"gamma", 1.0},
                        {"dissipators",
                         {{{"op", "sigma_minus"}, {"site", 1}, {"strength", 1.0}}}}};
}

inline nlohmann::json dephasing_doc() {
  return nlohmann::json{{"lattice", {{"l", 1}, {"d0", 2}}},
                        {"gamma", 1.0},
                        {"dissipators", {{{"op", "sigma_z"}, {"site", 1}, {"strength", 1.0}}}}};
}

// Qubit kept between two thermal baths: sigma_minus at strength s_down and
// sigma_plus at strength s_up. Full-rank steady state, real gap.
inline nlohmann::json thermal_qubit_doc(double gamma, double s_down, double s_up) {
  return nlohmann::json{
      {"lattice", {{"l", 1}, {"d0", 2}}},
      {"gamma", gamma},
      {"dissipators",
       {{{"op", "sigma_minus"}, {"site", 1}, {"strength", s_down}},
        {{"op", "sigma_plus"}, {"site", 1}, {"strength", s_up}}}}};
}

inline nlohmann::json tfi_doc(int L, double gamma, double j = 1.0, double h = 0.45) {
  nlohmann::json ham = nlohmann::json::array();
  for (int i = 1; i < L; ++i)
    ham.push_back({{"term", "zz"}, {"coupling", j}, {"sites", {i, i + 1}}});
  for (int i = 1; i <= L; ++i)
    ham.push_back({{"term", "x"}, {"coupling", h}, {"sites", {i}}});
  return nlohmann::json{{"lattice", {{"l", L}, {"d0", 2}}},
                        {"gamma", gamma},
                        {"hamiltonian", ham},
                        {"dissipators", {{{"op", "sigma_z"}, {"site", 1}, {"strength", 1.0}}}}};
}

// Boundary-dissipated Ising chain: transverse fields on the end sites only,
// diagonal zz couplings in the bulk. The only terms that fail to commute with
// the end dissipators act on a boundary site, which pins the gap at J^2/gamma
// with no L dependence. The next-nearest couplings tie every interior flip
// frequency to both boundary spins; without them the slowest interior
// coherence dephases through one end only and the gap halves at L = 4. The
// end-field asymmetry keeps the slowest decaying mode nondegenerate.
inline nlohmann::json boundary_doc(int L, double gamma, double j = 1.0) {
  static const double nn[] = {0.70, 0.53, 0.91, 0.63, 0.77};
  static const double nnn[] = {0.37, 0.41, 0.29, 0.33};
  nlohmann::json ham = nlohmann::json::array();
  ham.push_back({{"term", "x"}, {"coupling", 1.0 * j}, {"sites", {1}}});
  ham.push_back({{"term", "x"}, {"coupling", 1.3 * j}, {"sites", {L}}});
  for (int i = 1; i < L; ++i)
    ham.push_back({{"term", "zz"}, {"coupling", nn[(i - 1) % 5] * j}, {"sites", {i, i + 1}}});
  for (int i = 1; i + 2 <= L; ++i)
    ham.push_back({{"term", "zz"}, {"coupling", nnn[(i - 1) % 4] * j}, {"sites", {i, i + 2}}});
  nlohmann::json dis = nlohmann::json::array();
  dis.push_back({{"op", "sigma_z"}, {"site", 1}, {"strength", 1.0}});
  dis.push_back({{"op", "sigma_z"}, {"site", L}, {"strength", 1.0}});
  return nlohmann::json{
      {"lattice", {{"l", L}, {"d0", 2}}}, {"gamma", gamma}, {"hamiltonian", ham},
      {"dissipators", dis}};
}

inline mixtime::SystemModel model_from(const nlohmann::json& doc) {
  return mixtime::build_model(mixtime::parse_config(doc));
}

// Deterministic random complex matrix with entries of unit scale.
inline mixtime::Mat random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  mixtime::Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = mixtime::Cplx(g(rng), g(rng));
  return m;
}

inline mixtime::Mat random_hermitian(int n, std::mt19937_64& rng) {
  mixtime::Mat m = random_matrix(n, rng);
  return mixtime::Mat(0.5 * (m + m.adjoint()));
}

// Random model on a formal 1-site lattice of dimension n: dense Hermitian H
// plus a couple of dense jump operators. Exercises the generic code paths.
inline mixtime::SystemModel random_model(int n, std::mt19937_64& rng, int n_jump = 2,
                                         double gamma = 0.7) {
  mixtime::SystemModel m;
  m.L = 1;
  m.d0 = n;
  m.gamma = gamma;
  m.H = random_hermitian(n, rng);
  for (int a = 0; a < n_jump; ++a)
    m.lindblads.push_back({random_matrix(n, rng), 1, 0.5 + 0.5 * a, "custom"});
  m.geometry = mixtime::Geometry::custom;
  return m;
}

}  // namespace testutil
