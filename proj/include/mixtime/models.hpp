#pragma once

#include "mixtime/operators.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace mixtime {

// One Hamiltonian term from a config document. `custom` is a local matrix on
// consecutive sites (row-major, dimension d0^|sites|) and empty otherwise.
struct HamTermSpec {
  std::string term;
  double coupling = 1.0;
  std::vector<int> sites;
  Mat custom;
};

// One jump-operator entry. `strength` multiplies the global gamma for this term.
struct DissipatorSpec {
  std::string op;
  int site = 1;
  double strength = 1.0;
  Mat custom;
};

struct ModelConfig {
  int L = 1;
  int d0 = 2;
  double gamma = 1.0;
  std::vector<HamTermSpec> hamiltonian;
  std::vector<DissipatorSpec> dissipators;
};

enum class Geometry { boundary, bulk, custom };
const char* geometry_name(Geometry g);

struct Dissipator {
  Mat K;           // full-dimension embedded operator
  int site;        // 1-based site the local operator acts on
  double strength; // multiplies gamma
  std::string op;
};

struct SystemModel {
  int L = 1;
  int d0 = 2;
  Mat H;
  std::vector<Dissipator> lindblads;
  double gamma = 1.0;
  Geometry geometry = Geometry::custom;

  int dim() const { return static_cast<int>(H.rows()); }
};

// Local operator library (open-boundary chains of d0-level sites).
Mat local_sigma_minus();
Mat local_sigma_plus();
Mat local_sigma_z();
Mat local_sigma_x();
Mat local_ladder(int d0);

// Embeds a local operator covering `n_local_sites` consecutive sites starting
// at `first_site` (1-based) into the full d0^L space.
Mat embed_at(const Mat& local, int first_site, int n_local_sites, int L, int d0);

ModelConfig parse_config(const nlohmann::json& doc);
ModelConfig load_config(const std::string& path);

// Expands a scan template for lattice length L: "sites": "bonds"/"all" on
// Hamiltonian terms, "site": "first"/"last"/"all" on dissipators.
nlohmann::json instantiate_template(const nlohmann::json& tpl, int L);

Mat build_hamiltonian(const ModelConfig& cfg);
std::vector<Dissipator> build_lindblads(const ModelConfig& cfg);
SystemModel build_model(const ModelConfig& cfg);
SystemModel load_model(const std::string& path);

}  // namespace mixtime
