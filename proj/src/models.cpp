#include "mixtime/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace mixtime {

namespace {

using nlohmann::json;

long long int_pow(long long base, int exp) {
  long long out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > kKronMaxDim / base) throw DimOverflow("lattice dimension exceeds the supported cap");
    out *= base;
  }
  return out;
}

[[noreturn]] void bad(const std::string& pointer, const std::string& what) {
  throw SchemaError(pointer, what);
}

void require_keys(const json& obj, const std::string& pointer, const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) bad(pointer + "/" + it.key(), "unknown key");
}

double number_at(const json& obj, const std::string& pointer, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) bad(pointer + "/" + key, "expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) bad(pointer + "/" + key, "expected a finite number");
  return x;
}

int int_at(const json& obj, const std::string& pointer, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) bad(pointer + "/" + key, "expected an integer");
  return v.get<int>();
}

// Entries are [re, im] pairs in row-major order; the matrix must be square.
Mat parse_matrix(const json& v, const std::string& pointer) {
  if (!v.is_array() || v.empty()) bad(pointer, "expected a non-empty array of [re, im] pairs");
  const auto len = static_cast<Eigen::Index>(v.size());
  auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
  if (n * n != len) bad(pointer, "entry count must be a perfect square");
  Mat out(n, n);
  for (Eigen::Index i = 0; i < len; ++i) {
    const auto& e = v[static_cast<std::size_t>(i)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      bad(pointer + "/" + std::to_string(i), "expected an [re, im] pair");
    out(i / n, i % n) = Cplx(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

void check_site(int site, int L, const std::string& where) {
  if (site < 1 || site > L)
    throw SiteOutOfRange(where + ": site " + std::to_string(site) + " outside [1, " +
                         std::to_string(L) + "]");
}

HamTermSpec parse_ham_term(const json& item, const std::string& pointer, const ModelConfig& cfg) {
  if (!item.is_object()) bad(pointer, "expected an object");
  require_keys(item, pointer, {"term", "coupling", "sites", "matrix"});
  if (!item.contains("term") || !item.at("term").is_string()) bad(pointer + "/term", "expected a string");
  HamTermSpec t;
  t.term = item.at("term").get<std::string>();

  if (!item.contains("sites") || !item.at("sites").is_array())
    bad(pointer + "/sites", "expected an array of sites");
  for (std::size_t i = 0; i < item.at("sites").size(); ++i) {
    const auto& s = item.at("sites")[i];
    if (!s.is_number_integer()) bad(pointer + "/sites/" + std::to_string(i), "expected an integer");
    t.sites.push_back(s.get<int>());
    check_site(t.sites.back(), cfg.L, pointer + "/sites/" + std::to_string(i));
  }

  t.coupling = item.contains("coupling") ? number_at(item, pointer, "coupling") : 1.0;

  if (t.term == "custom") {
    if (!item.contains("matrix")) bad(pointer + "/matrix", "custom terms require a matrix");
    t.custom = parse_matrix(item.at("matrix"), pointer + "/matrix");
    if (t.sites.empty()) bad(pointer + "/sites", "custom terms need at least one site");
    for (std::size_t i = 1; i < t.sites.size(); ++i)
      if (t.sites[i] != t.sites[i - 1] + 1)
        bad(pointer + "/sites", "custom terms act on consecutive ascending sites");
    long long want = int_pow(cfg.d0, static_cast<int>(t.sites.size()));
    if (t.custom.rows() != want)
      bad(pointer + "/matrix", "dimension " + std::to_string(t.custom.rows()) +
                                   " does not match d0^sites = " + std::to_string(want));
    if (!is_hermitian(t.custom)) bad(pointer + "/matrix", "custom Hamiltonian terms must be Hermitian");
  } else if (t.term == "zz" || t.term == "xx") {
    if (t.sites.size() != 2 || t.sites[0] == t.sites[1])
      bad(pointer + "/sites", t.term + " couples two distinct sites");
    if (cfg.d0 != 2) throw UnknownTerm("term '" + t.term + "' requires d0 = 2");
    if (item.contains("matrix")) bad(pointer + "/matrix", "only custom terms carry a matrix");
  } else if (t.term == "x" || t.term == "z") {
    if (t.sites.size() != 1) bad(pointer + "/sites", "field terms act on one site");
    if (cfg.d0 != 2) throw UnknownTerm("term '" + t.term + "' requires d0 = 2");
    if (item.contains("matrix")) bad(pointer + "/matrix", "only custom terms carry a matrix");
  } else if (t.term == "number") {
    if (t.sites.size() != 1) bad(pointer + "/sites", "number terms act on one site");
    if (item.contains("matrix")) bad(pointer + "/matrix", "only custom terms carry a matrix");
  } else {
    throw UnknownTerm("unknown Hamiltonian term '" + t.term + "'");
  }
  return t;
}

DissipatorSpec parse_dissipator(const json& item, const std::string& pointer, const ModelConfig& cfg) {
  if (!item.is_object()) bad(pointer, "expected an object");
  require_keys(item, pointer, {"op", "site", "strength", "matrix"});
  if (!item.contains("op") || !item.at("op").is_string()) bad(pointer + "/op", "expected a string");
  DissipatorSpec d;
  d.op = item.at("op").get<std::string>();
  if (!item.contains("site")) bad(pointer + "/site", "dissipators name a site");
  d.site = int_at(item, pointer, "site");
  check_site(d.site, cfg.L, pointer + "/site");
  d.strength = item.contains("strength") ? number_at(item, pointer, "strength") : 1.0;
  if (d.strength < 0) bad(pointer + "/strength", "strength must be nonnegative");

  static const std::set<std::string> qubit_ops = {"sigma_minus", "sigma_plus", "sigma_z", "sigma_x"};
  if (d.op == "custom") {
    if (!item.contains("matrix")) bad(pointer + "/matrix", "custom dissipators require a matrix");
    d.custom = parse_matrix(item.at("matrix"), pointer + "/matrix");
    if (d.custom.rows() != cfg.d0)
      bad(pointer + "/matrix", "custom dissipators are local d0 x d0 matrices");
  } else if (qubit_ops.count(d.op)) {
    if (cfg.d0 != 2) throw UnknownOperator("operator '" + d.op + "' requires d0 = 2");
    if (item.contains("matrix")) bad(pointer + "/matrix", "only custom dissipators carry a matrix");
  } else if (d.op == "ladder") {
    if (item.contains("matrix")) bad(pointer + "/matrix", "only custom dissipators carry a matrix");
  } else {
    throw UnknownOperator("unknown dissipator operator '" + d.op + "'");
  }
  return d;
}

// Canonical term order makes assembled matrices independent of document order.
bool ham_term_less(const HamTermSpec& a, const HamTermSpec& b) {
  if (a.term != b.term) return a.term < b.term;
  if (a.sites != b.sites) return a.sites < b.sites;
  if (a.coupling != b.coupling) return a.coupling < b.coupling;
  for (Eigen::Index i = 0; i < std::min(a.custom.size(), b.custom.size()); ++i) {
    Cplx x = a.custom(i), y = b.custom(i);
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return a.custom.size() < b.custom.size();
}

bool dissipator_less(const DissipatorSpec& a, const DissipatorSpec& b) {
  if (a.op != b.op) return a.op < b.op;
  if (a.site != b.site) return a.site < b.site;
  if (a.strength != b.strength) return a.strength < b.strength;
  for (Eigen::Index i = 0; i < std::min(a.custom.size(), b.custom.size()); ++i) {
    Cplx x = a.custom(i), y = b.custom(i);
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return a.custom.size() < b.custom.size();
}

}  // namespace

const char* geometry_name(Geometry g) {
  switch (g) {
    case Geometry::boundary: return "boundary";
    case Geometry::bulk: return "bulk";
    default: return "custom";
  }
}

Mat local_sigma_minus() {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

Mat local_sigma_plus() {
  Mat m = Mat::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

Mat local_sigma_z() {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

Mat local_sigma_x() {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

Mat local_ladder(int d0) {
  Mat m = Mat::Zero(d0, d0);
  for (int i = 0; i < d0; ++i) m(i, i) = static_cast<double>(i);
  return m;
}

Mat embed_at(const Mat& local, int first_site, int n_local_sites, int L, int d0) {
  long long left = int_pow(d0, first_site - 1);
  long long right = int_pow(d0, L - first_site - n_local_sites + 1);
  Mat ileft = Mat::Identity(left, left);
  Mat iright = Mat::Identity(right, right);
  return kron(kron(ileft, local), iright);
}

ModelConfig parse_config(const json& doc) {
  if (!doc.is_object()) bad("", "config must be a JSON object");
  require_keys(doc, "", {"lattice", "hamiltonian", "dissipators", "gamma"});

  ModelConfig cfg;
  if (!doc.contains("lattice") || !doc.at("lattice").is_object())
    bad("/lattice", "expected an object with l and d0");
  const auto& lat = doc.at("lattice");
  require_keys(lat, "/lattice", {"l", "d0"});
  if (!lat.contains("l")) bad("/lattice/l", "lattice length is required");
  cfg.L = int_at(lat, "/lattice", "l");
  if (cfg.L < 1) bad("/lattice/l", "lattice length must be at least 1");
  cfg.d0 = lat.contains("d0") ? int_at(lat, "/lattice", "d0") : 2;
  if (cfg.d0 < 2) bad("/lattice/d0", "local dimension must be at least 2");
  int_pow(cfg.d0, cfg.L);  // dimension cap check

  if (doc.contains("gamma")) {
    cfg.gamma = number_at(doc, "", "gamma");
    if (cfg.gamma < 0) bad("/gamma", "gamma must be nonnegative");
  }

  if (doc.contains("hamiltonian")) {
    if (!doc.at("hamiltonian").is_array()) bad("/hamiltonian", "expected an array of terms");
    const auto& arr = doc.at("hamiltonian");
    for (std::size_t i = 0; i < arr.size(); ++i)
      cfg.hamiltonian.push_back(parse_ham_term(arr[i], "/hamiltonian/" + std::to_string(i), cfg));
  }
  if (doc.contains("dissipators")) {
    if (!doc.at("dissipators").is_array()) bad("/dissipators", "expected an array of dissipators");
    const auto& arr = doc.at("dissipators");
    for (std::size_t i = 0; i < arr.size(); ++i)
      cfg.dissipators.push_back(parse_dissipator(arr[i], "/dissipators/" + std::to_string(i), cfg));
  }

  std::sort(cfg.hamiltonian.begin(), cfg.hamiltonian.end(), ham_term_less);
  std::sort(cfg.dissipators.begin(), cfg.dissipators.end(), dissipator_less);
  return cfg;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config file " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

nlohmann::json instantiate_template(const json& tpl, int L) {
  if (!tpl.is_object()) bad("", "template must be a JSON object");
  json out = tpl;
  if (!out.contains("lattice") || !out["lattice"].is_object()) out["lattice"] = json::object();
  out["lattice"]["l"] = L;

  if (out.contains("hamiltonian") && out["hamiltonian"].is_array()) {
    json expanded = json::array();
    for (const auto& item : out["hamiltonian"]) {
      if (item.is_object() && item.contains("sites") && item.at("sites").is_string()) {
        std::string token = item.at("sites").get<std::string>();
        if (token == "bonds") {
          for (int i = 1; i < L; ++i) {
            json copy = item;
            copy["sites"] = json::array({i, i + 1});
            expanded.push_back(copy);
          }
        } else if (token == "all") {
          for (int i = 1; i <= L; ++i) {
            json copy = item;
            copy["sites"] = json::array({i});
            expanded.push_back(copy);
          }
        } else {
          bad("/hamiltonian/sites", "unknown site token '" + token + "'");
        }
      } else {
        expanded.push_back(item);
      }
    }
    out["hamiltonian"] = expanded;
  }

  if (out.contains("dissipators") && out["dissipators"].is_array()) {
    json expanded = json::array();
    for (const auto& item : out["dissipators"]) {
      if (item.is_object() && item.contains("site") && item.at("site").is_string()) {
        std::string token = item.at("site").get<std::string>();
        if (token == "first") {
          json copy = item;
          copy["site"] = 1;
          expanded.push_back(copy);
        } else if (token == "last") {
          json copy = item;
          copy["site"] = L;
          expanded.push_back(copy);
        } else if (token == "all") {
          for (int i = 1; i <= L; ++i) {
            json copy = item;
            copy["site"] = i;
            expanded.push_back(copy);
          }
        } else {
          bad("/dissipators/site", "unknown site token '" + token + "'");
        }
      } else {
        expanded.push_back(item);
      }
    }
    out["dissipators"] = expanded;
  }
  return out;
}

Mat build_hamiltonian(const ModelConfig& cfg) {
  const auto dim = static_cast<Eigen::Index>(int_pow(cfg.d0, cfg.L));
  Mat H = Mat::Zero(dim, dim);
  for (const auto& t : cfg.hamiltonian) {
    if (t.term == "zz" || t.term == "xx") {
      const Mat& local = t.term == "zz" ? local_sigma_z() : local_sigma_x();
      Mat a = embed_at(local, t.sites[0], 1, cfg.L, cfg.d0);
      Mat b = embed_at(local, t.sites[1], 1, cfg.L, cfg.d0);
      H += t.coupling * (a * b);
    } else if (t.term == "x") {
      H += t.coupling * embed_at(local_sigma_x(), t.sites[0], 1, cfg.L, cfg.d0);
    } else if (t.term == "z") {
      H += t.coupling * embed_at(local_sigma_z(), t.sites[0], 1, cfg.L, cfg.d0);
    } else if (t.term == "number") {
      H += t.coupling * embed_at(local_ladder(cfg.d0), t.sites[0], 1, cfg.L, cfg.d0);
    } else {  // custom, validated at parse time
      H += t.coupling *
           embed_at(t.custom, t.sites[0], static_cast<int>(t.sites.size()), cfg.L, cfg.d0);
    }
  }
  require_hermitian(H, "assembled Hamiltonian");
  return H;
}

std::vector<Dissipator> build_lindblads(const ModelConfig& cfg) {
  std::vector<Dissipator> out;
  for (const auto& d : cfg.dissipators) {
    Mat local;
    if (d.op == "sigma_minus") local = local_sigma_minus();
    else if (d.op == "sigma_plus") local = local_sigma_plus();
    else if (d.op == "sigma_z") local = local_sigma_z();
    else if (d.op == "sigma_x") local = local_sigma_x();
    else if (d.op == "ladder") local = local_ladder(cfg.d0);
    else local = d.custom;
    out.push_back({embed_at(local, d.site, 1, cfg.L, cfg.d0), d.site, d.strength, d.op});
  }
  return out;
}

SystemModel build_model(const ModelConfig& cfg) {
  SystemModel m;
  m.L = cfg.L;
  m.d0 = cfg.d0;
  m.gamma = cfg.gamma;
  m.H = build_hamiltonian(cfg);
  m.lindblads = build_lindblads(cfg);

  std::set<int> sites;
  for (const auto& d : m.lindblads) sites.insert(d.site);
  bool covers_all = static_cast<int>(sites.size()) == m.L;
  bool boundary_only = !sites.empty() &&
                       std::all_of(sites.begin(), sites.end(),
                                   [&](int s) { return s == 1 || s == m.L; });
  if (covers_all && !sites.empty()) m.geometry = Geometry::bulk;
  else if (boundary_only) m.geometry = Geometry::boundary;
  else m.geometry = Geometry::custom;
  return m;
}

SystemModel load_model(const std::string& path) { return build_model(load_config(path)); }

}  // namespace mixtime
