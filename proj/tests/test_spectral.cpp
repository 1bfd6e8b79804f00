#include <doctest.h>

#include <algorithm>
#include <random>

#include "mixtime/liouvillian.hpp"
#include "mixtime/spectral.hpp"
#include "support.hpp"

using namespace mixtime;

namespace {

LindbladSpectrum spectrum_of(const nlohmann::json& doc) {
  return decompose(build_generator(testutil::model_from(doc)));
}

std::vector<double> sorted_rates(const LindbladSpectrum& s) {
  std::vector<double> b;
  for (const auto& r : s.records()) b.push_back(r.beta);
  std::sort(b.begin(), b.end());
  return b;
}

}  // namespace

TEST_CASE("amplitude damping spectrum is 0, 1, 1, 2") {
  const LindbladSpectrum s = spectrum_of(testutil::amp_damp_doc());
  const auto b = sorted_rates(s);
  REQUIRE(b.size() == 4);
  CHECK(std::abs(b[0] - 0.0) <= 1e-9);
  CHECK(std::abs(b[1] - 1.0) <= 1e-9);
  CHECK(std::abs(b[2] - 1.0) <= 1e-9);
  CHECK(std::abs(b[3] - 2.0) <= 1e-9);
  CHECK(s.gap() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.steady_dim() == 1);
  REQUIRE(s.has_unique_steady());

  // Steady state is the vacuum.
  const Mat& sig0 = s.sigma0().matrix();
  CHECK(std::abs(sig0(0, 0) - Cplx(1.0, 0.0)) <= 1e-9);
  CHECK(std::abs(sig0(1, 1)) <= 1e-9);
  CHECK(std::abs(sig0(0, 1)) <= 1e-9);
}

TEST_CASE("dephasing spectrum has a two-dimensional steady manifold") {
  const LindbladSpectrum s = spectrum_of(testutil::dephasing_doc());
  const auto b = sorted_rates(s);
  REQUIRE(b.size() == 4);
  CHECK(std::abs(b[0]) <= 1e-9);
  CHECK(std::abs(b[1]) <= 1e-9);
  CHECK(std::abs(b[2] - 4.0) <= 1e-9);
  CHECK(std::abs(b[3] - 4.0) <= 1e-9);
  CHECK(s.steady_dim() == 2);
  CHECK_FALSE(s.has_unique_steady());
  CHECK_THROWS_AS(s.sigma0(), DegenerateSteadyManifold);
  CHECK(s.steady_basis().size() == 2);
}

TEST_CASE("thermal qubit gap follows the closed form") {
  const double g = 0.8, s_down = 0.7, s_up = 0.3;
  const LindbladSpectrum s =
      spectrum_of(testutil::thermal_qubit_doc(g, s_down, s_up));
  // Coherences decay at gamma (s_down + s_up), populations at twice that.
  const double unit = g * (s_down + s_up);
  const auto b = sorted_rates(s);
  CHECK(std::abs(b[0]) <= 1e-9);
  CHECK(b[1] == doctest::Approx(unit).epsilon(1e-9));
  CHECK(b[2] == doctest::Approx(unit).epsilon(1e-9));
  CHECK(b[3] == doctest::Approx(2.0 * unit).epsilon(1e-9));
  CHECK(s.gap() == doctest::Approx(unit).epsilon(1e-9));

  // Steady populations follow detailed balance.
  const Mat& sig0 = s.sigma0().matrix();
  CHECK(std::abs(sig0(0, 0) - Cplx(s_down / (s_down + s_up), 0.0)) <= 1e-9);
  CHECK(std::abs(sig0(1, 1) - Cplx(s_up / (s_down + s_up), 0.0)) <= 1e-9);
}

TEST_CASE("records are sorted by decay rate and flagged consistently") {
  std::mt19937_64 rng(31u);
  for (int rep = 0; rep < 6; ++rep) {
    const int n = 3 + static_cast<int>(rng() % 3);
    SystemModel m = testutil::random_model(n, rng);
    const LindbladSpectrum s = decompose(build_generator(m));
    REQUIRE(s.doubled_dim() == n * n);
    double prev = -1.0;
    int steady_count = 0;
    for (const auto& r : s.records()) {
      CHECK(r.beta >= prev - 1e-12);
      prev = r.beta;
      CHECK(r.beta >= -10.0 * s.zero_tol());
      if (r.is_steady) {
        ++steady_count;
        CHECK(std::abs(r.alpha) <= s.zero_tol());
      }
      // Modes are Frobenius-normalized.
      CHECK(r.mode.norm() == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(steady_count == s.steady_dim());
    CHECK(steady_count >= 1);
    if (s.has_decaying_mode()) CHECK(s.slowest().beta == doctest::Approx(s.gap()));
  }
}

TEST_CASE("mode trace norms never exceed sqrt(N)") {
  std::mt19937_64 rng(32u);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    SystemModel m = testutil::random_model(n, rng, 1 + static_cast<int>(rng() % 2));
    const LindbladSpectrum s = decompose(build_generator(m));
    for (double tn : mode_trace_norms(s))
      CHECK(tn <= std::sqrt(static_cast<double>(n)) + 1e-8);
  }
}

TEST_CASE("expansion reconstructs the state") {
  std::mt19937_64 rng(33u);
  SystemModel m = testutil::random_model(4, rng);
  const LindbladSpectrum s = decompose(build_generator(m));
  const Mat rho = testutil::random_hermitian(4, rng);
  const CVec c = s.expand(rho);
  const Mat back = unvectorize(CVec(s.eigenvectors() * c));
  CHECK(max_abs(back - rho) <= 1e-8 * std::max(1.0, max_abs(rho)));
}

TEST_CASE("steady projection is idempotent and trace-one") {
  std::mt19937_64 rng(34u);
  SystemModel m = testutil::random_model(4, rng);
  const LindbladSpectrum s = decompose(build_generator(m));
  Mat rho = Mat::Zero(4, 4);
  rho(1, 1) = 0.4;
  rho(2, 2) = 0.6;
  const Mat p1 = s.steady_projection(rho);
  const Mat p2 = s.steady_projection(p1);
  CHECK(std::abs(p1.trace() - Cplx(1.0, 0.0)) <= 1e-9);
  CHECK(max_abs(p2 - p1) <= 1e-7);
  CHECK(is_hermitian(p1, 1e-9));
}

TEST_CASE("hermitized slowest mode is a unit-norm Hermitian operator") {
  std::mt19937_64 rng(35u);
  for (int rep = 0; rep < 5; ++rep) {
    SystemModel m = testutil::random_model(3, rng);
    const LindbladSpectrum s = decompose(build_generator(m));
    if (!s.has_decaying_mode()) continue;
    const Mat h = hermitize_slowest(s);
    CHECK(is_hermitian(h, 1e-8));
    CHECK(h.norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("amplitude damping slowest mode is the coherence") {
  const LindbladSpectrum s = spectrum_of(testutil::amp_damp_doc());
  const Mat h = hermitize_slowest(s);
  // (|0><1| + |1><0|) / sqrt(2) up to sign.
  CHECK(std::abs(h(0, 0)) <= 1e-9);
  CHECK(std::abs(h(1, 1)) <= 1e-9);
  CHECK(std::abs(std::abs(h(0, 1)) - 1.0 / std::sqrt(2.0)) <= 1e-9);
  CHECK(trace_norm(h) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("zero tolerance scales with the generator norm") {
  const SystemModel m = testutil::model_from(testutil::amp_damp_doc());
  const DoubledGenerator gen = build_generator(m);
  const LindbladSpectrum s = decompose(gen);
  CHECK(s.zero_tol() == doctest::Approx(1e-9 * std::max(1.0, gen.norm_fro)));
  CHECK(s.generator_norm() == doctest::Approx(gen.norm_fro));
}

TEST_CASE("generator matrix is only retained for defective spectra") {
  const LindbladSpectrum s = spectrum_of(testutil::amp_damp_doc());
  CHECK_FALSE(s.defective_flagged());
  CHECK_THROWS_AS(s.generator_matrix(), PreconditionError);
}
