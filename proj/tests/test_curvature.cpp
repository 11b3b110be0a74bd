#include <doctest.h>

#include "lcd/curvature.hpp"
#include "lcd/examples.hpp"

using namespace lcd;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("psi vanishes for Riemannian volume") {
  Rng rng(1);
  for (const char* name : {"round_sphere_chart", "hyperbolic_horocycle", "contact_sphere"}) {
    const auto ex = examples::get_example(name);
    for (int i = 0; i < 10; ++i) {
      const PhasePoint q = random_sm_point(*ex.model, rng);
      CHECK(std::abs(psi_tm(*ex.model, q)) <= 1e-10);
      const SigmaPsi s = sigma_psi(*ex.model, q);
      CHECK(std::abs(s.d1) <= 1e-6);
    }
  }
}

TEST_CASE("psi derivatives along flat lines with an exponential weight") {
  const auto flat = examples::get_example("flat_euclidean");
  const ReweightedModel m(flat.model, std::make_shared<FunctionField>(
                                          [](const Vec& x) { return std::exp(-x(0)); }));
  const PhasePoint q{v2(0.3, -0.2), v2(0.6, 0.8)};
  CHECK(psi_tm(m, q) == doctest::Approx(0.3).epsilon(1e-12));
  const SigmaPsi s = sigma_psi(m, q);
  CHECK(s.d1 == doctest::Approx(0.6).epsilon(1e-7));
  CHECK(std::abs(s.d2) <= 1e-5);
}

TEST_CASE("round sphere and contact sphere spot values") {
  const auto sp = examples::get_example("round_sphere_chart", {{"n", 2}});
  Rng rng(5);
  for (int i = 0; i < 10; ++i)
    CHECK(ricci_weighted(*sp.model, random_sm_point(*sp.model, rng), 2.0) ==
          doctest::Approx(1.0).epsilon(1e-6));

  // A direction killed by the contact form: Ric = 2 + 2 s^2 (d + 1) = 3 at s = 1/2.
  const auto cs = examples::get_example("contact_sphere", {{"s", 0.5}});
  Vec x(3);
  x << 0.2, -0.1, 0.3;
  const Vec eta = examples::contact_form(x, 1);
  Vec u = Vec::Unit(3, 0) - eta.normalized() * eta.normalized()(0);
  const PhasePoint q = indicatrix_sample(*cs.model, x, u);
  REQUIRE(std::abs(eta.dot(q.v)) < 1e-12);
  CHECK(ricci_weighted(*cs.model, q, 3.0) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("mechanical Ricci against the closed form") {
  const auto mech = examples::get_example("mechanical", {{"U", "1 + 0.2*x1^2 - 0.1*x1*x2 + 0.05*x2^3"}});
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const PhasePoint q = random_sm_point(*mech.model, rng);
    for (double N : {kInf, 4.0}) {
      const double ric = ricci_weighted(*mech.model, q, N);
      CHECK(std::abs(ric - mech.ricci(q, N)) <= 1e-4 * std::max(1.0, std::abs(ric)));
    }
  }
}

TEST_CASE("admissible N") {
  CHECK_THROWS_AS(check_N(2, 1.5), InvalidN);
  CHECK_THROWS_AS(check_N(3, 0.0), InvalidN);
  CHECK_NOTHROW(check_N(2, 2.0));
  CHECK_NOTHROW(check_N(2, kInf));
  const auto mech = examples::get_example("mechanical");
  Rng rng(1);
  CHECK_THROWS_AS(ricci_weighted(*mech.model, random_sm_point(*mech.model, rng), 2.0), InvalidN);
}

TEST_CASE("sampled CD verdicts") {
  SamplingSpec spec;
  spec.grid = 2;
  spec.directions = 8;
  const auto cs = examples::get_example("contact_sphere", {{"s", 0.5}});
  CHECK(cd_verdict(*cs.model, 0.5, 3.0, spec).pass);
  const CDVerdict bad = cd_verdict(*cs.model, 0.6, 3.0, spec);
  CHECK_FALSE(bad.pass);
  CHECK(bad.min_margin < -0.05);

  const auto flat = examples::get_example("flat_euclidean");
  CHECK(cd_verdict(*flat.model, 0.0, kInf, spec).pass);
  CHECK_FALSE(cd_verdict(*flat.model, 0.1, kInf, spec).pass);
}

TEST_CASE("direct and Bochner Ricci agree") {
  Rng rng(12);
  for (const char* name : {"hyperbolic_horocycle", "contact_sphere", "complex_hyperbolic_siegel",
                           "q_homogeneous"}) {
    const auto ex = examples::get_example(name);
    for (int i = 0; i < 5; ++i) {
      const PhasePoint q = random_sm_point(*ex.model, rng);
      const double a = ricci_weighted(*ex.model, q, kInf);
      CHECK_MESSAGE(std::abs(a - ricci_bochner_oracle(*ex.model, q, kInf)) <= 1e-3, name);
    }
  }
}
