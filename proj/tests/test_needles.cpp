#include <doctest.h>

#include "lcd/curvature.hpp"
#include "lcd/examples.hpp"
#include "lcd/needles.hpp"

using namespace lcd;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("minimal seed on flat space") {
  const auto flat = examples::get_example("flat_euclidean");
  const PhasePoint q{v2(0.5, 0.5), v2(0.6, 0.8)};
  const HJSeed s = seed_construct(*flat.model, q, SeedMode::Minimal);
  CHECK(s.S.norm() <= 1e-12);
  CHECK(tangency_residual(*flat.model, s) <= 1e-12);
  CHECK((s.p - q.v).norm() <= 1e-12);
}

TEST_CASE("seeds are tangent to the flow") {
  Rng rng(3);
  for (const char* name : {"hyperbolic_horocycle", "contact_sphere", "mechanical"}) {
    const auto ex = examples::get_example(name);
    for (int i = 0; i < 5; ++i) {
      const PhasePoint q = random_sm_point(*ex.model, rng);
      for (SeedMode mode : {SeedMode::Minimal, SeedMode::Equality})
        CHECK_MESSAGE(tangency_residual(*ex.model, seed_construct(*ex.model, q, mode)) <= 1e-9,
                      name);
    }
  }
}

TEST_CASE("flat needle density is a power of an affine function") {
  const auto flat = examples::get_example("flat_euclidean", {{"n", 3}});
  Vec x = Vec::Zero(3), v = Vec::Unit(3, 0);
  const double c0 = 0.4;
  const HJSeed s = seed_with_c0(*flat.model, {x, v}, c0);
  const Needle nd = extract_needle(*flat.model, s, -1.0, 1.0, 1e-2);
  CHECK_FALSE(nd.truncated);
  REQUIRE(nd.t.size() == 201);
  CHECK(nd.t[nd.origin] == 0.0);
  double err = 0.0;
  for (std::size_t i = 0; i < nd.t.size(); ++i)
    err = std::max(err, std::abs(nd.rho[i] - std::pow(1.0 + c0 * nd.t[i], 2)));
  CHECK(err <= 1e-10);

  // A converging seed meets its focal point at t = 1/|c0|.
  const Needle focal = extract_needle(*flat.model, seed_with_c0(*flat.model, {x, v}, -0.5), 0.0,
                                      3.0, 1e-2);
  CHECK(focal.truncated);
  CHECK(focal.conjugate_time == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("needle CD residuals") {
  const auto hz = examples::get_example("hyperbolic_horocycle");
  Rng rng(17);
  for (int i = 0; i < 5; ++i) {
    const PhasePoint q = random_sm_point(*hz.model, rng);
    const Needle nd =
        extract_needle(*hz.model, seed_construct(*hz.model, q, SeedMode::Minimal), -0.1, 0.1, 2e-3);
    CHECK(needle_cd_check(nd, 0.0, 2.0).pass);
  }

  // Equality seeds: the residual at the origin equals K - Ric.
  const auto cs = examples::get_example("contact_sphere", {{"s", 0.5}});
  for (int i = 0; i < 5; ++i) {
    const PhasePoint q = random_sm_point(*cs.model, rng);
    const Needle nd = extract_needle(
        *cs.model, seed_construct(*cs.model, q, SeedMode::Equality, 3.0), -0.1, 0.1, 2e-3);
    const NeedleReport r = needle_cd_check(nd, 0.5, 3.0);
    CHECK(r.pass);
    CHECK(std::abs(r.residual_at_origin - (0.5 - ricci_weighted(*cs.model, q, 3.0))) <= 1e-3);
  }

  // K too large is detected along the needle.
  const PhasePoint q = random_sm_point(*cs.model, rng);
  const Needle nd =
      extract_needle(*cs.model, seed_construct(*cs.model, q, SeedMode::Equality, 3.0), -0.1, 0.1,
                     2e-3);
  CHECK_FALSE(needle_cd_check(nd, 10.0, 3.0).pass);
}
