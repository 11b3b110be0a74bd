#include <doctest.h>

#include <set>

#include "lcd/curvature.hpp"
#include "lcd/examples.hpp"

using namespace lcd;

TEST_CASE("registry") {
  const auto list = examples::list_examples();
  std::set<std::string> names;
  for (const auto& e : list) names.insert(e.name);
  CHECK(names == std::set<std::string>{"flat_euclidean", "round_sphere_chart", "hyperbolic_horocycle",
                                        "complex_hyperbolic_siegel", "contact_sphere", "mechanical",
                                        "many_body", "q_homogeneous"});
  for (const auto& e : list) {
    const auto ex = examples::get_example(e.name);
    CHECK(ex.model);
    CHECK(ex.model->chart().contains(0.5 * (ex.model->chart().lower + ex.model->chart().upper)));
  }
  CHECK_THROWS_AS(examples::get_example("nope"), DomainError);
  CHECK_THROWS(examples::get_example("contact_sphere", {{"bogus", 1}}));
  CHECK_THROWS_AS(examples::get_example("contact_sphere", {{"s", 1.0}}), DomainError);
}

TEST_CASE("stereographic helpers") {
  Vec x(3);
  x << 0.3, -0.2, 0.5;
  for (int pole : {1, -1}) {
    const Vec X = examples::stereo_embed(x, pole);
    CHECK(X.norm() == doctest::Approx(1.0));
    CHECK((examples::stereo_chart(X, pole) - x).norm() <= 1e-12);
  }
  CHECK(examples::sphere_distance(x, x, 1) == doctest::Approx(0.0));
  Vec a(2), b(2);
  a << 0, 1;
  b << 0, std::exp(1.0);
  CHECK(examples::hyperbolic_distance(a, b) == doctest::Approx(1.0));
}

TEST_CASE("the contact form is a unit form tangent to the sphere") {
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    Vec x(3);
    for (int a = 0; a < 3; ++a) x(a) = rng.uniform(-1, 1);
    const Vec eta = examples::contact_form(x, 1);
    const Mat g = examples::round_metric(x);
    CHECK(eta.dot(g.inverse() * eta) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("oracles match the curvature pipeline") {
  Rng rng(2);
  for (const auto& info : examples::list_examples()) {
    const auto ex = examples::get_example(info.name);
    if (!ex.ricci) continue;
    for (int i = 0; i < 5; ++i) {
      const PhasePoint q = random_sm_point(*ex.model, rng);
      const double N = ex.n_admissible ? double(ex.model->dim()) : kInf;
      const double got = ricci_weighted(*ex.model, q, N);
      CHECK_MESSAGE(std::abs(got - ex.ricci(q, N)) <= 1e-3 * std::max(1.0, std::abs(got)), info.name);
    }
  }
}

TEST_CASE("known CD pairs hold on samples") {
  SamplingSpec spec;
  spec.grid = 2;
  spec.directions = 8;
  for (const char* name : {"hyperbolic_horocycle", "contact_sphere", "q_homogeneous"}) {
    const auto ex = examples::get_example(name);
    for (auto [K, N] : ex.known_cd) CHECK_MESSAGE(cd_verdict(*ex.model, K, N, spec).pass, name);
  }
}

TEST_CASE("many-body chart") {
  const auto ex = examples::get_example("many_body", {{"d", 3}, {"k", 2}});
  CHECK(ex.model->dim() == 6);
  CHECK(ex.known_cd.size() == 1);
  CHECK_FALSE(ex.notes.empty());
  CHECK_THROWS_AS(examples::get_example("many_body", {{"k", 3}, {"masses", {1.0, 2.0}}}), DomainError);
}
