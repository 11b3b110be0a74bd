#include <doctest.h>

#include "lcd/examples.hpp"
#include "lcd/model.hpp"

using namespace lcd;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// L = |v|^2/2 + U - eta(v) on the flat plane, all given by expressions.
ModelPtr flat_classical(const std::string& U, const std::string& e1, const std::string& e2) {
  auto f = std::make_shared<ExprClassicalFields>(2, std::vector<std::string>{"1", "0", "0", "1"},
                                                 U, std::vector<std::string>{e1, e2});
  return std::make_shared<ClassicalLagrangian>(Chart::box(2, -3, 3), f,
                                               std::make_shared<ConstantField>(1.0), "classical");
}

std::vector<examples::ExampleModel> all_builtins() {
  std::vector<examples::ExampleModel> out;
  for (const auto& e : examples::list_examples()) out.push_back(examples::get_example(e.name));
  return out;
}

}  // namespace

TEST_CASE("charts validate their bounds") {
  CHECK_THROWS_AS(Chart::box(0, -1, 1), DomainError);
  CHECK_THROWS_AS(Chart::box(2, 1, -1), DomainError);
  const Chart c = Chart::box(2, -1, 1);
  CHECK(c.contains(v2(0.5, -0.5)));
  CHECK_FALSE(c.contains(v2(1.5, 0)));
  CHECK(c.volume() == doctest::Approx(4.0));
}

TEST_CASE("vertical Hessian") {
  const auto flat = examples::get_example("flat_euclidean");
  CHECK((vertical_hessian(*flat.model, {v2(0.3, -1), v2(1, 2)}) - Mat::Identity(2, 2)).norm() <
        1e-12);
  const auto hz = examples::get_example("hyperbolic_horocycle");
  const Mat g = vertical_hessian(*hz.model, {v2(0, 2), v2(1, 0)});
  CHECK(g(0, 0) == doctest::Approx(0.25));
  CHECK(g(1, 1) == doctest::Approx(0.25));
  CHECK(std::abs(g(0, 1)) < 1e-14);
}

TEST_CASE("analytic jets agree with finite differences on every built-in") {
  Rng rng(11);
  for (const auto& ex : all_builtins()) {
    const LagrangianModel& m = *ex.model;
    for (int k = 0; k < 5; ++k) {
      const PhasePoint q = random_sm_point(m, rng);
      const Jet j = m.jet(q.x, q.v);
      const Mat H = symmetrized(fd_hessian([&](const Vec& v) { return m.value(q.x, v); }, q.v));
      CHECK_MESSAGE((H - j.Lvv).cwiseAbs().maxCoeff() <= 1e-6, ex.name);
      const Vec gx = fd_gradient([&](const Vec& x) { return m.value(x, q.v); }, q.x);
      CHECK_MESSAGE((gx - j.Lx).cwiseAbs().maxCoeff() <= 1e-6, ex.name);
    }
  }
}

TEST_CASE("Legendre transform") {
  const auto flat = examples::get_example("flat_euclidean");
  CHECK((legendre_inverse(*flat.model, {v2(0, 0), v2(1, 0)}).p - v2(1, 0)).norm() < 1e-14);
  CHECK((legendre_forward(*flat.model, {v2(0, 0), v2(3, 4)}).v - v2(3, 4)).norm() < 1e-10);

  const ModelPtr mag = flat_classical("0.5", "0.5", "0");
  CHECK((legendre_inverse(*mag, {v2(0.2, 0.1), v2(0, 1)}).p - v2(-0.5, 1)).norm() < 1e-12);
  // v = p# + eta#
  CHECK((legendre_forward(*mag, {v2(0.2, 0.1), v2(1, 2)}).v - v2(1.5, 2)).norm() < 1e-10);

  const auto qh = examples::get_example("q_homogeneous", {{"q", 4}});
  CHECK((legendre_forward(*qh.model, {v2(0, 0), v2(8, 0)}).v - v2(2, 0)).norm() < 1e-9);

  Rng rng(5);
  for (const auto& ex : all_builtins()) {
    for (int k = 0; k < 10; ++k) {
      const PhasePoint q = random_sm_point(*ex.model, rng);
      const CovectorPoint c = legendre_inverse(*ex.model, q);
      const PhasePoint back = legendre_forward(*ex.model, c);
      CHECK_MESSAGE((back.v - q.v).cwiseAbs().maxCoeff() <= 1e-10, ex.name);
      CHECK_MESSAGE(std::abs(hamiltonian(*ex.model, c) - energy(*ex.model, q)) <= 1e-10, ex.name);
    }
  }
}

TEST_CASE("Hamiltonian and energy spot values") {
  const auto flat = examples::get_example("flat_euclidean");
  CHECK(std::abs(hamiltonian(*flat.model, {v2(0, 0), v2(1, 0)})) < 1e-12);
  const ModelPtr plain = flat_classical("0.5", "0", "0");
  CHECK(std::abs(hamiltonian(*plain, {v2(0.4, 0.4), v2(1, 0)})) < 1e-12);
  CHECK(std::abs(energy(*flat.model, {v2(1, 1), v2(0.6, 0.8)})) < 1e-14);

  const auto mech = examples::get_example("mechanical", {{"U", "1 + x1/4"}});
  const Vec x = v2(0.8, -0.2), v = v2(0.3, 1.1);
  CHECK(energy(*mech.model, {x, v}) == doctest::Approx(v.squaredNorm() / 2 - (1 + 0.2)));
}

TEST_CASE("energy increases along rays") {
  Rng rng(8);
  int rays = 0;
  for (const auto& ex : all_builtins()) {
    for (int k = 0; k < 13 && rays < 100; ++k, ++rays) {
      const Vec x = ex.model->chart().sample(rng);
      const Vec u = rng.unit_vector(ex.model->dim());
      double prev = energy(*ex.model, {x, 1e-3 * u});
      for (double r = 0.1; r <= 3.0; r += 0.1) {
        const double e = energy(*ex.model, {x, r * u});
        CHECK(e > prev);
        prev = e;
      }
    }
  }
  CHECK(rays == 100);
}

TEST_CASE("indicatrix radius") {
  const auto flat = examples::get_example("flat_euclidean");
  CHECK(indicatrix_sample(*flat.model, v2(1, 2), v2(3, 4)).v.norm() == doctest::Approx(1.0));
  const auto mech = examples::get_example("mechanical", {{"U", "2"}});
  CHECK(indicatrix_sample(*mech.model, v2(0, 0), v2(1, 1)).v.norm() == doctest::Approx(2.0));
  const auto hz = examples::get_example("hyperbolic_horocycle");
  const PhasePoint q = indicatrix_sample(*hz.model, v2(0, 1), v2(1, 0));
  CHECK((q.v - v2(1, 0)).norm() < 1e-12);
  // E(x, 0) >= 0 leaves no zero-energy level
  const auto neg = examples::get_example("mechanical", {{"U", "-1"}});
  CHECK_THROWS_AS(indicatrix_sample(*neg.model, v2(0, 0), v2(1, 0)), SupercriticalityViolation);
}

TEST_CASE("expression Lagrangians and Tonelli checks") {
  const ModelPtr e = std::make_shared<ExpressionLagrangian>(
      Chart::box(2, -2, 2), "(v1^2 + v2^2)/(2*(1 + x1^2)) + 1/2 - a*v2",
      std::make_shared<ConstantField>(1.0), std::map<std::string, double>{{"a", 0.3}});
  const Jet j = e->jet(v2(0.5, 0), v2(1, -1));
  CHECK(j.Lvv(0, 0) == doctest::Approx(1 / 1.25).epsilon(1e-6));
  CHECK(j.Lv(1) == doctest::Approx(-1 / 1.25 - 0.3).epsilon(1e-6));
  const ModelPtr bad = std::make_shared<ExpressionLagrangian>(
      Chart::box(1, -1, 1), "-v1^2/2 + 1", std::make_shared<ConstantField>(1.0));
  CHECK_THROWS_AS(tonelli_factor(bad->jet(Vec::Zero(1), Vec::Ones(1)).Lvv), TonelliViolation);
}

TEST_CASE("densities") {
  const auto hz = examples::get_example("hyperbolic_horocycle");
  CHECK(hz.model->density(v2(0, 2)) == doctest::Approx(0.25));
  CHECK((hz.model->grad_log_density(v2(0, 2)) - v2(0, -1)).norm() < 1e-8);
  const ExprField f("exp(-x1^2/2)", 1);
  CHECK(f.value(Vec::Ones(1)) == doctest::Approx(std::exp(-0.5)));
  CHECK(f.gradient(Vec::Ones(1))(0) == doctest::Approx(-std::exp(-0.5)).epsilon(1e-7));
}
