#include <doctest.h>

#include "lcd/transport1d.hpp"

using namespace lcd;

namespace {

double gauss(double t, double m) { return std::exp(-0.5 * (t - m) * (t - m)) / std::sqrt(2 * kPi); }

}  // namespace

TEST_CASE("measures") {
  const Measure1D u = Measure1D::from_expression("1", 0, 2, 1000);
  CHECK(u.mass() == doctest::Approx(2.0));
  CHECK(u.cdf(0.5) == doctest::Approx(0.5));
  CHECK(u.quantile(1.5) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(u.density(3.0) == 0.0);
  CHECK(u.normalized().mass() == doctest::Approx(1.0));
  const Measure1D w = Measure1D::from_expression("exp(-a*t)", 0, 1, 2000, {{"a", 2.0}});
  CHECK(w.mass() == doctest::Approx((1 - std::exp(-2.0)) / 2).epsilon(1e-10));
}

TEST_CASE("monotone map between uniform laws is affine") {
  const Measure1D a = Measure1D::from_expression("1", 0, 1, 1000);
  const Measure1D b = Measure1D::from_expression("0.5", 2, 4, 1000);
  const TransportMap1D T = monotone_map(a, b);
  CHECK(T.orientation_ok);
  for (double s : {0.1, 0.37, 0.5, 0.9}) CHECK(T.at(s) == doctest::Approx(2 + 2 * s).epsilon(1e-9));
  CHECK(T.interpolant(0.5, 0.5) == doctest::Approx(1.75));
}

TEST_CASE("Gaussian interpolation stays Gaussian") {
  const Measure1D g0 = Measure1D::from_function([](double t) { return gauss(t, 0); }, -8, 12, 4000);
  const Measure1D g1 = Measure1D::from_function([](double t) { return gauss(t, 4); }, -8, 12, 4000);
  for (double l : {0.25, 0.5, 0.75}) {
    const Measure1D ml = interpolate(g0, g1, l);
    double err = 0.0;
    for (double t = -2.0; t <= 6.0; t += 0.25) err = std::max(err, std::abs(ml.density(t) - gauss(t, 4 * l)));
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("entropy") {
  const Measure1D ref = Measure1D::from_expression("1", 0, 1, 1000);
  CHECK(std::abs(entropy(ref, ref, kInf)) <= 1e-12);
  const Measure1D half = Measure1D::from_expression("2", 0, 0.5, 1000);
  CHECK(entropy(half, ref, kInf) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("distortion coefficients") {
  const auto zero = distortion(0.3, 1.0, 3.0, 0.0);
  CHECK(zero.sigma == 0.3);
  CHECK(zero.beta == 1.0);
  const auto flat = distortion(0.3, 0.0, 3.0, 2.0);
  CHECK(flat.sigma == 0.3);
  CHECK(flat.tau == 0.3);
  const auto pos = distortion(0.5, 1.0, 3.0, 1.0);
  const double th = 1.0 / std::sqrt(2.0);
  CHECK(pos.sigma == doctest::Approx(std::sin(0.5 * th) / std::sin(th)));
  CHECK(pos.tau == doctest::Approx(std::pow(0.5, 1.0 / 3) * std::pow(pos.sigma, 2.0 / 3)));
  CHECK(pos.beta == doctest::Approx(std::pow(pos.sigma / 0.5, 2)));
  CHECK(pos.beta > 1.0);
  CHECK(distortion(0.5, -1.0, 3.0, 1.0).beta < 1.0);
  CHECK(distortion(0.5, 1.0, 3.0, 5.0).infinite);
  CHECK(distortion(0.0, 1.0, 3.0, 1.0).beta == doctest::Approx(std::pow(th / std::sin(th), 2)));
  CHECK_THROWS_AS(distortion(1.5, 1.0, 3.0, 1.0), DomainError);
}

TEST_CASE("one-dimensional CD") {
  const Measure1D g = Measure1D::from_function([](double t) { return gauss(t, 0); }, -4, 4, 2000);
  CHECK(cd1d_check(g, 1.0, kInf).pass);
  CHECK_FALSE(cd1d_check(g, 1.2, kInf).pass);
  // sin^2 is the CD(2, 3) model density.
  const Measure1D s = Measure1D::from_expression("sin(t)^2", 0.01, kPi - 0.01, 4000);
  CHECK(cd1d_check(s, 2.0, 3.0, 1e-4).pass);
  CHECK_FALSE(cd1d_check(s, 2.1, 3.0, 1e-4).pass);
}

TEST_CASE("displacement convexity") {
  const Measure1D leb = Measure1D::from_expression("1", 0, 4, 2000);
  const Measure1D a = Measure1D::from_expression("1", 0.5, 1.5, 2000);
  const Measure1D b = Measure1D::from_expression("0.5", 2.0, 4.0, 2000);
  const ConvexityReport r = displacement_convexity_check(leb, a, b, 0.0, 2.0, {0.25, 0.5, 0.75});
  CHECK(r.pass);
  CHECK_FALSE(r.vacuous);

  // A density with a dip is not CD(0, N).
  const Measure1D dip = Measure1D::from_expression("1 - 0.9*exp(-20*(t-2)^2)", 0, 4, 2000);
  const Measure1D c = Measure1D::from_expression("1", 1.0, 1.5, 2000);
  const Measure1D d = Measure1D::from_expression("1", 2.5, 3.0, 2000);
  CHECK_FALSE(displacement_convexity_check(dip, c, d, 0.0, kInf, {0.5}).pass);
}

TEST_CASE("oriented Borell-Brascamp-Lieb") {
  auto h0 = [](double t) { return t >= 0 && t <= 1 ? 1.0 : 0.0; };
  auto h1 = [](double t) { return t >= 2 && t <= 3 ? 1.0 : 0.0; };
  auto hl = [](double t) { return t >= 1 && t <= 2 ? 1.0 : 0.0; };
  const BBLReport r = oriented_bbl_check(h0, h1, hl, 0.0, 0.5, -1, 4, 2000, 100);
  CHECK(r.tail_hypothesis);
  CHECK(r.pass);
  CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-3));
  // Too small a middle function violates the pointwise hypothesis: the check is vacuous.
  auto weak = [](double t) { return t >= 1 && t <= 2 ? 0.5 : 0.0; };
  const BBLReport w = oriented_bbl_check(h0, h1, weak, 0.0, 0.5, -1, 4, 2000, 100);
  CHECK_FALSE(w.mean_hypothesis);
  CHECK(w.vacuous);
  // Reversed orientation breaks the tail hypothesis.
  CHECK_FALSE(oriented_bbl_check(h1, h0, hl, 0.0, 0.5, -1, 4, 2000, 100).tail_hypothesis);
}

TEST_CASE("Phi-entropy and Poincare in one dimension") {
  const Measure1D g =
      Measure1D::from_function([](double t) { return gauss(t, 0); }, -9, 9, 6000).normalized();
  // f = t saturates the Gaussian Poincare inequality.
  const auto sq = phi_entropy_check(g, [](double t) { return t; }, [](double) { return 1.0; },
                                    PhiSpec{PhiKind::Square}, 1.0, 1e-6);
  CHECK(sq.pass);
  CHECK(sq.lhs == doctest::Approx(1.0).epsilon(1e-6));
  const auto en = phi_entropy_check(g, [](double t) { return std::exp(0.3 * t); },
                                    [](double t) { return 0.3 * std::exp(0.3 * t); },
                                    PhiSpec{PhiKind::Entropy}, 1.0, 1e-6);
  CHECK(en.pass);
  CHECK(en.lhs == doctest::Approx(en.rhs).epsilon(1e-5));

  const Measure1D u = Measure1D::from_expression("1", 0, 1, 4000);
  const auto eq = poincare_1d_check(u, [](double t) { return std::cos(kPi * t); },
                                    [](double t) { return -kPi * std::sin(kPi * t); }, 1e-8);
  CHECK(eq.pass);
  CHECK(eq.lhs == doctest::Approx(eq.rhs).epsilon(1e-8));
  CHECK(poincare_1d_check(u, [](double t) { return t * t; }, [](double t) { return 2 * t; }).pass);
}
