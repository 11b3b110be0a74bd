#include <doctest.h>

#include "lcd/examples.hpp"
#include "lcd/mc_inequalities.hpp"

using namespace lcd;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("region measures") {
  const auto hz = examples::get_example("hyperbolic_horocycle");
  const RegionSpec disk = metric_ball_region(*hz.model, v2(0, 1), 0.5, hz.distance);
  CHECK(region_measure(*hz.model, disk) ==
        doctest::Approx(2 * kPi * (std::cosh(0.5) - 1)).epsilon(1e-3));
  CHECK(disk.contains(v2(0, 1.2)));
  CHECK_FALSE(disk.contains(v2(0, 2)));

  const auto sp = examples::get_example("round_sphere_chart", {{"n", 2}});
  const RegionSpec cap = metric_ball_region(*sp.model, v2(0, 0), 0.8, sp.distance);
  CHECK(region_measure(*sp.model, cap) == doctest::Approx(2 * kPi * (1 - std::cos(0.8))).epsilon(1e-3));

  const auto cs = examples::get_example("contact_sphere");
  Vec c = Vec::Zero(3);
  const RegionSpec cap3 = metric_ball_region(*cs.model, c, 0.3, cs.distance);
  CHECK(region_measure(*cs.model, cap3) ==
        doctest::Approx(2 * kPi * (0.3 - std::sin(0.6) / 2)).epsilon(3e-3));

  const auto flat = examples::get_example("flat_euclidean");
  CHECK(region_measure(*flat.model, box_region(*flat.model, v2(0, 0), v2(2, 3))) ==
        doctest::Approx(6.0));
  CHECK_THROWS_AS(box_region(*flat.model, v2(0, 0), v2(20, 1)), DomainError);
}

TEST_CASE("region samplers stay inside") {
  const auto hz = examples::get_example("hyperbolic_horocycle");
  const RegionSpec disk = metric_ball_region(*hz.model, v2(0, 1), 0.5, hz.distance);
  const Sampler s = region_sampler(*hz.model, disk);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) CHECK(disk.contains(s(rng)));
}

TEST_CASE("flat Brunn-Minkowski") {
  const auto flat = examples::get_example("flat_euclidean");
  const RegionSpec a = box_region(*flat.model, v2(-2, 0), v2(-1, 1));
  const RegionSpec b = box_region(*flat.model, v2(1, 0), v2(2, 1));
  BMSpec spec;
  spec.pairs.pairs = 4000;
  spec.resolution = 32;  // enough pairs per cell for the coverage estimate to saturate
  const BMReport r = brunn_minkowski_check(*flat.model, a, b, 0.5, 0.0, 2.0, spec);
  CHECK(r.pass);
  CHECK(r.bound == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.estimate <= 1.0 + 1e-6);
  CHECK(r.failed == 0);

  // The midpoint set of two boxes is the middle box.
  MidpointSpec ms;
  ms.pairs = 500;
  const MidpointCloud cloud = midpoint_set(*flat.model, a, b, 0.5, ms);
  for (const Vec& p : cloud.points) {
    CHECK(std::abs(p(0)) <= 0.5 + 1e-6);
    CHECK(p(1) >= -1e-6);
    CHECK(p(1) <= 1 + 1e-6);
  }
}

TEST_CASE("coverage estimate grows with the number of pairs") {
  const auto hz = examples::get_example("hyperbolic_horocycle");
  const RegionSpec a = metric_ball_region(*hz.model, v2(-2, 1), 0.5, hz.distance);
  const RegionSpec b = metric_ball_region(*hz.model, v2(2, 1), 0.5, hz.distance);
  double prev = 0.0;
  for (int pairs : {250, 1000, 4000}) {
    MidpointSpec ms;
    ms.pairs = pairs;
    const double est = measure_lower_estimate(*hz.model, midpoint_set(*hz.model, a, b, 0.5, ms), 128).measure;
    CHECK(est >= prev);
    prev = est;
  }
}

TEST_CASE("dual norm bound E*") {
  const auto flat = examples::get_example("flat_euclidean");
  CHECK(*e_star_closed_form(*flat.model, v2(0, 0), v2(3, 4)) == doctest::Approx(5.0));
  CHECK(e_star(*flat.model, v2(0, 0), v2(3, 4)) == doctest::Approx(5.0).epsilon(1e-6));

  const auto hz = examples::get_example("hyperbolic_horocycle");
  const Vec x = v2(0.5, 2.0), p = v2(1.0, -0.5);
  CHECK(e_star(*hz.model, x, p) == doctest::Approx(*e_star_closed_form(*hz.model, x, p)).epsilon(1e-6));

  const auto qh = examples::get_example("q_homogeneous");
  CHECK_FALSE(e_star_closed_form(*qh.model, v2(0, 0), v2(1, 0)).has_value());
  // The indicatrix is a round sphere here, so E* is its radius.
  const double r = e_star(*qh.model, v2(0, 0), v2(1, 0));
  const PhasePoint q = indicatrix_sample(*qh.model, v2(0, 0), v2(1, 0));
  CHECK(r == doctest::Approx(q.v.norm()).epsilon(1e-6));
}

TEST_CASE("functional inequalities by Monte Carlo") {
  const auto sp = examples::get_example("contact_sphere");
  FunctionalSpec ls;
  ls.kind = FunctionalKind::LogSobolev;
  ls.K = 2.0;
  ls.samples = 5000;
  auto f = [](const Vec& x) {
    const Vec X = examples::stereo_embed(x, 1);
    return 1.0 + 0.5 * X(0) - 0.3 * X(1) * X(2);
  };
  const FunctionalReport r = functional_check(*sp.model, sp.sample_measure, f, {}, ls);
  CHECK(r.pass);
  CHECK(r.closed_form_estar);
  CHECK(r.lhs <= r.rhs * 1.05);

  FunctionalSpec pc;
  pc.kind = FunctionalKind::Poincare;
  pc.diameter = kPi;
  pc.samples = 5000;
  auto lin = [](const Vec& x) { return examples::stereo_embed(x, 1)(0); };
  const FunctionalReport p = functional_check(*sp.model, sp.sample_measure, lin, {}, pc);
  CHECK(p.pass);
  CHECK(p.constant == doctest::Approx(1.0));
}
