#include <doctest.h>

#include "lcd/cost.hpp"
#include "lcd/examples.hpp"

using namespace lcd;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("flat cost is the Euclidean distance") {
  const auto flat = examples::get_example("flat_euclidean");
  const MinimizingExtremal e = connect(*flat.model, v2(0, 0), v2(3, 4));
  CHECK(e.action == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(e.ell == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(e.endpoint_residual <= 1e-9);
  CHECK(segment_cost(*flat.model, v2(0, 0), v2(3, 4)) == doctest::Approx(5.0));
  CHECK(cost(*flat.model, v2(1, 1), v2(1, 1)) == 0.0);
}

TEST_CASE("round sphere cost is the great-circle distance") {
  const auto sp = examples::get_example("round_sphere_chart", {{"n", 2}});
  for (auto [a, b] : {std::pair{v2(0, 0), v2(0.5, 0.2)}, std::pair{v2(-0.4, 0.3), v2(0.6, -0.5)}}) {
    const double c = cost(*sp.model, a, b);
    CHECK(c == doctest::Approx(examples::sphere_distance(a, b, 1)).epsilon(1e-7));
  }
}

TEST_CASE("horocycle cost against the transcription oracle") {
  const auto hz = examples::get_example("hyperbolic_horocycle");
  const Vec a = v2(0, 1), b = v2(1, 2);
  const double c = cost(*hz.model, a, b);
  TranscriptionSpec ts;
  ts.nodes = 64;
  const TranscriptionResult o = brute_force_cost_oracle(*hz.model, a, b, ts);
  CHECK(c <= o.value + 1e-6);
  CHECK(o.value - c <= 1e-3);
  // Richardson limit of the transcription levels (0.28381690, 0.28379981 at 32, 64 nodes).
  CHECK(c == doctest::Approx(0.2837941).epsilon(1e-6));
}

TEST_CASE("triangle inequality on random triples") {
  const auto hz = examples::get_example("hyperbolic_horocycle");
  Rng rng(4);
  MultistartSpec spec;
  spec.chord_first = true;
  for (int i = 0; i < 10; ++i) {
    const Vec x = v2(rng.uniform(-1, 1), rng.uniform(1, 2));
    const Vec y = x + 0.3 * rng.unit_vector(2), z = x + 0.3 * rng.unit_vector(2);
    CHECK(cost(*hz.model, x, z, spec) <=
          cost(*hz.model, x, y, spec) + cost(*hz.model, y, z, spec) + 1e-8);
  }
  CHECK(loop_probe(*hz.model, 20, 1).pass);
}

TEST_CASE("model volumes") {
  CHECK(model_volume(0.0, 2.0, 1.5) == doctest::Approx(1.125));
  CHECK(model_volume(0.0, 3.0, 2.0) == doctest::Approx(4.0));
  CHECK(model_volume(1.0, 2.0, kPi / 2) == doctest::Approx(1.0));
  CHECK(model_volume(-1.0, 2.0, 1.0) == doctest::Approx(std::cosh(1.0) - 1.0));
}

TEST_CASE("forward balls") {
  const auto flat = examples::get_example("flat_euclidean");
  const BallEstimate b = forward_ball_volume(*flat.model, v2(0, 0), 1.0);
  CHECK_FALSE(b.truncated);
  CHECK(b.volume == doctest::Approx(kPi).epsilon(0.03));

  const auto hz = examples::get_example("hyperbolic_horocycle");
  const BallEstimate h = forward_ball_volume(*hz.model, v2(0, 2), 0.5);
  CHECK(h.volume > 0.0);
  CHECK_FALSE(h.truncated);

  // Balls reaching the chart edge are flagged.
  CHECK(forward_ball_volume(*hz.model, v2(0, 0.4), 1.0).truncated);
}

TEST_CASE("Bishop-Gromov") {
  const auto flat = examples::get_example("flat_euclidean");
  const auto ok = bishop_gromov_check(*flat.model, v2(0, 0), 0.0, 2.0, {0.5, 1.0, 1.5});
  CHECK(ok.pass);
  CHECK(std::abs(ok.worst_margin) <= 0.03);
  // Claiming positive curvature for flat space is rejected.
  CHECK_FALSE(bishop_gromov_check(*flat.model, v2(0, 0), 3.0, 2.0, {0.5, 1.0, 1.5}).pass);
}

TEST_CASE("diameter probes") {
  const auto sp = examples::get_example("contact_sphere");
  const DiameterReport r = diameter_probe(*sp.model, 2.0, 3.0, 5, sp.sample_measure, 1);
  CHECK(r.bound == doctest::Approx(kPi));
  CHECK(r.max_ell <= r.bound + 1e-6);
  CHECK(r.pass);

  const auto flat = examples::get_example("flat_euclidean", {{"box", 1.0}});
  const DiameterReport f = diameter_probe(*flat.model, 1.0, 3.0, 5,
                                          [](Rng& rng) { return v2(rng.uniform(-1, 1), rng.uniform(-1, 1)); }, 1);
  CHECK(f.chart_limited);
}
