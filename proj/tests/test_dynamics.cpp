#include <doctest.h>

#include "lcd/dynamics.hpp"
#include "lcd/examples.hpp"

using namespace lcd;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Christoffel contraction Gamma(v, v) of the conformal metric e^{2f} delta.
Vec conformal_christoffel(const Vec& df, const Vec& v) {
  return 2.0 * df.dot(v) * v - v.squaredNorm() * df;
}

// An interior phase point from the middle half of the chart.
PhasePoint inner_point(const LagrangianModel& m, Rng& rng) {
  const Chart& c = m.chart();
  Vec x(m.dim());
  for (int a = 0; a < m.dim(); ++a)
    x(a) = 0.5 * (c.lower(a) + c.upper(a)) + rng.uniform(-0.25, 0.25) * (c.upper(a) - c.lower(a));
  return indicatrix_sample(m, x, rng.unit_vector(m.dim()));
}

}  // namespace

TEST_CASE("semispray spot values") {
  const auto flat = examples::get_example("flat_euclidean");
  CHECK(semispray(*flat.model, {v2(1, 2), v2(0.6, 0.8)}).norm() < 1e-12);
  const auto mech = examples::get_example("mechanical", {{"U", "1 + x1"}});
  CHECK((semispray(*mech.model, {v2(0.1, 0.2), v2(0.5, 0.5)}) - v2(1, 0)).norm() < 1e-8);
}

TEST_CASE("round sphere semispray is minus the Christoffel contraction") {
  const auto sp = examples::get_example("round_sphere_chart", {{"n", 2}});
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const PhasePoint q = random_sm_point(*sp.model, rng);
    const Vec df = -2.0 * q.x / (1.0 + q.x.squaredNorm());
    const Vec a = semispray(*sp.model, q);
    CHECK((a + conformal_christoffel(df, q.v)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("flows") {
  const auto flat = examples::get_example("flat_euclidean");
  const Trajectory tr = el_flow(*flat.model, {v2(0, 0), v2(1, 0)}, 2.0, 1e-2);
  CHECK((tr.x.back() - v2(2, 0)).norm() < 1e-12);
  CHECK(tr.t.back() == doctest::Approx(2.0));

  // Unit-speed orbits of this magnetic field are horocycles: from (0, 2) heading in -x1 the
  // orbit is the circle of radius 1 about (0, 1).
  const auto hz = examples::get_example("hyperbolic_horocycle");
  const PhasePoint q = indicatrix_sample(*hz.model, v2(0, 2), v2(-1, 0));
  const Trajectory h = el_flow(*hz.model, q, 2.0, 1e-3);
  REQUIRE_FALSE(h.left_chart);
  CHECK(h.max_energy_drift() <= 1e-8);
  double dev = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) dev = std::max(dev, std::abs((h.x[i] - v2(0, 1)).norm() - 1.0));
  CHECK(dev <= 1e-8);
  CHECK(h.x.back()(0) < -0.5);
}

TEST_CASE("great circles on the contact sphere at s = 0") {
  const auto ex = examples::get_example("contact_sphere", {{"d", 1}, {"s", 0.0}});
  Rng rng(9);
  for (int k = 0; k < 5; ++k) {
    Vec x0(3);
    for (int a = 0; a < 3; ++a) x0(a) = rng.uniform(-0.5, 0.5);
    const PhasePoint q = indicatrix_sample(*ex.model, x0, rng.unit_vector(3));
    const Vec X0 = examples::stereo_embed(x0, 1);
    const Mat D = fd_jacobian([](const Vec& x) { return examples::stereo_embed(x, 1); }, x0);
    const Vec V0 = D * q.v;
    CHECK(V0.norm() == doctest::Approx(1.0).epsilon(1e-8));
    const Trajectory tr = el_flow(*ex.model, q, 1.0, 1e-3);
    double err = 0.0;
    for (std::size_t i = 0; i < tr.size(); i += 100) {
      const double t = tr.t[i];
      const Vec X = std::cos(t) * X0 + std::sin(t) * V0;
      err = std::max(err, (examples::stereo_chart(X, 1) - tr.x[i]).norm());
    }
    CHECK(err <= 1e-6);
  }
}

TEST_CASE("variational flow") {
  const auto flat = examples::get_example("flat_euclidean");
  const VariationalState vs =
      variational_flow(*flat.model, {v2(0, 0), v2(0.6, 0.8)}, 1.5, 1e-2, Mat::Identity(4, 4));
  Mat expect = Mat::Identity(4, 4);
  expect.topRightCorner(2, 2) = 1.5 * Mat::Identity(2, 2);
  CHECK((vs.J.back() - expect).norm() < 1e-12);

  // Symplectic defect on the horocycle model.
  const auto hz = examples::get_example("hyperbolic_horocycle");
  const PhasePoint q = indicatrix_sample(*hz.model, v2(0, 2), v2(-1, 0.2));
  const VariationalState h = variational_flow(*hz.model, q, 2.0, 1e-3, Mat::Identity(4, 4));
  REQUIRE_FALSE(h.base.left_chart);
  const Mat W = symplectic_matrix(2);
  CHECK((h.J.back().transpose() * W * h.J.back() - W).norm() <= 1e-5);
}

TEST_CASE("variational flow against bump differences") {
  Rng rng(21);
  for (const char* name : {"hyperbolic_horocycle", "contact_sphere", "complex_hyperbolic_siegel",
                           "q_homogeneous", "round_sphere_chart"}) {
    const auto ex = examples::get_example(name);
    const LagrangianModel& m = *ex.model;
    const int n = m.dim();
    const PhasePoint q = inner_point(m, rng);
    const double T = 0.5, h = 1e-3, bump = 1e-5;
    FlowOptions opt;
    opt.check_energy = false;
    const VariationalState vs = variational_flow(m, q, T, h, Mat::Identity(2 * n, 2 * n), opt);
    REQUIRE_FALSE(vs.base.left_chart);
    const CovectorPoint c = legendre_inverse(m, q);
    auto image = [&](const Vec& x, const Vec& p) {
      const PhasePoint s = flow_by(m, legendre_forward(m, {x, p}), T, h);
      const CovectorPoint e = legendre_inverse(m, s);
      Vec out(2 * n);
      out << e.x, e.p;
      return out;
    };
    for (int k = 0; k < 2 * n; ++k) {
      Vec dx = Vec::Zero(n), dp = Vec::Zero(n);
      (k < n ? dx(k) : dp(k - n)) = bump;
      const Vec col = (image(c.x + dx, c.p + dp) - image(c.x - dx, c.p - dp)) / (2 * bump);
      CHECK_MESSAGE((col - vs.J.back().col(k)).norm() <= 1e-4 * col.norm(), name);
    }
  }
}

TEST_CASE("connection coefficients") {
  const auto flat = examples::get_example("flat_euclidean");
  CHECK(connection_coeffs(*flat.model, {v2(0, 0), v2(0.6, 0.8)}).norm() < 1e-8);

  // Half-plane: Gamma_i^j = Chr^j_ik v^k - Y_i^j / 2, with Y read off the equation of motion
  // a = -Chr(v, v) + Y v (U is constant).
  const auto hz = examples::get_example("hyperbolic_horocycle");
  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    const PhasePoint q = random_sm_point(*hz.model, rng);
    const Vec df = v2(0, -1 / q.x(1));
    Mat chr(2, 2);  // chr(i, j) = Chr^j_ik v^k
    for (int a = 0; a < 2; ++a) {
      const Vec e = Vec::Unit(2, a);
      chr.row(a) = (df.dot(e) * q.v + df.dot(q.v) * e - e.dot(q.v) * df).transpose();
    }
    auto force = [&](const Vec& v) {
      return Vec(semispray(*hz.model, {q.x, v}) + conformal_christoffel(df, v));
    };
    const Mat Y = fd_jacobian(force, q.v).transpose();  // Y(i, j) = Y_i^j
    const Mat G = connection_coeffs(*hz.model, q);
    CHECK((G - (chr - 0.5 * Y)).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("trace of the connection is the derivative of the log volume") {
  Rng rng(6);
  for (const char* name : {"round_sphere_chart", "hyperbolic_horocycle", "contact_sphere",
                           "complex_hyperbolic_siegel"}) {
    const auto ex = examples::get_example(name);
    const LagrangianModel& m = *ex.model;
    for (int i = 0; i < 5; ++i) {
      const PhasePoint q = inner_point(m, rng);
      auto logvol = [&](double t) {
        const PhasePoint s = flow_by(m, q, t, 1e-4);
        return 0.5 * std::log(m.jet(s.x, s.v).Lvv.determinant());
      };
      const double h = 1e-3;
      const double d = d1_5pt(logvol(-2 * h), logvol(-h), logvol(h), logvol(2 * h), h);
      CHECK_MESSAGE(std::abs(connection_coeffs(m, q).trace() - d) <= 1e-6, name);
    }
  }
}

TEST_CASE("deviation") {
  Rng rng(4);
  const auto qh = examples::get_example("q_homogeneous");
  for (int i = 0; i < 5; ++i) {
    const Deviation d = deviation(*qh.model, random_sm_point(*qh.model, rng));
    CHECK(d.Lambda.norm() <= 1e-6);
  }
  // v orthogonal to grad U: parallel part vanishes, perpendicular part is |grad U|^2/|v|^2.
  const auto mech = examples::get_example("mechanical", {{"U", "1 + 0.3*x1"}});
  const PhasePoint q = indicatrix_sample(*mech.model, v2(0.2, 0.1), v2(0, 1));
  const Deviation d = deviation(*mech.model, q);
  CHECK(std::abs(d.par) <= 1e-8);
  CHECK(d.perp2 == doctest::Approx(0.09 / q.v.squaredNorm()).epsilon(1e-6));

  // Contact sphere: Lambda = Y v / 2 (U constant), with Y from the equation of motion.
  const auto cs = examples::get_example("contact_sphere", {{"s", 0.5}});
  for (int i = 0; i < 5; ++i) {
    const PhasePoint p = inner_point(*cs.model, rng);
    const Vec df = -2.0 * p.x / (1.0 + p.x.squaredNorm());
    const Vec Yv = semispray(*cs.model, p) + conformal_christoffel(df, p.v);
    CHECK((deviation(*cs.model, p).Lambda - 0.5 * Yv).cwiseAbs().maxCoeff() <= 1e-6);
  }
}
