#include "lcd/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>

#include "lcd/cost.hpp"
#include "lcd/curvature.hpp"
#include "lcd/examples.hpp"
#include "lcd/mc_inequalities.hpp"
#include "lcd/needles.hpp"
#include "lcd/transport1d.hpp"

namespace lcd {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Every registered example at its default parameters.
std::vector<examples::ExampleModel> builtins() {
  std::vector<examples::ExampleModel> out;
  for (const auto& info : examples::list_examples()) out.push_back(examples::get_example(info.name));
  return out;
}

examples::ExampleModel contact(double s) {
  return examples::get_example("contact_sphere", {{"d", 1}, {"s", s}});
}

// ---------------------------------------------------------------- 1

CriterionResult horocycle_flatness(std::uint64_t seed, bool quick) {
  CriterionResult r;
  const auto t0 = Clock::now();
  const auto ex = examples::get_example("hyperbolic_horocycle");
  Rng rng = Rng(seed).substream("c1");
  const int samples = quick ? 40 : 200;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const PhasePoint q = random_sm_point(*ex.model, rng);
    worst = std::max(worst, std::abs(ricci_weighted(*ex.model, q, 2.0)));
  }
  r.seconds = seconds_since(t0);
  r.pass = worst <= 1e-3 && r.seconds <= 60.0;
  r.detail = "max |Ric_{Vol,2}| = " + fmt("%.3e", worst) + " over " + std::to_string(samples) +
             " samples";
  r.data = {{"samples", samples}, {"max_abs_ricci", worst}};
  return r;
}

// ---------------------------------------------------------------- 2

CriterionResult contact_sphere_curvature(std::uint64_t seed, bool quick) {
  CriterionResult r;
  const auto t0 = Clock::now();
  const int samples = quick ? 20 : 100;
  bool formula_ok = true, flip_ok = true;
  std::string detail;
  json cases = json::array();
  for (double s : {0.0, 0.3, 0.7}) {
    const auto ex = contact(s);
    Rng rng = Rng(seed).substream("c2", static_cast<std::uint64_t>(s * 10));
    double err_printed = 0.0, err_corrected = 0.0;
    for (int i = 0; i < samples; ++i) {
      const PhasePoint q = random_sm_point(*ex.model, rng);
      const double ric = ricci_weighted(*ex.model, q, 3.0);
      const double vv = q.v.dot(examples::round_metric(q.x) * q.v);
      const double eta = examples::contact_form(q.x, 1).dot(q.v);
      err_printed = std::max(
          err_printed, std::abs(ric - examples::contact_sphere_ricci_printed(1, s, vv, eta)));
      err_corrected =
          std::max(err_corrected, std::abs(ric - examples::contact_sphere_ricci(1, s, vv, eta)));
    }
    const double K = 2.0 * (s - 1.0) * (s - 1.0);
    SamplingSpec sp;
    sp.seed = seed;
    const CDVerdict below = cd_verdict(*ex.model, K - 1e-2, 3.0, sp);
    const CDVerdict above = cd_verdict(*ex.model, K + 1e-2, 3.0, sp);
    const bool flip = below.pass && !above.pass;
    formula_ok = formula_ok && err_printed <= 1e-3;
    flip_ok = flip_ok && flip;
    detail += " s=" + fmt("%.1f", s) + ": printed " + fmt("%.2e", err_printed) + ", corrected " +
              fmt("%.2e", err_corrected) + ", flip " + (flip ? "yes" : "no") + ";";
    cases.push_back({{"s", s},
                     {"max_err_printed", err_printed},
                     {"max_err_corrected", err_corrected},
                     {"K", K},
                     {"min_margin_below", below.min_margin},
                     {"min_margin_above", above.min_margin},
                     {"threshold_flips", flip}});
  }
  r.seconds = seconds_since(t0);
  r.pass = formula_ok && flip_ok && r.seconds <= 300.0;
  r.detail = "max |numeric - formula|" + detail;
  r.data = {{"samples", samples}, {"cases", cases}};
  return r;
}

// ---------------------------------------------------------------- 3

CriterionResult cross_oracle(std::uint64_t seed, bool quick) {
  CriterionResult r;
  const auto t0 = Clock::now();
  const int samples = quick ? 10 : 50;
  double worst = 0.0;
  json models = json::array();
  for (const auto& ex : builtins()) {
    const int n = ex.model->dim();
    std::vector<double> Ns = {kInf};
    if (ex.n_admissible) Ns.insert(Ns.begin(), double(n));
    Rng rng = Rng(seed).substream("c3-" + ex.name);
    double w = 0.0;
    for (int i = 0; i < samples; ++i) {
      const PhasePoint q = random_sm_point(*ex.model, rng);
      for (double N : Ns)
        w = std::max(w, std::abs(ricci_weighted(*ex.model, q, N) -
                                 ricci_bochner_oracle(*ex.model, q, N)));
    }
    worst = std::max(worst, w);
    models.push_back({{"model", ex.name}, {"max_abs_diff", w}, {"N_n", ex.n_admissible}});
  }
  r.seconds = seconds_since(t0);
  r.pass = worst <= 1e-3 && r.seconds <= 300.0;
  r.detail = "max |ricci_weighted - bochner| = " + fmt("%.3e", worst) + " over 8 models";
  r.data = {{"samples", samples}, {"models", models}};
  return r;
}

// ---------------------------------------------------------------- 4

CriterionResult needle_equivalence(std::uint64_t seed, bool quick) {
  CriterionResult r;
  const auto t0 = Clock::now();
  const int seeds = quick ? 10 : 50;
  const double T = 0.1, h = 2e-3;
  double worst_res = -kInf, worst_gap = 0.0;
  int needles = 0, skipped = 0;
  json rows = json::array();
  for (const auto& ex : builtins()) {
    for (const auto& [K, N] : ex.known_cd) {
      SamplingSpec sp;
      sp.seed = seed;
      if (!cd_verdict(*ex.model, K, N, sp).pass) {
        rows.push_back({{"model", ex.name}, {"K", K}, {"N", N}, {"cd_verdict", false}});
        continue;
      }
      Rng rng = Rng(seed).substream("c4-" + ex.name, static_cast<std::uint64_t>(N));
      double res = -kInf, gap = 0.0;
      for (int i = 0; i < seeds; ++i) {
        const PhasePoint q = random_sm_point(*ex.model, rng);
        for (SeedMode mode : {SeedMode::Minimal, SeedMode::Equality}) {
          const HJSeed s = seed_construct(*ex.model, q, mode, N);
          const Needle nd = extract_needle(*ex.model, s, -T, T, h);
          if (nd.t.size() < 5 || nd.origin < 2 || nd.origin + 2 >= nd.t.size()) {
            ++skipped;
            continue;
          }
          const NeedleReport rep = needle_cd_check(nd, K, N);
          ++needles;
          res = std::max(res, rep.max_residual);
          if (mode == SeedMode::Equality) {
            const double ric = ricci_weighted(*ex.model, q, N);
            gap = std::max(gap, std::abs(rep.residual_at_origin - (K - ric)));
          }
        }
      }
      worst_res = std::max(worst_res, res);
      worst_gap = std::max(worst_gap, gap);
      rows.push_back({{"model", ex.name}, {"K", K}, {"N", N}, {"cd_verdict", true},
                      {"max_residual", res}, {"max_equality_gap", gap}});
    }
  }
  r.seconds = seconds_since(t0);
  r.pass = needles > 0 && worst_res <= 5e-4 && worst_gap <= 1e-3;
  r.detail = std::to_string(needles) + " needles: max residual " + fmt("%.3e", worst_res) +
             ", max equality gap " + fmt("%.3e", worst_gap) +
             (skipped ? ", " + std::to_string(skipped) + " too short" : "");
  r.data = {{"seeds_per_model", seeds}, {"window", T}, {"h", h}, {"needles", needles},
            {"skipped", skipped}, {"rows", rows}};
  return r;
}

// ---------------------------------------------------------------- 5

// (x, p) after flowing (x0, p0) for time T.
Vec flow_xp(const LagrangianModel& m, const Vec& x0, const Vec& p0, double T, double h) {
  const PhasePoint q0 = legendre_forward(m, {x0, p0});
  const PhasePoint q1 = flow_by(m, q0, T, h);
  const CovectorPoint c1 = legendre_inverse(m, q1);
  Vec out(2 * x0.size());
  out << c1.x, c1.p;
  return out;
}

CriterionResult conservation_numerics(std::uint64_t seed, bool quick) {
  CriterionResult r;
  const auto t0 = Clock::now();
  Rng rng = Rng(seed).substream("c5");
  std::vector<examples::ExampleModel> models = {
      examples::get_example("hyperbolic_horocycle"), contact(0.3),
      examples::get_example("mechanical", {{"box", 4.5}}),  // holds the zero-energy orbits
      examples::get_example("q_homogeneous")};
  if (quick) models.resize(2);

  double drift = 0.0, order = kInf, legendre = 0.0, var_err = 0.0, trace_err = 0.0;
  FlowOptions opt;
  opt.check_energy = false;
  int flows = 0;
  for (const auto& ex : models) {
    const LagrangianModel& m = *ex.model;
    const Chart& ch = m.chart();
    // Start points from the middle of the box.
    auto inner = [&]() {
      Vec x(m.dim());
      for (int a = 0; a < m.dim(); ++a) {
        const double mid = 0.5 * (ch.lower(a) + ch.upper(a)), w = ch.upper(a) - ch.lower(a);
        x(a) = mid + rng.uniform(-0.25, 0.25) * w;
      }
      return indicatrix_sample(m, x, rng.unit_vector(m.dim()));
    };
    // One whose flow stays in the chart for the full time.
    PhasePoint q;
    Trajectory tr;
    for (int k = 0; k < 200; ++k) {
      q = inner();
      tr = el_flow(m, q, 5.0, 1e-3, opt);
      if (!tr.left_chart) break;
    }
    if (tr.left_chart) continue;
    ++flows;
    drift = std::max(drift, tr.max_energy_drift());

    // Endpoint error against a fine reference at three step sizes; straight-line flows have
    // no truncation error to measure.
    const double T = 1.0;
    const Vec ref = flow_by(m, q, T, 1e-3).x;
    const double e1 = (flow_by(m, q, T, 0.1).x - ref).norm();
    const double e2 = (flow_by(m, q, T, 0.05).x - ref).norm();
    const double e3 = (flow_by(m, q, T, 0.025).x - ref).norm();
    if (e3 > 1e-11) order = std::min(order, 0.5 * (std::log2(e1 / e2) + std::log2(e2 / e3)));

    for (int i = 0; i < (quick ? 5 : 20); ++i) {
      const PhasePoint a = inner();
      const CovectorPoint c = legendre_inverse(m, a);
      const PhasePoint b = legendre_forward(m, c);
      legendre = std::max(legendre, (b.v - a.v).cwiseAbs().maxCoeff());
    }

    const int n = m.dim();
    const double Tv = 0.5, hv = 1e-3;
    const VariationalState vs = variational_flow(m, q, Tv, hv, Mat::Identity(2 * n, 2 * n), opt);
    if (vs.base.left_chart) throw NumericalError("variational check left the chart");
    const CovectorPoint c0 = legendre_inverse(m, q);
    Vec z0(2 * n);
    z0 << c0.x, c0.p;
    Mat Jfd(2 * n, 2 * n);
    const double d = 1e-5;
    for (int k = 0; k < 2 * n; ++k) {
      Vec zp = z0, zm = z0;
      zp(k) += d;
      zm(k) -= d;
      const Vec fp = flow_xp(m, zp.head(n), zp.tail(n), Tv, hv);
      const Vec fm = flow_xp(m, zm.head(n), zm.tail(n), Tv, hv);
      Jfd.col(k) = (fp - fm) / (2.0 * d);
    }
    var_err = std::max(var_err, (vs.J.back() - Jfd).norm() / Jfd.norm());
  }

  // Gamma_i^i = v^k d_k log sqrt(det g) for classical Lagrangians.
  for (const char* name : {"round_sphere_chart", "hyperbolic_horocycle", "contact_sphere"}) {
    const auto ex = examples::get_example(name, name == std::string("contact_sphere")
                                                    ? json{{"s", 0.3}}
                                                    : json::object());
    const LagrangianModel& m = *ex.model;
    for (int i = 0; i < (quick ? 3 : 10); ++i) {
      const PhasePoint q = random_sm_point(m, rng);
      const double tr = connection_coeffs(m, q).trace();
      auto logvol = [&](const Vec& x) {
        return 0.5 * std::log(m.jet(x, q.v).Lvv.determinant());
      };
      const Vec grad = fd_gradient(logvol, q.x);
      trace_err = std::max(trace_err, std::abs(tr - grad.dot(q.v)));
    }
  }
  r.seconds = seconds_since(t0);
  r.pass = flows == static_cast<int>(models.size()) && drift <= 1e-8 && order >= 3.5 && legendre <= 1e-9 && var_err <= 1e-4 &&
           trace_err <= 1e-6;
  r.detail = "drift " + fmt("%.2e", drift) + ", order " + fmt("%.2f", order) + ", legendre " +
             fmt("%.2e", legendre) + ", variational " + fmt("%.2e", var_err) + ", trace " +
             fmt("%.2e", trace_err);
  r.data = {{"energy_drift", drift},         {"convergence_order", order},
            {"legendre_roundtrip", legendre}, {"variational_rel_err", var_err},
            {"trace_identity_err", trace_err}};
  return r;
}

// ---------------------------------------------------------------- 6

CriterionResult cost_checks(std::uint64_t seed, bool quick) {
  CriterionResult r;
  const auto t0 = Clock::now();
  Rng rng = Rng(seed).substream("c6");
  MultistartSpec local;
  local.chord_first = true;

  const auto flat = examples::get_example("flat_euclidean");
  double flat_err = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Vec a = 3.0 * rng.unit_vector(2) * rng.uniform(), b = 3.0 * rng.unit_vector(2) * rng.uniform();
    flat_err = std::max(flat_err, std::abs(cost(*flat.model, a, b, local) - (a - b).norm()));
  }

  const int triples = quick ? 10 : 100;
  double slack = kInf;
  int tri_fail = 0;
  json tri = json::array();
  double loop_min = kInf;
  for (const auto& ex : builtins()) {
    const LagrangianModel& m = *ex.model;
    const Chart& c = m.chart();
    const double scale = 0.15 * (c.upper - c.lower).minCoeff();
    auto near = [&](const Vec& x) {
      for (int k = 0; k < 1000; ++k) {
        const Vec y = x + scale * rng.uniform() * rng.unit_vector(m.dim());
        if (c.contains(y)) return y;
      }
      return x;
    };
    double s_model = kInf;
    int unsolved = 0;
    for (int i = 0; i < triples; ++i) {
      // Keep the triangle well inside the box: extremals bow, and may not leave the chart.
      Vec x(m.dim());
      for (int a = 0; a < m.dim(); ++a)
        x(a) = rng.uniform(c.lower(a) + 2 * scale, c.upper(a) - 2 * scale);
      const Vec y = near(x), z = near(x);
      try {
        const double s = cost(m, x, y, local) + cost(m, y, z, local) - cost(m, x, z, local);
        s_model = std::min(s_model, s);
      } catch (const Error&) {
        ++unsolved;
      }
    }
    tri_fail += unsolved;
    slack = std::min(slack, s_model);
    const LoopProbeReport lp = loop_probe(m, quick ? 20 : 100, seed);
    loop_min = std::min(loop_min, lp.min_action);
    tri.push_back({{"model", ex.name}, {"min_slack", s_model}, {"unsolved", unsolved},
                   {"loop_min_action", lp.min_action}});
  }

  // Shooting against the discretized oracle.
  double excess = -kInf, gap = 0.0;
  json pairs = json::array();
  struct P {
    const char* name;
    json params;
    std::vector<double> a, b;
  };
  std::vector<P> cases = {{"hyperbolic_horocycle", json::object(), {0.0, 1.0}, {1.0, 2.0}},
                          {"hyperbolic_horocycle", json::object(), {0.0, 1.0}, {-1.0, 1.0}},
                          {"contact_sphere", {{"s", 0.5}}, {0.1, 0.0, 0.2}, {0.4, -0.3, 0.1}},
                          {"mechanical", json::object(), {-0.5, 0.2}, {0.7, -0.4}}};
  if (quick) cases.resize(1);
  for (const auto& pc : cases) {
    const auto ex = examples::get_example(pc.name, pc.params);
    const Vec a = Eigen::Map<const Vec>(pc.a.data(), pc.a.size());
    const Vec b = Eigen::Map<const Vec>(pc.b.data(), pc.b.size());
    const double cs = connect(*ex.model, a, b).action;
    const double co = brute_force_cost_oracle(*ex.model, a, b).value;
    excess = std::max(excess, cs - co);
    gap = std::max(gap, co - cs);
    pairs.push_back({{"model", pc.name}, {"shooting", cs}, {"oracle", co}});
  }
  r.seconds = seconds_since(t0);
  r.pass = flat_err <= 1e-6 && tri_fail == 0 && slack >= -1e-6 && excess <= 1e-6 && gap <= 1e-3 &&
           loop_min > 0.0;
  r.detail = "flat " + fmt("%.2e", flat_err) + ", min triangle slack " + fmt("%.2e", slack) +
             (tri_fail ? " (" + std::to_string(tri_fail) + " unsolved)" : "") +
             ", shooting-oracle " + fmt("%.2e", excess) + ", oracle gap " + fmt("%.2e", gap) +
             ", min loop action " + fmt("%.3e", loop_min);
  r.data = {{"flat_err", flat_err}, {"triples", triples}, {"unsolved", tri_fail},
            {"models", tri},        {"oracle_pairs", pairs}};
  return r;
}

// ---------------------------------------------------------------- 7

double gauss(double t, double mu, double s) {
  return std::exp(-(t - mu) * (t - mu) / (2 * s * s)) / std::sqrt(2 * kPi * s * s);
}

// Equal-mass atoms of a density by its own trapezoid cumulative on a fine grid.
std::vector<double> atoms(const Fn1& rho, double a, double b, int count) {
  const int cells = 200000;
  const double h = (b - a) / cells;
  std::vector<double> cum(cells + 1, 0.0);
  for (int i = 0; i < cells; ++i)
    cum[i + 1] = cum[i] + 0.5 * h * (rho(a + i * h) + rho(a + (i + 1) * h));
  std::vector<double> out;
  for (int k = 0; k < count; ++k) {
    const double target = (k + 0.5) / count * cum.back();
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    const int i = std::clamp(static_cast<int>(it - cum.begin()) - 1, 0, cells - 1);
    out.push_back(a + (i + (target - cum[i]) / (cum[i + 1] - cum[i])) * h);
  }
  std::sort(out.begin(), out.end());
  return out;
}

CriterionResult transport_checks(std::uint64_t, bool) {
  CriterionResult r;
  const auto t0 = Clock::now();

  const Fn1 r0 = [](double t) { return 1 + 0.5 * std::sin(3 * t); };
  const Fn1 r1 = [](double t) { return std::exp(-t); };
  const Measure1D m0 = Measure1D::from_function(r0, 0, 2).normalized();
  const Measure1D m1 = Measure1D::from_function(r1, 0.5, 3).normalized();
  const TransportMap1D T = monotone_map(m0, m1);
  const auto a0 = atoms(r0, 0, 2, 200), a1 = atoms(r1, 0.5, 3, 200);
  double map_cells = 0.0;
  for (int k = 0; k < 200; ++k)
    map_cells = std::max(map_cells, std::abs(T.at(a0[k]) - a1[k]) / m1.h());

  const Measure1D g0 = Measure1D::from_function([](double t) { return gauss(t, 0, 1); }, -9, 11);
  const Measure1D g1 = Measure1D::from_function([](double t) { return gauss(t, 2, 1); }, -9, 11);
  double interp = 0.0;
  for (double l : {0.25, 0.5, 0.75}) {
    const Measure1D ml = interpolate(g0, g1, l);
    for (int i = 0; i <= ml.cells(); ++i)
      interp = std::max(interp, std::abs(ml.samples()[i] - gauss(ml.node(i), 2 * l, 1)));
  }

  const std::vector<double> lambdas = {0, 0.1, 0.25, 0.5, 0.75, 0.9, 1};
  double positive = kInf;
  {
    const auto leb = Measure1D::from_function([](double) { return 1.0; }, 0, 1);
    const auto b0 = Measure1D::from_function([](double) { return 5.0; }, 0, 0.2);
    const auto b1 = Measure1D::from_function([](double) { return 10.0 / 3; }, 0.6, 0.9);
    positive = std::min(positive, displacement_convexity_check(leb, b0, b1, 0, 2, lambdas).worst_margin);
    const auto gr = Measure1D::from_function([](double t) { return gauss(t, 0, 1); }, -10, 10);
    const auto c0 = Measure1D::from_function([](double t) { return gauss(t, -1, 0.5); }, -4, 2);
    const auto c1 = Measure1D::from_function([](double t) { return gauss(t, 1.5, 0.8); }, -2, 6);
    positive = std::min(positive, displacement_convexity_check(gr, c0, c1, 1, kInf, lambdas).worst_margin);
    const double K = 1, N = 3, k = std::sqrt(K / (N - 1));
    const auto ms = Measure1D::from_function(
        [&](double t) { return std::pow(std::sin(t * k), N - 1); }, 0.05, kPi / k - 0.05);
    const auto d0 = Measure1D::from_function([](double) { return 1.0; }, 0.5, 1.0);
    const auto d1 = Measure1D::from_function([](double) { return 1.0; }, 2.5, 3.0);
    positive = std::min(positive, displacement_convexity_check(ms, d0, d1, K, N, lambdas).worst_margin);
  }
  // A density with a narrow dip is not CD(0,2); transporting across the dip shows it.
  const auto dip = Measure1D::from_function(
      [](double t) { return 1 - 0.9 * std::exp(-(t - 0.5) * (t - 0.5) / 0.002); }, 0, 1);
  const auto e0 = Measure1D::from_function([&](double t) { return dip.density(t); }, 0.3, 0.4);
  const auto e1 = Measure1D::from_function([&](double t) { return dip.density(t); }, 0.6, 0.7);
  const double negative = displacement_convexity_check(dip, e0, e1, 0, 2, {0.25, 0.5, 0.75}).worst_margin;

  double ident = 0.0;
  for (double t : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0})
    for (double K : {-2.0, -0.5, 0.0, 0.7, 2.0})
      for (double N : {1.5, 2.0, 3.0, 7.0, kInf})
        for (double ell : {0.0, 0.3, 1.1, 2.0}) {
          const DistortionTriple d = distortion(t, K, N, ell);
          if (d.infinite) continue;
          if (std::isinf(N)) {
            const double beta = ell == 0.0 ? 1.0 : std::exp(K * (1 - t * t) * ell * ell / 6.0);
            ident = std::max(ident, std::abs(d.beta - beta) / beta);
            continue;
          }
          if (K == 0.0 || ell == 0.0) ident = std::max(ident, std::abs(d.sigma - t));
          ident = std::max(ident, std::abs(d.tau - std::pow(t, 1 / N) * std::pow(d.sigma, (N - 1) / N)));
          if (t > 0.0)
            ident = std::max(ident, std::abs(d.beta - std::pow(d.sigma / t, N - 1)) / d.beta);
        }

  r.seconds = seconds_since(t0);
  r.pass = map_cells <= 2.0 && interp <= 1e-4 && positive >= -1e-4 && negative < 0.0 &&
           ident <= 1e-12;
  r.detail = "map " + fmt("%.2f", map_cells) + " cells, interpolation " + fmt("%.2e", interp) +
             ", convexity min " + fmt("%.2e", positive) + ", control " + fmt("%.2e", negative) +
             ", distortion " + fmt("%.1e", ident);
  r.data = {{"map_max_cells", map_cells}, {"interp_sup_err", interp},
            {"convexity_min_margin", positive}, {"negative_control_margin", negative},
            {"distortion_identity_err", ident}};
  return r;
}

// ---------------------------------------------------------------- 8

json bm_json(const BMReport& b) {
  return {{"mu0", b.mu0},         {"mu1", b.mu1},         {"estimate", b.estimate},
          {"bound", b.bound},     {"relative_margin", b.relative_margin},
          {"ell_min", b.ell_min}, {"ell_max", b.ell_max}, {"failed", b.failed},
          {"attempted", b.attempted}, {"cold_solves", b.cold_solves},
          {"resolution", b.resolution}, {"marked_cells", b.marked_cells},
          {"inconclusive", b.inconclusive}, {"pass", b.pass}};
}

CriterionResult brunn_minkowski(std::uint64_t seed, bool quick) {
  CriterionResult r;
  const auto t0 = Clock::now();
  BMSpec sp;
  sp.pairs.pairs = quick ? 5000 : 100000;
  sp.pairs.seed = seed;
  bool ok = true;
  json cases = json::array();
  std::string detail;
  auto run = [&](const std::string& label, const examples::ExampleModel& ex, const RegionSpec& A0,
                 const RegionSpec& A1, double N) {
    const auto t = Clock::now();
    const BMReport b = brunn_minkowski_check(*ex.model, A0, A1, 0.5, 0.0, N, sp);
    const double secs = seconds_since(t);
    ok = ok && b.pass && secs <= 600.0;
    detail += " " + label + " " + fmt("%+.2f%%", 100 * b.relative_margin) + " (" +
              fmt("%.0fs", secs) + ");";
    json j = bm_json(b);
    j["case"] = label;
    j["seconds"] = secs;
    cases.push_back(j);
  };
  {
    const auto ex = examples::get_example("flat_euclidean");
    Vec a(2), b(2), c(2), d(2);
    a << -4, 0;
    b << -3, 1;
    c << 3, 0;
    d << 4, 1;
    run("flat boxes", ex, box_region(*ex.model, a, b), box_region(*ex.model, c, d), 2.0);
  }
  {
    const auto ex = examples::get_example("hyperbolic_horocycle");
    Vec a(2), c(2);
    a << -2, 1;
    c << 2, 1;
    run("horocycle disks", ex, metric_ball_region(*ex.model, a, 0.5, ex.distance),
        metric_ball_region(*ex.model, c, 0.5, ex.distance), 2.0);
  }
  {
    const auto ex = contact(0.5);
    Vec a(3), c(3);
    a << -0.5, 0, 0;
    c << 0.5, 0, 0;
    run("sphere caps", ex, metric_ball_region(*ex.model, a, 0.3, ex.distance),
        metric_ball_region(*ex.model, c, 0.3, ex.distance), 3.0);
  }
  // Same seed, same numbers.
  bool reproducible = true;
  {
    const auto ex = examples::get_example("hyperbolic_horocycle");
    Vec a(2), c(2);
    a << -2, 1;
    c << 2, 1;
    const auto A0 = metric_ball_region(*ex.model, a, 0.5, ex.distance);
    const auto A1 = metric_ball_region(*ex.model, c, 0.5, ex.distance);
    MidpointSpec ms;
    ms.pairs = 2000;
    ms.seed = seed;
    const MidpointCloud u = midpoint_set(*ex.model, A0, A1, 0.5, ms);
    const MidpointCloud v = midpoint_set(*ex.model, A0, A1, 0.5, ms);
    reproducible = u.points.size() == v.points.size();
    for (std::size_t i = 0; reproducible && i < u.points.size(); ++i)
      reproducible = u.points[i] == v.points[i] && u.ell[i] == v.ell[i];
    reproducible = reproducible && measure_lower_estimate(*ex.model, u).measure ==
                                       measure_lower_estimate(*ex.model, v).measure;
  }
  r.seconds = seconds_since(t0);
  r.pass = ok && reproducible;
  r.detail = std::to_string(sp.pairs.pairs) + " pairs:" + detail +
             " rerun " + (reproducible ? "bit-identical" : "differs");
  r.data = {{"pairs", sp.pairs.pairs}, {"cases", cases}, {"reproducible", reproducible}};
  return r;
}

// ---------------------------------------------------------------- 9

CriterionResult myers_bishop_gromov(std::uint64_t seed, bool quick) {
  CriterionResult r;
  const auto t0 = Clock::now();
  const auto ex = contact(0.0);
  // Points of the closed hemisphere |x| <= 1 keep every pair inside the chart box. Every
  // second draw lands near the antipode of the previous one, so long extremals get tested.
  auto hemisphere = [prev = Vec(), odd = false](Rng& rng) mutable {
    Vec X = rng.unit_vector(4);
    if (odd) X = (-prev + 0.3 * X).normalized();
    X(3) = -std::abs(X(3));
    prev = X;
    odd = !odd;
    return examples::stereo_chart(X, 1);
  };
  const DiameterReport dr = diameter_probe(*ex.model, 2.0, 3.0, quick ? 5 : 30, hemisphere, seed);
  std::vector<double> radii;
  for (double rad = 0.3; rad < 2.75; rad += 0.3) radii.push_back(rad);
  BallSpec bs;
  bs.seed = seed;
  const BishopGromovReport bg =
      bishop_gromov_check(*ex.model, Vec::Zero(3), 2.0, 3.0, radii, bs, 0.03);
  r.seconds = seconds_since(t0);
  r.pass = dr.pass && dr.failures == 0 && bg.pass;
  r.detail = "max duration " + fmt("%.6f", dr.max_ell) + " vs " + fmt("%.6f", dr.bound) + " (" +
             std::to_string(dr.pairs) + " pairs, " + std::to_string(dr.failures) +
             " failed), BG worst margin " + fmt("%+.4f", bg.worst_margin);
  json balls = json::array();
  for (const auto& b : bg.balls)
    balls.push_back({{"radius", b.radius}, {"volume", b.volume}, {"truncated", b.truncated}});
  r.data = {{"max_ell", dr.max_ell}, {"bound", dr.bound}, {"pairs", dr.pairs},
            {"failures", dr.failures}, {"chart_limited", dr.chart_limited},
            {"bg_worst_margin", bg.worst_margin}, {"balls", balls}};
  return r;
}

// ---------------------------------------------------------------- 10

CriterionResult functional_inequalities(std::uint64_t seed, bool quick) {
  CriterionResult r;
  const auto t0 = Clock::now();
  Rng rng = Rng(seed).substream("c10");

  // Needles of the horocycle model, which is CD(0, inf), as 1D measures.
  const auto hz = examples::get_example("hyperbolic_horocycle");
  const int needles = quick ? 4 : 10, per = quick ? 3 : 10;
  double worst = kInf;
  int tested = 0;
  for (int i = 0; i < needles; ++i) {
    Vec x(2);
    x << rng.uniform(-1, 1), rng.uniform(1, 2);
    const PhasePoint q = indicatrix_sample(*hz.model, x, rng.unit_vector(2));
    const Needle nd =
        extract_needle(*hz.model, seed_construct(*hz.model, q, SeedMode::Minimal), -0.4, 0.4, 1e-3);
    if (nd.truncated) continue;
    const Measure1D mu(nd.t.front(), nd.t.back(), nd.rho);
    for (int k = 0; k < per; ++k) {
      const double a = rng.normal(), b = rng.normal(), c = rng.normal(), w = rng.uniform(1, 8);
      const Fn1 f = [=](double t) { return a * t + b * t * t + c * std::sin(w * t); };
      const Fn1 df = [=](double t) { return a + 2 * b * t + c * w * std::cos(w * t); };
      const InequalityReport rep = poincare_1d_check(mu, f, df, 1e-8);
      worst = std::min(worst, rep.pass ? rep.margin : -std::abs(rep.margin));
      ++tested;
    }
  }

  // Log-Sobolev on the round S^3 (K = 2) for polynomials in the embedded coordinates.
  const auto sp = contact(0.0);
  const int fs = quick ? 4 : 20;
  double ls_worst = kInf;
  int ls_fail = 0;
  for (int i = 0; i < fs; ++i) {
    Vec c1(4);
    Mat c2(4, 4);
    for (int a = 0; a < 4; ++a) c1(a) = rng.normal();
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) c2(a, b) = 0.5 * rng.normal();
    const double c0 = rng.uniform(-1, 2);
    auto f = [=](const Vec& x) {
      const Vec X = examples::stereo_embed(x, 1);
      return c0 + c1.dot(X) + X.dot(c2 * X);
    };
    FunctionalSpec fsp;
    fsp.kind = FunctionalKind::LogSobolev;
    fsp.K = 2.0;
    fsp.samples = quick ? 4000 : 20000;
    fsp.tolerance = 0.05;
    fsp.seed = seed + i;
    const FunctionalReport rep = functional_check(*sp.model, sp.sample_measure, f, {}, fsp);
    ls_worst = std::min(ls_worst, rep.rhs > 0 ? rep.margin / rep.rhs : rep.margin);
    if (!rep.pass) ++ls_fail;
  }
  r.seconds = seconds_since(t0);
  r.pass = tested > 0 && worst >= 0.0 && ls_fail == 0;
  r.detail = std::to_string(tested) + " Poincare functions, min margin " + fmt("%.3e", worst) +
             "; log-Sobolev " + std::to_string(fs - ls_fail) + "/" + std::to_string(fs) +
             " hold, min relative margin " + fmt("%+.4f", ls_worst);
  r.data = {{"poincare_functions", tested}, {"poincare_min_margin", worst},
            {"logsobolev_functions", fs}, {"logsobolev_failures", ls_fail},
            {"logsobolev_min_relative_margin", ls_worst}};
  return r;
}

const std::map<int, std::pair<const char*, CriterionResult (*)(std::uint64_t, bool)>>& table() {
  static const std::map<int, std::pair<const char*, CriterionResult (*)(std::uint64_t, bool)>> t = {
      {1, {"horocycle flatness", horocycle_flatness}},
      {2, {"contact sphere curvature", contact_sphere_curvature}},
      {3, {"cross-oracle curvature", cross_oracle}},
      {4, {"needle equivalence", needle_equivalence}},
      {5, {"conservation and numerics", conservation_numerics}},
      {6, {"cost", cost_checks}},
      {7, {"1D transport", transport_checks}},
      {8, {"Brunn-Minkowski Monte Carlo", brunn_minkowski}},
      {9, {"Bonnet-Myers and Bishop-Gromov", myers_bishop_gromov}},
      {10, {"functional inequalities", functional_inequalities}},
  };
  return t;
}

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed, bool quick) {
  const auto it = table().find(id);
  if (it == table().end()) throw DomainError("unknown criterion " + std::to_string(id));
  const auto t0 = Clock::now();
  CriterionResult r;
  try {
    r = it->second.second(seed, quick);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
    r.seconds = seconds_since(t0);
  }
  r.id = id;
  r.title = it->second.first;
  return r;
}

std::vector<std::string> suite_names() {
  return {"smoke", "curvature", "needles", "transport", "inequalities", "full"};
}

std::vector<int> suite_members(const std::string& name) {
  if (name == "smoke") return {1, 5, 7};
  if (name == "curvature") return {1, 2, 3};
  if (name == "needles") return {4};
  if (name == "transport") return {7};
  if (name == "inequalities") return {6, 8, 9, 10};
  if (name == "full") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  throw DomainError("unknown suite '" + name + "'");
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  SuiteReport s;
  s.name = name;
  const auto ids = suite_members(name);
  const auto t0 = Clock::now();
  s.pass = true;
  for (int id : ids) {
    s.results.push_back(run_criterion(id, seed, name == "smoke"));
    s.pass = s.pass && s.results.back().pass;
  }
  s.seconds = seconds_since(t0);
  return s;
}

}  // namespace lcd
