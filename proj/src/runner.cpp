#include "lcd/runner.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <map>

#include "lcd/cost.hpp"
#include "lcd/curvature.hpp"
#include "lcd/examples.hpp"
#include "lcd/mc_inequalities.hpp"
#include "lcd/needles.hpp"
#include "lcd/suites.hpp"
#include "lcd/transport1d.hpp"

namespace lcd {

namespace {

using Job = std::function<void(ExperimentReport&)>;

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::map<std::string, double> param_map(const ConfigReader& r, const std::string& key) {
  std::map<std::string, double> out;
  if (!r.has(key)) return out;
  const json& p = r.raw(key);
  if (!p.is_object()) throw ConfigError(r.key_path(key), "expected an object of numbers");
  for (const auto& [k, v] : p.items()) {
    if (!v.is_number()) throw ConfigError(r.key_path(key) + "." + k, "expected a number");
    out[k] = v.get<double>();
  }
  return out;
}

// ---------------------------------------------------------------- model block

struct ModelBlock {
  ModelPtr model;
  std::optional<examples::ExampleModel> example;
  std::string label;
};

Chart read_chart(ConfigReader& r, int n) {
  if (r.has("box")) {
    const double b = r.number("box");
    if (!(b > 0.0)) throw ConfigError(r.key_path("box"), "must be positive");
    return Chart::box(n, -b, b, "box");
  }
  ConfigReader& c = r.object("chart");
  Chart ch;
  ch.n = n;
  ch.lower = c.vec("lower");
  ch.upper = c.vec("upper");
  ch.label = "chart";
  try {
    ch.validate();
  } catch (const DomainError& e) {
    throw ConfigError(c.path(), e.what());
  }
  return ch;
}

ModelBlock read_model(ConfigReader& root) {
  ConfigReader& r = root.object("model");
  ModelBlock b;
  if (r.has("name")) {
    const std::string name = r.string("name");
    const json params = r.has("params") ? r.raw("params") : json::object();
    try {
      b.example = examples::get_example(name, params);
    } catch (const Error& e) {
      throw ConfigError(r.path(), e.what());
    }
    b.model = b.example->model;
    b.label = name;
    return b;
  }
  const int n = static_cast<int>(r.integer("dim", 0));
  if (n < 1) throw ConfigError(r.key_path("dim"), "expected a positive integer");
  const Chart chart = read_chart(r, n);
  const auto params = param_map(r, "params");
  try {
    auto density = std::make_shared<ExprField>(r.string("density", "1"), n, params);
    if (r.has("lagrangian")) {
      b.model = std::make_shared<ExpressionLagrangian>(chart, r.string("lagrangian"), density, params);
      b.label = "expression";
    } else if (r.has("classical")) {
      ConfigReader& c = r.object("classical");
      std::vector<std::string> metric, form;
      for (const auto& e : c.raw("metric")) metric.push_back(e.get<std::string>());
      if (c.has("form"))
        for (const auto& e : c.raw("form")) form.push_back(e.get<std::string>());
      auto fields = std::make_shared<ExprClassicalFields>(n, metric, c.string("potential", "0.5"),
                                                          form, params);
      b.model = std::make_shared<ClassicalLagrangian>(chart, fields, density, "classical");
      b.label = "classical";
    } else {
      throw ConfigError(r.path(), "needs one of name, lagrangian, classical");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(r.path(), e.what());
  } catch (const Error& e) {
    throw ConfigError(r.path(), e.what());
  }
  return b;
}

void check_point(const ConfigReader& r, const std::string& key, const Vec& x, int n) {
  if (x.size() != n)
    throw ConfigError(r.key_path(key), "expected " + std::to_string(n) + " coordinates");
}

// A phase point from x plus either v (used as given) or a direction u on the indicatrix.
PhasePoint read_state(const ConfigReader& p, const LagrangianModel& m) {
  const Vec x = p.vec("x");
  check_point(p, "x", x, m.dim());
  if (p.has("v")) {
    const Vec v = p.vec("v");
    check_point(p, "v", v, m.dim());
    return {x, v};
  }
  const Vec u = p.has("u") ? p.vec("u") : Vec::Unit(m.dim(), 0);
  check_point(p, "u", u, m.dim());
  return indicatrix_sample(m, x, u);
}

Measure1D read_measure(ConfigReader& r) {
  const double a = r.number("a"), b = r.number("b");
  if (!(a < b)) throw ConfigError(r.path(), "need a < b");
  const int cells = static_cast<int>(r.integer("cells", 2048));
  return Measure1D::from_expression(r.string("density"), a, b, cells, param_map(r, "params"));
}

double worst(const std::vector<double>& v, bool max) {
  double w = max ? -kInf : kInf;
  for (double x : v) w = max ? std::max(w, x) : std::min(w, x);
  return w;
}

json stats(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return {{"count", v.size()}, {"min", worst(v, false)}, {"max", worst(v, true)},
          {"mean", v.empty() ? 0.0 : s / v.size()}};
}

Verdict verdict_of(bool pass) { return pass ? Verdict::Pass : Verdict::Fail; }

// ---------------------------------------------------------------- operations

struct Ctx {
  ConfigReader& root;
  ConfigReader& params;
  std::uint64_t seed;
};

Job op_ricci(Ctx& c) {
  const ModelBlock mb = read_model(c.root);
  const double N = c.params.extended("N", kInf);
  const int samples = static_cast<int>(c.params.integer("samples", 200));
  const double tol = c.params.number("tolerance", 1e-3);
  const std::optional<double> K =
      c.params.has("K") ? std::optional<double>(c.params.number("K")) : std::nullopt;
  try {
    check_N(mb.model->dim(), N);
  } catch (const InvalidN& e) {
    if (!std::isinf(N) && N < mb.model->dim()) throw ConfigError(c.params.key_path("N"), e.what());
  }
  const std::uint64_t seed = c.seed;
  return [=](ExperimentReport& rep) {
    const LagrangianModel& m = *mb.model;
    Rng rng = Rng(seed).substream("ricci");
    std::vector<double> ric, err;
    Curve curve{"samples", {}, {}};
    for (int i = 0; i < m.dim(); ++i) curve.columns.push_back("x" + std::to_string(i + 1));
    for (int i = 0; i < m.dim(); ++i) curve.columns.push_back("v" + std::to_string(i + 1));
    curve.columns.push_back("ric_weighted");
    for (int i = 0; i < samples; ++i) {
      const PhasePoint q = random_sm_point(m, rng);
      const CurvatureSample s = ricci_weighted_sample(m, q, N);
      ric.push_back(s.ric_weighted);
      json rec = {{"x", vec_json(q.x)}, {"v", vec_json(q.v)}, {"ric", s.ric},
                  {"sigma_psi", s.sigma_psi}, {"sigma2_psi", s.sigma2_psi},
                  {"lambda_par", s.lambda_par}, {"lambda_perp2", s.lambda_perp2},
                  {"ric_weighted", s.ric_weighted}};
      if (mb.example && mb.example->ricci) {
        const double o = mb.example->ricci(q, N);
        rec["oracle"] = o;
        err.push_back(std::abs(o - s.ric_weighted));
      }
      rep.records.push_back(rec);
      std::vector<double> row(q.x.data(), q.x.data() + q.x.size());
      row.insert(row.end(), q.v.data(), q.v.data() + q.v.size());
      row.push_back(s.ric_weighted);
      curve.rows.push_back(row);
    }
    std::vector<double> absr;
    for (double x : ric) absr.push_back(std::abs(x));
    rep.summary = {{"N", N}, {"ric_weighted", stats(ric)}, {"max_abs", worst(absr, true)},
                   {"min_abs", worst(absr, false)}, {"tolerance", tol}};
    bool pass = true;
    if (!err.empty()) {
      rep.summary["max_oracle_error"] = worst(err, true);
      pass = worst(err, true) <= tol;
    } else {
      rep.summary["reference"] = "none";
    }
    if (K) {
      rep.summary["K"] = *K;
      rep.summary["min_margin"] = worst(ric, false) - *K;
      pass = pass && worst(ric, false) - *K >= -tol;
    }
    rep.verdict = verdict_of(pass);
    rep.curves.push_back(curve);
  };
}

Job op_cd_verdict(Ctx& c) {
  const ModelBlock mb = read_model(c.root);
  const double K = c.params.number("K");
  const double N = c.params.extended("N", kInf);
  SamplingSpec sp;
  sp.seed = c.seed;
  if (c.root.has("sampling")) {
    ConfigReader& s = c.root.object("sampling");
    sp.grid = static_cast<int>(s.integer("grid", sp.grid));
    sp.directions = static_cast<int>(s.integer("directions", sp.directions));
    sp.refine = s.boolean("refine", sp.refine);
  }
  sp.tolerance = c.params.number("tolerance", sp.tolerance);
  try {
    check_N(mb.model->dim(), N);
  } catch (const InvalidN& e) {
    if (!std::isinf(N) && N < mb.model->dim()) throw ConfigError(c.params.key_path("N"), e.what());
  }
  return [=](ExperimentReport& rep) {
    const CDVerdict v = cd_verdict(*mb.model, K, N, sp);
    for (const auto& s : v.records)
      rep.records.push_back({{"x", vec_json(s.q.x)}, {"v", vec_json(s.q.v)},
                             {"ric_weighted", s.ric_weighted}, {"margin", s.ric_weighted - K}});
    rep.summary = {{"K", K},           {"N", N},
                   {"samples", v.samples}, {"failures", v.failures},
                   {"min_margin", v.min_margin}, {"tolerance", v.tolerance},
                   {"argmin", {{"x", vec_json(v.argmin.x)}, {"v", vec_json(v.argmin.v)}}}};
    rep.verdict = verdict_of(v.pass);
  };
}

Job op_flow(Ctx& c) {
  const ModelBlock mb = read_model(c.root);
  const PhasePoint q0 = read_state(c.params, *mb.model);
  const double T = c.params.number("T"), h = c.params.number("h", 1e-3);
  const double tol = c.params.number("tolerance", 1e-8);
  if (!(h > 0.0)) throw ConfigError(c.params.key_path("h"), "must be positive");
  return [=](ExperimentReport& rep) {
    const LagrangianModel& m = *mb.model;
    FlowOptions opt;
    opt.check_energy = false;
    const Trajectory tr = el_flow(m, q0, T, h, opt);
    Curve curve{"trajectory", {"t"}, {}};
    for (int i = 0; i < m.dim(); ++i) curve.columns.push_back("x" + std::to_string(i + 1));
    for (int i = 0; i < m.dim(); ++i) curve.columns.push_back("v" + std::to_string(i + 1));
    curve.columns.push_back("E");
    for (std::size_t i = 0; i < tr.size(); ++i) {
      std::vector<double> row = {tr.t[i]};
      row.insert(row.end(), tr.x[i].data(), tr.x[i].data() + m.dim());
      row.insert(row.end(), tr.v[i].data(), tr.v[i].data() + m.dim());
      row.push_back(tr.E[i]);
      curve.rows.push_back(row);
    }
    const double drift = tr.max_energy_drift();
    rep.summary = {{"steps", tr.size() - 1}, {"t_end", tr.t.back()},
                   {"left_chart", tr.left_chart}, {"energy_drift", drift},
                   {"x_end", vec_json(tr.x.back())}, {"v_end", vec_json(tr.v.back())},
                   {"tolerance", tol}};
    rep.verdict = tr.left_chart ? Verdict::Inconclusive : verdict_of(drift <= tol);
    if (tr.left_chart) rep.message = "the trajectory left the chart before T";
    rep.curves.push_back(curve);
  };
}

Job op_needle(Ctx& c) {
  const ModelBlock mb = read_model(c.root);
  const PhasePoint q = read_state(c.params, *mb.model);
  const std::string mode = c.params.string("mode", "minimal");
  if (mode != "minimal" && mode != "equality")
    throw ConfigError(c.params.key_path("mode"), "expected \"minimal\" or \"equality\"");
  const double K = c.params.number("K", 0.0), N = c.params.extended("N", kInf);
  const double t0 = c.params.number("t0", -0.1), t1 = c.params.number("t1", 0.1);
  const double h = c.params.number("h", 2e-3), tol = c.params.number("tolerance", 5e-4);
  return [=](ExperimentReport& rep) {
    const LagrangianModel& m = *mb.model;
    const HJSeed s =
        seed_construct(m, q, mode == "minimal" ? SeedMode::Minimal : SeedMode::Equality, N);
    const Needle nd = extract_needle(m, s, t0, t1, h);
    const NeedleReport nr = needle_cd_check(nd, K, N, tol);
    Curve curve{"needle", {"t", "rho", "psi", "Lu"}, {}};
    for (std::size_t i = 0; i < nd.t.size(); ++i)
      curve.rows.push_back({nd.t[i], nd.rho[i], nd.psi[i], nd.Lu[i]});
    Curve res{"residual", {"t", "residual"}, {}};
    for (std::size_t i = 0; i < nr.t.size(); ++i) res.rows.push_back({nr.t[i], nr.residual[i]});
    rep.summary = {{"K", K},
                   {"N", N},
                   {"mode", mode},
                   {"points", nd.t.size()},
                   {"truncated", nd.truncated},
                   {"conjugate_time", nd.conjugate_time},
                   {"max_condition", nd.max_condition},
                   {"tangency_residual", tangency_residual(m, s)},
                   {"max_residual", nr.max_residual},
                   {"residual_at_origin", nr.residual_at_origin},
                   {"ric_weighted", ricci_weighted(m, q, N)},
                   {"tolerance", tol}};
    rep.verdict = verdict_of(nr.pass);
    rep.curves = {curve, res};
  };
}

MultistartSpec read_multistart(ConfigReader& p, std::uint64_t seed) {
  MultistartSpec ms;
  ms.seed = seed;
  if (!p.has("multistart")) return ms;
  ConfigReader& r = p.object("multistart");
  ms.directions = static_cast<int>(r.integer("directions", ms.directions));
  ms.ell_factors = r.list("ell_factors", ms.ell_factors);
  ms.h = r.number("h", ms.h);
  ms.coarse_h = r.number("coarse_h", ms.coarse_h);
  ms.max_iter = static_cast<int>(r.integer("max_iter", ms.max_iter));
  ms.tol = r.number("tol", ms.tol);
  ms.chord_first = r.boolean("chord_first", ms.chord_first);
  ms.polish = static_cast<int>(r.integer("polish", ms.polish));
  return ms;
}

Job op_cost(Ctx& c) {
  const ModelBlock mb = read_model(c.root);
  const Vec x0 = c.params.vec("x0"), x1 = c.params.vec("x1");
  check_point(c.params, "x0", x0, mb.model->dim());
  check_point(c.params, "x1", x1, mb.model->dim());
  const MultistartSpec ms = read_multistart(c.params, c.seed);
  const bool oracle = c.params.boolean("oracle", false);
  TranscriptionSpec ts;
  ts.nodes = static_cast<int>(c.params.integer("oracle_nodes", ts.nodes));
  return [=](ExperimentReport& rep) {
    const LagrangianModel& m = *mb.model;
    const MinimizingExtremal me = connect(m, x0, x1, ms);
    rep.summary = {{"cost", me.action},           {"duration", me.ell},
                   {"v0", vec_json(me.v0)},       {"endpoint_residual", me.endpoint_residual},
                   {"energy", me.energy},         {"starts", me.starts},
                   {"converged", me.converged}};
    Curve curve{"extremal", {"t"}, {}};
    for (int i = 0; i < m.dim(); ++i) curve.columns.push_back("x" + std::to_string(i + 1));
    for (std::size_t i = 0; i < me.curve.size(); ++i) {
      std::vector<double> row = {me.curve.t[i]};
      row.insert(row.end(), me.curve.x[i].data(), me.curve.x[i].data() + m.dim());
      curve.rows.push_back(row);
    }
    rep.curves.push_back(curve);
    bool pass = true;
    if (oracle) {
      const TranscriptionResult o = brute_force_cost_oracle(m, x0, x1, ts);
      rep.summary["oracle"] = o.value;
      rep.summary["oracle_levels"] = o.level_values;
      rep.summary["oracle_gap"] = o.value - me.action;
      pass = me.action <= o.value + 1e-6 && o.value - me.action <= 1e-3;
    }
    rep.verdict = verdict_of(pass);
  };
}

BallSpec read_ball(ConfigReader& p, std::uint64_t seed) {
  BallSpec b;
  b.seed = seed;
  b.directions = static_cast<int>(p.integer("directions", b.directions));
  b.resolution = static_cast<int>(p.integer("resolution", b.resolution));
  b.h = p.number("h", b.h);
  return b;
}

json balls_json(const std::vector<BallEstimate>& balls) {
  json out = json::array();
  for (const auto& b : balls)
    out.push_back({{"radius", b.radius}, {"volume", b.volume}, {"resolution", b.resolution},
                   {"directions", b.directions}, {"marked_cells", b.marked_cells},
                   {"truncated", b.truncated}});
  return out;
}

Job op_ball(Ctx& c) {
  const ModelBlock mb = read_model(c.root);
  const Vec x0 = c.params.vec("x0");
  check_point(c.params, "x0", x0, mb.model->dim());
  const std::vector<double> radii = c.params.list("radii");
  const BallSpec bs = read_ball(c.params, c.seed);
  return [=](ExperimentReport& rep) {
    const auto balls = forward_ball_volumes(*mb.model, x0, radii, bs);
    rep.records = balls_json(balls);
    Curve curve{"volumes", {"radius", "volume"}, {}};
    bool truncated = false;
    for (const auto& b : balls) {
      curve.rows.push_back({b.radius, b.volume});
      truncated = truncated || b.truncated;
    }
    rep.summary = {{"balls", balls.size()}, {"truncated", truncated}};
    rep.verdict = truncated ? Verdict::Inconclusive : Verdict::Pass;
    if (truncated) rep.message = "some balls reach the chart boundary";
    rep.curves.push_back(curve);
  };
}

Job op_bishop_gromov(Ctx& c) {
  const ModelBlock mb = read_model(c.root);
  const Vec x0 = c.params.vec("x0");
  check_point(c.params, "x0", x0, mb.model->dim());
  const double K = c.params.number("K"), N = c.params.number("N");
  const std::vector<double> radii = c.params.list("radii");
  const double tol = c.params.number("tolerance", 0.03);
  const BallSpec bs = read_ball(c.params, c.seed);
  return [=](ExperimentReport& rep) {
    const BishopGromovReport r = bishop_gromov_check(*mb.model, x0, K, N, radii, bs, tol);
    rep.records = balls_json(r.balls);
    Curve curve{"volumes", {"radius", "volume", "model_volume"}, {}};
    for (const auto& b : r.balls) curve.rows.push_back({b.radius, b.volume, model_volume(K, N, b.radius)});
    rep.summary = {{"K", K}, {"N", N}, {"worst_margin", r.worst_margin}, {"tolerance", tol}};
    rep.verdict = verdict_of(r.pass);
    rep.curves.push_back(curve);
  };
}

Job op_diameter(Ctx& c) {
  const ModelBlock mb = read_model(c.root);
  const double K = c.params.number("K"), N = c.params.number("N");
  const int pairs = static_cast<int>(c.params.integer("pairs", 30));
  const std::string sampler = c.params.string("sampler", "chart");
  if (sampler != "chart" && sampler != "measure")
    throw ConfigError(c.params.key_path("sampler"), "expected \"chart\" or \"measure\"");
  if (sampler == "measure" && !(mb.example && mb.example->sample_measure))
    throw ConfigError(c.params.key_path("sampler"), "this model has no measure sampler");
  const MultistartSpec ms = read_multistart(c.params, c.seed);
  const std::uint64_t seed = c.seed;
  return [=](ExperimentReport& rep) {
    std::function<Vec(Rng&)> draw;
    if (sampler == "measure") draw = mb.example->sample_measure;
    const DiameterReport d = diameter_probe(*mb.model, K, N, pairs, draw, seed, ms);
    rep.summary = {{"K", K}, {"N", N}, {"max_duration", d.max_ell}, {"bound", d.bound},
                   {"pairs", d.pairs}, {"failures", d.failures},
                   {"chart_limited", d.chart_limited}};
    rep.message = d.verdict;
    if (d.chart_limited || std::isinf(d.bound))
      rep.verdict = Verdict::Inconclusive;
    else
      rep.verdict = verdict_of(d.pass);
  };
}

Job op_interp1d(Ctx& c) {
  const Measure1D m0 = read_measure(c.params.object("m0"));
  const Measure1D m1 = read_measure(c.params.object("m1"));
  const std::vector<double> lambdas = c.params.list("lambdas", {0.0, 0.25, 0.5, 0.75, 1.0});
  return [=](ExperimentReport& rep) {
    const Measure1D a = m0.normalized(), b = m1.normalized();
    const TransportMap1D T = monotone_map(a, b);
    Curve map{"map", {"t", "T", "Tprime"}, {}};
    for (std::size_t i = 0; i < T.t.size(); ++i)
      if (T.in_support[i]) map.rows.push_back({T.t[i], T.T[i], T.Tprime[i]});
    rep.curves.push_back(map);
    for (double l : lambdas) {
      const Measure1D ml = interpolate(a, b, T, l);
      Curve cv{"density_" + format_number(l), {"t", "density"}, {}};
      for (int i = 0; i <= ml.cells(); ++i) cv.rows.push_back({ml.node(i), ml.samples()[i]});
      rep.records.push_back({{"lambda", l}, {"a", ml.a()}, {"b", ml.b()}, {"mass", ml.mass()}});
      rep.curves.push_back(cv);
    }
    rep.summary = {{"orientation_ok", T.orientation_ok}, {"lambdas", lambdas}};
    rep.verdict = Verdict::Pass;
  };
}

Job op_cd1d(Ctx& c) {
  const Measure1D m = read_measure(c.params.object("measure"));
  const double K = c.params.number("K"), N = c.params.extended("N", kInf);
  const double tol = c.params.number("tolerance", 1e-6);
  return [=](ExperimentReport& rep) {
    const CD1DReport r = cd1d_check(m, K, N, tol);
    rep.summary = {{"K", K}, {"N", N}, {"max_residual", r.max_residual}, {"argmax", r.argmax},
                   {"tolerance", tol}};
    rep.verdict = verdict_of(r.pass);
  };
}

Job op_dconv1d(Ctx& c) {
  const Measure1D ref = read_measure(c.params.object("reference"));
  const Measure1D m0 = read_measure(c.params.object("m0"));
  const Measure1D m1 = read_measure(c.params.object("m1"));
  const double K = c.params.number("K"), N = c.params.extended("N", kInf);
  const std::vector<double> lambdas =
      c.params.list("lambdas", {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0});
  const double tol = c.params.number("tolerance", 1e-4);
  return [=](ExperimentReport& rep) {
    const ConvexityReport r = displacement_convexity_check(ref, m0, m1, K, N, lambdas, tol);
    Curve cv{"convexity", {"lambda", "lhs", "rhs", "margin"}, {}};
    for (const auto& p : r.points) {
      rep.records.push_back({{"lambda", p.lambda}, {"lhs", p.lhs}, {"rhs", p.rhs},
                             {"margin", p.margin}, {"vacuous", p.vacuous}});
      cv.rows.push_back({p.lambda, p.lhs, p.rhs, p.margin});
    }
    rep.summary = {{"K", K}, {"N", N}, {"worst_margin", r.worst_margin},
                   {"orientation_ok", r.orientation_ok}, {"vacuous", r.vacuous},
                   {"tolerance", tol}};
    if (r.vacuous) {
      rep.verdict = Verdict::Inconclusive;
      rep.message = "infinite distortion: the inequality is vacuous";
    } else {
      rep.verdict = verdict_of(r.pass);
    }
    rep.curves.push_back(cv);
  };
}

RegionSpec read_region(ConfigReader& r, const ModelBlock& mb) {
  const std::string kind = r.string("kind");
  const LagrangianModel& m = *mb.model;
  try {
    if (kind == "box") {
      const Vec lo = r.vec("lower"), hi = r.vec("upper");
      check_point(r, "lower", lo, m.dim());
      check_point(r, "upper", hi, m.dim());
      return box_region(m, lo, hi);
    }
    const Vec c = r.vec("center");
    check_point(r, "center", c, m.dim());
    const double rad = r.number("radius");
    if (kind == "ball") {
      if (!(mb.example && mb.example->distance))
        throw ConfigError(r.key_path("kind"), "metric balls need a model with a known distance");
      return metric_ball_region(m, c, rad, mb.example->distance);
    }
    if (kind == "forward_ball") return forward_ball_region(m, c, rad);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(r.path(), e.what());
  }
  throw ConfigError(r.key_path("kind"), "expected box, ball or forward_ball");
}

Job op_bm(Ctx& c) {
  const ModelBlock mb = read_model(c.root);
  const RegionSpec A0 = read_region(c.params.object("A0"), mb);
  const RegionSpec A1 = read_region(c.params.object("A1"), mb);
  const double lambda = c.params.number("lambda", 0.5);
  const double K = c.params.number("K", 0.0), N = c.params.extended("N", kInf);
  BMSpec sp;
  sp.pairs.pairs = static_cast<int>(c.params.integer("pairs", sp.pairs.pairs));
  sp.pairs.h = c.params.number("h", sp.pairs.h);
  sp.pairs.seed = c.seed;
  sp.resolution = static_cast<int>(c.params.integer("resolution", 0));
  sp.tolerance = c.params.number("tolerance", sp.tolerance);
  return [=](ExperimentReport& rep) {
    const BMReport b = brunn_minkowski_check(*mb.model, A0, A1, lambda, K, N, sp);
    rep.summary = {{"A0", A0.describe()},     {"A1", A1.describe()},
                   {"lambda", b.lambda},      {"K", b.K},
                   {"N", b.N},                {"mu0", b.mu0},
                   {"mu1", b.mu1},            {"estimate", b.estimate},
                   {"bound", b.bound},        {"margin", b.margin},
                   {"relative_margin", b.relative_margin}, {"tolerance", b.tolerance},
                   {"ell_min", b.ell_min},    {"ell_max", b.ell_max},
                   {"beta_0", b.beta_0},      {"beta_1", b.beta_1},
                   {"beta_monotone", b.beta_monotone}, {"attempted", b.attempted},
                   {"failed", b.failed},      {"failure_rate", b.failure_rate},
                   {"cold_solves", b.cold_solves}, {"resolution", b.resolution},
                   {"marked_cells", b.marked_cells}};
    rep.verdict = b.inconclusive ? Verdict::Inconclusive : verdict_of(b.pass);
    if (b.inconclusive) rep.message = "too many pairs could not be joined";
  };
}

Job op_functional(Ctx& c) {
  if (c.params.has("measure")) {
    // One-dimensional: Poincare with constant D^2/pi^2 for f(t).
    const Measure1D m = read_measure(c.params.object("measure"));
    const std::string src = c.params.string("f");
    const double tol = c.params.number("tolerance", 1e-9);
    auto f = std::make_shared<ExprField>(src, 1, std::map<std::string, double>{});
    return [=](ExperimentReport& rep) {
      const Fn1 fn = [f](double t) { return f->value(Vec::Constant(1, t)); };
      const Fn1 df = [f](double t) { return f->gradient(Vec::Constant(1, t))(0); };
      const InequalityReport r = poincare_1d_check(m.normalized(), fn, df, tol);
      rep.summary = {{"kind", "poincare_1d"}, {"lhs", r.lhs}, {"rhs", r.rhs},
                     {"margin", r.margin}, {"tolerance", tol}};
      rep.verdict = verdict_of(r.pass);
    };
  }
  const ModelBlock mb = read_model(c.root);
  const std::string kind = c.params.string("kind");
  FunctionalSpec fs;
  if (kind == "poincare")
    fs.kind = FunctionalKind::Poincare;
  else if (kind == "log-sobolev")
    fs.kind = FunctionalKind::LogSobolev;
  else
    throw ConfigError(c.params.key_path("kind"), "expected \"poincare\" or \"log-sobolev\"");
  fs.K = c.params.number("K", fs.K);
  fs.diameter = c.params.extended("diameter", fs.diameter);
  fs.samples = static_cast<int>(c.params.integer("samples", fs.samples));
  fs.tolerance = c.params.number("tolerance", fs.tolerance);
  fs.seed = c.seed;
  auto f = std::make_shared<ExprField>(c.params.string("f"), mb.model->dim(),
                                       std::map<std::string, double>{});
  return [=](ExperimentReport& rep) {
    const LagrangianModel& m = *mb.model;
    Sampler sample;
    if (mb.example && mb.example->sample_measure) {
      const auto inner = mb.example->sample_measure;
      sample = [inner, &m](Rng& rng) {
        for (int k = 0; k < 100000; ++k) {
          const Vec x = inner(rng);
          if (m.chart().contains(x)) return x;
        }
        throw NumericalError("functional: measure sampler never hits the chart");
      };
    } else {
      sample = region_sampler(m, box_region(m, m.chart().lower, m.chart().upper));
    }
    const FunctionalReport r =
        functional_check(m, sample, [f](const Vec& x) { return f->value(x); }, {}, fs);
    rep.summary = {{"kind", kind},         {"lhs", r.lhs},
                   {"rhs", r.rhs},         {"margin", r.margin},
                   {"constant", r.constant}, {"samples", r.samples},
                   {"closed_form_estar", r.closed_form_estar}, {"tolerance", r.tolerance}};
    rep.verdict = verdict_of(r.pass);
  };
}

Job op_examples(Ctx&) {
  return [](ExperimentReport& rep) {
    for (const auto& e : examples::list_examples()) {
      json params = json::array();
      for (const auto& p : e.params)
        params.push_back({{"name", p.name}, {"default", p.default_value},
                          {"description", p.description}});
      rep.records.push_back({{"name", e.name}, {"summary", e.summary}, {"params", params}});
    }
    rep.summary = {{"examples", rep.records.size()}};
    rep.verdict = Verdict::Pass;
  };
}

Job op_verify(Ctx& c) {
  const std::string suite = c.params.string("suite", "smoke");
  try {
    suite_members(suite);
  } catch (const DomainError& e) {
    throw ConfigError(c.params.key_path("suite"), e.what());
  }
  const std::uint64_t seed = c.seed;
  return [=](ExperimentReport& rep) {
    const SuiteReport s = run_suite(suite, seed);
    for (const auto& r : s.results)
      rep.records.push_back({{"criterion", r.id}, {"title", r.title}, {"pass", r.pass},
                             {"detail", r.detail}, {"data", r.data}});
    rep.summary = {{"suite", suite}, {"criteria", s.results.size()}, {"pass", s.pass}};
    rep.verdict = verdict_of(s.pass);
  };
}

const std::map<std::string, Job (*)(Ctx&)>& operations() {
  static const std::map<std::string, Job (*)(Ctx&)> ops = {
      {"ricci", op_ricci},         {"cd-verdict", op_cd_verdict},
      {"flow", op_flow},           {"needle", op_needle},
      {"cost", op_cost},           {"ball", op_ball},
      {"bishop-gromov", op_bishop_gromov}, {"diameter", op_diameter},
      {"interp1d", op_interp1d},   {"cd1d", op_cd1d},
      {"dconv1d", op_dconv1d},     {"bm", op_bm},
      {"functional", op_functional}, {"examples", op_examples},
      {"verify", op_verify}};
  return ops;
}

}  // namespace

std::vector<std::string> operation_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : operations()) out.push_back(k);
  return out;
}

ExperimentReport run(const json& config, std::optional<std::uint64_t> seed_override) {
  ConfigReader root(config);
  const std::string op = root.string("operation");
  const auto it = operations().find(op);
  if (it == operations().end()) throw ConfigError("operation", "unknown operation '" + op + "'");
  const long long cfg_seed = root.integer("seed", 1);
  if (cfg_seed < 0) throw ConfigError("seed", "must be non-negative");
  const std::uint64_t seed = seed_override ? *seed_override : static_cast<std::uint64_t>(cfg_seed);
  static const json empty = json::object();
  std::optional<ConfigReader> no_params;
  if (!root.has("params")) no_params.emplace(empty, "params");
  ConfigReader& params = no_params ? *no_params : root.object("params");
  if (root.has("output")) {
    ConfigReader& out = root.object("output");
    out.string("dir", "");
  }
  Ctx ctx{root, params, seed};
  const Job job = it->second(ctx);
  root.finish();
  if (no_params) no_params->finish();

  ExperimentReport rep;
  rep.config = config;
  rep.config["seed"] = seed;
  rep.operation = op;
  rep.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  job(rep);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

json load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("", "cannot open config file " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace lcd
