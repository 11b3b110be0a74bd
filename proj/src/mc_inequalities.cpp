#include "lcd/mc_inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lcd/transport1d.hpp"

namespace lcd {

namespace {

void require_inside_chart(const LagrangianModel& m, const Vec& lo, const Vec& hi,
                          const char* what) {
  const Chart& c = m.chart();
  if (lo.size() != c.n || hi.size() != c.n)
    throw DomainError(std::string(what) + ": dimension does not match the model");
  if ((lo.array() < c.lower.array()).any() || (hi.array() > c.upper.array()).any())
    throw DomainError(std::string(what) + ": region leaves the chart box");
}

std::vector<double> gauss_nodes(int panels, double a, double b, std::vector<double>& w) {
  static const double xg[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                               0.8611363115940526};
  static const double wg[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                               0.3478548451374538};
  std::vector<double> x;
  w.clear();
  const double hp = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    for (int k = 0; k < 4; ++k) {
      x.push_back(a + hp * (p + 0.5 + 0.5 * xg[k]));
      w.push_back(0.5 * hp * wg[k]);
    }
  return x;
}

// Calls fn(index vector) over the full tensor grid {0..k-1}^n.
template <class F>
void for_each_multi(int n, int k, F&& fn) {
  std::vector<int> idx(n, 0);
  while (true) {
    fn(idx);
    int a = 0;
    while (a < n && ++idx[a] == k) idx[a++] = 0;
    if (a == n) break;
  }
}

double density_bound(const LagrangianModel& m, const Vec& lo, const Vec& hi) {
  const int n = static_cast<int>(lo.size());
  const int k = n <= 2 ? 33 : (n == 3 ? 17 : 5);
  double mx = 0.0;
  for_each_multi(n, k, [&](const std::vector<int>& idx) {
    Vec x(n);
    for (int a = 0; a < n; ++a) x(a) = lo(a) + (hi(a) - lo(a)) * idx[a] / (k - 1.0);
    mx = std::max(mx, m.density(x));
  });
  return 1.5 * mx;
}

}  // namespace

bool RegionSpec::contains(const Vec& x) const {
  switch (kind) {
    case RegionKind::Box:
      return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
    case RegionKind::MetricBall:
      return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all() &&
             distance(center, x) <= radius;
    case RegionKind::ForwardBall: {
      const long long k = mask.grid.index(x);
      return k >= 0 && std::binary_search(mask.cells.begin(), mask.cells.end(), k);
    }
  }
  return false;
}

std::string RegionSpec::describe() const {
  std::ostringstream os;
  auto vec = [&](const Vec& v) {
    os << '(';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
    os << ')';
  };
  if (kind == RegionKind::Box) {
    os << "box ";
    vec(lower);
    os << "-";
    vec(upper);
  } else {
    os << (kind == RegionKind::MetricBall ? "metric ball " : "forward ball ");
    vec(center);
    os << " r=" << radius;
  }
  return os.str();
}

RegionSpec box_region(const LagrangianModel& m, const Vec& lower, const Vec& upper) {
  if (lower.size() != upper.size() || !((upper - lower).minCoeff() > 0.0))
    throw DomainError("box_region: need lower < upper componentwise");
  require_inside_chart(m, lower, upper, "box_region");
  RegionSpec A;
  A.kind = RegionKind::Box;
  A.lower = lower;
  A.upper = upper;
  return A;
}

RegionSpec metric_ball_region(const LagrangianModel& m, const Vec& center, double radius,
                              Metric distance) {
  if (!(radius > 0.0)) throw DomainError("metric_ball_region: radius must be positive");
  if (!distance) throw DomainError("metric_ball_region: no distance function");
  const int n = m.dim();
  const Chart& c = m.chart();
  if (!c.contains(center)) throw DomainError("metric_ball_region: centre outside the chart");
  // Boundary points along many rays (bisection on the distance) give the bounding box.
  Vec lo = center, hi = center;
  const double scale = (c.upper - c.lower).maxCoeff();
  for (const Vec& u : start_directions(n, n == 1 ? 2 : (n == 2 ? 256 : 2000), 1)) {
    double a = 0.0, b = 1e-3 * scale;
    while (distance(center, center + b * u) <= radius) {
      a = b;
      b *= 2.0;
      if (!c.contains(center + b * u) && !c.contains(center + a * u))
        throw DomainError("metric_ball_region: ball leaves the chart box");
    }
    for (int it = 0; it < 60; ++it) {
      const double t = 0.5 * (a + b);
      (distance(center, center + t * u) <= radius ? a : b) = t;
    }
    lo = lo.cwiseMin(center + b * u);
    hi = hi.cwiseMax(center + b * u);
  }
  const Vec pad = 0.02 * (hi - lo);
  lo -= pad;
  hi += pad;
  require_inside_chart(m, lo, hi, "metric_ball_region");
  RegionSpec A;
  A.kind = RegionKind::MetricBall;
  A.lower = lo;
  A.upper = hi;
  A.center = center;
  A.radius = radius;
  A.distance = std::move(distance);
  return A;
}

RegionSpec forward_ball_region(const LagrangianModel& m, const Vec& center, double radius,
                               const BallSpec& spec) {
  RegionSpec A;
  A.kind = RegionKind::ForwardBall;
  A.center = center;
  A.radius = radius;
  A.mask = forward_ball_mask(m, center, radius, spec);
  if (A.mask.truncated) throw DomainError("forward_ball_region: ball leaves the chart box");
  if (A.mask.cells.empty()) throw DomainError("forward_ball_region: empty ball");
  const CellGrid& g = A.mask.grid;
  A.lower = g.origin;
  A.upper = g.origin + g.cell * g.res;
  require_inside_chart(m, A.lower.cwiseMax(m.chart().lower), A.upper.cwiseMin(m.chart().upper),
                       "forward_ball_region");
  return A;
}

double region_measure(const LagrangianModel& m, const RegionSpec& A) {
  const int n = A.dim();
  if (A.kind == RegionKind::ForwardBall) {
    double s = 0.0;
    for (long long k : A.mask.cells) s += cell_measure(m, A.mask.grid, k);
    return s;
  }
  if (A.kind == RegionKind::Box) {
    const int panels = n <= 2 ? 32 : (n == 3 ? 12 : 4);
    std::vector<std::vector<double>> xs(n), ws(n);
    for (int a = 0; a < n; ++a) xs[a] = gauss_nodes(panels, A.lower(a), A.upper(a), ws[a]);
    double s = 0.0;
    for_each_multi(n, 4 * panels, [&](const std::vector<int>& idx) {
      Vec x(n);
      double w = 1.0;
      for (int a = 0; a < n; ++a) {
        x(a) = xs[a][idx[a]];
        w *= ws[a][idx[a]];
      }
      s += w * m.density(x);
    });
    return s;
  }
  // Metric ball: Gauss rule on interior cells, 8^n midpoint subcells on boundary cells.
  const int res = n <= 2 ? 256 : (n == 3 ? 64 : 16);
  const CellGrid g(A.lower, A.upper, res);
  const int sub = 8;
  double s = 0.0;
  for_each_multi(n, res, [&](const std::vector<int>& idx) {
    long long key = 0;
    for (int a = n - 1; a >= 0; --a) key = key * res + idx[a];
    const Vec lo = g.lower(key);
    int inside = 0;
    for (int corner = 0; corner < (1 << n); ++corner) {
      Vec x = lo;
      for (int a = 0; a < n; ++a)
        if ((corner >> a) & 1) x(a) += g.cell(a);
      inside += A.contains(x) ? 1 : 0;
    }
    if (inside == (1 << n)) {
      s += cell_measure(m, g, key);
    } else if (inside > 0) {
      const double dv = g.cell_volume() / std::pow(sub, n);
      for_each_multi(n, sub, [&](const std::vector<int>& j) {
        Vec x = lo;
        for (int a = 0; a < n; ++a) x(a) += (j[a] + 0.5) / sub * g.cell(a);
        if (A.contains(x)) s += m.density(x) * dv;
      });
    }
  });
  return s;
}

Sampler region_sampler(const LagrangianModel& m, const RegionSpec& A) {
  const int n = A.dim();
  const double wmax = density_bound(m, A.lower, A.upper);
  if (!(wmax > 0.0)) throw DomainError("region_sampler: density vanishes on the region");
  const LagrangianModel* mp = &m;
  return [mp, A, wmax, n](Rng& rng) -> Vec {
    for (long long tries = 0; tries < 100000000; ++tries) {
      Vec x(n);
      if (A.kind == RegionKind::ForwardBall) {
        const auto& cells = A.mask.cells;
        const auto k = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(cells.size())));
        const Vec lo = A.mask.grid.lower(cells[std::min(k, cells.size() - 1)]);
        for (int a = 0; a < n; ++a) x(a) = lo(a) + rng.uniform() * A.mask.grid.cell(a);
      } else {
        for (int a = 0; a < n; ++a) x(a) = rng.uniform(A.lower(a), A.upper(a));
        if (!A.contains(x)) continue;
      }
      const double w = mp->density(x);
      if (w > wmax) throw NumericalError("region_sampler: density bound exceeded");
      if (rng.uniform() * wmax < w) return x;
    }
    throw NumericalError("region_sampler: rejection sampling did not terminate");
  };
}

int default_resolution(int n) {
  if (n <= 1) return 65536;
  return static_cast<int>(std::lround(std::pow(65536.0, 1.0 / n)));
}

MidpointCloud midpoint_set(const LagrangianModel& m, const RegionSpec& A0, const RegionSpec& A1,
                           double lambda, const MidpointSpec& spec) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("midpoint_set: need 0 < lambda < 1");
  if (spec.pairs < 1) throw DomainError("midpoint_set: need at least one pair");
  const int n = m.dim();
  MidpointCloud cl;
  cl.lambda = lambda;
  cl.seed = spec.seed;
  const Rng master(spec.seed);
  Rng r0 = master.substream("bm-a0"), r1 = master.substream("bm-a1");
  const Sampler s0 = region_sampler(m, A0), s1 = region_sampler(m, A1);

  MultistartSpec cold;
  cold.chord_first = true;
  cold.h = spec.h;
  cold.coarse_h = spec.h;
  cold.tol = spec.tol;
  cold.max_iter = spec.max_iter;
  cold.seed = spec.seed;

  struct Anchor {
    Vec key;
    ShootState state;
  };
  std::vector<Anchor> anchors;
  cl.points.reserve(spec.pairs);
  cl.status.reserve(spec.pairs);
  for (int i = 0; i < spec.pairs; ++i) {
    const Vec a0 = s0(r0), a1 = s1(r1);
    Vec key(2 * n);
    key << a0, a1;
    ++cl.attempted;
    MinimizingExtremal me;
    ShootState st;
    bool ok = false;
    if (!anchors.empty()) {
      std::size_t best = 0;
      double bd = kInf;
      for (std::size_t k = 0; k < anchors.size(); ++k) {
        const double d = (anchors[k].key - key).squaredNorm();
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
      try {
        me = shoot(m, a0, a1, anchors[best].state, spec.h, spec.max_iter, spec.tol, &st);
        ok = true;
      } catch (const Error&) {
      }
    }
    if (!ok) {
      try {
        const MinimizingExtremal c = connect(m, a0, a1, cold);
        ++cl.cold_solves;
        ShootState s;
        s.base = n == 1 ? Vec(c.v0.cwiseSign()) : Vec(c.v0.normalized());
        s.theta = Vec::Zero(n - 1);
        s.ell = c.ell;
        me = shoot(m, a0, a1, s, spec.h, spec.max_iter, spec.tol, &st);
        ok = true;
      } catch (const Error&) {
      }
    }
    if (!ok) {
      ++cl.failed;
      cl.status.push_back(0);
      continue;
    }
    // gamma(lambda * ell) from the stored state just below it.
    const Trajectory& tr = me.curve;
    const double t = lambda * me.ell;
    const std::size_t idx =
        std::min(tr.size() - 1, static_cast<std::size_t>(std::floor(t / tr.h + 1e-12)));
    const double rem = t - tr.t[idx];
    Vec x = tr.x[idx];
    if (rem > 1e-14) x = flow_by(m, {tr.x[idx], tr.v[idx]}, rem, tr.h).x;
    cl.points.push_back(x);
    cl.ell.push_back(me.ell);
    cl.status.push_back(1);
    cl.ell_min = std::min(cl.ell_min, me.ell);
    cl.ell_max = std::max(cl.ell_max, me.ell);
    if (static_cast<int>(anchors.size()) < spec.max_anchors) anchors.push_back({key, st});
  }
  cl.failure_rate = static_cast<double>(cl.failed) / cl.attempted;
  cl.inconclusive = cl.failure_rate > 0.2 || cl.points.empty();
  cl.lo = A0.lower.cwiseMin(A1.lower);
  cl.hi = A0.upper.cwiseMax(A1.upper);
  for (const Vec& p : cl.points) {
    cl.lo = cl.lo.cwiseMin(p);
    cl.hi = cl.hi.cwiseMax(p);
  }
  return cl;
}

CoverageEstimate measure_lower_estimate(const LagrangianModel& m, const MidpointCloud& cloud,
                                        int resolution) {
  CoverageEstimate ce;
  if (cloud.points.empty()) return ce;
  const int n = static_cast<int>(cloud.points.front().size());
  ce.resolution = resolution > 0 ? resolution : default_resolution(n);
  Vec lo = cloud.lo, hi = cloud.hi;
  if (lo.size() != n) {
    lo = hi = cloud.points.front();
    for (const Vec& p : cloud.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  // Cubic window (isotropic cells) around the bounding box; a degenerate window (one point)
  // still gets cells of positive size.
  const double side = std::max((hi - lo).maxCoeff(), 1e-9) * (1.0 + 1e-9);
  const Vec mid = 0.5 * (lo + hi);
  const Vec half = Vec::Constant(n, 0.5 * side);
  const CellGrid g(mid - half, mid + half, ce.resolution);
  std::vector<long long> keys;
  keys.reserve(cloud.points.size());
  for (const Vec& p : cloud.points) {
    const long long k = g.index(p);
    if (k >= 0) keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  for (long long k : keys) ce.measure += cell_measure(m, g, k);
  ce.marked_cells = static_cast<long long>(keys.size());
  return ce;
}

BMReport brunn_minkowski_check(const LagrangianModel& m, const RegionSpec& A0,
                               const RegionSpec& A1, double lambda, double K, double N,
                               const BMSpec& spec) {
  BMReport r;
  r.lambda = lambda;
  r.K = K;
  r.N = N;
  r.tolerance = spec.tolerance;
  r.seed = spec.pairs.seed;
  r.mu0 = region_measure(m, A0);
  r.mu1 = region_measure(m, A1);
  if (!(r.mu0 > 0.0 && r.mu1 > 0.0)) throw DomainError("brunn_minkowski_check: empty region");
  const MidpointCloud cl = midpoint_set(m, A0, A1, lambda, spec.pairs);
  r.attempted = cl.attempted;
  r.failed = cl.failed;
  r.cold_solves = cl.cold_solves;
  r.failure_rate = cl.failure_rate;
  r.inconclusive = cl.inconclusive;
  if (cl.points.empty()) return r;
  const CoverageEstimate ce = measure_lower_estimate(m, cl, spec.resolution);
  r.estimate = ce.measure;
  r.resolution = ce.resolution;
  r.marked_cells = ce.marked_cells;
  r.ell_min = cl.ell_min;
  r.ell_max = cl.ell_max;
  for (double l : cl.ell)
    if (l < r.ell_min || l > r.ell_max) throw NumericalError("brunn_minkowski_check: ell range");

  // inf of beta_t over the observed durations; beta_t is monotone in ell, checked on a grid.
  auto beta_inf = [&](double t) {
    const int k = 33;
    double lo = kInf, prev = 0.0;
    int dir = 0;
    for (int i = 0; i < k; ++i) {
      const double l = r.ell_min + (r.ell_max - r.ell_min) * i / (k - 1.0);
      const DistortionTriple d = distortion(t, K, N, l);
      const double b = d.infinite ? kInf : d.beta;
      if (i > 0) {
        const int s = b > prev ? 1 : (b < prev ? -1 : 0);
        if (s != 0 && dir != 0 && s != dir) r.beta_monotone = false;
        if (s != 0) dir = s;
      }
      prev = b;
      lo = std::min(lo, b);
    }
    return lo;
  };
  r.beta_0 = beta_inf(1.0 - lambda);
  r.beta_1 = beta_inf(lambda);
  r.bound = generalized_mean(r.beta_0 * r.mu0, r.beta_1 * r.mu1, std::isinf(N) ? 0.0 : 1.0 / N,
                             lambda);
  r.margin = r.estimate - r.bound;
  r.relative_margin = r.margin / r.bound;
  r.pass = !r.inconclusive && std::isfinite(r.bound) && r.relative_margin >= -spec.tolerance;
  return r;
}

std::optional<double> e_star_closed_form(const LagrangianModel& m, const Vec& x, const Vec& p) {
  const LagrangianModel* base = &m;
  while (const auto* rw = dynamic_cast<const ReweightedModel*>(base)) base = &rw->base();
  const auto* cl = dynamic_cast<const ClassicalLagrangian*>(base);
  if (!cl) return std::nullopt;
  const double U = cl->fields().potential(x);
  if (!(U > 0.0)) throw DomainError("e_star: empty indicatrix (U <= 0)");
  const Mat g = cl->fields().metric(x);
  return std::sqrt(2.0 * U) * std::sqrt(p.dot(tonelli_factor(g).solve(p)));
}

double e_star(const LagrangianModel& m, const Vec& x, const Vec& p, const EStarSpec& spec) {
  const int n = m.dim();
  auto value = [&](const Vec& u) { return std::abs(p.dot(indicatrix_sample(m, x, u).v)); };
  if (n == 1) return std::max(value(Vec::Ones(1)), value(-Vec::Ones(1)));
  const int count = spec.directions > 0
                        ? spec.directions
                        : (n == 2 ? 64 : std::min(2000, static_cast<int>(std::pow(24, n - 1))));
  std::vector<std::pair<double, Vec>> starts;
  for (const Vec& u : start_directions(n, count, spec.seed)) starts.push_back({value(u), u});
  std::sort(starts.begin(), starts.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  double best = starts.front().first;
  const double delta = 1e-5;
  for (std::size_t s = 0; s < std::min<std::size_t>(3, starts.size()); ++s) {
    Vec u = starts[s].second;
    double fu = starts[s].first;
    double step = 2.0 * kPi / count;
    for (int it = 0; it < 200 && step > 1e-12; ++it) {
      const Mat B = complement_basis(u);
      Vec grad(n - 1);
      for (int k = 0; k < n - 1; ++k)
        grad(k) = (value((u + delta * B.col(k)).normalized()) -
                   value((u - delta * B.col(k)).normalized())) /
                  (2.0 * delta);
      if (grad.norm() < 1e-14) break;
      const Vec dir = B * grad.normalized();
      bool moved = false;
      for (int k = 0; k < 40; ++k, step *= 0.5) {
        const Vec un = (u + step * dir).normalized();
        const double fn = value(un);
        if (fn > fu) {
          u = un;
          fu = fn;
          moved = true;
          step *= 2.0;
          break;
        }
      }
      if (!moved) break;
    }
    best = std::max(best, fu);
  }
  return best;
}

FunctionalReport functional_check(const LagrangianModel& m, const Sampler& sample,
                                  const std::function<double(const Vec&)>& f,
                                  const std::function<Vec(const Vec&)>& df,
                                  const FunctionalSpec& spec) {
  if (spec.samples < 2) throw DomainError("functional_check: need at least two samples");
  if (spec.kind == FunctionalKind::Poincare && !(spec.diameter > 0.0 && std::isfinite(spec.diameter)))
    throw DomainError("functional_check: Poincare needs a finite diameter estimate");
  if (spec.kind == FunctionalKind::LogSobolev && !(spec.K > 0.0))
    throw DomainError("functional_check: log-Sobolev needs K > 0");
  FunctionalReport r;
  r.kind = spec.kind;
  r.samples = spec.samples;
  r.tolerance = spec.tolerance;
  Rng rng = Rng(spec.seed).substream("functional");
  const int n = m.dim();
  std::vector<double> fv(spec.samples), ev(spec.samples);
  for (int i = 0; i < spec.samples; ++i) {
    const Vec x = sample(rng);
    fv[i] = f(x);
    Vec g;
    if (df) {
      g = df(x);
    } else {
      g.resize(n);
      for (int a = 0; a < n; ++a) {
        const double h = spec.fd_step * std::max(1.0, std::abs(x(a)));
        Vec xp = x, xm = x;
        xp(a) += h;
        xm(a) -= h;
        g(a) = (f(xp) - f(xm)) / (2.0 * h);
      }
    }
    const std::optional<double> cf = e_star_closed_form(m, x, g);
    r.closed_form_estar = cf.has_value();
    ev[i] = cf ? *cf : e_star(m, x, g);
  }
  auto mean = [&](auto&& fn) {
    double s = 0.0;
    for (int i = 0; i < spec.samples; ++i) s += fn(i);
    return s / spec.samples;
  };
  const double grad2 = mean([&](int i) { return ev[i] * ev[i]; });
  double scale = 0.0;
  if (spec.kind == FunctionalKind::Poincare) {
    const double mu = mean([&](int i) { return fv[i]; });
    r.lhs = mean([&](int i) { return (fv[i] - mu) * (fv[i] - mu); });
    r.constant = spec.diameter * spec.diameter / (kPi * kPi);
    r.rhs = r.constant * grad2;
    scale = mean([&](int i) { return fv[i] * fv[i]; });
  } else {
    const double s2 = mean([&](int i) { return fv[i] * fv[i]; });
    if (!(s2 > 0.0)) throw DomainError("functional_check: f vanishes; cannot normalise to unit L2");
    r.lhs = mean([&](int i) {
      const double g2 = fv[i] * fv[i] / s2;
      return g2 > 0.0 ? g2 * std::log(g2) : 0.0;
    });
    r.constant = 2.0 / spec.K;
    r.rhs = r.constant * grad2 / s2;
    scale = 1.0;
  }
  r.margin = r.rhs - r.lhs;
  r.pass = r.lhs <= r.rhs * (1.0 + spec.tolerance) + 1e-12 * scale;
  return r;
}

}  // namespace lcd
