#include "lcd/transport1d.hpp"

#include <algorithm>

#include "lcd/expr.hpp"

namespace lcd {

namespace {

double integrate(const std::vector<double>& y, double h) {
  if (y.size() < 2) return 0.0;
  if ((y.size() - 1) % 2 == 0) return simpson(y, h);
  return cumulative_simpson(y, h).back();
}

}  // namespace

Measure1D::Measure1D(double a, double b, std::vector<double> density)
    : a_(a), b_(b), rho_(std::move(density)) {
  if (!(b > a)) throw DomainError("Measure1D: need a < b");
  if (rho_.size() < 3) throw DomainError("Measure1D: need at least 2 cells");
  for (double r : rho_)
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("Measure1D: density must be finite and >= 0");
  cdf_ = cumulative_simpson(rho_, h());
  // The quadratic rule at odd nodes can undershoot next to jumps; keep the CDF monotone.
  for (std::size_t i = 1; i < cdf_.size(); ++i) {
    const double hi = (i + 1 < cdf_.size() && i % 2 == 1) ? cdf_[i + 1] : kInf;
    cdf_[i] = std::clamp(cdf_[i], cdf_[i - 1], std::max(cdf_[i - 1], hi));
  }
  if (!(mass() > 0.0)) throw DomainError("Measure1D: total mass must be positive");
}

Measure1D Measure1D::from_function(const Fn1& rho, double a, double b, int cells) {
  if (cells < 2) throw DomainError("Measure1D: need at least 2 cells");
  std::vector<double> s(cells + 1);
  for (int i = 0; i <= cells; ++i) s[i] = rho(a + (b - a) * i / cells);
  Measure1D m(a, b, std::move(s));
  m.exact_ = rho;
  return m;
}

Measure1D Measure1D::from_expression(const std::string& src, double a, double b, int cells,
                                     const std::map<std::string, double>& params) {
  std::vector<std::string> slots = {"t"};
  std::vector<double> vals = {0.0};
  for (const auto& [k, v] : params) {
    slots.push_back(k);
    vals.push_back(v);
  }
  auto f = std::make_shared<expr::Compiled>(expr::parse(src), slots);
  return from_function(
      [f, vals](double t) mutable {
        vals[0] = t;
        return (*f)(vals);
      },
      a, b, cells);
}

double Measure1D::density(double t) const {
  if (t < a_ || t > b_) return 0.0;
  if (exact_) return exact_(t);
  const double u = (t - a_) / h();
  const int i = std::min(cells() - 1, static_cast<int>(u));
  const double w = u - i;
  return (1 - w) * rho_[i] + w * rho_[i + 1];
}

double Measure1D::cdf(double t) const {
  if (t <= a_) return 0.0;
  if (t >= b_) return mass();
  const double hh = h();
  const int i = std::min(cells() - 1, static_cast<int>((t - a_) / hh));
  const double s = t - node(i);
  const double r0 = rho_[i], r1 = rho_[i + 1];
  const double trap = 0.5 * hh * (r0 + r1);
  const double part = r0 * s + 0.5 * (r1 - r0) * s * s / hh;
  const double frac = trap > 0.0 ? std::clamp(part / trap, 0.0, 1.0) : s / hh;
  return cdf_[i] + frac * (cdf_[i + 1] - cdf_[i]);
}

double Measure1D::quantile(double c) const {
  if (c >= mass()) return b_;
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), std::max(c, 0.0));
  const int j = static_cast<int>(it - cdf_.begin());
  const int i = std::max(0, j - 1);
  const double hh = h();
  const double r0 = rho_[i], r1 = rho_[i + 1];
  const double dc = cdf_[i + 1] - cdf_[i];
  const double phi = dc > 0.0 ? std::clamp((c - cdf_[i]) / dc, 0.0, 1.0) : 0.0;
  const double trap = 0.5 * hh * (r0 + r1);
  if (!(trap > 0.0)) return node(i) + phi * hh;
  // r0 s + (r1 - r0) s^2 / (2h) = phi * trap
  const double A = 0.5 * (r1 - r0) / hh, B = r0, C = -phi * trap;
  double s;
  if (std::abs(A) < 1e-14 * std::max(B, 1e-300) / hh) {
    s = -C / B;
  } else {
    const double disc = std::max(0.0, B * B - 4 * A * C);
    s = (2 * -C) / (B + std::sqrt(disc));
  }
  for (int k = 0; k < 3; ++k) {
    const double f = A * s * s + B * s + C, df = 2 * A * s + B;
    if (df > 0.0) s -= f / df;
  }
  return node(i) + std::clamp(s, 0.0, hh);
}

Measure1D Measure1D::normalized() const {
  Measure1D m = *this;
  const double M = mass();
  for (double& r : m.rho_) r /= M;
  for (double& c : m.cdf_) c /= M;
  if (exact_) {
    const Fn1 f = exact_;
    m.exact_ = [f, M](double t) { return f(t) / M; };
  }
  return m;
}

double TransportMap1D::at(double s) const {
  if (s <= t.front()) return T.front();
  if (s >= t.back()) return T.back();
  const double h = (t.back() - t.front()) / (t.size() - 1);
  const std::size_t i = std::min(t.size() - 2, static_cast<std::size_t>((s - t.front()) / h));
  const double w = (s - t[i]) / h;
  return (1 - w) * T[i] + w * T[i + 1];
}

TransportMap1D monotone_map(const Measure1D& m0, const Measure1D& m1) {
  const double M0 = m0.mass(), M1 = m1.mass();
  if (std::abs(M0 - M1) > 1e-9 * std::max(1.0, M0))
    throw DomainError("monotone_map: total masses differ");
  TransportMap1D map;
  const int n = m0.cells();
  for (int i = 0; i <= n; ++i) {
    const double t = m0.node(i);
    const double c = m0.cdf_nodes()[i] * (M1 / M0);
    const double T = m1.quantile(c);
    map.t.push_back(t);
    map.T.push_back(T);
    const double r0 = m0.density(t);
    const bool inside = r0 > 0.0 || (m0.cdf_nodes()[i] > 0.0 && m0.cdf_nodes()[i] < M0);
    map.in_support.push_back(inside);
    const double r1 = m1.density(T);
    map.Tprime.push_back(r1 > 0.0 ? r0 / r1 : kInf);
  }
  for (int i = 1; i <= n; ++i)
    if (map.T[i] < map.T[i - 1] - 1e-12 * (m1.b() - m1.a()))
      throw NumericalError("monotone_map: computed map is not monotone");
  // Orientation: compare tails on both grids.
  auto check = [&](double s) {
    if (m0.tail(s) > m1.tail(s) + 1e-9 * std::max(1.0, M0)) map.orientation_ok = false;
  };
  for (int i = 0; i <= m0.cells(); ++i) check(m0.node(i));
  for (int i = 0; i <= m1.cells(); ++i) check(m1.node(i));
  return map;
}

Measure1D interpolate(const Measure1D& m0, const Measure1D& m1, const TransportMap1D& T,
                      double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("interpolate: need 0 <= lambda <= 1");
  if (lambda == 0.0) return m0;
  if (lambda == 1.0) return m1;
  std::vector<double> s, dens;
  for (std::size_t i = 0; i < T.t.size(); ++i) {
    if (!T.in_support[i]) continue;
    const double r0 = m0.density(T.t[i]);
    const double r1 = m1.density(T.T[i]);
    const double d = (r0 > 0.0 && r1 > 0.0) ? 1.0 / ((1 - lambda) / r0 + lambda / r1) : 0.0;
    s.push_back(T.interpolant(T.t[i], lambda));
    dens.push_back(d);
  }
  if (s.size() < 2) throw NumericalError("interpolate: source support is degenerate");
  const int cells = m0.cells();
  const double lo = s.front(), hi = s.back();
  std::vector<double> out(cells + 1);
  for (int k = 0; k <= cells; ++k) {
    const double x = lo + (hi - lo) * k / cells;
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    std::size_t j = std::clamp<std::size_t>(it - s.begin(), 1, s.size() - 1);
    const double w = s[j] > s[j - 1] ? (x - s[j - 1]) / (s[j] - s[j - 1]) : 1.0;
    out[k] = (1 - w) * dens[j - 1] + w * dens[j];
  }
  return Measure1D(lo, hi, std::move(out));
}

Measure1D interpolate(const Measure1D& m0, const Measure1D& m1, double lambda) {
  return interpolate(m0, m1, monotone_map(m0, m1), lambda);
}

double entropy(const Measure1D& mu, const Measure1D& ref, double N) {
  if (!(N > 1.0)) throw DomainError("entropy: need N > 1");
  std::vector<double> y(mu.cells() + 1);
  for (int i = 0; i <= mu.cells(); ++i) {
    const double t = mu.node(i);
    const double r = mu.samples()[i];
    if (r == 0.0) {
      y[i] = 0.0;
      continue;
    }
    const double w = ref.density(t);
    if (!(w > 0.0)) throw DomainError("entropy: reference density vanishes where the measure is positive");
    y[i] = std::isinf(N) ? r * std::log(r / w) : -std::pow(r, 1.0 - 1.0 / N) * std::pow(w, 1.0 / N);
  }
  return integrate(y, mu.h());
}

DistortionTriple distortion(double t, double K, double N, double ell) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("distortion: need t in [0,1]");
  if (!(ell >= 0.0)) throw DomainError("distortion: need ell >= 0");
  if (!(N > 1.0)) throw DomainError("distortion: need N > 1");
  DistortionTriple d;
  if (ell == 0.0) {
    d.sigma = d.tau = t;
    d.beta = 1.0;
    return d;
  }
  if (std::isinf(N)) {
    d.sigma = d.tau = 1.0;
    d.beta = std::exp(K / 6.0 * (1.0 - t * t) * ell * ell);
    return d;
  }
  if (K == 0.0) {
    d.sigma = d.tau = t;
    d.beta = 1.0;
    return d;
  }
  const double th = ell * std::sqrt(std::abs(K) / (N - 1.0));
  if (K > 0.0 && th >= kPi) {
    d.sigma = d.tau = d.beta = kInf;
    d.infinite = true;
    return d;
  }
  auto s = [K](double x) { return K > 0.0 ? std::sin(x) : std::sinh(x); };
  d.sigma = s(t * th) / s(th);
  d.tau = std::pow(t, 1.0 / N) * std::pow(d.sigma, 1.0 - 1.0 / N);
  // t^{1-N} sigma^{N-1}, with the t -> 0 limit (th / s(th))^{N-1}
  const double ratio = t > 0.0 ? d.sigma / t : th / s(th);
  d.beta = std::pow(ratio, N - 1.0);
  return d;
}

CD1DReport cd1d_check(const Measure1D& m, double K, double N, double tol) {
  if (m.cells() < 8) throw DomainError("cd1d_check: grid needs at least 9 points");
  if (!(N > 1.0)) throw DomainError("cd1d_check: need N > 1");
  CD1DReport r;
  r.K = K;
  r.N = N;
  r.tolerance = tol;
  const int n = m.cells();
  std::vector<double> psi(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double d = m.density(m.node(i));
    if (i > 0 && i < n && !(d > 0.0)) throw DomainError("cd1d_check: density vanishes inside the interval");
    psi[i] = d > 0.0 ? -std::log(d) : 0.0;
  }
  const double h = m.h();
  for (int i = 2; i + 2 <= n; ++i) {
    const double d1 = d1_5pt(psi[i - 2], psi[i - 1], psi[i + 1], psi[i + 2], h);
    const double d2 = d2_5pt(psi[i - 2], psi[i - 1], psi[i], psi[i + 1], psi[i + 2], h);
    const double res = K + (std::isinf(N) ? 0.0 : d1 * d1 / (N - 1.0)) - d2;
    if (res > r.max_residual) {
      r.max_residual = res;
      r.argmax = m.node(i);
    }
  }
  r.pass = r.max_residual <= tol;
  return r;
}

ConvexityReport displacement_convexity_check(const Measure1D& m, const Measure1D& m0_,
                                             const Measure1D& m1_, double K, double N,
                                             const std::vector<double>& lambdas, double tol) {
  ConvexityReport rep;
  rep.K = K;
  rep.N = N;
  rep.tolerance = tol;
  const Measure1D m0 = m0_.normalized(), m1 = m1_.normalized();
  const TransportMap1D T = monotone_map(m0, m1);
  rep.orientation_ok = T.orientation_ok;

  // Integrals against dm0 over the source grid.
  auto against_m0 = [&](const std::function<double(double t, double Tt, double r0)>& g) {
    std::vector<double> y(T.t.size(), 0.0);
    for (std::size_t i = 0; i < T.t.size(); ++i) {
      const double r0 = m0.density(T.t[i]);
      if (r0 > 0.0) y[i] = g(T.t[i], T.T[i], r0);
    }
    return integrate(y, m0.h());
  };

  double S0 = 0.0, S1 = 0.0, W2 = 0.0;
  if (std::isinf(N)) {
    S0 = entropy(m0, m, N);
    S1 = entropy(m1, m, N);
    W2 = against_m0([](double t, double Tt, double r0) { return (Tt - t) * (Tt - t) * r0; });
  }
  for (double lam : lambdas) {
    ConvexityPoint p;
    p.lambda = lam;
    p.lhs = entropy(interpolate(m0, m1, T, lam), m, N);
    if (std::isinf(N)) {
      p.rhs = (1 - lam) * S0 + lam * S1 - 0.5 * K * lam * (1 - lam) * W2;
    } else {
      p.rhs = against_m0([&](double t, double Tt, double r0) {
        const double ell = std::abs(Tt - t);
        const DistortionTriple a = distortion(1 - lam, K, N, ell);
        const DistortionTriple b = distortion(lam, K, N, ell);
        if (a.infinite || b.infinite) {
          p.vacuous = true;
          return 0.0;
        }
        const double f0 = r0 / m.density(t);
        const double r1 = m1.density(Tt);
        const double w1 = m.density(Tt);
        double term = a.tau * std::pow(f0, -1.0 / N) * r0;
        if (r1 > 0.0 && w1 > 0.0) term += b.tau * std::pow(r1 / w1, -1.0 / N) * r0;
        return -term;
      });
    }
    p.margin = p.rhs - p.lhs;
    rep.vacuous = rep.vacuous || p.vacuous;
    if (!p.vacuous) rep.worst_margin = std::min(rep.worst_margin, p.margin);
    rep.points.push_back(p);
  }
  rep.pass = rep.worst_margin >= -tol;
  return rep;
}

BBLReport oriented_bbl_check(const Fn1& h0, const Fn1& h1, const Fn1& hl, double q, double lambda,
                             double a, double b, int cells, int pair_grid, double tol) {
  if (!(q >= -1.0)) throw DomainError("oriented_bbl_check: need q >= -1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("oriented_bbl_check: need 0 < lambda < 1");
  if (cells % 2) ++cells;
  BBLReport r;
  r.q = q;
  r.lambda = lambda;
  const double h = (b - a) / cells;
  std::vector<double> y0(cells + 1), y1(cells + 1), yl(cells + 1);
  for (int i = 0; i <= cells; ++i) {
    const double t = a + i * h;
    y0[i] = h0(t);
    y1[i] = h1(t);
    yl[i] = hl(t);
  }
  const double I0 = simpson(y0, h), I1 = simpson(y1, h);
  r.lhs = simpson(yl, h);

  // Tails by the trapezoid rule: monotone for nonnegative data, so jumps in h0, h1 cannot
  // produce the spurious overshoot of the quadratic cumulative rule.
  std::vector<double> c0(cells + 1, 0.0), c1(cells + 1, 0.0);
  for (int i = 1; i <= cells; ++i) {
    c0[i] = c0[i - 1] + 0.5 * h * (y0[i - 1] + y0[i]);
    c1[i] = c1[i - 1] + 0.5 * h * (y1[i - 1] + y1[i]);
  }
  r.tail_hypothesis = c0.back() > 0.0 && c1.back() > 0.0;
  for (int i = 1; i < cells && r.tail_hypothesis; ++i)
    if ((c0.back() - c0[i]) / c0.back() > (c1.back() - c1[i]) / c1.back() + 1e-9)
      r.tail_hypothesis = false;

  double worst = kInf, scale = 0.0;
  for (int i = 0; i <= pair_grid; ++i) {
    const double t0 = a + (b - a) * i / pair_grid;
    const double v0 = h0(t0);
    scale = std::max(scale, v0);
    for (int j = i; j <= pair_grid; ++j) {
      const double t1 = a + (b - a) * j / pair_grid;
      const double need = generalized_mean(v0, h1(t1), q, lambda);
      worst = std::min(worst, hl((1 - lambda) * t0 + lambda * t1) - need);
    }
  }
  r.worst_hypothesis_gap = worst;
  r.mean_hypothesis = worst >= -1e-12 * std::max(1.0, scale);

  const double qq = std::isinf(q) ? 1.0 : (q == -1.0 ? -kInf : q / (q + 1.0));
  r.bound = generalized_mean(I0, I1, qq, lambda);
  r.margin = r.lhs - r.bound;
  r.vacuous = !(r.tail_hypothesis && r.mean_hypothesis);
  r.pass = r.vacuous || r.margin >= -tol;
  return r;
}

double PhiSpec::operator()(double t) const {
  switch (kind) {
    case PhiKind::Square: return t * t;
    case PhiKind::Entropy: return t > 0.0 ? t * std::log(t) : 0.0;
    case PhiKind::Power: return (std::pow(t, p) + p - 1.0) / p;
  }
  return 0.0;
}

double PhiSpec::second(double t) const {
  switch (kind) {
    case PhiKind::Square: return 2.0;
    case PhiKind::Entropy: return 1.0 / t;
    case PhiKind::Power: return (p - 1.0) * std::pow(t, p - 2.0);
  }
  return 0.0;
}

InequalityReport phi_entropy_check(const Measure1D& m_, const Fn1& f, const Fn1& df,
                                   const PhiSpec& phi, double K, double tol) {
  if (!(K > 0.0)) throw DomainError("phi_entropy_check: need K > 0");
  const Measure1D m = m_.normalized();
  if (!cd1d_check(m, K, kInf, 1e-6).pass)
    throw DomainError("phi_entropy_check: the density does not satisfy psi'' >= K");
  const int n = m.cells();
  std::vector<double> yf(n + 1), yphi(n + 1), yr(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = m.node(i), w = m.density(t);
    const double v = f(t), d = df(t);
    yf[i] = v * w;
    yphi[i] = phi(v) * w;
    yr[i] = phi.second(v) * d * d * w;
  }
  InequalityReport r;
  r.tolerance = tol;
  r.lhs = integrate(yphi, m.h()) - phi(integrate(yf, m.h()));
  r.rhs = integrate(yr, m.h()) / (2.0 * K);
  r.margin = r.rhs - r.lhs;
  r.pass = r.margin >= -tol;
  return r;
}

InequalityReport poincare_1d_check(const Measure1D& m, const Fn1& f, const Fn1& df, double tol) {
  const int n = m.cells();
  std::vector<double> yf(n + 1), yw(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = m.node(i), w = m.density(t);
    yf[i] = f(t) * w;
    yw[i] = w;
  }
  const double mean = integrate(yf, m.h()) / integrate(yw, m.h());
  std::vector<double> y2(n + 1), yd(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = m.node(i), w = m.density(t);
    const double c = f(t) - mean, d = df(t);
    y2[i] = c * c * w;
    yd[i] = d * d * w;
  }
  const double D = m.b() - m.a();
  InequalityReport r;
  r.tolerance = tol;
  r.lhs = integrate(y2, m.h());
  r.rhs = D * D / (kPi * kPi) * integrate(yd, m.h());
  r.margin = r.rhs - r.lhs;
  r.pass = r.margin >= -tol;
  return r;
}

}  // namespace lcd
