#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lcd/numerics.hpp"

namespace lcd {

using Fn1 = std::function<double(double)>;

// Density on [a, b] sampled on a uniform grid, with its cumulative distribution.
class Measure1D {
 public:
  Measure1D() = default;
  Measure1D(double a, double b, std::vector<double> density);
  static Measure1D from_function(const Fn1& rho, double a, double b, int cells = 2048);
  // Density in the variable t; named parameters may appear in the expression.
  static Measure1D from_expression(const std::string& src, double a, double b, int cells = 2048,
                                   const std::map<std::string, double>& params = {});

  double a() const { return a_; }
  double b() const { return b_; }
  int cells() const { return static_cast<int>(rho_.size()) - 1; }
  double h() const { return (b_ - a_) / cells(); }
  double node(int i) const { return a_ + i * h(); }
  const std::vector<double>& samples() const { return rho_; }
  const std::vector<double>& cdf_nodes() const { return cdf_; }
  double mass() const { return cdf_.back(); }

  // Uses the analytic density when one was supplied, linear interpolation otherwise; 0 outside.
  double density(double t) const;
  double cdf(double t) const;
  double tail(double t) const { return mass() - cdf(t); }
  // Right-continuous inverse: inf{t : cdf(t) > c}.
  double quantile(double c) const;
  Measure1D normalized() const;
  bool has_analytic() const { return static_cast<bool>(exact_); }

 private:
  double a_ = 0.0, b_ = 1.0;
  std::vector<double> rho_, cdf_;
  Fn1 exact_;
};

struct TransportMap1D {
  std::vector<double> t, T;  // source grid nodes and T at those nodes
  std::vector<double> Tprime;
  std::vector<bool> in_support;
  bool orientation_ok = true;  // m0([t,inf)) <= m1([t,inf)) for all t
  double at(double s) const;
  double interpolant(double s, double lambda) const { return (1 - lambda) * s + lambda * at(s); }
};

TransportMap1D monotone_map(const Measure1D& m0, const Measure1D& m1);
Measure1D interpolate(const Measure1D& m0, const Measure1D& m1, double lambda);
// Same, reusing an already computed map.
Measure1D interpolate(const Measure1D& m0, const Measure1D& m1, const TransportMap1D& T,
                      double lambda);

// S_N[m_lambda | m] (N = inf gives the relative Boltzmann entropy).
double entropy(const Measure1D& mu, const Measure1D& ref, double N);

struct DistortionTriple {
  double sigma = 0.0, tau = 0.0, beta = 0.0;
  bool infinite = false;
};
DistortionTriple distortion(double t, double K, double N, double ell);

struct CD1DReport {
  double K = 0.0, N = kInf, tolerance = 1e-6;
  double max_residual = -kInf, argmax = 0.0;
  bool pass = false;
};
// max of K + psi'^2/(N-1) - psi'' over interior nodes, psi = -log density.
CD1DReport cd1d_check(const Measure1D& m, double K, double N, double tol = 1e-6);

struct ConvexityPoint {
  double lambda = 0.0, lhs = 0.0, rhs = 0.0, margin = 0.0;
  bool vacuous = false;
};
struct ConvexityReport {
  double K = 0.0, N = kInf, tolerance = 1e-4;
  std::vector<ConvexityPoint> points;
  double worst_margin = kInf;
  bool orientation_ok = true, vacuous = false, pass = false;
};
ConvexityReport displacement_convexity_check(const Measure1D& m, const Measure1D& m0,
                                             const Measure1D& m1, double K, double N,
                                             const std::vector<double>& lambdas, double tol = 1e-4);

struct BBLReport {
  double q = 0.0, lambda = 0.5;
  double lhs = 0.0, bound = 0.0, margin = 0.0;
  bool tail_hypothesis = false, mean_hypothesis = false;
  double worst_hypothesis_gap = 0.0;
  bool vacuous = false, pass = false;
};
BBLReport oriented_bbl_check(const Fn1& h0, const Fn1& h1, const Fn1& hl, double q, double lambda,
                             double a, double b, int cells = 4096, int pair_grid = 200,
                             double tol = 1e-6);

enum class PhiKind { Square, Entropy, Power };
struct PhiSpec {
  PhiKind kind = PhiKind::Square;
  double p = 2.0;  // Power: Phi(t) = (t^p + p - 1)/p
  double operator()(double t) const;
  double second(double t) const;
};

struct InequalityReport {
  double lhs = 0.0, rhs = 0.0, margin = 0.0, tolerance = 0.0;
  bool pass = false;
};
// int Phi(f) dm - Phi(int f dm) <= (1/2K) int Phi''(f) f'^2 dm for probability m with psi'' >= K.
InequalityReport phi_entropy_check(const Measure1D& m, const Fn1& f, const Fn1& df,
                                   const PhiSpec& phi, double K, double tol = 1e-9);
// int f^2 dm <= (D^2/pi^2) int f'^2 dm after centring f, D = b - a.
InequalityReport poincare_1d_check(const Measure1D& m, const Fn1& f, const Fn1& df,
                                   double tol = 1e-9);

}  // namespace lcd
