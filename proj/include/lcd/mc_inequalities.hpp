#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lcd/cost.hpp"

namespace lcd {

using Metric = std::function<double(const Vec&, const Vec&)>;
using Sampler = std::function<Vec(Rng&)>;

enum class RegionKind { Box, MetricBall, ForwardBall };

// A0, A1 of the Brunn-Minkowski check. Metric balls use a supplied distance; forward balls are the
// union of grid cells swept by extremals of duration < radius.
struct RegionSpec {
  RegionKind kind = RegionKind::Box;
  Vec lower, upper;  // the box itself, or a bounding box
  Vec center;
  double radius = 0.0;
  Metric distance;
  BallMask mask;
  bool contains(const Vec& x) const;
  int dim() const { return static_cast<int>(lower.size()); }
  std::string describe() const;
};

RegionSpec box_region(const LagrangianModel& m, const Vec& lower, const Vec& upper);
RegionSpec metric_ball_region(const LagrangianModel& m, const Vec& center, double radius,
                              Metric distance);
RegionSpec forward_ball_region(const LagrangianModel& m, const Vec& center, double radius,
                               const BallSpec& spec = {});

// mu(A) by quadrature; boundary cells of metric balls are subdivided.
double region_measure(const LagrangianModel& m, const RegionSpec& A);
// mu-uniform points of A by rejection against a bound on the density.
Sampler region_sampler(const LagrangianModel& m, const RegionSpec& A);

struct MidpointSpec {
  int pairs = 100000;
  double h = 0.1;      // shooting step for the pairs
  double tol = 1e-7;   // endpoint residual; far below any cell size
  int max_iter = 30;
  int max_anchors = 4096;  // solved pairs kept as warm starts
  std::uint64_t seed = 1;
};

struct MidpointCloud {
  double lambda = 0.5;
  std::vector<Vec> points;
  std::vector<double> ell;             // duration of the extremal behind each point
  std::vector<unsigned char> status;   // per attempted pair: 1 converged, 0 failed
  int attempted = 0, failed = 0, cold_solves = 0;
  double failure_rate = 0.0;
  bool inconclusive = false;
  double ell_min = kInf, ell_max = 0.0;
  Vec lo, hi;  // window covering A0, A1 and the cloud
  std::uint64_t seed = 1;
};

MidpointCloud midpoint_set(const LagrangianModel& m, const RegionSpec& A0, const RegionSpec& A1,
                           double lambda, const MidpointSpec& spec = {});

// 0 means the default cell budget 256^2 spread over n axes.
int default_resolution(int n);

struct CoverageEstimate {
  double measure = 0.0;
  int resolution = 0;
  long long marked_cells = 0;
};
// Sum of cell measures over cells holding at least one midpoint (a coverage estimate that
// approaches mu(A_lambda) from below as pairs grow, up to boundary cells).
CoverageEstimate measure_lower_estimate(const LagrangianModel& m, const MidpointCloud& cloud,
                                        int resolution = 0);

struct BMSpec {
  MidpointSpec pairs;
  int resolution = 0;
  double tolerance = 0.03;  // relative to the bound
};

struct BMReport {
  double lambda = 0.5, K = 0.0, N = kInf;
  double mu0 = 0.0, mu1 = 0.0, estimate = 0.0, bound = 0.0;
  double margin = 0.0, relative_margin = 0.0, tolerance = 0.03;
  double ell_min = 0.0, ell_max = 0.0;
  double beta_0 = 1.0, beta_1 = 1.0;  // beta_{1-lambda} and beta_lambda over the set pair
  bool beta_monotone = true;
  int attempted = 0, failed = 0, cold_solves = 0, resolution = 0;
  long long marked_cells = 0;
  double failure_rate = 0.0;
  std::uint64_t seed = 1;
  bool inconclusive = false, pass = false;
};

BMReport brunn_minkowski_check(const LagrangianModel& m, const RegionSpec& A0,
                               const RegionSpec& A1, double lambda, double K, double N,
                               const BMSpec& spec = {});

struct EStarSpec {
  int directions = 0;  // 0: 64 in 2D, 24^(n-1) capped at 2000 otherwise
  std::uint64_t seed = 1;
};
// max |p(v)| over the indicatrix at x, by multistart projected ascent.
double e_star(const LagrangianModel& m, const Vec& x, const Vec& p, const EStarSpec& spec = {});
// sqrt(2U) |p|_{g^-1} for L = g(v,v)/2 + U - eta(v), whose indicatrix is the g-sphere of radius
// sqrt(2U); empty for other models.
std::optional<double> e_star_closed_form(const LagrangianModel& m, const Vec& x, const Vec& p);

enum class FunctionalKind { Poincare, LogSobolev };

struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::Poincare;
  double K = 0.0;           // log-Sobolev constant 2/K
  double diameter = kInf;   // Poincare constant D^2/pi^2
  int samples = 20000;
  double tolerance = 0.05;
  double fd_step = 1e-6;    // central differences when no gradient is given
  std::uint64_t seed = 1;
};

struct FunctionalReport {
  FunctionalKind kind = FunctionalKind::Poincare;
  double lhs = 0.0, rhs = 0.0, margin = 0.0, constant = 0.0, tolerance = 0.05;
  int samples = 0;
  bool closed_form_estar = false;
  bool pass = false;
};

// Both integrals by Monte Carlo over the probability measure drawn by `sample`; f is centred
// (Poincare) or scaled to unit L2 norm (log-Sobolev) using the same samples.
FunctionalReport functional_check(const LagrangianModel& m, const Sampler& sample,
                                  const std::function<double(const Vec&)>& f,
                                  const std::function<Vec(const Vec&)>& df,
                                  const FunctionalSpec& spec);

}  // namespace lcd
