#pragma once

#include <vector>

#include "lcd/dynamics.hpp"

namespace lcd {

enum class SeedMode { Minimal, Equality };

// Second-order data of a local Hamilton-Jacobi solution u at x: du = p, coordinate Hessian S.
struct HJSeed {
  Vec x, p, v;
  Mat S;
  double c0 = 0.0;
};

HJSeed seed_construct(const LagrangianModel& m, const PhasePoint& q, SeedMode mode,
                      double N = kInf);
// Seed with a prescribed transverse coefficient c0 (equality-type Hessian).
HJSeed seed_with_c0(const LagrangianModel& m, const PhasePoint& q, double c0);
// max_i |H_x + S H_p|_i
double tangency_residual(const LagrangianModel& m, const HJSeed& seed);

// div_mu(grad u) at q given the coordinate Hessian U of u.
double needle_laplacian(const LagrangianModel& m, const PhasePoint& q, const Mat& U);
// The same quantity at signed time t along the characteristic of the seed.
double jacobi_laplacian_at(const LagrangianModel& m, const HJSeed& seed, double t);

struct Needle {
  std::vector<double> t;
  std::vector<Vec> x, v;
  std::vector<double> rho, psi, Lu, detX;
  std::vector<Mat> U;
  bool truncated = false;       // conjugate point or chart exit inside the window
  double conjugate_time = kInf; // signed time of the first conjugate point, if any
  double max_condition = 1.0;   // of X(t), logged for the linear solves
  double h = 0.0;
  std::size_t origin = 0;       // index of t = 0
};

Needle extract_needle(const LagrangianModel& m, const HJSeed& seed, double t0, double t1,
                      double h);

struct NeedleReport {
  double K = 0.0, N = kInf, tolerance = 5e-4;
  std::vector<double> t, residual;
  double max_residual = -kInf;
  double residual_at_origin = 0.0;
  bool pass = false;
};

NeedleReport needle_cd_check(const Needle& needle, double K, double N, double tol = 5e-4);

}  // namespace lcd
