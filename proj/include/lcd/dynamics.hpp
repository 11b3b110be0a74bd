#pragma once

#include <vector>

#include "lcd/model.hpp"

namespace lcd {

struct FlowOptions {
  double energy_tolerance = 1e-7;
  // Throw when |E - E(0)| exceeds 10x the tolerance.
  bool check_energy = true;
  bool zero_energy = false;
  bool record_energy = true;  // false: E holds only the initial value (saves a jet per step)
};

struct Trajectory {
  double h = 0.0;
  std::vector<double> t;
  std::vector<Vec> x, v;
  std::vector<double> E;
  bool left_chart = false;

  std::size_t size() const { return t.size(); }
  PhasePoint state(std::size_t i) const { return {x[i], v[i]}; }
  PhasePoint back() const { return {x.back(), v.back()}; }
  double max_energy_drift() const;
};

// Acceleration a solving L_vv a = L_x - L_vx v.
Vec semispray(const LagrangianModel& m, const PhasePoint& q);
Vec semispray(const Jet& j, const Vec& v);

// One classical RK4 step of (x', v') = (v, semispray).
PhasePoint rk4_step(const LagrangianModel& m, const PhasePoint& q, double h);
// Short flow by an arbitrary (possibly negative) time, in steps no larger than h.
PhasePoint flow_by(const LagrangianModel& m, const PhasePoint& q, double t, double h = 1e-3);

Trajectory el_flow(const LagrangianModel& m, const PhasePoint& q0, double T, double h,
                   const FlowOptions& opt = {});

// Second derivatives of H at the Legendre image of q; Hpx(i, j) = d^2H / dp_i dx^j.
struct HamiltonianHessian {
  Mat Hpp, Hpx, Hxx;
};
HamiltonianHessian hamiltonian_hessian(const LagrangianModel& m, const PhasePoint& q);
// The 2n x 2n generator of the linearized Hamiltonian flow in (dx, dp).
Mat variational_generator(const HamiltonianHessian& hh);

// One joint RK4 step of the base state and the 2n x k matrix J.
void variational_step(const LagrangianModel& m, PhasePoint& q, Mat& J, double dt);

struct VariationalState {
  Trajectory base;
  std::vector<Mat> J;  // 2n x k at every grid point
};
VariationalState variational_flow(const LagrangianModel& m, const PhasePoint& q0, double T,
                                  double h, const Mat& J0, const FlowOptions& opt = {});

// d/dt L_vv along the flow, 4th-order central differences with step h.
Mat sigma_Lvv(const LagrangianModel& m, const PhasePoint& q, double h);
// Gamma(i, j) = Gamma_i^j.
Mat connection_coeffs(const LagrangianModel& m, const PhasePoint& q);

struct Deviation {
  Vec Lambda;
  double par = 0.0;
  double perp2 = 0.0;
};
Deviation deviation(const LagrangianModel& m, const PhasePoint& q);
Deviation deviation_from(const Mat& g, const Vec& v, const Vec& Lambda);

Mat symplectic_matrix(int n);

}  // namespace lcd
