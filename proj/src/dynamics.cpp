#include "lcd/dynamics.hpp"

#include <algorithm>

namespace lcd {

double Trajectory::max_energy_drift() const {
  double d = 0.0;
  for (double e : E) d = std::max(d, std::abs(e - E.front()));
  return d;
}

Vec semispray(const Jet& j, const Vec& v) {
  const Vec rhs = j.Lx - j.Lvx * v;
  return tonelli_factor(j.Lvv).solve(rhs);
}

Vec semispray(const LagrangianModel& m, const PhasePoint& q) {
  return semispray(m.jet(q.x, q.v), q.v);
}

PhasePoint rk4_step(const LagrangianModel& m, const PhasePoint& q, double h) {
  const Vec& x = q.x;
  const Vec& v = q.v;
  const Vec a1 = semispray(m, {x, v});
  const Vec x2 = x + 0.5 * h * v, v2 = v + 0.5 * h * a1;
  const Vec a2 = semispray(m, {x2, v2});
  const Vec x3 = x + 0.5 * h * v2, v3 = v + 0.5 * h * a2;
  const Vec a3 = semispray(m, {x3, v3});
  const Vec x4 = x + h * v3, v4 = v + h * a3;
  const Vec a4 = semispray(m, {x4, v4});
  return {x + h / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4),
          v + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)};
}

PhasePoint flow_by(const LagrangianModel& m, const PhasePoint& q, double t, double h) {
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / h - 1e-12)));
  const double dt = t / steps;
  PhasePoint s = q;
  for (int i = 0; i < steps; ++i) s = rk4_step(m, s, dt);
  return s;
}

namespace {

int step_count(double T, double h) {
  if (!(h > 0.0) || !std::isfinite(T)) throw DomainError("flow: need finite T and h > 0");
  return std::max(1, static_cast<int>(std::llround(std::abs(T) / h)));
}

void start(Trajectory& tr, const LagrangianModel& m, const PhasePoint& q0, const FlowOptions& opt) {
  if (!m.chart().contains(q0.x)) throw ChartExit("flow: initial point outside chart box");
  const double E0 = energy(m, q0);
  if (opt.zero_energy && std::abs(E0) > 1e-10)
    throw DomainError("flow: initial state is not on the zero-energy level");
  tr.t.push_back(0.0);
  tr.x.push_back(q0.x);
  tr.v.push_back(q0.v);
  tr.E.push_back(E0);
}

// Returns false on chart exit (the state is then not recorded).
bool record(Trajectory& tr, const LagrangianModel& m, const PhasePoint& q, double t,
            const FlowOptions& opt) {
  if (!q.x.allFinite() || !q.v.allFinite() || !m.chart().contains(q.x)) {
    tr.left_chart = true;
    return false;
  }
  tr.t.push_back(t);
  tr.x.push_back(q.x);
  tr.v.push_back(q.v);
  if (!opt.record_energy && !opt.check_energy) return true;
  const double E = energy(m, q);
  if (opt.check_energy && std::abs(E - tr.E.front()) > 10.0 * opt.energy_tolerance)
    throw NumericalError("flow: energy drift " + std::to_string(std::abs(E - tr.E.front())) +
                         " exceeds tolerance; reduce the step size");
  tr.E.push_back(E);
  return true;
}

}  // namespace

Trajectory el_flow(const LagrangianModel& m, const PhasePoint& q0, double T, double h,
                   const FlowOptions& opt) {
  const int steps = step_count(T, h);
  Trajectory tr;
  tr.h = T / steps;
  start(tr, m, q0, opt);
  PhasePoint q = q0;
  for (int i = 1; i <= steps; ++i) {
    try {
      q = rk4_step(m, q, tr.h);
    } catch (const NumericalError&) {
      tr.left_chart = true;
      break;
    } catch (const DomainError&) {
      tr.left_chart = true;
      break;
    }
    if (!record(tr, m, q, i * tr.h, opt)) break;
  }
  return tr;
}

HamiltonianHessian hamiltonian_hessian(const LagrangianModel& m, const PhasePoint& q) {
  const Jet j = m.jet(q.x, q.v);
  const Mat gi = tonelli_factor(j.Lvv).solve(Mat::Identity(m.dim(), m.dim()));
  HamiltonianHessian hh;
  hh.Hpp = symmetrized(gi);
  hh.Hpx = -hh.Hpp * j.Lvx;
  hh.Hxx = symmetrized(-m.L_xx(q.x, q.v) + j.Lvx.transpose() * hh.Hpp * j.Lvx);
  return hh;
}

Mat variational_generator(const HamiltonianHessian& hh) {
  const Eigen::Index n = hh.Hpp.rows();
  Mat A(2 * n, 2 * n);
  A.topLeftCorner(n, n) = hh.Hpx;
  A.topRightCorner(n, n) = hh.Hpp;
  A.bottomLeftCorner(n, n) = -hh.Hxx;
  A.bottomRightCorner(n, n) = -hh.Hpx.transpose();
  return A;
}

void variational_step(const LagrangianModel& m, PhasePoint& q, Mat& J, double dt) {
  auto gen = [&](const Vec& x, const Vec& v) {
    return variational_generator(hamiltonian_hessian(m, {x, v}));
  };
  const Vec& x = q.x;
  const Vec& v = q.v;
  const Vec a1 = semispray(m, {x, v});
  const Mat K1 = gen(x, v) * J;
  const Vec x2 = x + 0.5 * dt * v, v2 = v + 0.5 * dt * a1;
  const Vec a2 = semispray(m, {x2, v2});
  const Mat K2 = gen(x2, v2) * (J + 0.5 * dt * K1);
  const Vec x3 = x + 0.5 * dt * v2, v3 = v + 0.5 * dt * a2;
  const Vec a3 = semispray(m, {x3, v3});
  const Mat K3 = gen(x3, v3) * (J + 0.5 * dt * K2);
  const Vec x4 = x + dt * v3, v4 = v + dt * a3;
  const Vec a4 = semispray(m, {x4, v4});
  const Mat K4 = gen(x4, v4) * (J + dt * K3);
  PhasePoint qn{x + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4),
                v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)};
  J += dt / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
  q = std::move(qn);
}

VariationalState variational_flow(const LagrangianModel& m, const PhasePoint& q0, double T,
                                  double h, const Mat& J0, const FlowOptions& opt) {
  const int n = m.dim();
  if (J0.rows() != 2 * n) throw DomainError("variational_flow: J0 must have 2n rows");
  const int steps = step_count(T, h);
  VariationalState vs;
  Trajectory& tr = vs.base;
  tr.h = T / steps;
  start(tr, m, q0, opt);
  vs.J.push_back(J0);

  PhasePoint q = q0;
  Mat J = J0;
  const double dt = tr.h;
  for (int i = 1; i <= steps; ++i) {
    PhasePoint qn = q;
    Mat Jn = J;
    try {
      variational_step(m, qn, Jn, dt);
    } catch (const NumericalError&) {
      tr.left_chart = true;
      break;
    } catch (const DomainError&) {
      tr.left_chart = true;
      break;
    }
    if (!record(tr, m, qn, i * dt, opt)) break;
    q = qn;
    J = Jn;
    vs.J.push_back(J);
  }
  return vs;
}

Mat sigma_Lvv(const LagrangianModel& m, const PhasePoint& q, double h) {
  auto at = [&](double t) {
    const PhasePoint s = rk4_step(m, q, t);
    return Mat(m.jet(s.x, s.v).Lvv);
  };
  return symmetrized((at(-2 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2 * h)) / (12.0 * h));
}

Mat connection_coeffs(const LagrangianModel& m, const PhasePoint& q) {
  const Jet j = m.jet(q.x, q.v);
  const Mat S = sigma_Lvv(m, q, m.steps.sigma_flow);
  const Mat B = S + j.Lvx.transpose() - j.Lvx;
  return 0.5 * tonelli_factor(j.Lvv).solve(B.transpose()).transpose();
}

Deviation deviation_from(const Mat& g, const Vec& v, const Vec& Lambda) {
  Deviation d;
  d.Lambda = Lambda;
  const double vv = v.dot(g * v);
  if (!(vv > 0.0)) throw DomainError("deviation: v must be nonzero");
  d.par = v.dot(g * Lambda) / vv;
  const Vec perp = Lambda - d.par * v;
  d.perp2 = perp.dot(g * perp) / vv;
  return d;
}

Deviation deviation(const LagrangianModel& m, const PhasePoint& q) {
  const Jet j = m.jet(q.x, q.v);
  const Mat G = connection_coeffs(m, q);
  const Vec Lambda = G.transpose() * q.v + semispray(j, q.v);
  return deviation_from(j.Lvv, q.v, Lambda);
}

Mat symplectic_matrix(int n) {
  Mat O = Mat::Zero(2 * n, 2 * n);
  O.topRightCorner(n, n) = Mat::Identity(n, n);
  O.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return O;
}

}  // namespace lcd
