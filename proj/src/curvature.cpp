#include "lcd/curvature.hpp"

#include <algorithm>

#include "lcd/needles.hpp"

namespace lcd {

double psi_tm(const LagrangianModel& m, const PhasePoint& q) {
  const Jet j = m.jet(q.x, q.v);
  const Eigen::LLT<Mat> llt = tonelli_factor(j.Lvv);
  const double half_logdet = llt.matrixLLT().diagonal().array().log().sum();
  return half_logdet - m.log_density(q.x);
}

SigmaPsi sigma_psi(const LagrangianModel& m, const PhasePoint& q) {
  const double h = m.steps.sigma_psi;
  auto f = [&](double t) { return psi_tm(m, rk4_step(m, q, t)); };
  const double f0 = psi_tm(m, q);
  const double fm = f(-h), fp = f(h), fmh = f(-0.5 * h), fph = f(0.5 * h);
  const double a1 = (fp - fm) / (2.0 * h), b1 = (fph - fmh) / h;
  const double a2 = (fp - 2.0 * f0 + fm) / (h * h), b2 = (fph - 2.0 * f0 + fmh) / (0.25 * h * h);
  SigmaPsi s;
  s.d1 = (4.0 * b1 - a1) / 3.0;
  s.d2 = (4.0 * b2 - a2) / 3.0;
  s.err1 = std::abs(s.d1 - b1);
  s.err2 = std::abs(s.d2 - b2);
  return s;
}

// Ric = -tr(D Gamma[Sigma]) - sum_i (D a[E_i])^i + tr(Gamma^2), with E_i = (e_i, -Gamma_i).
double ricci_direct(const LagrangianModel& m, const PhasePoint& q) {
  const int n = m.dim();
  const double h = m.steps.bracket;
  const Mat G = connection_coeffs(m, q);
  const Vec a = semispray(m, q);

  auto G_at = [&](double s) { return connection_coeffs(m, {q.x + s * q.v, q.v + s * a}); };
  const Mat dG = (G_at(-2 * h) - 8.0 * G_at(-h) + 8.0 * G_at(h) - G_at(2 * h)) / (12.0 * h);

  double div_a = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec ei = Vec::Zero(n);
    ei(i) = 1.0;
    const Vec gi = G.row(i).transpose();
    auto a_at = [&](double s) { return semispray(m, {q.x + s * ei, q.v - s * gi})(i); };
    div_a += d1_5pt(a_at(-2 * h), a_at(-h), a_at(h), a_at(2 * h), h);
  }
  return -dG.trace() - div_a + (G * G).trace();
}

void check_N(int n, double N) {
  if (std::isnan(N)) throw InvalidN("N must be a number");
  if (N >= 0.0 && N < n)
    throw InvalidN("N = " + std::to_string(N) + " lies in the excluded band [0, n)");
}

CurvatureSample ricci_weighted_sample(const LagrangianModel& m, const PhasePoint& q, double N) {
  const int n = m.dim();
  check_N(n, N);
  CurvatureSample s;
  s.q = q;
  s.N = N;
  s.ric = ricci_direct(m, q);
  const SigmaPsi sp = sigma_psi(m, q);
  s.sigma_psi = sp.d1;
  s.sigma2_psi = sp.d2;
  const Deviation d = deviation(m, q);
  s.lambda_par = d.par;
  s.lambda_perp2 = d.perp2;
  const double gap = s.sigma_psi - s.lambda_par;
  double dim_term = 0.0;
  if (N == n) {
    if (std::abs(gap) > 1e-6)
      throw InvalidN("N = n requires Sigma psi = Lambda_par (gap " + std::to_string(gap) + ")");
  } else if (!std::isinf(N)) {
    dim_term = gap * gap / (N - n);
  }
  s.ric_weighted =
      s.ric + s.sigma2_psi - dim_term + 2.0 * s.lambda_perp2 + s.lambda_par * s.lambda_par;
  return s;
}

double ricci_weighted(const LagrangianModel& m, const PhasePoint& q, double N) {
  return ricci_weighted_sample(m, q, N).ric_weighted;
}

double ricci_bochner_oracle(const LagrangianModel& m, const PhasePoint& q, double N) {
  check_N(m.dim(), N);
  const HJSeed seed = seed_construct(m, q, SeedMode::Equality, N);
  const double h = 1e-3;
  auto Lu = [&](double t) { return jacobi_laplacian_at(m, seed, t); };
  const double L0 = Lu(0.0);
  const double dL = d1_5pt(Lu(-2 * h), Lu(-h), Lu(h), Lu(2 * h), h);
  const double quad = std::isinf(N) ? 0.0 : L0 * L0 / (N - 1.0);
  return -(dL + quad);
}

CDVerdict cd_verdict(const LagrangianModel& m, double K, double N, const SamplingSpec& spec) {
  if (spec.grid < 1 || spec.directions < 1) throw DomainError("cd_verdict: counts must be >= 1");
  const int n = m.dim();
  check_N(n, N);
  CDVerdict v;
  v.model = m.name();
  v.K = K;
  v.N = N;
  v.tolerance = spec.tolerance;
  const Chart& c = m.chart();
  Rng rng = Rng(spec.seed).substream("cd_verdict");

  long total = 1;
  for (int i = 0; i < n; ++i) total *= spec.grid;
  for (long idx = 0; idx < total; ++idx) {
    Vec x(n);
    long r = idx;
    for (int i = 0; i < n; ++i) {
      const int k = static_cast<int>(r % spec.grid);
      r /= spec.grid;
      x(i) = c.lower(i) + (k + 0.5) * (c.upper(i) - c.lower(i)) / spec.grid;
    }
    for (int d = 0; d < spec.directions; ++d) {
      const Vec u = rng.unit_vector(n);
      try {
        const PhasePoint q = indicatrix_sample(m, x, u);
        CurvatureSample s = ricci_weighted_sample(m, q, N);
        v.records.push_back(s);
        ++v.samples;
        if (s.ric_weighted - K < v.min_margin) {
          v.min_margin = s.ric_weighted - K;
          v.argmin = q;
        }
      } catch (const InvalidN&) {
        throw;
      } catch (const Error&) {
        ++v.failures;
      }
    }
  }

  if (spec.refine && v.samples > 0) {
    // Pattern search over (x, direction) starting from the worst sample.
    Vec x = v.argmin.x, u = v.argmin.v.normalized();
    double best = v.min_margin + K;
    double dx = 0.05 * (c.upper - c.lower).minCoeff(), du = 0.2;
    auto eval = [&](const Vec& xx, const Vec& uu, double& out) {
      if (!c.contains(xx)) return false;
      try {
        out = ricci_weighted(m, indicatrix_sample(m, xx, uu), N);
        return true;
      } catch (const InvalidN&) {
        throw;
      } catch (const Error&) {
        return false;
      }
    };
    for (int it = 0; it < 40 && (du > 1e-3 || dx > 1e-4); ++it) {
      bool improved = false;
      for (int k = 0; k < 2 * n; ++k) {
        for (double sgn : {1.0, -1.0}) {
          Vec xx = x, uu = u;
          if (k < n) uu(k) += sgn * du, uu.normalize();
          else xx(k - n) += sgn * dx;
          double val;
          if (eval(xx, uu, val) && val < best) {
            best = val;
            x = xx;
            u = uu;
            improved = true;
          }
        }
      }
      if (!improved) {
        du *= 0.5;
        dx *= 0.5;
      }
    }
    if (best - K < v.min_margin) {
      v.min_margin = best - K;
      v.argmin = indicatrix_sample(m, x, u);
    }
  }
  v.pass = v.samples > 0 && v.min_margin >= -spec.tolerance;
  return v;
}

}  // namespace lcd
