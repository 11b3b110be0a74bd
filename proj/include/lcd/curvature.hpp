#pragma once

#include <string>
#include <vector>

#include "lcd/dynamics.hpp"

namespace lcd {

struct InvalidN : DomainError {
  using DomainError::DomainError;
};

double psi_tm(const LagrangianModel& m, const PhasePoint& q);

struct SigmaPsi {
  double d1 = 0.0, d2 = 0.0;
  double err1 = 0.0, err2 = 0.0;
};
SigmaPsi sigma_psi(const LagrangianModel& m, const PhasePoint& q);

double ricci_direct(const LagrangianModel& m, const PhasePoint& q);

struct CurvatureSample {
  PhasePoint q;
  double N = kInf;
  double ric = 0.0;
  double sigma_psi = 0.0, sigma2_psi = 0.0;
  double lambda_par = 0.0, lambda_perp2 = 0.0;
  double ric_weighted = 0.0;
  std::string method = "direct";
};

// Throws InvalidN for N in [0, n) or for N = n when Sigma psi != Lambda_par.
void check_N(int n, double N);
CurvatureSample ricci_weighted_sample(const LagrangianModel& m, const PhasePoint& q, double N);
double ricci_weighted(const LagrangianModel& m, const PhasePoint& q, double N);
double ricci_bochner_oracle(const LagrangianModel& m, const PhasePoint& q, double N);

struct SamplingSpec {
  int grid = 3;        // points per axis (cell centres of the chart box)
  int directions = 16; // random indicatrix directions per point
  std::uint64_t seed = 1;
  bool refine = true;  // local descent from the best samples
  double tolerance = 1e-3;
};

struct CDVerdict {
  std::string model;
  double K = 0.0, N = kInf;
  int samples = 0, failures = 0;
  double min_margin = kInf;  // min over samples of Ric_{mu,N} - K
  PhasePoint argmin;
  double tolerance = 1e-3;
  bool pass = false;
  std::vector<CurvatureSample> records;
};

CDVerdict cd_verdict(const LagrangianModel& m, double K, double N, const SamplingSpec& spec);

}  // namespace lcd
