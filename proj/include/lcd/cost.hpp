#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lcd/dynamics.hpp"

namespace lcd {

struct MultistartSpec {
  int directions = 0;        // 0: 8^(n-1)
  std::vector<double> ell_factors = {1.0};  // multiples of the chord-based duration guess
  double h = 1e-2;           // final shooting step
  double coarse_h = 5e-2;    // step used while screening starts
  int max_iter = 40;
  double tol = 1e-9;         // endpoint residual target of the polished solution
  bool chord_first = false;  // accept the chord start when it converges, else fall back
  int polish = 3;            // number of best screened candidates refined at step h
  std::uint64_t seed = 1;
};

struct MinimizingExtremal {
  Vec x0, x1, v0;
  double ell = 0.0;
  double action = 0.0;
  double endpoint_residual = kInf;
  double energy = 0.0;
  Trajectory curve;
  int starts = 0, converged = 0;
};

struct NotConnected : NumericalError {
  using NumericalError::NumericalError;
};

// Orthonormal basis of the complement of u (columns).
Mat complement_basis(const Vec& u);
// Evenly spread unit vectors: angles in 2D, a Fibonacci lattice in 3D, seeded random beyond.
std::vector<Vec> start_directions(int n, int count, std::uint64_t seed);

MinimizingExtremal connect(const LagrangianModel& m, const Vec& x0, const Vec& x1,
                           const MultistartSpec& spec = {});
// Single Newton solve from a given initial direction and duration; throws on failure.
MinimizingExtremal shoot(const LagrangianModel& m, const Vec& x0, const Vec& x1, const Vec& u,
                         double ell, double h, int max_iter, double tol);

// Newton state of a solve: u = normalize(base + B theta) with B a fixed complement of base, and
// the endpoint Jacobian in (theta, ell). Passing a nearby solved state skips most of the work.
struct ShootState {
  Vec base, theta;
  double ell = 0.0;
  Mat jac;  // empty: computed from the variational flow
};
MinimizingExtremal shoot(const LagrangianModel& m, const Vec& x0, const Vec& x1,
                         const ShootState& start, double h, int max_iter, double tol,
                         ShootState* out = nullptr);
double cost(const LagrangianModel& m, const Vec& x0, const Vec& x1,
            const MultistartSpec& spec = {});
// Composite Simpson over a trajectory (odd trailing interval by the trapezoid rule).
double action(const LagrangianModel& m, const Trajectory& tr);

// Free-time action of the straight segment a -> b at its optimal constant speed.
double segment_cost(const LagrangianModel& m, const Vec& a, const Vec& b);
// Duration of that segment at its optimal speed; the duration guess used by connect.
double segment_duration(const LagrangianModel& m, const Vec& a, const Vec& b);
double polygon_cost(const LagrangianModel& m, const std::vector<Vec>& nodes);

struct TranscriptionSpec {
  int nodes = 64;      // interior nodes at the finest level
  int max_sweeps = 400;
  double tol = 1e-13;  // stop a level when a sweep improves by less than this
};
struct TranscriptionResult {
  double value = kInf;
  std::vector<double> level_values;
  std::vector<Vec> path;
};
TranscriptionResult brute_force_cost_oracle(const LagrangianModel& m, const Vec& x0, const Vec& x1,
                                            const TranscriptionSpec& spec = {});

// Uniform grid of res^n cells over a window; cells are addressed by a flat index.
struct CellGrid {
  Vec origin, cell;
  int res = 0;
  CellGrid() = default;
  CellGrid(const Vec& lo, const Vec& hi, int res);
  int dim() const { return static_cast<int>(origin.size()); }
  long long index(const Vec& x) const;  // -1 outside the window
  Vec lower(long long idx) const;
  Vec center(long long idx) const { return lower(idx) + 0.5 * cell; }
  double cell_volume() const { return cell.prod(); }
};
// Integral of the model density over one cell (2-point Gauss rule per axis).
double cell_measure(const LagrangianModel& m, const CellGrid& g, long long idx);

struct BallSpec {
  int directions = 0;  // 0: 2000 in 2D, 20000 otherwise (enough to hit every cell)
  int resolution = 0;  // cells per axis; 0: 256 in 2D, 64 otherwise
  double h = 1e-2;
  std::uint64_t seed = 1;
};
struct BallEstimate {
  double radius = 0.0, volume = 0.0;
  int resolution = 0, directions = 0, marked_cells = 0;
  bool truncated = false;
};
// Volumes for several radii from one set of stored trajectories.
std::vector<BallEstimate> forward_ball_volumes(const LagrangianModel& m, const Vec& x0,
                                               const std::vector<double>& radii,
                                               const BallSpec& spec = {});
// Cells swept by zero-energy extremals from x0 up to duration r, on a grid over their bounding box.
struct BallMask {
  CellGrid grid;
  std::vector<long long> cells;  // sorted
  bool truncated = false;
};
BallMask forward_ball_mask(const LagrangianModel& m, const Vec& x0, double r,
                           const BallSpec& spec = {});
BallEstimate forward_ball_volume(const LagrangianModel& m, const Vec& x0, double r,
                                 const BallSpec& spec = {});

// V_{K,N}(r) = (int_0^r sin(t sqrt(K/(N-1))) dt)^(N-1); sinh for K < 0, t for K = 0. Needs 1 < N < inf.
double model_volume(double K, double N, double r);

struct BishopGromovReport {
  double K = 0.0, N = 0.0;
  std::vector<BallEstimate> balls;
  double worst_margin = kInf;  // min over r < R of ratio/model_ratio - 1
  double tolerance = 0.03;
  bool pass = false;
};
BishopGromovReport bishop_gromov_check(const LagrangianModel& m, const Vec& x0, double K,
                                       double N, const std::vector<double>& radii,
                                       const BallSpec& spec = {}, double tol = 0.03);

struct DiameterReport {
  double K = 0.0, N = 0.0;
  double max_ell = 0.0, bound = kInf;
  int pairs = 0, failures = 0;
  bool chart_limited = false;
  bool pass = false;
  std::string verdict;
};
DiameterReport diameter_probe(const LagrangianModel& m, double K, double N, int pairs,
                              const std::function<Vec(Rng&)>& sampler, std::uint64_t seed,
                              const MultistartSpec& spec = {});

struct LoopProbeReport {
  int loops = 0;
  double min_action = kInf;
  bool pass = false;
};
LoopProbeReport loop_probe(const LagrangianModel& m, int loops, std::uint64_t seed);

}  // namespace lcd
