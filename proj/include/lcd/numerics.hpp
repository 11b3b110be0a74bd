#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lcd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

// Error taxonomy shared by every module; the CLI maps all of them to exit code 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};
struct ChartExit : Error {
  using Error::Error;
};

inline double fd_step1(double x) { return std::cbrt(kEps) * std::max(1.0, std::abs(x)); }
inline double fd_step2(double x) { return std::pow(kEps, 0.25) * std::max(1.0, std::abs(x)); }

// Five-point stencils, O(h^4).
inline double d1_5pt(double fm2, double fm1, double fp1, double fp2, double h) {
  return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
}
inline double d2_5pt(double fm2, double fm1, double f0, double fp1, double fp2, double h) {
  return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
}

template <class F, class Derived>
Vec fd_gradient(F&& f, const Eigen::MatrixBase<Derived>& x0) {
  Vec x = x0;
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step1(x(i));
    const double xi = x(i);
    x(i) = xi + h;
    const double fp = f(x);
    x(i) = xi - h;
    const double fm = f(x);
    x(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Jacobian of a vector map, column j = d f / d x_j.
template <class F, class Derived>
Mat fd_jacobian(F&& f, const Eigen::MatrixBase<Derived>& x0) {
  Vec x = x0;
  Mat J;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = fd_step1(x(j));
    const double xj = x(j);
    x(j) = xj + h;
    const Vec fp = f(x);
    x(j) = xj - h;
    const Vec fm = f(x);
    x(j) = xj;
    if (j == 0) J.resize(fp.size(), x.size());
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

template <class F, class Derived>
Mat fd_hessian(F&& f, const Eigen::MatrixBase<Derived>& x0) {
  Vec x = x0;
  const Eigen::Index n = x.size();
  Mat H(n, n);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hi = fd_step2(x(i));
    const double xi = x(i);
    x(i) = xi + hi;
    const double fp = f(x);
    x(i) = xi - hi;
    const double fm = f(x);
    x(i) = xi;
    H(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double hj = fd_step2(x(j));
      const double xj = x(j);
      auto at = [&](double si, double sj) {
        x(i) = xi + si * hi;
        x(j) = xj + sj * hj;
        const double r = f(x);
        x(i) = xi;
        x(j) = xj;
        return r;
      };
      H(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj);
      H(j, i) = H(i, j);
    }
  }
  return H;
}

template <class Derived>
Mat symmetrized(const Eigen::MatrixBase<Derived>& A) {
  return 0.5 * (A + A.transpose());
}

// Composite Simpson on a uniform grid; an even number of intervals is required.
inline double simpson(const std::vector<double>& y, double h) {
  const std::size_t m = y.size();
  if (m < 3 || (m - 1) % 2 != 0) throw Error("simpson: need an even number of intervals");
  double s = y.front() + y.back();
  for (std::size_t i = 1; i + 1 < m; ++i) s += (i % 2 ? 4.0 : 2.0) * y[i];
  return s * h / 3.0;
}

// Cumulative integral at every node: panel-wise quadratic rule, exact Simpson at even nodes.
inline std::vector<double> cumulative_simpson(const std::vector<double>& y, double h) {
  const std::size_t m = y.size();
  std::vector<double> c(m, 0.0);
  for (std::size_t i = 0; i + 2 < m; i += 2) {
    const double f0 = y[i], f1 = y[i + 1], f2 = y[i + 2];
    c[i + 1] = c[i] + h * (5.0 * f0 + 8.0 * f1 - f2) / 12.0;
    c[i + 2] = c[i] + h * (f0 + 4.0 * f1 + f2) / 3.0;
  }
  if (m >= 2 && (m - 1) % 2 == 1) {
    const std::size_t i = m - 2;
    c[i + 1] = c[i] + 0.5 * h * (y[i] + y[i + 1]);
  }
  return c;
}

// Generalized mean M_q(a,b;lambda); q = +-inf give max/min, q = 0 the geometric mean.
inline double generalized_mean(double a, double b, double q, double lambda) {
  if (a * b == 0.0) return 0.0;
  if (q == kInf) return std::max(a, b);
  if (q == -kInf) return std::min(a, b);
  if (q == 0.0) return std::pow(a, 1.0 - lambda) * std::pow(b, lambda);
  return std::pow((1.0 - lambda) * std::pow(a, q) + lambda * std::pow(b, q), 1.0 / q);
}

// Deterministic RNG streams: one master seed, named substreams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(mix(seed, 0)) {}
  Rng substream(std::string_view name, std::uint64_t index = 0) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : name) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    return Rng(seed_, mix(seed_ ^ h, index + 1));
  }
  double uniform(double a = 0.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(eng_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  Vec unit_vector(int n) {
    Vec u(n);
    do {
      for (int i = 0; i < n; ++i) u(i) = normal();
    } while (u.norm() < 1e-12);
    return u.normalized();
  }
  std::mt19937_64& engine() { return eng_; }
  std::uint64_t seed() const { return seed_; }

 private:
  Rng(std::uint64_t seed, std::uint64_t state) : seed_(seed), eng_(state) {}
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

}  // namespace lcd
