#include "lcd/examples.hpp"

#include <unsupported/Eigen/AutoDiff>

namespace lcd::examples {

namespace {

using DerVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 16, 1>;
using AD = Eigen::AutoDiffScalar<DerVec>;
template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

double der(const AD& a, int k) {
  return a.derivatives().size() > k ? a.derivatives()(k) : 0.0;
}

VecT<AD> seed(const Vec& x) {
  const int n = static_cast<int>(x.size());
  VecT<AD> xa(n);
  for (int i = 0; i < n; ++i) xa(i) = AD(x(i), n, i);
  return xa;
}

// Classical fields from a geometry with templated metric/potential/form.
template <class Geo>
class AnalyticFields final : public ClassicalFields {
 public:
  explicit AnalyticFields(Geo geo) : geo_(std::move(geo)) {}
  int dim() const override { return geo_.n; }
  bool analytic() const override { return true; }
  Mat metric(const Vec& x) const override { return geo_.template metric<double>(x); }
  double potential(const Vec& x) const override { return geo_.template potential<double>(x); }
  Vec form(const Vec& x) const override { return geo_.template form<double>(x); }

  FieldJet jet(const Vec& x) const override {
    const int n = geo_.n;
    const VecT<AD> xa = seed(x);
    const AD U = geo_.template potential<AD>(xa);
    const VecT<AD> eta = geo_.template form<AD>(xa);
    FieldJet f;
    if constexpr (requires { geo_.template conformal<AD>(xa); }) {
      const AD c = geo_.template conformal<AD>(xa);
      f.g = Mat::Identity(n, n) * c.value();
      f.dg.resize(n);
      for (int k = 0; k < n; ++k) f.dg[k] = Mat::Identity(n, n) * der(c, k);
    } else {
      const MatT<AD> g = geo_.template metric<AD>(xa);
      f.g.resize(n, n);
      f.dg.assign(n, Mat(n, n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          f.g(i, j) = g(i, j).value();
          for (int k = 0; k < n; ++k) f.dg[k](i, j) = der(g(i, j), k);
        }
    }
    f.U = U.value();
    f.dU.resize(n);
    for (int k = 0; k < n; ++k) f.dU(k) = der(U, k);
    f.eta.resize(n);
    f.deta.resize(n, n);
    for (int i = 0; i < n; ++i) {
      f.eta(i) = eta(i).value();
      for (int k = 0; k < n; ++k) f.deta(i, k) = der(eta(i), k);
    }
    return f;
  }
  const Geo& geo() const { return geo_; }

 private:
  Geo geo_;
};

// Scalar field from a templated functor; gradient by forward-mode AD.
template <class F>
class AnalyticScalar final : public ScalarField {
 public:
  explicit AnalyticScalar(F f) : f_(std::move(f)) {}
  double value(const Vec& x) const override { return f_(Vec(x)); }
  Vec gradient(const Vec& x) const override {
    const AD r = f_(seed(x));
    Vec g(x.size());
    for (int k = 0; k < x.size(); ++k) g(k) = der(r, k);
    return g;
  }
  bool analytic() const override { return true; }

 private:
  F f_;
};

template <class F>
std::shared_ptr<const ScalarField> analytic_scalar(F f) {
  return std::make_shared<AnalyticScalar<F>>(std::move(f));
}

template <class T>
T sq_norm(const VecT<T>& x) {
  T r = T(0.0);
  for (int i = 0; i < x.size(); ++i) r += x(i) * x(i);
  return r;
}

struct FlatGeo {
  int n;
  template <class T> T conformal(const VecT<T>&) const { return T(1.0); }
  template <class T> MatT<T> metric(const VecT<T>&) const { return MatT<T>::Identity(n, n); }
  template <class T> T potential(const VecT<T>&) const { return T(0.5); }
  template <class T> VecT<T> form(const VecT<T>&) const { return VecT<T>::Zero(n); }
};

template <class T>
T conformal_factor(const VecT<T>& x) {
  const T a = T(1.0) + sq_norm(x);
  return T(4.0) / (a * a);
}

// Pullback of the standard contact form; the sum over the projection Jacobian collapses to
// (2/a) (J X)_k + 4 p x_{m-1} x_k / a^2 with X the embedded point.
template <class T>
VecT<T> contact_form_t(const VecT<T>& x, int pole) {
  const int m = static_cast<int>(x.size());
  const double p = pole;
  const T r2 = sq_norm(x);
  const T a = T(1.0) + r2;
  const T ia2 = T(1.0) / (a * a);
  VecT<T> eta(m);
  for (int j = 0; j + 1 < m; j += 2) {
    eta(j) = -4.0 * x(j + 1) * ia2;
    eta(j + 1) = 4.0 * x(j) * ia2;
  }
  eta(m - 1) = (-2.0 * p) * (r2 - T(1.0)) * ia2;
  const T c = (4.0 * p) * x(m - 1) * ia2;
  for (int k = 0; k < m; ++k) eta(k) += c * x(k);
  return eta;
}

struct SphereGeo {
  int n;
  int pole = 1;
  double s = 0.0;  // contact strength; only used when n is odd
  template <class T> T conformal(const VecT<T>& x) const { return conformal_factor(x); }
  template <class T> MatT<T> metric(const VecT<T>& x) const {
    return MatT<T>::Identity(n, n) * conformal_factor(x);
  }
  template <class T> T potential(const VecT<T>&) const { return T(0.5); }
  template <class T> VecT<T> form(const VecT<T>& x) const {
    if (s == 0.0) return VecT<T>::Zero(n);
    return contact_form_t(x, pole) * T(s);
  }
};

struct HorocycleGeo {
  int n = 2;
  template <class T> T conformal(const VecT<T>& x) const { return T(1.0) / (x(1) * x(1)); }
  template <class T> MatT<T> metric(const VecT<T>& x) const {
    const T w = T(1.0) / (x(1) * x(1));
    MatT<T> g = MatT<T>::Zero(2, 2);
    g(0, 0) = w;
    g(1, 1) = w;
    return g;
  }
  template <class T> T potential(const VecT<T>&) const { return T(0.5); }
  template <class T> VecT<T> form(const VecT<T>& x) const {
    VecT<T> e(2);
    e(0) = T(1.0) / x(1);
    e(1) = T(0.0);
    return e;
  }
};

// Coordinates (a_1, b_1, ..., a_{d-1}, b_{d-1}, c, e) with z_j = a_j + i b_j, z_d = c + i e.
struct SiegelGeo {
  int d;
  int n;
  template <class T> T rho(const VecT<T>& x) const {
    T r = T(2.0) * x(n - 2);
    for (int j = 0; j + 2 < n; ++j) r -= x(j) * x(j);
    return r;
  }
  template <class T> MatT<T> metric(const VecT<T>& x) const {
    const T p = rho(x);
    VecT<T> thR = VecT<T>::Zero(n), thI = VecT<T>::Zero(n);
    thR(n - 2) = T(1.0);
    thI(n - 1) = T(1.0);
    for (int j = 0; j + 1 < d; ++j) {
      const T a = x(2 * j), b = x(2 * j + 1);
      thR(2 * j) = -a;
      thR(2 * j + 1) = -b;
      thI(2 * j) = b;
      thI(2 * j + 1) = -a;
    }
    MatT<T> g = (thR * thR.transpose() + thI * thI.transpose()) * (T(4.0) / (p * p));
    for (int j = 0; j + 2 < n; ++j) g(j, j) += T(4.0) / p;
    return g;
  }
  template <class T> T potential(const VecT<T>&) const { return T(0.5); }
  template <class T> VecT<T> form(const VecT<T>& x) const {
    const T p = rho(x);
    VecT<T> e = VecT<T>::Zero(n);
    e(n - 1) = T(-2.0) / p;
    for (int j = 0; j + 1 < d; ++j) {
      const T a = x(2 * j), b = x(2 * j + 1);
      e(2 * j) = T(-2.0) * b / p;
      e(2 * j + 1) = T(2.0) * a / p;
    }
    return e;
  }
};

// Flat metric diag(mass) with a scalar potential field and no magnetic term.
class FlatPotentialFields final : public ClassicalFields {
 public:
  FlatPotentialFields(Vec mass, std::shared_ptr<const ScalarField> U)
      : mass_(std::move(mass)), U_(std::move(U)) {}
  int dim() const override { return static_cast<int>(mass_.size()); }
  bool analytic() const override { return U_->analytic(); }
  Mat metric(const Vec&) const override { return mass_.asDiagonal(); }
  double potential(const Vec& x) const override { return U_->value(x); }
  Vec form(const Vec&) const override { return Vec::Zero(dim()); }
  Mat potential_hessian(const Vec& x) const override { return U_->hessian(x); }
  FieldJet jet(const Vec& x) const override {
    const int n = dim();
    FieldJet f;
    f.g = mass_.asDiagonal();
    f.dg.assign(n, Mat::Zero(n, n));
    f.U = U_->value(x);
    f.dU = U_->gradient(x);
    f.eta = Vec::Zero(n);
    f.deta = Mat::Zero(n, n);
    return f;
  }

 private:
  Vec mass_;
  std::shared_ptr<const ScalarField> U_;
};

class QHomogeneous final : public LagrangianModel {
 public:
  QHomogeneous(Chart c, double q)
      : LagrangianModel(std::move(c), std::make_shared<ConstantField>(1.0), "q_homogeneous"),
        q_(q) {}
  bool analytic() const override { return true; }
  double value(const Vec&, const Vec& v) const override {
    return (std::pow(v.norm(), q_) + q_ - 1.0) / q_;
  }
  Jet jet(const Vec& x, const Vec& v) const override {
    const int n = dim();
    const double r = v.norm();
    const double rq2 = std::pow(r, q_ - 2.0);
    Jet j;
    j.L = value(x, v);
    j.Lv = rq2 * v;
    j.Lvv = rq2 * Mat::Identity(n, n);
    if (r > 0.0) j.Lvv += rq2 * (q_ - 2.0) * v * v.transpose() / (r * r);
    j.Lx = Vec::Zero(n);
    j.Lvx = Mat::Zero(n, n);
    return j;
  }
  Mat L_xx(const Vec&, const Vec&) const override { return Mat::Zero(dim(), dim()); }

 private:
  double q_;
};

double pget(const Params& p, const char* key, double def) {
  return p.contains(key) ? p.at(key).get<double>() : def;
}
int iget(const Params& p, const char* key, int def) {
  return p.contains(key) ? p.at(key).get<int>() : def;
}

void check_keys(const Params& p, std::initializer_list<const char*> allowed, const std::string& who) {
  if (p.is_null()) return;
  if (!p.is_object()) throw DomainError(who + ": params must be an object");
  for (auto it = p.begin(); it != p.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw DomainError(who + ": unknown parameter '" + it.key() + "'");
  }
}

Vec uniform_sphere_chart_point(Rng& rng, int n, int pole) {
  return stereo_chart(rng.unit_vector(n + 1), pole);
}

}  // namespace

Vec stereo_embed(const Vec& x, int pole) {
  const int m = static_cast<int>(x.size());
  const double r2 = x.squaredNorm();
  Vec X(m + 1);
  X.head(m) = 2.0 * x / (1.0 + r2);
  X(m) = pole * (r2 - 1.0) / (1.0 + r2);
  return X;
}

Vec stereo_chart(const Vec& X, int pole) {
  const int m = static_cast<int>(X.size()) - 1;
  return X.head(m) / (1.0 - pole * X(m));
}

Vec contact_form(const Vec& x, int pole) { return contact_form_t<double>(x, pole); }

Mat round_metric(const Vec& x) {
  return Mat::Identity(x.size(), x.size()) * conformal_factor<double>(x);
}

double hyperbolic_distance(const Vec& a, const Vec& b) {
  return std::acosh(1.0 + (a - b).squaredNorm() / (2.0 * a(1) * b(1)));
}

double sphere_distance(const Vec& a, const Vec& b, int pole) {
  const Vec A = stereo_embed(a, pole), B = stereo_embed(b, pole);
  return 2.0 * std::atan2((A - B).norm(), (A + B).norm());
}

double mechanical_ricci(const Vec& mass, double U, const Vec& dU, double lapU, const Vec& v,
                        double N) {
  (void)U;
  const int n = static_cast<int>(v.size());
  const double vv = v.dot(mass.asDiagonal() * v);
  const Vec gradU = dU.cwiseQuotient(mass);
  const double par = dU.dot(v) / vv;
  const Vec perp = gradU - par * v;
  const double perp2 = perp.dot(mass.asDiagonal() * perp) / vv;
  const double cN = std::isinf(N) ? 1.0 : 1.0 - 1.0 / (N - n);
  return -lapU + 2.0 * perp2 + cN * par * par;
}

double contact_sphere_ricci(int d, double s, double vv, double eta) {
  return 2.0 * d * vv - 4.0 * s * d * eta + 2.0 * s * s * (d + 1 - eta * eta / vv);
}

double contact_sphere_ricci_printed(int d, double s, double vv, double eta) {
  return 2.0 * d * vv + 4.0 * s * d * eta + 2.0 * s * s * (d + 1 - eta * eta / vv);
}

std::vector<ExampleInfo> list_examples() {
  return {
      {"flat_euclidean", "L = (|v|^2+1)/2 on R^n, Lebesgue measure",
       {{"n", "2", "dimension"}, {"box", "10", "chart half-width"}}},
      {"round_sphere_chart", "stereographic chart of the round S^n, L = (g+1)/2, Riemannian volume",
       {{"n", "2", "dimension"}, {"box", "2", "chart half-width"}, {"pole", "1", "+1 or -1"}}},
      {"hyperbolic_horocycle", "upper half-plane, L = (|v|_g^2+1)/2 - v1/x2, hyperbolic area", {}},
      {"complex_hyperbolic_siegel", "Siegel model of complex hyperbolic space, L = (g+1)/2 - eta",
       {{"d", "2", "complex dimension"}}},
      {"contact_sphere", "stereographic chart of S^{2d+1}, L_s = (g+1)/2 - s*eta",
       {{"d", "1", "n = 2d+1"}, {"s", "0", "strength, |s| < 1"}, {"box", "2", "chart half-width"},
        {"pole", "1", "+1 or -1"}}},
      {"mechanical", "flat R^n, L = |v|^2/2 + U, Lebesgue measure",
       {{"n", "2", "dimension"}, {"U", "1 - 0.05*|x|^2", "potential expression in x1..xn"},
        {"box", "2", "chart half-width"}}},
      {"many_body", "k bodies in R^d with Newtonian potential, chart excludes collisions",
       {{"d", "3", "space dimension"}, {"k", "2", "bodies"}, {"masses", "[1,...]", "masses"},
        {"G", "1", "gravitational constant"}, {"tube", "0.1", "collision-tube radius"}}},
      {"q_homogeneous", "flat R^n, L = (|v|^q + q - 1)/q, Lebesgue measure",
       {{"q", "4", "exponent > 1"}, {"n", "2", "dimension"}, {"box", "10", "chart half-width"}}},
  };
}

ExampleModel get_example(const std::string& name, const Params& p) {
  ExampleModel ex;
  ex.name = name;
  if (name == "flat_euclidean") {
    check_keys(p, {"n", "box"}, name);
    const int n = iget(p, "n", 2);
    const double b = pget(p, "box", 10.0);
    ex.model = std::make_shared<ClassicalLagrangian>(
        Chart::box(n, -b, b, "R^n"), std::make_shared<AnalyticFields<FlatGeo>>(FlatGeo{n}),
        std::make_shared<ConstantField>(1.0), name);
    ex.ricci = [](const PhasePoint&, double) { return 0.0; };
    ex.known_cd = {{0.0, double(n)}, {0.0, kInf}};
    ex.n_admissible = true;
    ex.distance = [](const Vec& a, const Vec& b) { return (a - b).norm(); };
  } else if (name == "round_sphere_chart") {
    check_keys(p, {"n", "box", "pole"}, name);
    const int n = iget(p, "n", 2);
    const int pole = iget(p, "pole", 1);
    const double b = pget(p, "box", 2.0);
    auto vol = analytic_scalar([n](const auto& x) {
      using T = typename std::decay_t<decltype(x)>::Scalar;
      const T a = T(2.0) / (T(1.0) + sq_norm(x));
      T r = T(1.0);
      for (int i = 0; i < n; ++i) r *= a;
      return r;
    });
    ex.model = std::make_shared<ClassicalLagrangian>(
        Chart::box(n, -b, b, "stereographic"),
        std::make_shared<AnalyticFields<SphereGeo>>(SphereGeo{n, pole, 0.0}), vol, name);
    ex.ricci = [n](const PhasePoint& q, double) {
      return (n - 1) * q.v.dot(round_metric(q.x) * q.v);
    };
    ex.known_cd = {{double(n - 1), double(n)}, {double(n - 1), kInf}};
    ex.n_admissible = true;
    ex.distance = [pole](const Vec& a, const Vec& c) { return sphere_distance(a, c, pole); };
    ex.sample_measure = [n, pole](Rng& rng) { return uniform_sphere_chart_point(rng, n, pole); };
  } else if (name == "hyperbolic_horocycle") {
    check_keys(p, {}, name);
    Chart c;
    c.n = 2;
    c.lower = Vec(2);
    c.upper = Vec(2);
    c.lower << -5.0, 0.2;
    c.upper << 5.0, 5.0;
    c.label = "upper half-plane";
    auto vol = analytic_scalar([](const auto& x) {
      using T = typename std::decay_t<decltype(x)>::Scalar;
      return T(1.0) / (x(1) * x(1));
    });
    ex.model = std::make_shared<ClassicalLagrangian>(
        c, std::make_shared<AnalyticFields<HorocycleGeo>>(HorocycleGeo{}), vol, name);
    ex.ricci = [](const PhasePoint&, double) { return 0.0; };
    ex.known_cd = {{0.0, 2.0}, {0.0, kInf}};
    ex.n_admissible = true;
    ex.distance = hyperbolic_distance;
  } else if (name == "complex_hyperbolic_siegel") {
    check_keys(p, {"d"}, name);
    const int d = iget(p, "d", 2);
    if (d < 1) throw DomainError("siegel: d must be >= 1");
    const int n = 2 * d;
    Chart c = Chart::box(n, -0.5, 0.5, "Siegel domain");
    c.lower(n - 2) = 0.5;
    c.upper(n - 2) = 3.0;
    SiegelGeo geo{d, n};
    auto vol = analytic_scalar([geo, d](const auto& x) {
      using T = typename std::decay_t<decltype(x)>::Scalar;
      const T p = geo.rho(x);
      T r = T(std::pow(4.0, d));
      for (int i = 0; i <= d; ++i) r /= p;
      return r;
    });
    ex.model = std::make_shared<ClassicalLagrangian>(
        c, std::make_shared<AnalyticFields<SiegelGeo>>(geo), vol, name);
    ex.ricci = [](const PhasePoint&, double) { return 0.0; };
    ex.known_cd = {{0.0, double(n)}, {0.0, kInf}};
    ex.n_admissible = true;
  } else if (name == "contact_sphere") {
    check_keys(p, {"d", "s", "box", "pole"}, name);
    const int d = iget(p, "d", 1);
    const double s = pget(p, "s", 0.0);
    const int pole = iget(p, "pole", 1);
    const double b = pget(p, "box", 2.0);
    if (d < 1) throw DomainError("contact_sphere: d must be >= 1");
    if (!(std::abs(s) < 1.0))
      throw DomainError("contact_sphere: L_s is supercritical only for |s| < 1");
    const int n = 2 * d + 1;
    auto vol = analytic_scalar([n](const auto& x) {
      using T = typename std::decay_t<decltype(x)>::Scalar;
      const T a = T(2.0) / (T(1.0) + sq_norm(x));
      T r = T(1.0);
      for (int i = 0; i < n; ++i) r *= a;
      return r;
    });
    ex.model = std::make_shared<ClassicalLagrangian>(
        Chart::box(n, -b, b, "stereographic"),
        std::make_shared<AnalyticFields<SphereGeo>>(SphereGeo{n, pole, s}), vol, name);
    ex.ricci = [d, s, pole](const PhasePoint& q, double) {
      const double vv = q.v.dot(round_metric(q.x) * q.v);
      return contact_sphere_ricci(d, s, vv, contact_form(q.x, pole).dot(q.v));
    };
    ex.known_cd = {{2.0 * d * (s - 1) * (s - 1), double(n)}};
    ex.n_admissible = true;
    ex.distance = [pole](const Vec& a, const Vec& c) { return sphere_distance(a, c, pole); };
    ex.sample_measure = [n, pole](Rng& rng) { return uniform_sphere_chart_point(rng, n, pole); };
  } else if (name == "mechanical") {
    check_keys(p, {"n", "U", "box"}, name);
    const int n = iget(p, "n", 2);
    const double b = pget(p, "box", 2.0);
    std::shared_ptr<const ScalarField> U;
    bool superharmonic_default = false;
    if (p.contains("U")) {
      U = std::make_shared<ExprField>(p.at("U").get<std::string>(), n);
    } else {
      superharmonic_default = true;
      U = analytic_scalar([](const auto& x) {
        using T = typename std::decay_t<decltype(x)>::Scalar;
        return T(1.0) - T(0.05) * sq_norm(x);
      });
    }
    const Vec mass = Vec::Ones(n);
    ex.model = std::make_shared<ClassicalLagrangian>(
        Chart::box(n, -b, b, "R^n"), std::make_shared<FlatPotentialFields>(mass, U),
        std::make_shared<ConstantField>(1.0), name);
    if (!U->analytic()) {
      auto& m = const_cast<LagrangianModel&>(*ex.model);
      m.steps.bracket = 1e-3;
    }
    ex.ricci = [U, mass](const PhasePoint& q, double N) {
      const double lap = U->hessian(q.x).trace();
      return mechanical_ricci(mass, U->value(q.x), U->gradient(q.x), lap, q.v, N);
    };
    if (superharmonic_default) ex.known_cd = {{0.0, kInf}};
    ex.distance = [](const Vec& a, const Vec& c) { return (a - c).norm(); };
  } else if (name == "many_body") {
    check_keys(p, {"d", "k", "masses", "G", "tube"}, name);
    const int d = iget(p, "d", 3), k = iget(p, "k", 2);
    const double G = pget(p, "G", 1.0), tube = pget(p, "tube", 0.1);
    if (d < 1 || k < 2) throw DomainError("many_body: need d >= 1 and k >= 2");
    std::vector<double> masses(k, 1.0);
    if (p.contains("masses")) masses = p.at("masses").get<std::vector<double>>();
    if (static_cast<int>(masses.size()) != k) throw DomainError("many_body: need k masses");
    const int n = d * k;
    Vec mass(n);
    for (int i = 0; i < k; ++i) mass.segment(i * d, d).setConstant(masses[i]);
    Chart c = Chart::box(n, -1.0, 1.0, "collision-free slab chart");
    const double w = 2.0;
    for (int i = 0; i < k; ++i) {
      c.lower(i * d) = i * (w + tube);
      c.upper(i * d) = i * (w + tube) + w;
    }
    auto Ufn = [d, k, G, masses](const Vec& x) {
      double u = 0.5;
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          u += G * masses[i] * masses[j] / (x.segment(i * d, d) - x.segment(j * d, d)).norm();
      return u;
    };
    auto dUfn = [d, k, G, masses](const Vec& x) {
      Vec g = Vec::Zero(d * k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          if (i == j) continue;
          const Vec r = x.segment(j * d, d) - x.segment(i * d, d);
          g.segment(i * d, d) += G * masses[i] * masses[j] * r / std::pow(r.norm(), 3);
        }
      return g;
    };
    auto U = std::make_shared<FunctionField>(Ufn, dUfn);
    ex.model = std::make_shared<ClassicalLagrangian>(
        c, std::make_shared<FlatPotentialFields>(mass, U), std::make_shared<ConstantField>(1.0),
        name);
    ex.ricci = [d, k, G, masses, mass, Ufn, dUfn](const PhasePoint& q, double N) {
      double lap = 0.0;
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          lap += (3 - d) * G * (masses[i] + masses[j]) /
                 std::pow((q.x.segment(i * d, d) - q.x.segment(j * d, d)).norm(), 3);
      return mechanical_ricci(mass, Ufn(q.x), dUfn(q.x), lap, q.v, N);
    };
    if (d >= 3) ex.known_cd = {{0.0, kInf}};
    ex.notes = "global assumptions fail on the full configuration space; local checks only";
  } else if (name == "q_homogeneous") {
    check_keys(p, {"q", "n", "box"}, name);
    const double q = pget(p, "q", 4.0);
    const int n = iget(p, "n", 2);
    const double b = pget(p, "box", 10.0);
    if (!(q > 1.0)) throw DomainError("q_homogeneous: need q > 1");
    ex.model = std::make_shared<QHomogeneous>(Chart::box(n, -b, b, "R^n"), q);
    ex.ricci = [](const PhasePoint&, double) { return 0.0; };
    ex.known_cd = {{0.0, double(n)}, {0.0, kInf}};
    ex.n_admissible = true;
    ex.distance = [](const Vec& a, const Vec& c) { return (a - c).norm(); };
  } else {
    throw DomainError("unknown example '" + name + "'");
  }
  return ex;
}

}  // namespace lcd::examples
