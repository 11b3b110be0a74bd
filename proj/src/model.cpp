#include "lcd/model.hpp"

#include <sstream>

namespace lcd {

Chart Chart::box(int n, double lo, double hi, std::string label) {
  Chart c;
  c.n = n;
  c.lower = Vec::Constant(n, lo);
  c.upper = Vec::Constant(n, hi);
  c.label = std::move(label);
  c.validate();
  return c;
}

void Chart::validate() const {
  if (n < 1) throw DomainError("chart dimension must be >= 1");
  if (lower.size() != n || upper.size() != n) throw DomainError("chart bounds have wrong size");
  for (int i = 0; i < n; ++i)
    if (!(lower(i) < upper(i))) throw DomainError("chart bounds must satisfy lower < upper");
}

bool Chart::contains(const Vec& x) const {
  for (int i = 0; i < n; ++i)
    if (!(x(i) >= lower(i) && x(i) <= upper(i))) return false;
  return true;
}

Vec Chart::sample(Rng& rng) const {
  Vec x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.uniform(lower(i), upper(i));
  return x;
}

Vec ScalarField::gradient(const Vec& x) const {
  return fd_gradient([this](const Vec& y) { return value(y); }, x);
}

Mat ScalarField::hessian(const Vec& x) const {
  return fd_hessian([this](const Vec& y) { return value(y); }, x);
}

Vec FunctionField::gradient(const Vec& x) const {
  return g_ ? g_(x) : ScalarField::gradient(x);
}

namespace {
std::vector<std::string> slot_names(int n, bool with_v, const std::map<std::string, double>& params) {
  std::vector<std::string> s;
  for (int i = 1; i <= n; ++i) s.push_back("x" + std::to_string(i));
  if (with_v)
    for (int i = 1; i <= n; ++i) s.push_back("v" + std::to_string(i));
  for (auto& [k, v] : params) s.push_back(k);
  return s;
}
}  // namespace

ExprField::ExprField(const std::string& source, int n, const std::map<std::string, double>& params)
    : f_(expr::parse(source), slot_names(n, false, params)), n_(n) {
  for (auto& [k, v] : params) params_.push_back(v);
}

double ExprField::value(const Vec& x) const {
  double buf[64];
  if (n_ + params_.size() > 64) throw Error("too many expression slots");
  for (int i = 0; i < n_; ++i) buf[i] = x(i);
  for (std::size_t k = 0; k < params_.size(); ++k) buf[n_ + k] = params_[k];
  return f_(std::span<const double>(buf, n_ + params_.size()));
}

LagrangianModel::LagrangianModel(Chart chart, std::shared_ptr<const ScalarField> density,
                                 std::string name)
    : chart_(std::move(chart)), density_(std::move(density)), name_(std::move(name)) {
  chart_.validate();
  if (!density_) density_ = std::make_shared<ConstantField>(1.0);
}

double LagrangianModel::density(const Vec& x) const {
  const double w = density_->value(x);
  if (!(w > 0.0)) throw DomainError("measure density must be positive on the chart");
  return w;
}

double LagrangianModel::log_density(const Vec& x) const { return std::log(density(x)); }

Vec LagrangianModel::grad_log_density(const Vec& x) const {
  return density_->gradient(x) / density(x);
}

Jet LagrangianModel::jet(const Vec& x, const Vec& v) const { return jet_fd(x, v); }

Jet LagrangianModel::jet_fd(const Vec& x0, const Vec& v0) const {
  const int n = dim();
  Vec x = x0, v = v0;
  Jet j;
  j.L = value(x, v);
  j.Lx.resize(n);
  j.Lv.resize(n);
  j.Lvv.resize(n, n);
  j.Lvx.resize(n, n);
  auto st1 = [&](double c) { return fd.rel_step1 * std::max(1.0, std::abs(c)); };
  auto st2 = [&](double c) { return fd.rel_step2 * std::max(1.0, std::abs(c)); };
  for (int i = 0; i < n; ++i) {
    double h = st1(x(i)), c = x(i);
    x(i) = c + h;
    double fp = value(x, v);
    x(i) = c - h;
    double fm = value(x, v);
    x(i) = c;
    j.Lx(i) = (fp - fm) / (2 * h);
    h = st1(v(i));
    c = v(i);
    v(i) = c + h;
    fp = value(x, v);
    v(i) = c - h;
    fm = value(x, v);
    v(i) = c;
    j.Lv(i) = (fp - fm) / (2 * h);
  }
  for (int k = 0; k < n; ++k) {
    const double hk = st2(v(k)), vk = v(k);
    v(k) = vk + hk;
    const double fp = value(x, v);
    v(k) = vk - hk;
    const double fm = value(x, v);
    v(k) = vk;
    j.Lvv(k, k) = (fp - 2 * j.L + fm) / (hk * hk);
    for (int l = 0; l < k; ++l) {
      const double hl = st2(v(l)), vl = v(l);
      auto at = [&](double a, double b) {
        v(k) = vk + a * hk;
        v(l) = vl + b * hl;
        const double r = value(x, v);
        v(k) = vk;
        v(l) = vl;
        return r;
      };
      j.Lvv(k, l) = j.Lvv(l, k) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * hk * hl);
    }
    for (int m = 0; m < n; ++m) {
      const double hm = st2(x(m)), xm = x(m);
      auto at = [&](double a, double b) {
        v(k) = vk + a * hk;
        x(m) = xm + b * hm;
        const double r = value(x, v);
        v(k) = vk;
        x(m) = xm;
        return r;
      };
      j.Lvx(k, m) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * hk * hm);
    }
  }
  return j;
}

Mat LagrangianModel::L_xx(const Vec& x0, const Vec& v) const {
  const int n = dim();
  Mat H(n, n);
  Vec x = x0;
  for (int k = 0; k < n; ++k) {
    const double h = fd.rel_step1 * std::max(1.0, std::abs(x(k))), c = x(k);
    x(k) = c + h;
    const Vec gp = jet(x, v).Lx;
    x(k) = c - h;
    const Vec gm = jet(x, v).Lx;
    x(k) = c;
    H.col(k) = (gp - gm) / (2 * h);
  }
  return symmetrized(H);
}

ExpressionLagrangian::ExpressionLagrangian(Chart chart, const std::string& source,
                                           std::shared_ptr<const ScalarField> density,
                                           const std::map<std::string, double>& params)
    : LagrangianModel(std::move(chart), std::move(density), "expression"),
      L_(expr::parse(source), slot_names(chart_.n, true, params)) {
  for (auto& [k, v] : params) params_.push_back(v);
  steps.bracket = 1e-2;
  steps.sigma_flow = 1e-2;
}

double ExpressionLagrangian::value(const Vec& x, const Vec& v) const {
  const int n = dim();
  double buf[128];
  if (2 * n + params_.size() > 128) throw Error("too many expression slots");
  for (int i = 0; i < n; ++i) {
    buf[i] = x(i);
    buf[n + i] = v(i);
  }
  for (std::size_t k = 0; k < params_.size(); ++k) buf[2 * n + k] = params_[k];
  return L_(std::span<const double>(buf, 2 * n + params_.size()));
}

Mat ClassicalFields::potential_hessian(const Vec& x) const {
  return fd_hessian([this](const Vec& y) { return potential(y); }, x);
}

ExprClassicalFields::ExprClassicalFields(int n, const std::vector<std::string>& metric,
                                         const std::string& potential,
                                         const std::vector<std::string>& form,
                                         const std::map<std::string, double>& params)
    : n_(n) {
  if (static_cast<int>(metric.size()) != n * n)
    throw DomainError("metric needs n*n expressions (row-major)");
  if (!form.empty() && static_cast<int>(form.size()) != n)
    throw DomainError("one-form needs n expressions");
  for (auto& s : metric) g_.push_back(std::make_shared<ExprField>(s, n, params));
  U_ = std::make_shared<ExprField>(potential, n, params);
  for (auto& s : form) eta_.push_back(std::make_shared<ExprField>(s, n, params));
}

Mat ExprClassicalFields::metric(const Vec& x) const {
  Mat g(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) g(i, j) = g_[i * n_ + j]->value(x);
  return symmetrized(g);
}

double ExprClassicalFields::potential(const Vec& x) const { return U_->value(x); }

Vec ExprClassicalFields::form(const Vec& x) const {
  Vec e = Vec::Zero(n_);
  for (std::size_t i = 0; i < eta_.size(); ++i) e(i) = eta_[i]->value(x);
  return e;
}

FieldJet ExprClassicalFields::jet(const Vec& x0) const {
  FieldJet f;
  f.g = metric(x0);
  f.U = potential(x0);
  f.eta = form(x0);
  f.dU = U_->gradient(x0);
  f.dg.resize(n_);
  f.deta = Mat::Zero(n_, n_);
  Vec x = x0;
  for (int k = 0; k < n_; ++k) {
    const double h = fd_step1(x(k)), c = x(k);
    x(k) = c + h;
    const Mat gp = metric(x);
    const Vec ep = form(x);
    x(k) = c - h;
    const Mat gm = metric(x);
    const Vec em = form(x);
    x(k) = c;
    f.dg[k] = (gp - gm) / (2 * h);
    f.deta.col(k) = (ep - em) / (2 * h);
  }
  return f;
}

ClassicalLagrangian::ClassicalLagrangian(Chart chart, std::shared_ptr<const ClassicalFields> fields,
                                         std::shared_ptr<const ScalarField> density,
                                         std::string name)
    : LagrangianModel(std::move(chart), std::move(density), std::move(name)),
      fields_(std::move(fields)) {
  if (fields_->dim() != chart_.n) throw DomainError("field dimension does not match chart");
}

double ClassicalLagrangian::value(const Vec& x, const Vec& v) const {
  return 0.5 * v.dot(fields_->metric(x) * v) + fields_->potential(x) - fields_->form(x).dot(v);
}

Jet ClassicalLagrangian::jet(const Vec& x, const Vec& v) const {
  const FieldJet f = fields_->jet(x);
  const int n = dim();
  Jet j;
  const Vec gv = f.g * v;
  j.L = 0.5 * v.dot(gv) + f.U - f.eta.dot(v);
  j.Lv = gv - f.eta;
  j.Lvv = f.g;
  j.Lx.resize(n);
  j.Lvx.resize(n, n);
  for (int k = 0; k < n; ++k) {
    const Vec dgv = f.dg[k] * v;
    j.Lx(k) = 0.5 * v.dot(dgv) + f.dU(k) - f.deta.col(k).dot(v);
    j.Lvx.col(k) = dgv - f.deta.col(k);
  }
  return j;
}

Mat ClassicalLagrangian::L_xx(const Vec& x, const Vec& v) const {
  return LagrangianModel::L_xx(x, v);
}

ReweightedModel::ReweightedModel(ModelPtr base, std::shared_ptr<const ScalarField> density)
    : LagrangianModel(base->chart(), std::move(density), base->name()), base_(std::move(base)) {
  fd = base_->fd;
  steps = base_->steps;
}

// ---------------------------------------------------------------------------

Eigen::LLT<Mat> tonelli_factor(const Mat& Lvv) {
  Eigen::LLT<Mat> llt(symmetrized(Lvv));
  if (llt.info() != Eigen::Success)
    throw TonelliViolation("vertical Hessian is not positive definite");
  return llt;
}

Mat vertical_hessian(const LagrangianModel& m, const PhasePoint& q) {
  Mat g = symmetrized(m.jet(q.x, q.v).Lvv);
  tonelli_factor(g);
  return g;
}

CovectorPoint legendre_inverse(const LagrangianModel& m, const PhasePoint& q) {
  return {q.x, m.jet(q.x, q.v).Lv};
}

PhasePoint legendre_forward(const LagrangianModel& m, const CovectorPoint& c, const Vec* v_guess) {
  Vec v = v_guess ? *v_guess : c.p;
  Jet j = m.jet(c.x, v);
  Vec r = j.Lv - c.p;
  double rn = r.norm();
  const double tol = 1e-12 * std::max(1.0, c.p.norm());
  for (int it = 0; it < 100 && rn > tol; ++it) {
    Eigen::LLT<Mat> llt(symmetrized(j.Lvv));
    if (llt.info() != Eigen::Success) {
      // degenerate start (e.g. the zero section of a q-homogeneous L): nudge outward
      v = v * 1.5 + Vec::Constant(v.size(), 1e-3);
      j = m.jet(c.x, v);
      r = j.Lv - c.p;
      rn = r.norm();
      continue;
    }
    const Vec d = -llt.solve(r);
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k <= 30; ++k, t *= 0.5) {
      const Vec vn = v + t * d;
      Jet jn = m.jet(c.x, vn);
      const Vec rn_vec = jn.Lv - c.p;
      if (rn_vec.norm() < rn) {
        v = vn;
        j = std::move(jn);
        r = rn_vec;
        rn = r.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(rn <= 1e-10 * std::max(1.0, c.p.norm()))) {
    std::ostringstream os;
    os << "legendre_forward: Newton did not converge (residual " << rn << ")";
    throw NumericalError(os.str());
  }
  return {c.x, v};
}

double energy(const Jet& j, const Vec& v) { return j.Lv.dot(v) - j.L; }

double energy(const LagrangianModel& m, const PhasePoint& q) {
  return energy(m.jet(q.x, q.v), q.v);
}

double hamiltonian(const LagrangianModel& m, const CovectorPoint& c) {
  const PhasePoint q = legendre_forward(m, c);
  return c.p.dot(q.v) - m.value(q.x, q.v);
}

PhasePoint indicatrix_sample(const LagrangianModel& m, const Vec& x, const Vec& u0) {
  const Vec u = u0.normalized();
  const double L0 = m.value(x, Vec::Zero(x.size()));
  if (!(-L0 < 0.0))
    throw SupercriticalityViolation("E(x,0) >= 0: zero energy level not reachable at this point");
  auto E = [&](double r) { return energy(m, PhasePoint{x, r * u}); };
  double lo = 0.0, hi = 1.0;
  double Ehi = E(hi);
  for (int k = 0; Ehi < 0.0; ++k) {
    if (k > 200) throw NumericalError("indicatrix_sample: cannot bracket E = 0");
    lo = hi;
    hi *= 2.0;
    Ehi = E(hi);
  }
  double r = 0.5 * (lo + hi);
  const double tol = 1e-13 * std::max(1.0, std::abs(L0));
  for (int it = 0; it < 200; ++it) {
    const Jet j = m.jet(x, r * u);
    const double e = energy(j, r * u);
    if (std::abs(e) <= tol) break;
    if (e < 0.0) lo = r; else hi = r;
    const double de = r * u.dot(j.Lvv * u);
    double rn = r - e / de;
    if (!(rn > lo && rn < hi) || !std::isfinite(rn)) rn = 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * hi) break;
    r = rn;
  }
  return {x, r * u};
}

PhasePoint random_sm_point(const LagrangianModel& m, Rng& rng) {
  const Vec x = m.chart().sample(rng);
  return indicatrix_sample(m, x, rng.unit_vector(m.dim()));
}

}  // namespace lcd
