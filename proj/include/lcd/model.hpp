#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lcd/expr.hpp"
#include "lcd/numerics.hpp"

namespace lcd {

struct Chart {
  int n = 0;
  Vec lower, upper;
  std::string label;

  static Chart box(int n, double lo, double hi, std::string label = {});
  void validate() const;
  bool contains(const Vec& x) const;
  Vec sample(Rng& rng) const;
  double volume() const { return (upper - lower).prod(); }
};

struct PhasePoint {
  Vec x, v;
};
struct CovectorPoint {
  Vec x, p;
};

// L and its first/second derivatives at one point. Lvx(k, j) = d^2 L / dv^k dx^j.
struct Jet {
  double L = 0.0;
  Vec Lx, Lv;
  Mat Lvv, Lvx;
};

struct TonelliViolation : NumericalError {
  using NumericalError::NumericalError;
};
struct SupercriticalityViolation : DomainError {
  using DomainError::DomainError;
};

class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const;
  virtual Mat hessian(const Vec& x) const;
  virtual bool analytic() const { return false; }
};

class ConstantField final : public ScalarField {
 public:
  explicit ConstantField(double c) : c_(c) {}
  double value(const Vec&) const override { return c_; }
  Vec gradient(const Vec& x) const override { return Vec::Zero(x.size()); }
  Mat hessian(const Vec& x) const override { return Mat::Zero(x.size(), x.size()); }
  bool analytic() const override { return true; }

 private:
  double c_;
};

class FunctionField final : public ScalarField {
 public:
  using Fn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  explicit FunctionField(Fn f, GradFn g = {}) : f_(std::move(f)), g_(std::move(g)) {}
  double value(const Vec& x) const override { return f_(x); }
  Vec gradient(const Vec& x) const override;
  bool analytic() const override { return static_cast<bool>(g_); }

 private:
  Fn f_;
  GradFn g_;
};

// A scalar expression in x1..xn plus named parameters.
class ExprField final : public ScalarField {
 public:
  ExprField(const std::string& source, int n, const std::map<std::string, double>& params = {});
  double value(const Vec& x) const override;

 private:
  expr::Compiled f_;
  int n_;
  std::vector<double> params_;
};

struct FdOptions {
  double rel_step1 = std::cbrt(kEps);
  double rel_step2 = std::pow(kEps, 0.25);
};

// Step sizes used by the curvature machinery; FD-only models get larger defaults.
struct CurvatureSteps {
  double bracket = 1e-4;
  double sigma_flow = 1e-4;
  double sigma_psi = 1e-3;
};

class LagrangianModel {
 public:
  LagrangianModel(Chart chart, std::shared_ptr<const ScalarField> density, std::string name);
  virtual ~LagrangianModel() = default;

  virtual double value(const Vec& x, const Vec& v) const = 0;
  // Default implementation: central finite differences of value().
  virtual Jet jet(const Vec& x, const Vec& v) const;
  virtual Mat L_xx(const Vec& x, const Vec& v) const;
  virtual bool analytic() const { return false; }

  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.n; }
  const std::string& name() const { return name_; }

  double density(const Vec& x) const;
  double log_density(const Vec& x) const;
  Vec grad_log_density(const Vec& x) const;
  const std::shared_ptr<const ScalarField>& density_field() const { return density_; }

  FdOptions fd;
  CurvatureSteps steps;

 protected:
  Jet jet_fd(const Vec& x, const Vec& v) const;
  Chart chart_;
  std::shared_ptr<const ScalarField> density_;
  std::string name_;
};

using ModelPtr = std::shared_ptr<const LagrangianModel>;

// L given by one expression in x1..xn, v1..vn (and parameters).
class ExpressionLagrangian final : public LagrangianModel {
 public:
  ExpressionLagrangian(Chart chart, const std::string& source,
                       std::shared_ptr<const ScalarField> density,
                       const std::map<std::string, double>& params = {});
  double value(const Vec& x, const Vec& v) const override;

 private:
  expr::Compiled L_;
  std::vector<double> params_;
};

// g, dg, U, dU, eta, deta at a point; deta(i, k) = d eta_i / dx^k, dg[k] = dg / dx^k.
struct FieldJet {
  Mat g;
  std::vector<Mat> dg;
  double U = 0.0;
  Vec dU;
  Vec eta;
  Mat deta;
};

class ClassicalFields {
 public:
  virtual ~ClassicalFields() = default;
  virtual int dim() const = 0;
  virtual FieldJet jet(const Vec& x) const = 0;
  virtual Mat metric(const Vec& x) const { return jet(x).g; }
  virtual double potential(const Vec& x) const { return jet(x).U; }
  virtual Vec form(const Vec& x) const { return jet(x).eta; }
  virtual Mat potential_hessian(const Vec& x) const;
  virtual bool analytic() const { return false; }
};

// Fields given by expressions: metric entries g_ij (row-major, symmetrized), U, eta_i.
class ExprClassicalFields final : public ClassicalFields {
 public:
  ExprClassicalFields(int n, const std::vector<std::string>& metric, const std::string& potential,
                      const std::vector<std::string>& form,
                      const std::map<std::string, double>& params = {});
  int dim() const override { return n_; }
  FieldJet jet(const Vec& x) const override;
  Mat metric(const Vec& x) const override;
  double potential(const Vec& x) const override;
  Vec form(const Vec& x) const override;

 private:
  int n_;
  std::vector<std::shared_ptr<ExprField>> g_, eta_;
  std::shared_ptr<ExprField> U_;
};

// L = g(v,v)/2 + U - eta(v).
class ClassicalLagrangian final : public LagrangianModel {
 public:
  ClassicalLagrangian(Chart chart, std::shared_ptr<const ClassicalFields> fields,
                      std::shared_ptr<const ScalarField> density, std::string name);
  double value(const Vec& x, const Vec& v) const override;
  Jet jet(const Vec& x, const Vec& v) const override;
  Mat L_xx(const Vec& x, const Vec& v) const override;
  bool analytic() const override { return fields_->analytic(); }
  const ClassicalFields& fields() const { return *fields_; }

 private:
  std::shared_ptr<const ClassicalFields> fields_;
};

// Forwards everything to a base model but replaces the measure density.
class ReweightedModel final : public LagrangianModel {
 public:
  ReweightedModel(ModelPtr base, std::shared_ptr<const ScalarField> density);
  double value(const Vec& x, const Vec& v) const override { return base_->value(x, v); }
  Jet jet(const Vec& x, const Vec& v) const override { return base_->jet(x, v); }
  Mat L_xx(const Vec& x, const Vec& v) const override { return base_->L_xx(x, v); }
  bool analytic() const override { return base_->analytic(); }
  const LagrangianModel& base() const { return *base_; }

 private:
  ModelPtr base_;
};

// -- model operations ------------------------------------------------------

Mat vertical_hessian(const LagrangianModel& m, const PhasePoint& q);
CovectorPoint legendre_inverse(const LagrangianModel& m, const PhasePoint& q);
PhasePoint legendre_forward(const LagrangianModel& m, const CovectorPoint& c,
                            const Vec* v_guess = nullptr);
double hamiltonian(const LagrangianModel& m, const CovectorPoint& c);
double energy(const LagrangianModel& m, const PhasePoint& q);
double energy(const Jet& j, const Vec& v);
PhasePoint indicatrix_sample(const LagrangianModel& m, const Vec& x, const Vec& u);
PhasePoint random_sm_point(const LagrangianModel& m, Rng& rng);

// Cholesky of g = L_vv with a Tonelli check.
Eigen::LLT<Mat> tonelli_factor(const Mat& Lvv);

}  // namespace lcd
