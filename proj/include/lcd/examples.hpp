#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcd/model.hpp"

namespace lcd::examples {

using Params = nlohmann::json;

// Closed-form Ric_{mu,N} on the zero-energy level.
using RicciOracle = std::function<double(const PhasePoint&, double N)>;

struct ExampleModel {
  std::string name;
  ModelPtr model;
  RicciOracle ricci;
  // (K, N) pairs for which CD(K,N) holds on the chart; used by needle checks.
  std::vector<std::pair<double, double>> known_cd;
  // Whether N = n is admissible everywhere (Sigma psi == Lambda_par identically).
  bool n_admissible = false;
  // Riemannian distance of the underlying metric, when known in closed form.
  std::function<double(const Vec&, const Vec&)> distance;
  // Exact sampler of the normalized measure, for compact models.
  std::function<Vec(Rng&)> sample_measure;
  std::string notes;
};

struct ParamInfo {
  std::string name, default_value, description;
};
struct ExampleInfo {
  std::string name, summary;
  std::vector<ParamInfo> params;
};

std::vector<ExampleInfo> list_examples();
ExampleModel get_example(const std::string& name, const Params& params = Params::object());

// Stereographic helpers for S^m in R^{m+1}; pole = +1 projects from e_{m+1}, -1 from -e_{m+1}.
Vec stereo_embed(const Vec& x, int pole);
Vec stereo_chart(const Vec& X, int pole);
// Pullback of eta = Re<iz, .> to the stereographic chart of S^{2d+1}.
Vec contact_form(const Vec& x, int pole);
Mat round_metric(const Vec& x);

// Hyperbolic distance in the upper half plane.
double hyperbolic_distance(const Vec& a, const Vec& b);
// Great-circle distance between two stereographic chart points.
double sphere_distance(const Vec& a, const Vec& b, int pole);

// Analytic weighted Ricci for L = |v|^2/2 + U with flat metric diag(mass), Lebesgue measure.
double mechanical_ricci(const Vec& mass_diag, double U, const Vec& dU, double lapU, const Vec& v,
                        double N);

// Weighted Ricci (N = n, Riemannian volume) of L_s on S^{2d+1} at |v|_g^2 = vv, eta(v) = eta.
// div Y = +4d eta for Y = (d eta)^sharp, so the eta-linear term enters with a minus sign.
double contact_sphere_ricci(int d, double s, double vv, double eta);
// The same expression with the opposite sign of the linear term, as printed in the literature.
double contact_sphere_ricci_printed(int d, double s, double vv, double eta);

}  // namespace lcd::examples
