#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pqlab/linalg.hpp"

namespace pqlab {

/// Constants attached to a density: exponents (p, q) plus the convexity,
/// Hessian-growth, mixed-derivative and x-Lipschitz bounds it claims to
/// satisfy. Declared values are claims; the verify module measures them.
struct GrowthEnvelope {
  int n = 1;       // spatial dimension
  double p = 2.0;  // lower growth exponent, > 1
  double q = 2.0;  // upper growth exponent, >= p
  double m = 0.0;  // p-uniform convexity constant
  double M = 0.0;  // Hessian growth bound
  double K = 0.0;  // mixed xi-x derivative bound
  double H = 0.0;  // x-Lipschitz bound of the zero-normalized density

  void validate() const;  // throws Error on 1 < p <= q violations
};

struct Domain {
  enum class Shape { Box, Ball };
  Vec center;
  Shape shape = Shape::Box;
  double extent = 1.0;  // half-width of the box, or ball radius

  int dim() const { return static_cast<int>(center.size()); }
  bool contains(const Vec& x, double tol = 1e-9) const;
  double dist_to_boundary(const Vec& x) const;
  double diameter() const;
};

Domain box_domain(int n, double extent);
Domain ball_domain(int n, double radius);

/// Closed-form spatial coefficient with a declared Lipschitz constant.
/// Three shapes cover the catalog: constants, affine ramps c0 + c1*x[axis],
/// and positive parts c0 + c1*max(x[axis], 0).
class Coefficient {
 public:
  enum class Kind { Constant, Affine, PosPart };

  Coefficient() = default;
  static Coefficient constant(double c);
  static Coefficient affine(int axis, double c0, double c1);
  static Coefficient pospart(int axis, double c1, double c0 = 0.0);

  double operator()(const Vec& x) const;
  double lipschitz() const;
  double min_on(const Domain& d) const;  // bound over the domain's bounding box
  double max_on(const Domain& d) const;

  Kind kind() const { return kind_; }
  std::string describe() const;
  static Coefficient parse(const std::string& text);  // "const 1", "affine 1 0.5 0.25", "pospart 0 1"

 private:
  Kind kind_ = Kind::Constant;
  int axis_ = 0;
  double c0_ = 0.0;
  double c1_ = 0.0;
};

/// An energy density f(x, xi) with value, xi-gradient and xi-Hessian callbacks,
/// its declared growth envelope, and catalog metadata. Immutable after
/// construction; safe for concurrent read-only evaluation.
struct DensityModel {
  std::string kind;
  std::map<std::string, double> params;
  GrowthEnvelope envelope;
  std::optional<Domain> domain;  // where spatial coefficients are defined
  bool regularized = true;       // (1+|xi|^2)^(r/2) moduli instead of raw powers
  bool zero_normalized = false;  // f(x, 0) == 0 for all x
  bool starred = false;          // convexity/growth claimed only for |xi| >= 1
  bool h5_heuristic = false;     // locality witness search is probe-set based

  std::function<double(const Vec&, const Vec&)> eval_fn;
  std::function<Vec(const Vec&, const Vec&)> grad_fn;
  std::function<SymMat(const Vec&, const Vec&)> hess_fn;
  // Scalar field minimized over a ball when hunting the locality witness
  // point; per-kind (phase coefficient, exponent, ...). Empty means constant.
  std::function<double(const Vec&)> h5_selector;

  double eval(const Vec& x, const Vec& xi) const;
  Vec grad_xi(const Vec& x, const Vec& xi) const;
  SymMat hess_xi(const Vec& x, const Vec& xi) const;

  bool in_domain(const Vec& x, double tol = 1e-9) const;

 private:
  void check_args(const Vec& x, const Vec& xi) const;
};

/// Parameter bag for the generic catalog constructor.
struct Params {
  std::map<std::string, double> scalar;
  std::map<std::string, Coefficient> coeff;
  std::vector<double> exponents;  // per-direction exponents (anisotropic kind)

  double get(const std::string& key) const;
  double get_or(const std::string& key, double fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;
  const Coefficient& coeff_at(const std::string& key) const;
  Coefficient coeff_or(const std::string& key, const Coefficient& fallback) const;
  bool has(const std::string& key) const { return scalar.count(key) > 0; }
  bool has_coeff(const std::string& key) const { return coeff.count(key) > 0; }
};

/// Generic catalog entry point. Kinds: double-phase, variable-exponent,
/// log-power, sum-structure, example-iv, anisotropic. Custom models are built
/// directly via make_custom.
DensityModel instantiate(const std::string& kind, const Params& params);

DensityModel make_double_phase(int n, double p, double q, Coefficient a,
                               bool regularized, const Domain& domain);
DensityModel make_variable_exponent(int n, Coefficient a, Coefficient px,
                                    const Domain& domain);
DensityModel make_log_power(int n, double p, double alpha, bool regularized,
                            double q_declared = 0.0);
DensityModel make_sum_structure(int n, double p, double q, Coefficient a1,
                                Coefficient a2, bool regularized, const Domain& domain);
DensityModel make_example_iv(double p = 2.0, double q = 4.0,
                             std::optional<Domain> domain = std::nullopt);
DensityModel make_anisotropic(std::vector<double> exponents, bool regularized);
DensityModel make_custom(std::string name, GrowthEnvelope envelope,
                         std::function<double(const Vec&, const Vec&)> eval,
                         std::function<Vec(const Vec&, const Vec&)> grad,
                         std::function<SymMat(const Vec&, const Vec&)> hess,
                         std::optional<Domain> domain = std::nullopt);

/// Subtracts f(x, 0), yielding the density g(x, xi) = f(x, xi) - f(x, 0) with
/// g(x, 0) == 0 and the same xi-derivatives. Minimizing g is equivalent to
/// minimizing f.
DensityModel normalize_at_zero(const DensityModel& f);

namespace detail {

/// Radial profile phi(s), s = |xi|^2, with analytic s-derivatives. A density
/// f(xi) = phi(|xi|^2) has gradient 2 phi' xi and Hessian
/// 2 phi' I + 4 phi'' xi xi^T.
struct PowerProfile {
  double r = 2.0;
  bool mod = true;  // (1+s)^(r/2) when true, s^(r/2) when false
  double phi(double s) const;
  double dphi(double s) const;
  double ddphi(double s) const;
};

struct LogPowerProfile {
  double p = 2.0;
  double alpha = 1.0;
  bool mod = true;
  double phi(double s) const;
  double dphi(double s) const;
  double ddphi(double s) const;
};

Vec radial_grad(double dphi, const Vec& xi);
SymMat radial_hess(int n, double dphi, double ddphi, const Vec& xi);

}  // namespace detail

}  // namespace pqlab
