#include "pqlab/density.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace pqlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Largest |xi| probed by the verifier's radial ladder; declared constants for
// kinds with slowly varying (logarithmic) factors are claims up to this range.
constexpr double kClaimRadius = 1e3;

double sq(double v) { return v * v; }

// Extremal ratios of the Hessian eigenvalues of (1+s)^(r/2) against the
// moduli (1+s)^((r-2)/2): eigenvalues are r(1+s)^((r-2)/2) (tangential) and
// r(1+s)^((r-2)/2)(1+(r-1)s)/(1+s) (radial).
double lam_min_ratio(double r) { return r * std::min(1.0, r - 1.0); }
double lam_max_ratio(double r) { return r * std::max(1.0, r - 1.0); }

// Same for the raw profile s^(r/2), valid on |xi| >= 1.
double raw_lam_min_ratio(double r) {
  const double base = r * std::min(1.0, r - 1.0);
  return r > 2.0 ? base * std::pow(2.0, -(r - 2.0) / 2.0) : base;
}
double raw_lam_max_ratio(double r) {
  const double base = r * std::max(1.0, r - 1.0);
  return r < 2.0 ? base * std::pow(2.0, (2.0 - r) / 2.0) : base;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace

void GrowthEnvelope::validate() const {
  require(n >= 1, "envelope dimension n must be >= 1");
  require(p > 1.0, "exponent p must exceed 1 (got " + std::to_string(p) + ")");
  require(q >= p, "exponent q must be >= p (got q=" + std::to_string(q) +
                      ", p=" + std::to_string(p) + ")");
}

bool Domain::contains(const Vec& x, double tol) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  if (shape == Shape::Ball) return dist(x, center) <= extent + tol;
  for (int j = 0; j < dim(); ++j)
    if (std::abs(x[j] - center[j]) > extent + tol) return false;
  return true;
}

double Domain::dist_to_boundary(const Vec& x) const {
  if (shape == Shape::Ball) return extent - dist(x, center);
  double d = kInf;
  for (int j = 0; j < dim(); ++j)
    d = std::min(d, extent - std::abs(x[j] - center[j]));
  return d;
}

double Domain::diameter() const {
  if (shape == Shape::Ball) return 2.0 * extent;
  return 2.0 * extent * std::sqrt(static_cast<double>(dim()));
}

Domain box_domain(int n, double extent) {
  Domain d;
  d.center.assign(n, 0.0);
  d.shape = Domain::Shape::Box;
  d.extent = extent;
  return d;
}

Domain ball_domain(int n, double radius) {
  Domain d = box_domain(n, radius);
  d.shape = Domain::Shape::Ball;
  return d;
}

Coefficient Coefficient::constant(double c) {
  Coefficient f;
  f.kind_ = Kind::Constant;
  f.c0_ = c;
  return f;
}

Coefficient Coefficient::affine(int axis, double c0, double c1) {
  Coefficient f;
  f.kind_ = Kind::Affine;
  f.axis_ = axis;
  f.c0_ = c0;
  f.c1_ = c1;
  return f;
}

Coefficient Coefficient::pospart(int axis, double c1, double c0) {
  Coefficient f;
  f.kind_ = Kind::PosPart;
  f.axis_ = axis;
  f.c0_ = c0;
  f.c1_ = c1;
  return f;
}

double Coefficient::operator()(const Vec& x) const {
  switch (kind_) {
    case Kind::Constant:
      return c0_;
    case Kind::Affine:
      return c0_ + c1_ * x[axis_];
    case Kind::PosPart:
      return c0_ + c1_ * std::max(x[axis_], 0.0);
  }
  return c0_;
}

double Coefficient::lipschitz() const {
  return kind_ == Kind::Constant ? 0.0 : std::abs(c1_);
}

double Coefficient::min_on(const Domain& d) const {
  if (kind_ == Kind::Constant) return c0_;
  const double lo = d.center[axis_] - d.extent;
  const double hi = d.center[axis_] + d.extent;
  auto at = [&](double t) {
    return kind_ == Kind::Affine ? c0_ + c1_ * t : c0_ + c1_ * std::max(t, 0.0);
  };
  double v = std::min(at(lo), at(hi));
  if (kind_ == Kind::PosPart && lo < 0.0 && hi > 0.0) v = std::min(v, at(0.0));
  return v;
}

double Coefficient::max_on(const Domain& d) const {
  if (kind_ == Kind::Constant) return c0_;
  const double lo = d.center[axis_] - d.extent;
  const double hi = d.center[axis_] + d.extent;
  auto at = [&](double t) {
    return kind_ == Kind::Affine ? c0_ + c1_ * t : c0_ + c1_ * std::max(t, 0.0);
  };
  return std::max(at(lo), at(hi));
}

std::string Coefficient::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant:
      os << "const " << c0_;
      break;
    case Kind::Affine:
      os << "affine " << axis_ << " " << c0_ << " " << c1_;
      break;
    case Kind::PosPart:
      os << "pospart " << axis_ << " " << c1_;
      if (c0_ != 0.0) os << " " << c0_;
      break;
  }
  return os.str();
}

Coefficient Coefficient::parse(const std::string& text) {
  std::istringstream is(text);
  std::string form;
  is >> form;
  auto num = [&](const char* what) {
    double v;
    if (!(is >> v))
      throw ConfigError("coefficient '" + text + "': missing or malformed " + what);
    return v;
  };
  if (form == "const") return constant(num("value"));
  if (form == "affine") {
    const int axis = static_cast<int>(num("axis"));
    const double c0 = num("offset");
    const double c1 = num("slope");
    return affine(axis, c0, c1);
  }
  if (form == "pospart") {
    const int axis = static_cast<int>(num("axis"));
    const double c1 = num("slope");
    double c0 = 0.0;
    is >> c0;
    return pospart(axis, c1, c0);
  }
  throw ConfigError("unknown coefficient form '" + form + "' in '" + text + "'");
}

void DensityModel::check_args(const Vec& x, const Vec& xi) const {
  require(static_cast<int>(x.size()) == envelope.n &&
              static_cast<int>(xi.size()) == envelope.n,
          "point/gradient dimension mismatch for kind '" + kind + "'");
  require(all_finite(xi), "non-finite gradient argument");
  if (domain && !domain->contains(x))
    throw Error("evaluation point outside the declared domain of kind '" + kind + "'");
}

double DensityModel::eval(const Vec& x, const Vec& xi) const {
  check_args(x, xi);
  return eval_fn(x, xi);
}

Vec DensityModel::grad_xi(const Vec& x, const Vec& xi) const {
  check_args(x, xi);
  return grad_fn(x, xi);
}

SymMat DensityModel::hess_xi(const Vec& x, const Vec& xi) const {
  check_args(x, xi);
  return hess_fn(x, xi);
}

bool DensityModel::in_domain(const Vec& x, double tol) const {
  return !domain || domain->contains(x, tol);
}

double Params::get(const std::string& key) const {
  auto it = scalar.find(key);
  if (it == scalar.end()) throw Error("missing parameter '" + key + "'");
  return it->second;
}

double Params::get_or(const std::string& key, double fallback) const {
  auto it = scalar.find(key);
  return it == scalar.end() ? fallback : it->second;
}

bool Params::flag_or(const std::string& key, bool fallback) const {
  auto it = scalar.find(key);
  return it == scalar.end() ? fallback : it->second != 0.0;
}

const Coefficient& Params::coeff_at(const std::string& key) const {
  auto it = coeff.find(key);
  if (it == coeff.end()) throw Error("missing coefficient parameter '" + key + "'");
  return it->second;
}

Coefficient Params::coeff_or(const std::string& key, const Coefficient& fallback) const {
  auto it = coeff.find(key);
  return it == coeff.end() ? fallback : it->second;
}

namespace detail {

double PowerProfile::phi(double s) const {
  return mod ? std::pow(1.0 + s, r / 2.0) : std::pow(s, r / 2.0);
}

double PowerProfile::dphi(double s) const {
  if (mod) return (r / 2.0) * std::pow(1.0 + s, r / 2.0 - 1.0);
  if (s == 0.0) {
    if (r == 2.0) return 1.0;
    return r > 2.0 ? 0.0 : kInf;
  }
  return (r / 2.0) * std::pow(s, r / 2.0 - 1.0);
}

double PowerProfile::ddphi(double s) const {
  const double c = (r / 2.0) * (r / 2.0 - 1.0);
  if (mod) return c * std::pow(1.0 + s, r / 2.0 - 2.0);
  if (c == 0.0) return 0.0;
  if (s == 0.0) {
    if (r == 4.0) return c;
    return r > 4.0 ? 0.0 : kInf;
  }
  return c * std::pow(s, r / 2.0 - 2.0);
}

namespace {

struct LogParts {
  double A, Ap, App;  // amplitude and s-derivatives
  double L, Lp, Lpp;  // log factor and s-derivatives
};

LogParts log_parts(double p, bool mod, double s) {
  LogParts o;
  const double base = mod ? 1.0 + s : s;
  o.A = std::pow(base, p / 2.0);
  o.Ap = (p / 2.0) * std::pow(base, p / 2.0 - 1.0);
  o.App = (p / 2.0) * (p / 2.0 - 1.0) * std::pow(base, p / 2.0 - 2.0);
  const double mu = std::sqrt(base);
  o.L = std::log1p(mu);
  o.Lp = 1.0 / (2.0 * mu * (1.0 + mu));
  o.Lpp = -(1.0 + 2.0 * mu) / (4.0 * mu * mu * mu * sq(1.0 + mu));
  return o;
}

}  // namespace

double LogPowerProfile::phi(double s) const {
  if (!mod && s == 0.0) return 0.0;
  const LogParts g = log_parts(p, mod, s);
  return g.A * std::pow(g.L, alpha);
}

double LogPowerProfile::dphi(double s) const {
  if (!mod && s == 0.0) return 0.0;
  const LogParts g = log_parts(p, mod, s);
  return g.Ap * std::pow(g.L, alpha) + g.A * alpha * std::pow(g.L, alpha - 1.0) * g.Lp;
}

double LogPowerProfile::ddphi(double s) const {
  if (!mod && s == 0.0) return 0.0;
  const LogParts g = log_parts(p, mod, s);
  return g.App * std::pow(g.L, alpha) +
         2.0 * g.Ap * alpha * std::pow(g.L, alpha - 1.0) * g.Lp +
         g.A * alpha * (alpha - 1.0) * std::pow(g.L, alpha - 2.0) * sq(g.Lp) +
         g.A * alpha * std::pow(g.L, alpha - 1.0) * g.Lpp;
}

Vec radial_grad(double dphi, const Vec& xi) {
  Vec g(xi.size(), 0.0);
  for (size_t i = 0; i < xi.size(); ++i) g[i] = 2.0 * dphi * xi[i];
  return g;
}

SymMat radial_hess(int n, double dphi, double ddphi, const Vec& xi) {
  SymMat h(n);
  h.add_identity(2.0 * dphi);
  if (norm_sq(xi) > 0.0) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) += 4.0 * ddphi * xi[i] * xi[j];
  }
  return h;
}

}  // namespace detail

namespace {

using detail::LogPowerProfile;
using detail::PowerProfile;
using detail::radial_grad;
using detail::radial_hess;

// Two coefficient-weighted radial power terms plus an x-only offset; covers
// double-phase, sum-structure and example-iv evaluation.
DensityModel two_term_model(int n, PowerProfile fp, PowerProfile fq,
                            Coefficient cp, Coefficient cq,
                            std::function<double(const Vec&)> offset) {
  DensityModel md;
  md.envelope.n = n;
  md.eval_fn = [=](const Vec& x, const Vec& xi) {
    const double s = norm_sq(xi);
    double v = cp(x) * fp.phi(s) + cq(x) * fq.phi(s);
    if (offset) v += offset(x);
    return v;
  };
  md.grad_fn = [=](const Vec& x, const Vec& xi) {
    const double s = norm_sq(xi);
    return radial_grad(cp(x) * fp.dphi(s) + cq(x) * fq.dphi(s), xi);
  };
  md.hess_fn = [=](const Vec& x, const Vec& xi) {
    const double s = norm_sq(xi);
    return radial_hess(n, cp(x) * fp.dphi(s) + cq(x) * fq.dphi(s),
                       cp(x) * fp.ddphi(s) + cq(x) * fq.ddphi(s), xi);
  };
  return md;
}

}  // namespace

DensityModel make_double_phase(int n, double p, double q, Coefficient a,
                               bool regularized, const Domain& domain) {
  GrowthEnvelope env;
  env.n = n;
  env.p = p;
  env.q = q;
  env.validate();
  require(a.min_on(domain) >= 0.0, "double-phase coefficient a must be nonnegative on the domain");

  auto lmin = regularized ? lam_min_ratio : raw_lam_min_ratio;
  auto lmax = regularized ? lam_max_ratio : raw_lam_max_ratio;
  env.m = lmin(p) + a.min_on(domain) * lmin(q);
  env.M = lmax(p) + a.max_on(domain) * lmax(q);
  env.K = a.lipschitz() * q;
  env.H = a.lipschitz();

  DensityModel md = two_term_model(n, PowerProfile{p, regularized},
                                   PowerProfile{q, regularized},
                                   Coefficient::constant(1.0), a, nullptr);
  md.kind = "double-phase";
  md.envelope = env;
  md.domain = domain;
  md.regularized = regularized;
  md.starred = !regularized && p != 2.0;
  md.params = {{"p", p}, {"q", q}, {"regularized", regularized ? 1.0 : 0.0}};
  md.h5_selector = [a](const Vec& x) { return a(x); };
  return md;
}

DensityModel make_variable_exponent(int n, Coefficient a, Coefficient px,
                                    const Domain& domain) {
  const double pm = px.min_on(domain);
  const double pM = px.max_on(domain);
  require(pm > 1.0, "variable exponent must stay above 1 on the domain");
  require(a.min_on(domain) > 0.0, "variable-exponent coefficient a must be bounded away from 0");

  GrowthEnvelope env;
  env.n = n;
  env.p = pm;
  env.q = pM;
  env.m = a.min_on(domain) * lam_min_ratio(pm);
  env.M = a.max_on(domain) * lam_max_ratio(pM);
  // Exponent variation injects logarithmic factors; the claims absorb them up
  // to the verifier's probe radius.
  const double logS = std::log1p(kClaimRadius * kClaimRadius);
  env.K = a.lipschitz() * pM +
          a.max_on(domain) * px.lipschitz() * (1.0 + 0.5 * pM * logS);
  env.H = a.lipschitz() + a.max_on(domain) * px.lipschitz() * 0.5 * logS;

  DensityModel md;
  md.kind = "variable-exponent";
  md.envelope = env;
  md.domain = domain;
  md.params = {{"p", pm}, {"q", pM}};
  md.eval_fn = [=](const Vec& x, const Vec& xi) {
    return a(x) * PowerProfile{px(x), true}.phi(norm_sq(xi));
  };
  md.grad_fn = [=](const Vec& x, const Vec& xi) {
    return radial_grad(a(x) * PowerProfile{px(x), true}.dphi(norm_sq(xi)), xi);
  };
  md.hess_fn = [=](const Vec& x, const Vec& xi) {
    const PowerProfile pr{px(x), true};
    const double s = norm_sq(xi);
    return radial_hess(n, a(x) * pr.dphi(s), a(x) * pr.ddphi(s), xi);
  };
  md.h5_selector = [px](const Vec& x) { return px(x); };
  return md;
}

DensityModel make_log_power(int n, double p, double alpha, bool regularized,
                            double q_declared) {
  require(p > 1.0, "log-power exponent p must exceed 1");
  require(alpha > 0.0, "log-power exponent alpha must be positive");

  GrowthEnvelope env;
  env.n = n;
  env.p = p;
  // The log factor grows slower than any power; a margin on q keeps the
  // Hessian ratio bounded over the probe range.
  env.q = q_declared > p ? q_declared : p + 0.5;
  env.K = 0.0;
  env.H = 0.0;

  const LogPowerProfile pr{p, alpha, regularized};
  // Eigenvalue ratios are explicit in s; declare m and M from a dense sweep.
  double mmin = kInf, mmax = 0.0;
  const double s_lo = regularized ? 0.0 : 1.0;
  for (int i = 0; i <= 2400; ++i) {
    const double s = s_lo + (i == 0 ? 0.0 : std::pow(10.0, -6.0 + 12.0 * i / 2400.0));
    const double tang = 2.0 * pr.dphi(s);
    const double radial = tang + 4.0 * pr.ddphi(s) * s;
    const double lo = std::min(tang, radial) / std::pow(1.0 + s, (p - 2.0) / 2.0);
    const double hi = std::max(std::abs(tang), std::abs(radial)) /
                      std::pow(1.0 + s, (env.q - 2.0) / 2.0);
    mmin = std::min(mmin, lo);
    mmax = std::max(mmax, hi);
  }
  env.m = mmin * 0.999;
  env.M = mmax * 1.001;

  DensityModel md;
  md.kind = "log-power";
  md.envelope = env;
  md.regularized = regularized;
  md.starred = !regularized;
  md.params = {{"p", p}, {"q", env.q}, {"alpha", alpha},
               {"regularized", regularized ? 1.0 : 0.0}};
  md.eval_fn = [pr](const Vec&, const Vec& xi) { return pr.phi(norm_sq(xi)); };
  md.grad_fn = [pr](const Vec&, const Vec& xi) {
    return radial_grad(pr.dphi(norm_sq(xi)), xi);
  };
  md.hess_fn = [pr, n](const Vec&, const Vec& xi) {
    const double s = norm_sq(xi);
    return radial_hess(n, pr.dphi(s), pr.ddphi(s), xi);
  };
  return md;
}

DensityModel make_sum_structure(int n, double p, double q, Coefficient a1,
                                Coefficient a2, bool regularized, const Domain& domain) {
  GrowthEnvelope env;
  env.n = n;
  env.p = p;
  env.q = q;
  env.validate();
  require(a1.min_on(domain) > 0.0, "sum-structure coefficient a1 must be bounded away from 0");
  require(a2.min_on(domain) >= 0.0, "sum-structure coefficient a2 must be nonnegative");

  auto lmin = regularized ? lam_min_ratio : raw_lam_min_ratio;
  auto lmax = regularized ? lam_max_ratio : raw_lam_max_ratio;
  env.m = a1.min_on(domain) * lmin(p) + a2.min_on(domain) * lmin(q);
  env.M = a1.max_on(domain) * lmax(p) + a2.max_on(domain) * lmax(q);
  env.K = a1.lipschitz() * p + a2.lipschitz() * q;
  env.H = a1.lipschitz() + a2.lipschitz();

  DensityModel md = two_term_model(n, PowerProfile{p, regularized},
                                   PowerProfile{q, regularized}, a1, a2, nullptr);
  md.kind = "sum-structure";
  md.envelope = env;
  md.domain = domain;
  md.regularized = regularized;
  md.starred = !regularized && p != 2.0;
  md.params = {{"p", p}, {"q", q}, {"regularized", regularized ? 1.0 : 0.0}};
  md.h5_selector = [a2](const Vec& x) { return a2(x); };
  return md;
}

DensityModel make_example_iv(double p, double q, std::optional<Domain> domain) {
  require(p >= 2.0, "example-iv requires p >= 2 (raw powers)");
  require(q > p, "example-iv requires q > p");
  const Coefficient a = Coefficient::pospart(1, 0.5);
  const Domain dom = domain.value_or(ball_domain(2, 1.0));
  require(dom.dim() == 2, "example-iv is a planar model");

  GrowthEnvelope env;
  env.n = 2;
  env.p = p;
  env.q = q;
  env.m = p == 2.0 ? 2.0 : raw_lam_min_ratio(p);
  env.M = raw_lam_max_ratio(p) + 0.5 * lam_max_ratio(q);
  env.K = 0.5 * q;
  env.H = 0.5;

  DensityModel md =
      two_term_model(2, PowerProfile{p, false}, PowerProfile{q, false},
                     Coefficient::constant(1.0), a,
                     [a](const Vec& x) { return 1.0 - a(x); });
  md.kind = "example-iv";
  md.envelope = env;
  md.domain = dom;
  md.regularized = false;
  md.starred = p != 2.0;
  md.params = {{"p", p}, {"q", q}};
  md.h5_selector = [a](const Vec& x) { return a(x); };
  return md;
}

DensityModel make_anisotropic(std::vector<double> exponents, bool regularized) {
  const int n = static_cast<int>(exponents.size());
  require(n >= 1, "anisotropic kind needs at least one exponent");
  double pmin = kInf, pmax = 0.0, msum = kInf, Msum = 0.0;
  for (double r : exponents) {
    require(r > 1.0, "anisotropic exponents must exceed 1");
    pmin = std::min(pmin, r);
    pmax = std::max(pmax, r);
    msum = std::min(msum, regularized ? lam_min_ratio(r) : raw_lam_min_ratio(r));
    Msum += regularized ? lam_max_ratio(r) : raw_lam_max_ratio(r);
  }

  GrowthEnvelope env;
  env.n = n;
  env.p = pmin;
  env.q = pmax;
  env.m = msum;
  env.M = Msum;

  std::vector<PowerProfile> profiles;
  for (double r : exponents) profiles.push_back({r, regularized});

  DensityModel md;
  md.kind = "anisotropic";
  md.envelope = env;
  md.regularized = regularized;
  md.starred = !regularized;
  md.params = {{"p", pmin}, {"q", pmax}};
  for (int i = 0; i < n; ++i) md.params["p" + std::to_string(i)] = exponents[i];
  md.eval_fn = [profiles](const Vec&, const Vec& xi) {
    double v = 0.0;
    for (size_t i = 0; i < profiles.size(); ++i) v += profiles[i].phi(sq(xi[i]));
    return v;
  };
  md.grad_fn = [profiles](const Vec&, const Vec& xi) {
    Vec g(xi.size(), 0.0);
    for (size_t i = 0; i < profiles.size(); ++i)
      g[i] = 2.0 * profiles[i].dphi(sq(xi[i])) * xi[i];
    return g;
  };
  md.hess_fn = [profiles, n](const Vec&, const Vec& xi) {
    SymMat h(n);
    for (int i = 0; i < n; ++i) {
      const double s = sq(xi[i]);
      h(i, i) = 2.0 * profiles[i].dphi(s) + 4.0 * profiles[i].ddphi(s) * s;
    }
    return h;
  };
  return md;
}

DensityModel make_custom(std::string name, GrowthEnvelope envelope,
                         std::function<double(const Vec&, const Vec&)> eval,
                         std::function<Vec(const Vec&, const Vec&)> grad,
                         std::function<SymMat(const Vec&, const Vec&)> hess,
                         std::optional<Domain> domain) {
  DensityModel md;
  md.kind = name.empty() ? "custom" : std::move(name);
  md.envelope = envelope;
  md.domain = std::move(domain);
  md.h5_heuristic = true;
  md.eval_fn = std::move(eval);
  md.grad_fn = std::move(grad);
  md.hess_fn = std::move(hess);
  return md;
}

DensityModel instantiate(const std::string& kind, const Params& params) {
  const int n = static_cast<int>(params.get_or("n", 2.0));
  const bool regularized = params.flag_or("regularized", true);
  const Domain dom = box_domain(n, params.get_or("domain_extent", 1.0));

  if (kind == "double-phase") {
    return make_double_phase(n, params.get("p"), params.get("q"),
                             params.coeff_or("a", Coefficient::constant(1.0)),
                             regularized, dom);
  }
  if (kind == "variable-exponent") {
    return make_variable_exponent(n, params.coeff_or("a", Coefficient::constant(1.0)),
                                  params.coeff_at("pfun"), dom);
  }
  if (kind == "log-power") {
    return make_log_power(n, params.get("p"), params.get_or("alpha", 1.0),
                          regularized, params.get_or("q", 0.0));
  }
  if (kind == "sum-structure") {
    return make_sum_structure(n, params.get("p"), params.get("q"),
                              params.coeff_at("a1"), params.coeff_at("a2"),
                              regularized, dom);
  }
  if (kind == "example-iv") {
    std::optional<Domain> d;
    if (params.has("domain_extent")) d = box_domain(2, params.get("domain_extent"));
    return make_example_iv(params.get_or("p", 2.0), params.get_or("q", 4.0), d);
  }
  if (kind == "anisotropic") {
    require(!params.exponents.empty(), "anisotropic kind needs per-direction exponents");
    return make_anisotropic(params.exponents, regularized);
  }
  throw Error("unknown density kind '" + kind + "'");
}

DensityModel normalize_at_zero(const DensityModel& f) {
  DensityModel g = f;
  const auto base = f.eval_fn;
  const int n = f.envelope.n;
  g.eval_fn = [base, n](const Vec& x, const Vec& xi) {
    return base(x, xi) - base(x, Vec(n, 0.0));
  };
  g.zero_normalized = true;
  return g;
}

}  // namespace pqlab
