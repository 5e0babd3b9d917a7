#include "pqlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace pqlab {

namespace {

Vec random_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec d(n);
  double len = 0.0;
  do {
    for (int i = 0; i < n; ++i) d[i] = gauss(rng);
    len = norm(d);
  } while (len < 1e-12);
  for (double& v : d) v /= len;
  return d;
}

Vec sample_in(const Domain& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = dom.dim();
  Vec x(n);
  while (true) {
    for (int i = 0; i < n; ++i) x[i] = dom.center[i] + dom.extent * unif(rng);
    if (dom.shape == Domain::Shape::Box || dom.contains(x)) return x;
  }
}

double modulus_pow(double s, double expo) { return std::pow(1.0 + s, expo); }

}  // namespace

std::vector<Vec> SampleGrid::all_xi() const {
  std::vector<Vec> xs = xi_samples;
  xs.insert(xs.end(), xi_ladder.begin(), xi_ladder.end());
  return xs;
}

std::string SampleGrid::describe() const {
  std::ostringstream os;
  os << x_samples.size() << " x-samples, " << xi_samples.size()
     << " xi-samples (|xi| in [" << xi_min << ", " << xi_cap << "]), "
     << xi_ladder.size() << " ladder probes up to " << ladder_max << ", seed "
     << seed;
  return os.str();
}

SampleGrid make_sample_grid(const Domain& xbox, int n, const SampleGridOptions& opts) {
  if (opts.x_count < 1 || opts.xi_count < 1)
    throw Error("sample grid needs at least one x and one xi sample");

  SampleGrid g;
  g.xi_cap = opts.xi_cap;
  g.xi_min = opts.xi_min;
  g.ladder_max = opts.ladder_max;
  g.seed = opts.seed;

  std::mt19937_64 rng(opts.seed);
  for (int i = 0; i < opts.x_count; ++i) g.x_samples.push_back(sample_in(xbox, rng));

  // Deterministic anchors first: the origin (when admissible) and the axis
  // directions at a few radii, then random directions with random radii.
  if (opts.xi_min <= 0.0) g.xi_samples.push_back(Vec(n, 0.0));
  for (double r : {std::max(opts.xi_min, 1.0), 0.5 * opts.xi_cap, opts.xi_cap}) {
    if (r < opts.xi_min || r > opts.xi_cap) continue;
    for (int d = 0; d < n; ++d) {
      Vec e(n, 0.0);
      e[d] = r;
      g.xi_samples.push_back(e);
    }
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (static_cast<int>(g.xi_samples.size()) < opts.xi_count) {
    const Vec dir = random_direction(rng, n);
    const double r = opts.xi_min + (opts.xi_cap - opts.xi_min) * unif(rng);
    g.xi_samples.push_back(scaled(dir, r));
  }

  if (opts.ladder_count > 0 && opts.ladder_max > opts.xi_cap) {
    const double lo = std::log(std::max(opts.xi_cap, 1.0));
    const double hi = std::log(opts.ladder_max);
    for (int i = 0; i < opts.ladder_count; ++i) {
      const double r = std::exp(lo + (hi - lo) * (i + 1) / opts.ladder_count);
      g.xi_ladder.push_back(scaled(random_direction(rng, n), r));
    }
  }
  return g;
}

double estimate_m(const DensityModel& model, const SampleGrid& grid) {
  const double p = model.envelope.p;
  double best = std::numeric_limits<double>::infinity();
  const auto xis = grid.all_xi();
  for (const Vec& x : grid.x_samples) {
    for (const Vec& xi : xis) {
      SymMat h = model.hess_xi(x, xi);
      if (!h.finite()) throw Error("non-finite Hessian entries in estimate_m");
      h.symmetrize();
      const double lam = min_eigenvalue(h);
      const double ratio = lam / modulus_pow(norm_sq(xi), (p - 2.0) / 2.0);
      if (ratio < -1e-10 * (1.0 + std::abs(lam)))
        throw ConvexityError("convexity violation: negative Hessian eigenvalue " +
                             std::to_string(lam));
      best = std::min(best, ratio);
    }
  }
  return best;
}

double estimate_M(const DensityModel& model, const SampleGrid& grid) {
  const double q = model.envelope.q;
  double best = 0.0;
  const auto xis = grid.all_xi();
  for (const Vec& x : grid.x_samples) {
    for (const Vec& xi : xis) {
      SymMat h = model.hess_xi(x, xi);
      if (!h.finite()) throw Error("non-finite Hessian entries in estimate_M");
      h.symmetrize();
      best = std::max(best, spectral_norm(h) / modulus_pow(norm_sq(xi), (q - 2.0) / 2.0));
    }
  }
  return best;
}

double estimate_K(const DensityModel& model, const SampleGrid& grid, double dx) {
  const int n = model.envelope.n;
  const double q = model.envelope.q;
  double best = 0.0;
  const auto xis = grid.all_xi();
  for (const Vec& x : grid.x_samples) {
    for (int j = 0; j < n; ++j) {
      Vec xp = x, xm = x;
      xp[j] += dx;
      xm[j] -= dx;
      if (!model.in_domain(xp) || !model.in_domain(xm))
        throw Error("sample too close to the domain boundary for the x-difference stencil");
    }
    for (const Vec& xi : xis) {
      double frob_sq = 0.0;
      for (int j = 0; j < n; ++j) {
        Vec xp = x, xm = x;
        xp[j] += dx;
        xm[j] -= dx;
        const Vec gp = model.grad_xi(xp, xi);
        const Vec gm = model.grad_xi(xm, xi);
        for (int i = 0; i < n; ++i) {
          const double d = (gp[i] - gm[i]) / (2.0 * dx);
          frob_sq += d * d;
        }
      }
      best = std::max(best, std::sqrt(frob_sq) /
                                modulus_pow(norm_sq(xi), (q - 1.0) / 2.0));
    }
  }
  return best;
}

double estimate_H(const DensityModel& model, const SampleGrid& grid, int pair_count) {
  const int n = model.envelope.n;
  const double q = model.envelope.q;
  {
    const Vec zero(n, 0.0);
    const Vec& x0 = grid.x_samples.front();
    const double f0 = model.eval(x0, zero);
    if (std::abs(f0) > 1e-10)
      throw Error("estimate_H requires a zero-normalized density (f(x,0) != 0)");
  }

  std::mt19937_64 rng(grid.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<size_t> pick(0, grid.x_samples.size() - 1);
  const auto xis = grid.all_xi();

  double best = 0.0;
  for (int k = 0; k < pair_count; ++k) {
    const Vec& x = grid.x_samples[pick(rng)];
    const Vec& y = grid.x_samples[pick(rng)];
    const double d = dist(x, y);
    if (d < 1e-8) continue;
    for (const Vec& xi : xis) {
      const double num = std::abs(model.eval(x, xi) - model.eval(y, xi));
      best = std::max(best, num / (d * modulus_pow(norm_sq(xi), q / 2.0)));
    }
  }
  return best;
}

namespace {

// Deterministic point cloud on the closed ball of radius eps around x.
std::vector<Vec> ball_cloud(const Vec& x, double eps, int radii, int angles,
                            std::uint64_t seed) {
  const int n = static_cast<int>(x.size());
  std::vector<Vec> pts;
  pts.push_back(x);
  std::mt19937_64 rng(seed);
  for (int i = 1; i <= radii; ++i) {
    const double r = eps * i / radii;
    if (n == 1) {
      pts.push_back({x[0] + r});
      pts.push_back({x[0] - r});
    } else if (n == 2) {
      for (int k = 0; k < angles; ++k) {
        const double th = 2.0 * M_PI * k / angles;
        pts.push_back({x[0] + r * std::cos(th), x[1] + r * std::sin(th)});
      }
    } else {
      for (int k = 0; k < angles; ++k) {
        Vec p = x;
        const Vec dir = random_direction(rng, n);
        for (int d = 0; d < n; ++d) p[d] += r * dir[d];
        pts.push_back(p);
      }
    }
  }
  return pts;
}

std::vector<Vec> h5_xi_set(int n, const H5Options& opts) {
  std::vector<Vec> xis;
  xis.push_back(Vec(n, 0.0));
  for (double r : {0.5, 1.0, 2.0, 0.5 * opts.xi_cap, opts.xi_cap}) {
    for (int d = 0; d < n; ++d) {
      Vec e(n, 0.0);
      e[d] = r;
      xis.push_back(e);
      e[d] = -r;
      xis.push_back(e);
    }
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (static_cast<int>(xis.size()) < opts.xi_count)
    xis.push_back(scaled(random_direction(rng, n), opts.xi_cap * unif(rng)));
  return xis;
}

}  // namespace

H5Result check_h5(const DensityModel& model, const Vec& x, double eps,
                  const H5Options& opts) {
  if (model.domain && model.domain->dist_to_boundary(x) <= eps)
    throw Error("ball of radius " + std::to_string(eps) +
                " is not compactly contained in the domain");

  const int n = model.envelope.n;
  std::vector<Vec> cloud = opts.y_override.empty()
                               ? ball_cloud(x, eps, opts.y_radii, opts.y_angles, opts.seed)
                               : opts.y_override;

  // The witness selector: per-kind coefficient/exponent field, or a probe-set
  // energy total for custom kinds, or identically zero (autonomous: ties
  // collapse to the ball center).
  std::function<double(const Vec&)> selector = model.h5_selector;
  if (!selector && model.h5_heuristic) {
    std::vector<Vec> probes = h5_xi_set(n, opts);
    probes.resize(std::min<size_t>(probes.size(), 12));
    selector = [&model, probes](const Vec& y) {
      double total = 0.0;
      for (const Vec& xi : probes) total += model.eval(y, xi);
      return total;
    };
  }
  if (!selector) selector = [](const Vec&) { return 0.0; };

  Vec y_tilde = x;
  double best_val = selector(x);
  double best_dist = 0.0;
  for (const Vec& y : cloud) {
    const double v = selector(y);
    const double d = dist(y, x);
    const double tol = 1e-12 * (1.0 + std::abs(best_val));
    if (v < best_val - tol || (v < best_val + tol && d < best_dist - 1e-15)) {
      best_val = v;
      best_dist = d;
      y_tilde = y;
    }
  }

  const std::vector<Vec> xis = h5_xi_set(n, opts);
  double c_eps = 0.0;
  long skipped = 0, total = 0;
  std::vector<Vec> ys = cloud;
  ys.push_back(y_tilde);
  for (const Vec& y : ys) {
    for (const Vec& xi : xis) {
      ++total;
      const double den = model.eval(y, xi);
      if (den < 1e-12) {
        ++skipped;
        continue;
      }
      c_eps = std::max(c_eps, model.eval(y_tilde, xi) / den);
    }
  }

  H5Result res;
  res.y_tilde = y_tilde;
  res.c_eps = c_eps;
  res.skipped_fraction = total > 0 ? static_cast<double>(skipped) / total : 1.0;
  if (res.skipped_fraction > 0.01)
    throw Error("locality ratio test unreliable: " +
                std::to_string(100.0 * res.skipped_fraction) +
                "% of denominators were near zero");
  return res;
}

bool check_gap(double p, double q, int n) {
  if (!(p > 1.0) || !(q >= p) || n < 1) throw Error("invalid exponents for the gap test");
  return q * n <= p * (n + 1) + 1e-12 * std::max(1.0, p * (n + 1));
}

CoercivityFit check_coercivity(const DensityModel& model, const SampleGrid& grid, double H) {
  const int n = model.envelope.n;
  const double p = model.envelope.p;
  const Vec zero(n, 0.0);

  double f0_max = 0.0;
  for (const Vec& x : grid.x_samples) f0_max = std::max(f0_max, model.eval(x, zero));
  const double diam = model.domain ? model.domain->diameter() : 0.0;

  CoercivityFit fit;
  fit.c_Omega = f0_max + H * diam;
  double c = std::numeric_limits<double>::infinity();
  const auto xis = grid.all_xi();
  for (const Vec& x : grid.x_samples) {
    for (const Vec& xi : xis) {
      const double s = norm_sq(xi);
      if (s == 0.0) continue;
      c = std::min(c, (model.eval(x, xi) + fit.c_Omega) / std::pow(s, p / 2.0));
    }
  }
  fit.c = c;
  fit.ok = std::isfinite(c) && c > 0.0;
  return fit;
}

double growth_slope(const DensityModel& model, const SampleGrid& grid) {
  if (grid.xi_ladder.empty()) return 0.0;
  const double q = model.envelope.q;

  std::vector<std::pair<double, double>> probes;  // (radius, ratio)
  for (const Vec& xi : grid.xi_ladder) {
    double worst = 0.0;
    for (const Vec& x : grid.x_samples) {
      SymMat h = model.hess_xi(x, xi);
      h.symmetrize();
      worst = std::max(worst, spectral_norm(h) /
                                  modulus_pow(norm_sq(xi), (q - 2.0) / 2.0));
    }
    probes.emplace_back(norm(xi), worst);
  }
  std::sort(probes.begin(), probes.end());

  Vec lx, ly;
  double running = 0.0;
  for (const auto& [r, ratio] : probes) {
    running = std::max(running, ratio);
    if (running <= 0.0) continue;
    lx.push_back(std::log(r));
    ly.push_back(std::log(running));
  }
  if (lx.size() < 2) return 0.0;
  return fit_slope(lx, ly);
}

bool AssumptionReport::all_passed() const {
  for (const auto& [key, ok] : passes)
    if (!ok) return false;
  return true;
}

AssumptionReport audit(const DensityModel& model, const SampleGrid& grid,
                       const std::vector<double>& eps_list, const AuditOptions& opts) {
  AssumptionReport rep;
  const GrowthEnvelope& env = model.envelope;

  rep.m_measured = estimate_m(model, grid);
  rep.M_measured = estimate_M(model, grid);
  rep.K_measured = estimate_K(model, grid, opts.fd_dx);
  rep.H_measured = estimate_H(normalize_at_zero(model), grid, opts.pair_count);
  rep.gap_ok = check_gap(env.p, env.q, env.n);
  rep.envelope_mismatch = growth_slope(model, grid) > 0.5;
  rep.coercivity = check_coercivity(model, grid, rep.H_measured);
  rep.h5_heuristic = model.h5_heuristic;
  rep.sample_meta = grid.describe();

  Vec center = opts.h5_center;
  if (center.empty())
    center = model.domain ? model.domain->center : Vec(env.n, 0.0);
  H5Options h5opts;
  h5opts.xi_cap = grid.xi_cap;
  for (double eps : eps_list)
    rep.h5_curve.emplace_back(eps, check_h5(model, center, eps, h5opts).c_eps);

  const double up = 1.0 + opts.slack;
  const double down = 1.0 - opts.slack;
  const double abs_tol = 1e-8;  // difference-stencil noise floor
  rep.passes["convexity_m"] = env.m <= 0.0 || rep.m_measured >= env.m * down;
  rep.passes["hessian_M"] = rep.M_measured <= env.M * up + abs_tol;
  rep.passes["mixed_K"] = rep.K_measured <= env.K * up + abs_tol;
  rep.passes["lipschitz_H"] = rep.H_measured <= env.H * up + abs_tol;
  rep.passes["gap"] = rep.gap_ok;
  rep.passes["growth"] = !rep.envelope_mismatch;
  rep.passes["coercivity"] = rep.coercivity.ok;
  return rep;
}

}  // namespace pqlab
