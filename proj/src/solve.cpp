#include "pqlab/solve.hpp"

#include <algorithm>
#include <cmath>

namespace pqlab {

namespace {

Vec grid_center(const Grid& g) {
  Vec c(g.n());
  for (int d = 0; d < g.n(); ++d) c[d] = 0.5 * (g.lo[d] + g.hi[d]);
  return c;
}

double quad_energy(const DensityModel& model, const DiscreteField& u,
                   const Vec* ball_center, double rho) {
  const Grid& g = u.grid;
  const double vol = g.cell_volume();
  const long cells = g.cell_count();

  // Fixed-size chunks summed in order keep the reduction bit-stable no matter
  // how the chunk loop is scheduled.
  const long chunk = 1024;
  double total = 0.0;
  for (long c0 = 0; c0 < cells; c0 += chunk) {
    double part = 0.0;
    const long c1 = std::min(cells, c0 + chunk);
    for (long c = c0; c < c1; ++c) {
      const Vec xc = g.cell_center(g.cell_multi(c));
      if (ball_center && dist(xc, *ball_center) > rho) continue;
      part += vol * model.eval(xc, cell_gradient(u, c));
    }
    total += part;
  }
  return total;
}

}  // namespace

void SolveConfig::validate() const {
  if (!(grad_tol > 0.0)) throw Error("solver grad_tol must be positive");
  if (!(c1 > 0.0 && c1 < 0.5)) throw Error("Armijo constant c1 must lie in (0, 1/2)");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw Error("backtracking factor must lie in (0, 1)");
  if (max_iters < 1) throw Error("max_iters must be positive");
}

double discrete_energy(const DensityModel& model, const DiscreteField& u) {
  return quad_energy(model, u, nullptr, 0.0);
}

double discrete_energy_ball(const DensityModel& model, const DiscreteField& u,
                            const Vec& center, double rho) {
  return quad_energy(model, u, &center, rho);
}

Vec discrete_energy_gradient(const DensityModel& model, const DiscreteField& u) {
  const Grid& g = u.grid;
  const int n = g.n();
  const double vol = g.cell_volume();
  const long cells = g.cell_count();
  const int corners = 1 << n;
  const double scale = 1.0 / static_cast<double>(1 << (n - 1));

  // Cache per-cell weighted density gradients, then gather per node so each
  // node sums its adjacent cells in a fixed local order (mirror-symmetric
  // data stays mirror-symmetric to the last bit).
  Vec cell_w(static_cast<size_t>(cells) * n);
  for (long c = 0; c < cells; ++c) {
    const Vec fxi = model.grad_xi(g.cell_center(g.cell_multi(c)), cell_gradient(u, c));
    for (int d = 0; d < n; ++d) cell_w[static_cast<size_t>(c) * n + d] = vol * fxi[d];
  }

  Vec grad(u.values.size(), 0.0);
  const long count = g.node_count();
  std::vector<int> cidx(n);
  for (long i = 0; i < count; ++i) {
    if (u.boundary[i]) continue;
    const auto idx = g.node_multi(i);
    double acc = 0.0;
    // Adjacent cells enumerated by corner code: bit d set means the node is
    // the high corner of the cell along axis d.
    for (int code = 0; code < corners; ++code) {
      bool ok = true;
      for (int d = 0; d < n && ok; ++d) {
        cidx[d] = idx[d] - ((code >> d) & 1);
        ok = cidx[d] >= 0 && cidx[d] <= g.N - 2;
      }
      if (!ok) continue;
      const long c = g.cell_index(cidx);
      double contrib = 0.0;
      for (int d = 0; d < n; ++d) {
        const double sgn = ((code >> d) & 1) ? 1.0 : -1.0;
        contrib += sgn * scale / g.spacing(d) * cell_w[static_cast<size_t>(c) * n + d];
      }
      acc += contrib;
    }
    grad[i] = acc;
  }
  return grad;
}

DiscreteField harmonic_extension(const DiscreteField& boundary) {
  const Grid& g = boundary.grid;
  GrowthEnvelope env;
  env.n = g.n();
  env.p = env.q = 2.0;
  env.m = env.M = 2.0;
  DensityModel quad = make_custom(
      "quadratic", env, [](const Vec&, const Vec& xi) { return norm_sq(xi); },
      [](const Vec&, const Vec& xi) { return scaled(xi, 2.0); },
      [n = g.n()](const Vec&, const Vec&) {
        SymMat h(n);
        h.add_identity(2.0);
        return h;
      });

  // Interior seeded with the boundary mean, then linear CG on the (quadratic,
  // homogeneous) energy gradient.
  DiscreteField u = boundary;
  double mean = 0.0;
  long ring = 0;
  for (size_t i = 0; i < u.values.size(); ++i)
    if (u.boundary[i]) {
      mean += u.values[i];
      ++ring;
    }
  mean /= std::max<long>(ring, 1);
  for (size_t i = 0; i < u.values.size(); ++i)
    if (!u.boundary[i]) u.values[i] = mean;

  Vec r = discrete_energy_gradient(quad, u);
  for (double& v : r) v = -v;
  Vec d = r;
  double rr = norm_sq(r);
  const double tol = std::max(1e-28, 1e-26 * rr);

  DiscreteField ad_field = u;  // scratch field holding the direction
  const int max_iters = 4 * static_cast<int>(u.values.size());
  for (int it = 0; it < max_iters && rr > tol; ++it) {
    ad_field.values = d;
    for (size_t i = 0; i < ad_field.values.size(); ++i)
      if (ad_field.boundary[i]) ad_field.values[i] = 0.0;
    const Vec Ad = discrete_energy_gradient(quad, ad_field);
    const double dAd = dot(d, Ad);
    if (dAd <= 0.0) break;
    const double alpha = rr / dAd;
    for (size_t i = 0; i < u.values.size(); ++i) u.values[i] += alpha * d[i];
    for (size_t i = 0; i < r.size(); ++i) r[i] -= alpha * Ad[i];
    const double rr_new = norm_sq(r);
    const double beta = rr_new / rr;
    for (size_t i = 0; i < d.size(); ++i) d[i] = r[i] + beta * d[i];
    rr = rr_new;
  }
  return u;
}

SolveResult minimize_from(const DensityModel& model, const DiscreteField& initial,
                          const SolveConfig& cfg) {
  cfg.validate();
  SolveResult res;
  res.field = initial;
  DiscreteField& u = res.field;

  double energy = discrete_energy(model, u);
  res.energy_trace.push_back(energy);
  Vec grad = discrete_energy_gradient(model, u);
  Vec dir = scaled(grad, -1.0);
  Vec grad_old = grad;
  double alpha_prev = 1.0;

  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    res.grad_norm = norm(grad);
    if (res.grad_norm <= cfg.grad_tol) {
      res.converged = true;
      break;
    }

    double slope = dot(grad, dir);
    if (slope >= 0.0) {  // not a descent direction: restart on steepest descent
      dir = scaled(grad, -1.0);
      slope = dot(grad, dir);
    }

    // Backtracking line search with a warm-started trial step.
    double alpha = std::min(alpha_prev / cfg.backtrack, 1e6);
    double energy_new = 0.0;
    bool accepted = false;
    DiscreteField trial = u;
    for (int ls = 0; ls < 80; ++ls) {
      for (size_t i = 0; i < u.values.size(); ++i)
        trial.values[i] = u.values[i] + alpha * dir[i];
      energy_new = discrete_energy(model, trial);
      if (std::isfinite(energy_new) && energy_new <= energy + cfg.c1 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= cfg.backtrack;
    }
    if (!accepted)
      throw Error("line search failed (non-convex density or inconsistent gradients?)");

    u.values = trial.values;
    alpha_prev = alpha;
    if (energy_new > energy)
      throw Error("energy increased along an accepted step");
    energy = energy_new;
    res.energy_trace.push_back(energy);

    grad_old = grad;
    grad = discrete_energy_gradient(model, u);

    if ((it + 1) % cfg.restart_every == 0) {
      dir = scaled(grad, -1.0);
    } else {
      double num = 0.0;
      for (size_t i = 0; i < grad.size(); ++i) num += grad[i] * (grad[i] - grad_old[i]);
      const double beta = std::max(0.0, num / std::max(norm_sq(grad_old), 1e-300));
      for (size_t i = 0; i < dir.size(); ++i) dir[i] = -grad[i] + beta * dir[i];
    }
  }

  res.energy = energy;
  res.grad_norm = norm(grad);
  res.iters = it;
  if (!res.converged) res.converged = res.grad_norm <= cfg.grad_tol;
  return res;
}

SolveResult minimize(const DensityModel& model, const DiscreteField& boundary,
                     const SolveConfig& cfg) {
  return minimize_from(model, harmonic_extension(boundary), cfg);
}

DensityModel regularize_infinity(const DensityModel& model, double k) {
  if (!(k >= 1.0)) throw Error("regularization index k must be >= 1");
  const double q = model.envelope.q;
  const int n = model.envelope.n;
  const detail::PowerProfile penalty{q, true};
  const double w = 1.0 / k;

  DensityModel out = model;
  out.kind = model.kind + "+q-penalty";
  out.params["penalty_k"] = k;
  out.starred = false;
  out.zero_normalized = false;
  // The penalty is q-uniformly convex everywhere, so strict convexity holds
  // globally no matter how degenerate the base is near zero.
  out.envelope.m = model.envelope.m + w * q;
  out.envelope.M = model.envelope.M + w * q * std::max(1.0, q - 1.0);

  const auto base_eval = model.eval_fn;
  const auto base_grad = model.grad_fn;
  const auto base_hess = model.hess_fn;
  out.eval_fn = [=](const Vec& x, const Vec& xi) {
    return base_eval(x, xi) + w * penalty.phi(norm_sq(xi));
  };
  out.grad_fn = [=](const Vec& x, const Vec& xi) {
    Vec g = base_grad(x, xi);
    const double dphi = penalty.dphi(norm_sq(xi));
    for (int d = 0; d < n; ++d) g[d] += w * 2.0 * dphi * xi[d];
    return g;
  };
  out.hess_fn = [=](const Vec& x, const Vec& xi) {
    SymMat h = base_hess(x, xi);
    const double s = norm_sq(xi);
    h.add_scaled(detail::radial_hess(n, penalty.dphi(s), penalty.ddphi(s), xi), w);
    return h;
  };
  return out;
}

double interior_sup_gradient(const DiscreteField& u, double rho) {
  const Grid& g = u.grid;
  const Vec center = grid_center(g);
  double max_spacing = 0.0;
  for (int d = 0; d < g.n(); ++d) max_spacing = std::max(max_spacing, g.spacing(d));
  const double half_width = 0.5 * (g.hi[0] - g.lo[0]);
  if (rho > half_width - 2.0 * max_spacing)
    throw Error("ball radius leaves fewer than two interior cells to the grid edge");

  double best = 0.0;
  const long cells = g.cell_count();
  for (long c = 0; c < cells; ++c) {
    if (dist(g.cell_center(g.cell_multi(c)), center) > rho) continue;
    best = std::max(best, norm(cell_gradient(u, c)));
  }
  return best;
}

double compute_example_iv_K(double p, double q, double M_coef) {
  if (!(p > 1.0 && q > 1.0)) throw Error("exponents must exceed 1");

  auto den = [&](double t) {
    return std::pow(t, p) + M_coef * (std::pow(t, q) - 1.0) + 1.0;
  };
  auto ratio = [&](double t) { return (1.0 - std::pow(t, q)) / den(t); };

  const int N = 4096;
  double best_t = 0.0, best = -1.0;
  for (int i = 0; i < N; ++i) {
    const double t = static_cast<double>(i) / N;
    if (den(t) <= 0.0)
      throw Error("nonpositive denominator at t=" + std::to_string(t));
    const double v = ratio(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }

  // Golden-section refinement inside the bracketing grid interval.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::max(0.0, best_t - 1.0 / N);
  double b = std::min(1.0 - 1e-12, best_t + 1.0 / N);
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = ratio(x1), f2 = ratio(x2);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = ratio(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = ratio(x2);
    }
  }
  return std::max({best, f1, f2});
}

}  // namespace pqlab
