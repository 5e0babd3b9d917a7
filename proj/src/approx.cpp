#include "pqlab/approx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "pqlab/solve.hpp"

namespace pqlab {

namespace {

double sigma_exp(double u) { return u <= 0.0 ? 0.0 : std::exp(-1.0 / u); }

Vec unit_direction(std::mt19937_64& rng, int n) {
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

// C-infinity step: 0 for u <= 0, 1 for u >= 1, strictly increasing between.
double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = sigma_exp(u);
  const double b = sigma_exp(1.0 - u);
  return a / (a + b);
}

double smooth_step_prime(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = sigma_exp(u);
  const double b = sigma_exp(1.0 - u);
  const double ap = a / (u * u);
  const double bp = -b / ((1.0 - u) * (1.0 - u));
  return (ap * b - a * bp) / ((a + b) * (a + b));
}

}  // namespace

double CutoffPsi::chi(double t) const { return smooth_step((3.0 - std::abs(t)) / 2.0); }

double CutoffPsi::chi_prime(double t) const {
  const double sign = t >= 0.0 ? 1.0 : -1.0;
  return smooth_step_prime((3.0 - std::abs(t)) / 2.0) * (-sign / 2.0);
}

double CutoffPsi::operator()(const Vec& y) const {
  double v = 1.0;
  for (double t : y) v *= chi(t);
  return v;
}

CutoffPsi build_cutoff(int n) {
  if (n < 1) throw Error("cutoff dimension must be >= 1");
  CutoffPsi psi;
  psi.n = n;
  // chi' vanishes outside the transition band 1 < |t| < 3.
  double best = 0.0;
  for (int i = 0; i <= 50000; ++i) {
    const double t = 1.0 + 2.0 * i / 50000.0;
    best = std::max(best, std::abs(psi.chi_prime(t)));
  }
  psi.dpsi_sup_ = best;
  return psi;
}

bool CubeCover::covers(const Vec& x) const {
  for (int d = 0; d < n; ++d)
    if (std::abs(x[d] - region_center[d]) > region_halfwidth) return false;
  return true;
}

Vec CubeCover::center_of(const std::vector<long>& idx) const {
  Vec c(n);
  for (int d = 0; d < n; ++d) c[d] = side() * static_cast<double>(idx[d]);
  return c;
}

std::vector<Vec> CubeCover::centers() const {
  std::vector<Vec> out;
  std::vector<long> lo(n), hi(n), idx(n);
  for (int d = 0; d < n; ++d) {
    const double reach = region_halfwidth + 3.0 * side();
    lo[d] = static_cast<long>(std::ceil((region_center[d] - reach) / side()));
    hi[d] = static_cast<long>(std::floor((region_center[d] + reach) / side()));
    idx[d] = lo[d];
  }
  while (true) {
    out.push_back(center_of(idx));
    int d = n - 1;
    while (d >= 0 && ++idx[d] > hi[d]) {
      idx[d] = lo[d];
      --d;
    }
    if (d < 0) break;
  }
  return out;
}

CubeCover build_cover(const Domain& omega, const Vec& ball_center, double R, int h,
                      double pad) {
  const int n = omega.dim();
  if (static_cast<int>(ball_center.size()) != n)
    throw Error("ball center dimension mismatch");
  if (h < 1) throw Error("cover scale h must be a positive integer");

  const double d = omega.dist_to_boundary(ball_center) - R;
  if (d <= 0.0) throw Error("ball B_R is not compactly contained in the domain");
  const double need = 12.0 * std::sqrt(static_cast<double>(n)) / h;
  if (need >= d)
    throw Error("inadmissible scale h=" + std::to_string(h) + ": 12 sqrt(n)/h = " +
                std::to_string(need) + " must stay below dist(B_R, boundary) = " +
                std::to_string(d));

  CubeCover cover;
  cover.n = n;
  cover.h = h;
  cover.region_center = ball_center;
  cover.region_halfwidth = R + pad + 3.0 / h;
  return cover;
}

Approximant::Approximant(std::shared_ptr<const DensityModel> model, CubeCover cover,
                         CutoffPsi psi)
    : model_(std::move(model)), cover_(std::move(cover)), psi_(std::move(psi)) {
  if (psi_.n != cover_.n || model_->envelope.n != cover_.n)
    throw Error("approximant dimension mismatch");
}

double Approximant::sigma(const Vec& x,
                          std::vector<std::pair<std::vector<long>, double>>& raw) const {
  const int n = cover_.n;
  const int h = cover_.h;

  // Per axis, at most three lattice translates of chi are nonzero at x.
  std::vector<std::vector<std::pair<long, double>>> axis(n);
  for (int d = 0; d < n; ++d) {
    const double t0 = h * x[d];
    const long k_lo = static_cast<long>(std::ceil((t0 - 3.0) / 2.0));
    const long k_hi = static_cast<long>(std::floor((t0 + 3.0) / 2.0));
    for (long k = k_lo; k <= k_hi; ++k) {
      const double w = psi_.chi(t0 - 2.0 * static_cast<double>(k));
      if (w > 0.0) axis[d].emplace_back(k, w);
    }
  }

  raw.clear();
  std::vector<size_t> pick(n, 0);
  double total = 0.0;
  while (true) {
    std::vector<long> idx(n);
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      idx[d] = axis[d][pick[d]].first;
      w *= axis[d][pick[d]].second;
    }
    if (w > 0.0) {
      raw.emplace_back(std::move(idx), w);
      total += w;
    }
    int d = n - 1;
    while (d >= 0 && ++pick[d] >= axis[d].size()) pick[d--] = 0;
    if (d < 0) break;
  }
  return total;
}

std::vector<std::pair<std::vector<long>, double>> Approximant::partition_weights(
    const Vec& x) const {
  if (!cover_.covers(x)) throw Error("point outside the covered region");
  std::vector<std::pair<std::vector<long>, double>> raw;
  const double total = sigma(x, raw);
  if (total < 1.0 - 1e-9)
    throw Error("partition normalizer dropped below 1 (sigma = " + std::to_string(total) + ")");
  for (auto& [idx, w] : raw) w /= total;
  return raw;
}

double Approximant::eval(const Vec& x, const Vec& xi) const {
  double v = 0.0;
  for (const auto& [idx, w] : partition_weights(x))
    v += w * model_->eval(cover_.center_of(idx), xi);
  return v;
}

Vec Approximant::grad_xi(const Vec& x, const Vec& xi) const {
  Vec g(cover_.n, 0.0);
  for (const auto& [idx, w] : partition_weights(x)) {
    const Vec gi = model_->grad_xi(cover_.center_of(idx), xi);
    for (int d = 0; d < cover_.n; ++d) g[d] += w * gi[d];
  }
  return g;
}

SymMat Approximant::hess_xi(const Vec& x, const Vec& xi) const {
  SymMat h(cover_.n);
  for (const auto& [idx, w] : partition_weights(x))
    h.add_scaled(model_->hess_xi(cover_.center_of(idx), xi), w);
  return h;
}

DensityModel Approximant::as_model() const {
  DensityModel md;
  md.kind = "frozen-" + model_->kind;
  md.params = model_->params;
  md.params["h"] = static_cast<double>(cover_.h);
  md.envelope = model_->envelope;
  md.regularized = model_->regularized;
  md.zero_normalized = model_->zero_normalized;
  md.starred = model_->starred;
  Domain region = box_domain(cover_.n, cover_.region_halfwidth);
  region.center = cover_.region_center;
  md.domain = region;

  const Approximant self = *this;
  md.eval_fn = [self](const Vec& x, const Vec& xi) { return self.eval(x, xi); };
  md.grad_fn = [self](const Vec& x, const Vec& xi) { return self.grad_xi(x, xi); };
  md.hess_fn = [self](const Vec& x, const Vec& xi) { return self.hess_xi(x, xi); };
  return md;
}

Approximant build_approximant(const DensityModel& model, const Domain& omega,
                              const Vec& ball_center, double R, int h, double pad) {
  auto shared = std::make_shared<DensityModel>(model);
  return Approximant(shared, build_cover(omega, ball_center, R, h, pad),
                     build_cutoff(model.envelope.n));
}

double dphi_bound_check(const Approximant& fh, int sample_count, std::uint64_t seed) {
  const CubeCover& cover = fh.cover();
  const int n = cover.n;
  const double delta = 1e-6;
  const double denom = cover.h * fh.psi().dpsi_sup();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  auto weights_at = [&](const Vec& x) {
    std::map<std::vector<long>, double> table;
    for (const auto& [idx, w] : fh.partition_weights(x)) table[idx] = w;
    return table;
  };

  double worst = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    Vec x(n);
    for (int d = 0; d < n; ++d)
      x[d] = cover.region_center[d] + (cover.region_halfwidth - 2.0 * delta) * unif(rng);

    const auto here = weights_at(x);
    std::vector<std::map<std::vector<long>, double>> plus(n), minus(n);
    for (int d = 0; d < n; ++d) {
      Vec xp = x, xm = x;
      xp[d] += delta;
      xm[d] -= delta;
      plus[d] = weights_at(xp);
      minus[d] = weights_at(xm);
    }

    for (const auto& [idx, w] : here) {
      (void)w;
      double grad_sq = 0.0;
      for (int d = 0; d < n; ++d) {
        auto get = [&](const std::map<std::vector<long>, double>& t) {
          auto it = t.find(idx);
          return it == t.end() ? 0.0 : it->second;
        };
        const double g = (get(plus[d]) - get(minus[d])) / (2.0 * delta);
        grad_sq += g * g;
      }
      worst = std::max(worst, std::sqrt(grad_sq) / denom);
    }
  }
  return worst;
}

double sup_error(const Approximant& fh, const Vec& ball_center, double R, double M,
                 int x_per_axis, int xi_count, std::uint64_t seed) {
  const DensityModel& f = fh.base();
  const int n = fh.cover().n;

  std::vector<Vec> xis;
  for (int d = 0; d < n; ++d) {
    Vec e(n, 0.0);
    e[d] = M;
    xis.push_back(e);
  }
  xis.push_back(Vec(n, 0.0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (static_cast<int>(xis.size()) < xi_count)
    xis.push_back(scaled(unit_direction(rng, n), M * std::sqrt(unif(rng))));

  double worst = 0.0;
  std::vector<int> idx(n, 0);
  while (true) {
    Vec x(n);
    for (int d = 0; d < n; ++d)
      x[d] = ball_center[d] + R * (2.0 * idx[d] / (x_per_axis - 1.0) - 1.0);
    if (dist(x, ball_center) <= R) {
      for (const Vec& xi : xis)
        worst = std::max(worst, std::abs(fh.eval(x, xi) - f.eval(x, xi)));
    }
    int d = n - 1;
    while (d >= 0 && ++idx[d] >= x_per_axis) idx[d--] = 0;
    if (d < 0) break;
  }
  return worst;
}

double Mollifier::profile(double r_sq) {
  return r_sq < 1.0 ? std::exp(-1.0 / (1.0 - r_sq)) : 0.0;
}

double Mollifier::value(const Vec& y) const {
  double r_sq = 0.0;
  for (double v : y) r_sq += (v / eps) * (v / eps);
  return profile(r_sq) / (normalization * std::pow(eps, n));
}

Mollifier make_mollifier(double eps, int n, int quad_points) {
  if (eps <= 0.0) throw Error("mollifier radius must be positive");
  Mollifier m;
  m.eps = eps;
  m.n = n;

  // Midpoint quadrature of the unscaled bump over [-1,1]^n.
  const double hq = 2.0 / quad_points;
  double total = 0.0;
  std::vector<int> idx(n, 0);
  while (true) {
    double r_sq = 0.0;
    for (int d = 0; d < n; ++d) {
      const double t = -1.0 + (idx[d] + 0.5) * hq;
      r_sq += t * t;
    }
    total += Mollifier::profile(r_sq);
    int d = n - 1;
    while (d >= 0 && ++idx[d] >= quad_points) idx[d--] = 0;
    if (d < 0) break;
  }
  m.normalization = total * std::pow(hq, n);
  return m;
}

DiscreteField mollify(const DiscreteField& u, double eps) {
  const Grid& g = u.grid;
  const int n = g.n();
  double max_spacing = 0.0;
  for (int d = 0; d < n; ++d) max_spacing = std::max(max_spacing, g.spacing(d));
  if (eps < 2.0 * max_spacing)
    throw Error("mollifier radius must cover at least two grid spacings");

  // Stencil of lattice offsets inside the support ball, weights normalized to
  // unit sum so constants pass through unchanged.
  std::vector<int> reach(n);
  for (int d = 0; d < n; ++d) {
    reach[d] = static_cast<int>(std::floor(eps / g.spacing(d)));
    if (2 * reach[d] + 1 > g.N)
      throw Error("grid too small for the requested mollifier radius");
  }

  std::vector<std::pair<std::vector<int>, double>> stencil;
  double wsum = 0.0;
  std::vector<int> off(n);
  for (int d = 0; d < n; ++d) off[d] = -reach[d];
  while (true) {
    double r_sq = 0.0;
    for (int d = 0; d < n; ++d) {
      const double t = off[d] * g.spacing(d) / eps;
      r_sq += t * t;
    }
    const double w = Mollifier::profile(r_sq);
    if (w > 0.0) {
      stencil.emplace_back(off, w);
      wsum += w;
    }
    int d = n - 1;
    while (d >= 0 && ++off[d] > reach[d]) off[d--] = -reach[d];
    if (d < 0) break;
  }
  for (auto& [o, w] : stencil) w /= wsum;

  DiscreteField out = u;
  const long count = g.node_count();
  for (long i = 0; i < count; ++i) {
    const auto idx = g.node_multi(i);
    bool fits = true;
    for (int d = 0; d < n && fits; ++d)
      fits = idx[d] >= reach[d] && idx[d] + reach[d] <= g.N - 1;
    if (!fits) continue;  // margin nodes keep their original values

    double v = 0.0;
    std::vector<int> nb(n);
    for (const auto& [o, w] : stencil) {
      for (int d = 0; d < n; ++d) nb[d] = idx[d] + o[d];
      v += w * u.values[g.node_index(nb)];
    }
    out.values[i] = v;
  }
  return out;
}

DiagonalResult diagonal_select(const DensityModel& model, const Domain& omega,
                               const Vec& ball_center, double R, const DiscreteField& u,
                               const std::vector<double>& eps_seq, int h_max) {
  const GrowthEnvelope& env = model.envelope;
  if (!check_gap(env.p, env.q, env.n))
    throw Error("diagonal selection requires the exponent gap condition");
  for (size_t k = 1; k < eps_seq.size(); ++k)
    if (!(eps_seq[k] < eps_seq[k - 1]) || eps_seq[k] <= 0.0)
      throw Error("eps sequence must be strictly decreasing and positive");

  DiagonalResult res;
  res.energy_u = discrete_energy_ball(model, u, ball_center, R);
  if (!std::isfinite(res.energy_u))
    throw Error("reference energy is not finite on B_R");

  const double d = omega.dist_to_boundary(ball_center) - R;
  const int h_min =
      static_cast<int>(std::floor(12.0 * std::sqrt(static_cast<double>(env.n)) / d)) + 1;

  int h_prev = h_min - 1;
  double last_energy_fh = 0.0;
  for (size_t k = 1; k <= eps_seq.size(); ++k) {
    const DiscreteField u_eps = mollify(u, eps_seq[k - 1]);
    const double energy_f = discrete_energy_ball(model, u_eps, ball_center, R);
    const double tol = std::pow(2.0, -static_cast<double>(k));

    bool found = false;
    double achieved = std::numeric_limits<double>::infinity();
    for (int h = h_prev + 1; h <= h_max; ++h) {
      const Approximant fh = build_approximant(model, omega, ball_center, R, h);
      const double energy_fh =
          discrete_energy_ball(fh.as_model(), u_eps, ball_center, R);
      const double gap = std::abs(energy_fh - energy_f);
      achieved = std::min(achieved, gap);
      if (gap < tol) {
        res.steps.push_back({static_cast<int>(k), h, gap, energy_fh, energy_f});
        h_prev = h;
        last_energy_fh = energy_fh;
        found = true;
        break;
      }
    }
    if (!found)
      throw Error("no admissible scale h <= " + std::to_string(h_max) +
                  " reached the tolerance at step k=" + std::to_string(k) +
                  " (best gap " + std::to_string(achieved) + ")");
  }
  res.final_residual = std::abs(last_energy_fh - res.energy_u);
  return res;
}

}  // namespace pqlab
