#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "pqlab/density.hpp"
#include "pqlab/field.hpp"

namespace pqlab {

/// Tensor-product smooth cutoff: psi(x) = prod_j chi(x_j) with
/// chi(t) = step((3-|t|)/2) built on the exp(-1/t) smooth step. Identically 1
/// on [-1,1]^n, supported in (-3,3)^n, infinitely smooth.
struct CutoffPsi {
  int n = 1;
  double operator()(const Vec& y) const;
  double chi(double t) const;
  double chi_prime(double t) const;
  /// Measured sup of |chi'| (dense 1-D maximization, cached at construction).
  double dpsi_sup() const { return dpsi_sup_; }

  friend CutoffPsi build_cutoff(int n);

 private:
  double dpsi_sup_ = 0.0;
};

CutoffPsi build_cutoff(int n);

/// Lattice of closed cubes with side 2/h centered on (2/h) Z^n, restricted to
/// a box neighborhood of the ball B_R. Construction enforces the scale rule
/// 12 sqrt(n) / h < dist(B_R, boundary of the domain).
struct CubeCover {
  int n = 1;
  int h = 1;
  Vec region_center;          // center of the covered box
  double region_halfwidth = 0.0;

  double side() const { return 2.0 / h; }
  bool covers(const Vec& x) const;
  Vec center_of(const std::vector<long>& idx) const;
  /// All lattice centers whose cutoff translate can be active inside the
  /// covered region (diagnostics; evaluation enumerates locally instead).
  std::vector<Vec> centers() const;
};

CubeCover build_cover(const Domain& omega, const Vec& ball_center, double R, int h,
                      double pad = 0.0);

/// Frozen-coefficient approximant f_h(x, xi) = sum_i phi_i(x) f(c_i, xi):
/// partition-of-unity weights from translated cutoffs, coefficients frozen at
/// the cube centers.
class Approximant {
 public:
  Approximant(std::shared_ptr<const DensityModel> model, CubeCover cover, CutoffPsi psi);

  /// Active (center index, weight) pairs at x. Weights are positive, sum to 1,
  /// and at most 3^n of them are nonzero.
  std::vector<std::pair<std::vector<long>, double>> partition_weights(const Vec& x) const;

  double eval(const Vec& x, const Vec& xi) const;
  Vec grad_xi(const Vec& x, const Vec& xi) const;
  SymMat hess_xi(const Vec& x, const Vec& xi) const;

  /// View of the approximant as a density model (same envelope as the base),
  /// so solvers and estimators apply unchanged.
  DensityModel as_model() const;

  const CubeCover& cover() const { return cover_; }
  const CutoffPsi& psi() const { return psi_; }
  const DensityModel& base() const { return *model_; }

 private:
  double sigma(const Vec& x, std::vector<std::pair<std::vector<long>, double>>& raw) const;

  std::shared_ptr<const DensityModel> model_;
  CubeCover cover_;
  CutoffPsi psi_;
};

Approximant build_approximant(const DensityModel& model, const Domain& omega,
                              const Vec& ball_center, double R, int h, double pad = 0.0);

/// Max over samples of |D_x phi_j| / (h ||D_x psi||_inf); bounded by 3^n + 1.
double dphi_bound_check(const Approximant& fh, int sample_count, std::uint64_t seed);

/// Sup of |f_h - f| over a deterministic sample of B_R x {|xi| <= M}.
double sup_error(const Approximant& fh, const Vec& ball_center, double R, double M,
                 int x_per_axis = 64, int xi_count = 40, std::uint64_t seed = 5);

/// Radial bump exp(-1/(1-|y|^2)) scaled to radius eps, with the continuum
/// normalization constant fixed by deterministic tensor-grid quadrature.
struct Mollifier {
  double eps = 1.0;
  int n = 1;
  double normalization = 1.0;  // integral of the unscaled profile

  static double profile(double r_sq);  // unscaled bump, supported in r < 1
  double value(const Vec& y) const;    // Phi_eps(y)
};

Mollifier make_mollifier(double eps, int n, int quad_points = 64);

/// Discrete convolution with the normalized mollifier stencil. Nodes whose
/// stencil leaves the grid keep their original values; eps must cover at
/// least two grid spacings.
DiscreteField mollify(const DiscreteField& u, double eps);

struct DiagonalStep {
  int k = 0;
  int h = 0;
  double gap = 0.0;        // |E_fh(u_eps) - E_f(u_eps)| on B_R
  double energy_fh = 0.0;
  double energy_f = 0.0;
};

struct DiagonalResult {
  std::vector<DiagonalStep> steps;
  double energy_u = 0.0;        // E_f(u) on B_R, the reference energy
  double final_residual = 0.0;  // |E_fh_K(u_eps_K) - E_f(u)|
};

/// Scale selection: for each k picks the smallest admissible h_k > h_{k-1}
/// whose energy gap on the mollified field drops below 2^-k.
DiagonalResult diagonal_select(const DensityModel& model, const Domain& omega,
                               const Vec& ball_center, double R, const DiscreteField& u,
                               const std::vector<double>& eps_seq, int h_max);

}  // namespace pqlab
