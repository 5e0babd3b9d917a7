#pragma once

#include <vector>

#include "pqlab/density.hpp"
#include "pqlab/field.hpp"

namespace pqlab {

struct SolveConfig {
  double grad_tol = 1e-8;  // stopping tolerance on the euclidean gradient norm
  int max_iters = 20000;
  double c1 = 1e-4;        // Armijo sufficient-decrease constant, in (0, 1/2)
  double backtrack = 0.5;  // step shrink factor, in (0, 1)
  int restart_every = 50;  // steepest-descent restart period

  void validate() const;
};

struct SolveResult {
  DiscreteField field;
  double energy = 0.0;
  double grad_norm = 0.0;
  int iters = 0;
  bool converged = false;
  std::vector<double> energy_trace;
};

/// Midpoint-quadrature energy: sum over cells of vol * f(center, Du_cell).
/// Exact for affine fields, which is what the 1-D minimizer oracle relies on.
double discrete_energy(const DensityModel& model, const DiscreteField& u);

/// Same quadrature restricted to cells whose centers lie in the closed ball.
double discrete_energy_ball(const DensityModel& model, const DiscreteField& u,
                            const Vec& center, double rho);

/// Partial derivatives of discrete_energy with respect to the nodal values;
/// identically zero on the Dirichlet ring.
Vec discrete_energy_gradient(const DensityModel& model, const DiscreteField& u);

/// Minimizer of the quadratic-density energy in the Dirichlet class of the
/// given boundary values (linear conjugate gradients); the solver's initial
/// guess.
DiscreteField harmonic_extension(const DiscreteField& boundary);

/// Dirichlet minimization by Polak-Ribiere nonlinear CG with Armijo
/// backtracking, started from the harmonic extension of the boundary data.
SolveResult minimize(const DensityModel& model, const DiscreteField& boundary,
                     const SolveConfig& cfg);

/// Same, from an explicit initial field (multi-start uniqueness checks).
SolveResult minimize_from(const DensityModel& model, const DiscreteField& initial,
                          const SolveConfig& cfg);

/// f_k = f + (1/k) (1+|xi|^2)^(q/2): strictly convex with q-growth, decreasing
/// to f pointwise as k grows. Route for raw-power densities that are only
/// strictly convex away from zero.
DensityModel regularize_infinity(const DensityModel& model, double k);

/// Max euclidean cell gradient over cells with centers in the ball of radius
/// rho around the grid center.
double interior_sup_gradient(const DiscreteField& u, double rho);

/// The planar-model constant max_{t in [0,1)} (1 - t^q) / (t^p + M (t^q - 1) + 1),
/// by dense grid search plus golden-section refinement.
double compute_example_iv_K(double p, double q, double M_coef);

}  // namespace pqlab
