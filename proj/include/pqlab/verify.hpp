#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pqlab/density.hpp"

namespace pqlab {

/// Discretization of the "for every x, xi" quantifiers: spatial samples in a
/// sub-box of the domain, gradient samples inside a cap, and an optional
/// log-spaced radial ladder probing growth far beyond the cap.
struct SampleGrid {
  std::vector<Vec> x_samples;
  std::vector<Vec> xi_samples;  // |xi| within [xi_min, xi_cap]
  std::vector<Vec> xi_ladder;   // radial probes up to ladder_max
  double xi_cap = 20.0;
  double xi_min = 0.0;
  double ladder_max = 1e3;
  std::uint64_t seed = 0;

  std::vector<Vec> all_xi() const;
  std::string describe() const;
};

struct SampleGridOptions {
  int x_count = 64;
  int xi_count = 96;
  int ladder_count = 24;
  double xi_cap = 20.0;
  double xi_min = 0.0;  // set to 1 for the |xi| >= 1 certification pathway
  double ladder_max = 1e3;
  std::uint64_t seed = 7;
};

SampleGrid make_sample_grid(const Domain& xbox, int n, const SampleGridOptions& opts = {});

/// Largest convexity constant certified on the samples: min over (x, xi) of
/// lambda_min(Hess) / (1+|xi|^2)^((p-2)/2). Throws ConvexityError when a
/// negative eigenvalue shows up.
double estimate_m(const DensityModel& model, const SampleGrid& grid);

/// Smallest Hessian-growth constant observed: max of the spectral-norm ratio
/// against (1+|xi|^2)^((q-2)/2).
double estimate_M(const DensityModel& model, const SampleGrid& grid);

/// Mixed-derivative bound: max Frobenius norm of the central x-difference of
/// grad_xi, divided by (1+|xi|^2)^((q-1)/2).
double estimate_K(const DensityModel& model, const SampleGrid& grid, double dx = 1e-5);

/// x-Lipschitz bound of a zero-normalized density over sampled pairs.
double estimate_H(const DensityModel& model, const SampleGrid& grid, int pair_count);

struct H5Options {
  double xi_cap = 20.0;
  int xi_count = 64;
  int y_radii = 10;
  int y_angles = 24;
  std::uint64_t seed = 11;
  std::vector<Vec> y_override;  // replaces the polar sample cloud when nonempty
};

struct H5Result {
  Vec y_tilde;
  double c_eps = 1.0;
  double skipped_fraction = 0.0;  // ratios dropped for near-zero denominators
};

/// Locality ratio check: picks the witness point minimizing the model's
/// selector over the closed ball (ties broken toward the ball center) and
/// measures c_eps = max f(y_tilde, xi) / f(y, xi) over the sampled ball.
H5Result check_h5(const DensityModel& model, const Vec& x, double eps,
                  const H5Options& opts = {});

/// Exponent gap test q <= p (n+1)/n, with 1e-12 absolute slack on the cross
/// products so rational inputs are decided exactly.
bool check_gap(double p, double q, int n);

struct CoercivityFit {
  double c = 0.0;
  double c_Omega = 0.0;
  bool ok = false;
};

/// Best constants for f(x, xi) >= c |xi|^p - c_Omega on the samples, with
/// c_Omega = max f(x, 0) + H diam(domain).
CoercivityFit check_coercivity(const DensityModel& model, const SampleGrid& grid, double H);

/// Log-log slope of the Hessian-growth estimate against the probe radius.
/// Values above 0.5 flag a declared q smaller than the true growth.
double growth_slope(const DensityModel& model, const SampleGrid& grid);

struct AssumptionReport {
  double m_measured = 0.0;
  double M_measured = 0.0;
  double K_measured = 0.0;
  double H_measured = 0.0;
  bool gap_ok = false;
  bool envelope_mismatch = false;
  CoercivityFit coercivity;
  std::vector<std::pair<double, double>> h5_curve;  // (eps, c_eps)
  bool h5_heuristic = false;
  std::map<std::string, bool> passes;  // per-assumption verdicts vs the declared envelope
  std::string sample_meta;

  bool all_passed() const;
};

struct AuditOptions {
  int pair_count = 200;
  double fd_dx = 1e-5;
  double slack = 0.05;  // acceptance slack on declared constants
  Vec h5_center;        // defaults to the domain center
};

/// Full assumption audit against the declared envelope: measured constants,
/// gap flag, coercivity fit and the locality curve over eps_list.
AssumptionReport audit(const DensityModel& model, const SampleGrid& grid,
                       const std::vector<double>& eps_list, const AuditOptions& opts = {});

}  // namespace pqlab
