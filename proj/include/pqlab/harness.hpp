#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pqlab/density.hpp"
#include "pqlab/solve.hpp"

namespace pqlab {

/// Flat key = value experiment description. One experiment per file; ladders
/// (grid sizes, cover scales, mollifier radii) are lists inside the file.
struct ExperimentConfig {
  std::string experiment = "exp";
  std::uint64_t seed = 7;
  bool parallel = false;
  std::string out = "report.csv";

  // model.*
  std::string kind;
  int n = 2;
  double p = 2.0;
  double q = 2.0;
  double alpha = 1.0;
  bool regularized = true;
  std::map<std::string, Coefficient> coeffs;  // a, a1, a2, pfun
  std::vector<double> pis;                    // anisotropic exponents

  // domain.*
  double extent = 1.0;
  double R = 0.5;
  double rho = 0.25;

  // grid.* / approx.* / diag.*
  std::vector<int> grid_sizes = {17, 33};
  std::vector<int> h_list;
  std::vector<double> eps_list = {0.2, 0.1, 0.05};
  double sup_M = 2.0;
  std::vector<double> diag_eps;
  int diag_kmax = 0;
  int diag_hmax = 200;

  // verify.*
  double xi_cap = 20.0;
  double xi_min = 0.0;
  int x_count = 48;
  int xi_count = 64;
  int ladder = 16;
  int pair_count = 200;

  // solve.* / solver.* / regularize.*
  std::string boundary = "sinx1";
  SolveConfig solver;
  std::vector<double> reg_k;
};

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

DensityModel model_from_config(const ExperimentConfig& cfg);

struct ReportRow {
  std::string experiment;
  std::string stage;  // audit | approx | solve | regularity | error
  std::string key;
  std::string value;
  std::string notes;

  bool operator==(const ReportRow&) const = default;
};

/// Runs the enabled stages; failures become stage=error rows and independent
/// stages keep going. Deterministic for a fixed config and seed.
std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg,
                                      const std::set<std::string>& stages);

void emit_csv(const std::vector<ReportRow>& rows, const std::string& path);
std::vector<ReportRow> parse_csv(const std::string& path);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace pqlab
