#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqlab {

// Dense vectors are small here (spatial dimension <= 3, grid fields excepted),
// so a plain std::vector keeps every interface copyable and thread-safe.
using Vec = std::vector<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised by configuration parsing/validation; maps to CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Raised when a convexity audit meets a negative eigenvalue.
struct ConvexityError : Error {
  using Error::Error;
};

double dot(const Vec& a, const Vec& b);
double norm_sq(const Vec& a);
double norm(const Vec& a);
double dist(const Vec& a, const Vec& b);
Vec scaled(const Vec& a, double s);
bool all_finite(const Vec& a);

// Small dense symmetric matrix (full storage, kept symmetric by symmetrize()).
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  void symmetrize();
  bool finite() const;
  double frobenius() const;

  SymMat& add_scaled(const SymMat& other, double s);
  SymMat& add_identity(double s);
  SymMat& scale(double s);

 private:
  int n_ = 0;
  std::vector<double> a_;
};

// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending order.
// Intended for the tiny matrices of this toolkit (n <= 3 in practice).
Vec jacobi_eigenvalues(SymMat a, int max_sweeps = 64);

double min_eigenvalue(const SymMat& a);
double spectral_norm(const SymMat& a);

// Least-squares slope of y against x.
double fit_slope(const Vec& x, const Vec& y);

}  // namespace pqlab
