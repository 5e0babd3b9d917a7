#include "pqlab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace pqlab {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(const Vec& a) { return dot(a, a); }

double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

double dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Vec scaled(const Vec& a, double s) {
  Vec out(a);
  for (double& v : out) v *= s;
  return out;
}

bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

void SymMat::symmetrize() {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = v;
      (*this)(j, i) = v;
    }
}

bool SymMat::finite() const {
  for (double v : a_)
    if (!std::isfinite(v)) return false;
  return true;
}

double SymMat::frobenius() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

SymMat& SymMat::add_scaled(const SymMat& other, double s) {
  for (size_t i = 0; i < a_.size(); ++i) a_[i] += s * other.a_[i];
  return *this;
}

SymMat& SymMat::add_identity(double s) {
  for (int i = 0; i < n_; ++i) (*this)(i, i) += s;
  return *this;
}

SymMat& SymMat::scale(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

Vec jacobi_eigenvalues(SymMat a, int max_sweeps) {
  const int n = a.dim();
  if (n == 1) return {a(0, 0)};

  auto off_sq = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return s;
  };

  double scale = a.frobenius();
  if (scale == 0.0) scale = 1.0;
  const double tol = 1e-30 * scale * scale;

  for (int sweep = 0; sweep < max_sweeps && off_sq() > tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  Vec eig(n);
  for (int i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double min_eigenvalue(const SymMat& a) { return jacobi_eigenvalues(a).front(); }

double spectral_norm(const SymMat& a) {
  const Vec eig = jacobi_eigenvalues(a);
  return std::max(std::abs(eig.front()), std::abs(eig.back()));
}

double fit_slope(const Vec& x, const Vec& y) {
  const size_t m = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < m; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

}  // namespace pqlab
