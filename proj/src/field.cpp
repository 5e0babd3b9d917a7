#include "pqlab/field.hpp"

#include <cmath>

namespace pqlab {

long Grid::node_count() const {
  long c = 1;
  for (int d = 0; d < n(); ++d) c *= N;
  return c;
}

long Grid::cell_count() const {
  long c = 1;
  for (int d = 0; d < n(); ++d) c *= (N - 1);
  return c;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < n(); ++d) v *= spacing(d);
  return v;
}

long Grid::node_index(const std::vector<int>& idx) const {
  long flat = 0;
  for (int d = 0; d < n(); ++d) flat = flat * N + idx[d];
  return flat;
}

std::vector<int> Grid::node_multi(long flat) const {
  std::vector<int> idx(n());
  for (int d = n() - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % N);
    flat /= N;
  }
  return idx;
}

Vec Grid::node_coord(const std::vector<int>& idx) const {
  Vec x(n());
  for (int d = 0; d < n(); ++d) x[d] = lo[d] + idx[d] * spacing(d);
  return x;
}

bool Grid::is_boundary(const std::vector<int>& idx) const {
  for (int d = 0; d < n(); ++d)
    if (idx[d] == 0 || idx[d] == N - 1) return true;
  return false;
}

long Grid::cell_index(const std::vector<int>& idx) const {
  long flat = 0;
  for (int d = 0; d < n(); ++d) flat = flat * (N - 1) + idx[d];
  return flat;
}

std::vector<int> Grid::cell_multi(long flat) const {
  std::vector<int> idx(n());
  for (int d = n() - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % (N - 1));
    flat /= (N - 1);
  }
  return idx;
}

Vec Grid::cell_center(const std::vector<int>& idx) const {
  Vec x(n());
  for (int d = 0; d < n(); ++d) x[d] = lo[d] + (idx[d] + 0.5) * spacing(d);
  return x;
}

Grid make_grid(const Domain& box, int N) {
  if (N < 3) throw Error("grid needs at least 3 nodes per axis");
  Grid g;
  g.N = N;
  g.lo.resize(box.dim());
  g.hi.resize(box.dim());
  for (int d = 0; d < box.dim(); ++d) {
    g.lo[d] = box.center[d] - box.extent;
    g.hi[d] = box.center[d] + box.extent;
  }
  return g;
}

DiscreteField make_field(const Grid& grid, const std::function<double(const Vec&)>& fn) {
  DiscreteField u;
  u.grid = grid;
  const long count = grid.node_count();
  u.values.resize(count);
  u.boundary.resize(count);
  for (long i = 0; i < count; ++i) {
    const auto idx = grid.node_multi(i);
    u.values[i] = fn(grid.node_coord(idx));
    u.boundary[i] = grid.is_boundary(idx) ? 1 : 0;
  }
  return u;
}

DiscreteField make_boundary_field(const Grid& grid, const std::function<double(const Vec&)>& fn) {
  return make_field(grid, [&](const Vec& x) { return fn(x); });
}

Vec cell_gradient(const DiscreteField& u, long cell) {
  const Grid& g = u.grid;
  const int n = g.n();
  const auto cidx = g.cell_multi(cell);
  const int corners = 1 << n;
  const double scale = 1.0 / static_cast<double>(1 << (n - 1));

  Vec du(n, 0.0);
  std::vector<int> nidx(n);
  for (int c = 0; c < corners; ++c) {
    for (int d = 0; d < n; ++d) nidx[d] = cidx[d] + ((c >> d) & 1);
    const double v = u.values[g.node_index(nidx)];
    for (int d = 0; d < n; ++d) du[d] += ((c >> d) & 1) ? v : -v;
  }
  for (int d = 0; d < n; ++d) du[d] *= scale / g.spacing(d);
  return du;
}

}  // namespace pqlab
