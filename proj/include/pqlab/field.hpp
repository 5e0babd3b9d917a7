#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pqlab/density.hpp"
#include "pqlab/linalg.hpp"

namespace pqlab {

/// Uniform tensor grid on an axis-aligned box, N nodes per axis. The outermost
/// node ring is the Dirichlet boundary.
struct Grid {
  Vec lo;
  Vec hi;
  int N = 3;

  int n() const { return static_cast<int>(lo.size()); }
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (N - 1); }
  long node_count() const;
  long cell_count() const;
  double cell_volume() const;

  // Row-major flattening of multi-indices, axis 0 slowest.
  long node_index(const std::vector<int>& idx) const;
  std::vector<int> node_multi(long flat) const;
  Vec node_coord(const std::vector<int>& idx) const;
  bool is_boundary(const std::vector<int>& idx) const;

  long cell_index(const std::vector<int>& idx) const;
  std::vector<int> cell_multi(long flat) const;
  Vec cell_center(const std::vector<int>& idx) const;
};

Grid make_grid(const Domain& box, int N);

/// Nodal scalar field with an immutable Dirichlet ring.
struct DiscreteField {
  Grid grid;
  Vec values;
  std::vector<std::uint8_t> boundary;  // 1 on the Dirichlet ring

  double& at(const std::vector<int>& idx) { return values[grid.node_index(idx)]; }
  double at(const std::vector<int>& idx) const { return values[grid.node_index(idx)]; }
};

DiscreteField make_field(const Grid& grid, const std::function<double(const Vec&)>& fn);
DiscreteField make_boundary_field(const Grid& grid, const std::function<double(const Vec&)>& fn);

/// Cell-centered gradient: per axis, the mean of the 2^(n-1) one-sided corner
/// differences. Exact for affine fields.
Vec cell_gradient(const DiscreteField& u, long cell);

}  // namespace pqlab
