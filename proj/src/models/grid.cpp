#include <oedcs/errors.hpp>
#include <oedcs/models.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace oedcs {

Grid2D::Grid2D(Index n) : n_side(n) {
  if (n_side < 2) throw DimensionError("Grid2D: n_side must be >= 2");
}

Point Grid2D::coordinates(Index node) const {
  const double h = spacing();
  return {static_cast<double>(node % n_side) * h, static_cast<double>(node / n_side) * h};
}

Index Grid2D::nearest_node(Point p) const {
  if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
    throw DomainError("Grid2D: point outside [0,1]^2");
  }
  const double h = spacing();
  const auto ix = static_cast<Index>(std::lround(p.x / h));
  const auto iy = static_cast<Index>(std::lround(p.y / h));
  return node(ix, iy);
}

VectorXd Grid2D::sample(const std::function<double(double, double)>& f) const {
  VectorXd v(size());
  for (Index i = 0; i < size(); ++i) {
    const Point p = coordinates(i);
    v(i) = f(p.x, p.y);
  }
  return v;
}

SparseMatrixXd neumann_laplacian(const Grid2D& grid) {
  const Index n = grid.n_side;
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(5 * grid.size()));
  // Along one axis: interior i has neighbours i-1, i+1; a boundary node's
  // ghost neighbour mirrors its interior neighbour.
  auto add_axis = [&](Index row, Index i, auto neighbour) {
    entries.emplace_back(row, row, -2.0 * inv_h2);
    if (i == 0) {
      entries.emplace_back(row, neighbour(1), 2.0 * inv_h2);
    } else if (i == n - 1) {
      entries.emplace_back(row, neighbour(n - 2), 2.0 * inv_h2);
    } else {
      entries.emplace_back(row, neighbour(i - 1), inv_h2);
      entries.emplace_back(row, neighbour(i + 1), inv_h2);
    }
  };
  for (Index iy = 0; iy < n; ++iy) {
    for (Index ix = 0; ix < n; ++ix) {
      const Index row = grid.node(ix, iy);
      add_axis(row, ix, [&](Index j) { return grid.node(j, iy); });
      add_axis(row, iy, [&](Index j) { return grid.node(ix, j); });
    }
  }
  SparseMatrixXd lap(grid.size(), grid.size());
  lap.setFromTriplets(entries.begin(), entries.end());
  return lap;
}

VectorXd trapezoid_weights(const Grid2D& grid) {
  const Index n = grid.n_side;
  VectorXd w(grid.size());
  for (Index iy = 0; iy < n; ++iy) {
    for (Index ix = 0; ix < n; ++ix) {
      const double wx = (ix == 0 || ix == n - 1) ? 0.5 : 1.0;
      const double wy = (iy == 0 || iy == n - 1) ? 0.5 : 1.0;
      w(grid.node(ix, iy)) = wx * wy;
    }
  }
  return w;
}

SensorLayout sensor_lattice(const Grid2D& grid, Index per_side) {
  if (per_side < 1) throw DimensionError("sensor_lattice: per_side must be >= 1");
  SensorLayout layout;
  const double step = 1.0 / static_cast<double>(per_side + 1);
  for (Index j = 0; j < per_side; ++j) {
    for (Index i = 0; i < per_side; ++i) {
      const Point p{static_cast<double>(i + 1) * step, static_cast<double>(j + 1) * step};
      layout.locations.push_back(p);
      layout.nodes.push_back(grid.nearest_node(p));
    }
  }
  std::vector<Index> sorted = layout.nodes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DimensionError("sensor_lattice: grid too coarse, sensors share a node");
  }
  return layout;
}

double franke(double x, double y) {
  const double a = 9.0 * x;
  const double b = 9.0 * y;
  return 0.75 * std::exp(-((a - 2) * (a - 2) + (b - 2) * (b - 2)) / 4.0) +
         0.75 * std::exp(-((a + 1) * (a + 1)) / 49.0 - (b + 1) / 10.0) +
         0.5 * std::exp(-((a - 7) * (a - 7) + (b - 3) * (b - 3)) / 4.0) -
         0.2 * std::exp(-(a - 4) * (a - 4) - (b - 7) * (b - 7));
}

double phantom(double x, double y) {
  return std::exp(-((x - 0.35) * (x - 0.35) + (y - 0.6) * (y - 0.6)) / 0.02) +
         0.6 * std::exp(-((x - 0.7) * (x - 0.7) + (y - 0.3) * (y - 0.3)) / 0.01);
}

}  // namespace oedcs
