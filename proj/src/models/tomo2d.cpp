#include <oedcs/errors.hpp>
#include <oedcs/models.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oedcs {

namespace {

bool on_boundary(Point p) {
  constexpr double tol = 1e-12;
  const bool inside = p.x >= -tol && p.x <= 1 + tol && p.y >= -tol && p.y <= 1 + tol;
  const double gap = std::min({p.x, 1 - p.x, p.y, 1 - p.y});
  return inside && std::abs(gap) <= tol;
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Index dual_cell(double coord, double h, Index n_side) {
  const auto i = static_cast<Index>(std::lround(coord / h));
  return std::clamp<Index>(i, 0, n_side - 1);
}

}  // namespace

std::vector<Point> boundary_receivers(Index count) {
  if (count < 1) throw DimensionError("boundary_receivers: count must be >= 1");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * 2.0 / static_cast<double>(count);
    out.push_back(t <= 1.0 ? Point{0.0, t} : Point{t - 1.0, 1.0});
  }
  return out;
}

std::vector<std::pair<Index, double>> ray_lengths(const Grid2D& grid, Point a, Point b) {
  const double len = distance(a, b);
  if (!(len > 0.0)) throw DomainError("ray_lengths: degenerate ray (coincident endpoints)");
  const double h = grid.spacing();
  const Index n = grid.n_side;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  // Parameters where the segment crosses dual-cell faces at (i + 1/2) h.
  std::vector<double> alphas{0.0, 1.0};
  for (Index i = 0; i + 1 < n; ++i) {
    const double face = (static_cast<double>(i) + 0.5) * h;
    if (dx != 0.0) {
      const double t = (face - a.x) / dx;
      if (t > 0.0 && t < 1.0) alphas.push_back(t);
    }
    if (dy != 0.0) {
      const double t = (face - a.y) / dy;
      if (t > 0.0 && t < 1.0) alphas.push_back(t);
    }
  }
  std::sort(alphas.begin(), alphas.end());
  std::map<Index, double> acc;
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
    const double seg = (alphas[i + 1] - alphas[i]) * len;
    if (seg <= 0.0) continue;
    const double mid = 0.5 * (alphas[i] + alphas[i + 1]);
    const Index cx = dual_cell(a.x + mid * dx, h, n);
    const Index cy = dual_cell(a.y + mid * dy, h, n);
    acc[grid.node(cx, cy)] += seg;
  }
  return {acc.begin(), acc.end()};
}

SparseMatrixXd tomo_kernel(const Grid2D& grid, Point source, const std::vector<Point>& receivers,
                           double zone_width) {
  if (!(zone_width >= 0.0)) throw DomainError("tomo_kernel: zone_width must be >= 0");
  if (receivers.empty()) throw DimensionError("tomo_kernel: no receivers");
  if (!(source.x >= 0 && source.x <= 1 && source.y >= 0 && source.y <= 1)) {
    throw DomainError("tomo_kernel: source outside the domain");
  }
  for (std::size_t j = 0; j < receivers.size(); ++j) {
    if (!on_boundary(receivers[j])) {
      throw DomainError("tomo_kernel: receiver " + std::to_string(j) + " is not on the boundary");
    }
    for (std::size_t i = 0; i < j; ++i) {
      if (distance(receivers[i], receivers[j]) == 0.0) {
        throw DomainError("tomo_kernel: receivers " + std::to_string(i) + " and " +
                          std::to_string(j) + " coincide");
      }
    }
  }

  const double h = grid.spacing();
  const VectorXd area = trapezoid_weights(grid) * h * h;
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t j = 0; j < receivers.size(); ++j) {
    const Point r = receivers[j];
    const auto row = static_cast<Index>(j);
    const double focal = distance(source, r);
    bool any = false;
    if (zone_width > 0.0) {
      const double semi_major = std::sqrt(zone_width * zone_width + 0.25 * focal * focal);
      for (Index node = 0; node < grid.size(); ++node) {
        const Point p = grid.coordinates(node);
        if (distance(p, source) + distance(p, r) <= 2.0 * semi_major * (1.0 + 1e-12)) {
          entries.emplace_back(row, node, area(node));
          any = true;
        }
      }
    }
    if (!any) {
      if (!(focal > 0.0)) {
        throw DomainError("tomo_kernel: empty zone for receiver " + std::to_string(j) +
                          " (degenerate geometry)");
      }
      for (const auto& [node, len] : ray_lengths(grid, source, r)) entries.emplace_back(row, node, len);
    }
  }
  SparseMatrixXd kernel(static_cast<Index>(receivers.size()), grid.size());
  kernel.setFromTriplets(entries.begin(), entries.end());
  return kernel;
}

LinearOperator<double> build_tomo2d(const Grid2D& grid, Point source,
                                    const std::vector<Point>& receivers, double zone_width) {
  return make_sparse_operator(tomo_kernel(grid, source, receivers, zone_width));
}

}  // namespace oedcs
