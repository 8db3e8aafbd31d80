#pragma once

#include <oedcs/completion.hpp>
#include <oedcs/linear_operator.hpp>
#include <oedcs/rsvd.hpp>
#include <oedcs/types.hpp>

#include <Eigen/SparseCore>

#include <cstdint>
#include <functional>
#include <vector>

namespace oedcs {

using SparseMatrixXd = Eigen::SparseMatrix<double>;

struct Point {
  double x = 0;
  double y = 0;
};

/// Uniform node grid on [0,1]^2. Node (ix, iy) sits at (ix h, iy h) and has
/// linear index iy * n_side + ix.
struct Grid2D {
  Index n_side = 33;

  explicit Grid2D(Index n_side = 33);
  Index size() const { return n_side * n_side; }
  double spacing() const { return 1.0 / static_cast<double>(n_side - 1); }
  Index node(Index ix, Index iy) const { return iy * n_side + ix; }
  Point coordinates(Index node) const;
  Index nearest_node(Point p) const;
  /// Node values of f(x, y).
  VectorXd sample(const std::function<double(double, double)>& f) const;
};

/// 5-point Laplacian with homogeneous Neumann conditions by ghost-node
/// reflection (the boundary-normal neighbour enters with weight 2).
SparseMatrixXd neumann_laplacian(const Grid2D& grid);

/// Trapezoid (lumped) node weights: 1 inside, 1/2 on edges, 1/4 at corners.
/// W L is symmetric for the Laplacian above.
VectorXd trapezoid_weights(const Grid2D& grid);

struct SensorLayout {
  std::vector<Point> locations;
  IndexList nodes;

  Index size() const { return static_cast<Index>(nodes.size()); }
};

/// per_side x per_side interior lattice at ((i+1)/(per_side+1), (j+1)/(per_side+1)),
/// snapped to the nearest grid node.
SensorLayout sensor_lattice(const Grid2D& grid, Index per_side = 10);

/// Initial condition -> sensor readings at time T after `steps` implicit Euler steps
/// of u_t = Laplace(u) with homogeneous Neumann conditions.
LinearOperator<double> build_heat2d(const Grid2D& grid, const SensorLayout& layout, double final_time,
                                    Index steps);

/// `count` receivers uniformly spaced along the left edge (bottom to top) and
/// then the top edge (left to right), at arc parameter (i + 1/2) * 2 / count.
std::vector<Point> boundary_receivers(Index count);

/// Row j integrates the node field over the ellipse with foci (source,
/// receivers[j]) and minor semi-axis zone_width, using node dual-cell areas.
/// Rows whose ellipse contains no node, and all rows when zone_width = 0,
/// fall back to straight-ray lengths through the dual cells.
SparseMatrixXd tomo_kernel(const Grid2D& grid, Point source, const std::vector<Point>& receivers,
                           double zone_width);

/// Lengths of the segment a-b inside each node dual cell (Siddon traversal).
std::vector<std::pair<Index, double>> ray_lengths(const Grid2D& grid, Point a, Point b);

LinearOperator<double> build_tomo2d(const Grid2D& grid, Point source,
                                    const std::vector<Point>& receivers, double zone_width);

/// Default Fresnel zone width: 5% of the domain diameter.
inline double default_zone_width() { return 0.05 * 1.4142135623730951; }

struct SyntheticModel {
  LinearOperator<double> op;
  MatrixXd matrix;
  SvdFactors<double> factors;  // exact, with residual_sigma
};

/// A = U diag(spectrum) V^T (n x m) with seeded random orthonormal U, V.
SyntheticModel build_synthetic(Index n, Index m, const VectorXd& spectrum, std::uint64_t seed);

/// Gamma_pr = (alpha K M^{-1} K)^{-1} with K = M (kappa2 I - L) and M the lumped
/// mass (trapezoid weights times h^2).
struct Prior {
  LinearOperator<double> factor;  // G = alpha^{-1/2} K^{-1} M^{1/2}, G G^T = Gamma_pr
  std::function<VectorXd(const VectorXd&)> precision;
  SparseMatrixXd stiffness;
  VectorXd mass;
  double kappa2 = 80;
  double alpha = 0.1;

  MatrixXd covariance() const;
  MatrixXd precision_matrix() const;
};

Prior build_prior(const Grid2D& grid, double kappa2 = 80.0, double alpha = 0.1);

struct SyntheticData {
  VectorXd data;
  VectorXd clean;
  double eta = 0;
};

/// clean = F truth, eta = noise_pct ||clean|| / sqrt(m), data = clean + eta z.
SyntheticData generate_data(const LinearOperator<double>& forward, const VectorXd& truth,
                            double noise_pct, std::uint64_t seed);

/// Franke's test function on [0,1]^2.
double franke(double x, double y);

/// Smooth two-blob attenuation field.
double phantom(double x, double y);

}  // namespace oedcs
