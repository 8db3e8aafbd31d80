#pragma once

// Reference implementations used only by the tests. They trade speed for
// directness and share no code with the library beyond the matrix types.

#include <oedcs/types.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using oedcs::Index;
using oedcs::IndexList;
using oedcs::MatrixXd;
using oedcs::VectorXd;

inline MatrixXd random_matrix(Index rows, Index cols, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> z;
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = z(gen);
  }
  return m;
}

inline VectorXd svd_values(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues();
}

inline double logdet_spd(const MatrixXd& s) {
  Eigen::JacobiSVD<MatrixXd> svd(s);
  return svd.singularValues().array().log().sum();
}

/// logdet(I + C^T C) from the singular values of C.
inline double phi_of(const MatrixXd& c) {
  const VectorXd s = svd_values(c);
  double t = 0;
  for (Index i = 0; i < s.size(); ++i) t += std::log(1.0 + s(i) * s(i));
  return t;
}

inline MatrixXd columns(const MatrixXd& a, const IndexList& idx) {
  MatrixXd out(a.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = a.col(idx[j]);
  return out;
}

/// Greedy max-residual-norm pivot order, residuals by explicit projection
/// onto the orthogonal complement of the chosen columns.
inline IndexList greedy_pivots(const MatrixXd& m, Index k) {
  IndexList chosen;
  for (Index step = 0; step < k; ++step) {
    MatrixXd proj = MatrixXd::Identity(m.rows(), m.rows());
    if (!chosen.empty()) {
      const MatrixXd c = columns(m, chosen);
      proj -= c * (c.transpose() * c).inverse() * c.transpose();
    }
    Index best = -1;
    double best_norm = -1;
    for (Index j = 0; j < m.cols(); ++j) {
      bool used = false;
      for (Index c : chosen) used = used || c == j;
      if (used) continue;
      const double norm = (proj * m.col(j)).norm();
      if (norm > best_norm) {
        best_norm = norm;
        best = j;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

/// Kahan's matrix: upper triangular with diag s^i and off-diagonal -c s^i.
inline MatrixXd kahan(Index n, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  MatrixXd k = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double si = std::pow(s, static_cast<double>(i));
    k(i, i) = si;
    for (Index j = i + 1; j < n; ++j) k(i, j) = -c * si;
  }
  return k;
}

/// Every k-subset of {0..m-1} in lexicographic order.
inline std::vector<IndexList> subsets(Index m, Index k) {
  std::vector<IndexList> out;
  IndexList cur(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(cur);
    Index i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

/// max over k-subsets of phi_of(A_S), by SVD per subset.
inline double best_phi(const MatrixXd& a, Index k) {
  double best = -1;
  for (const auto& s : subsets(a.cols(), k)) best = std::max(best, phi_of(columns(a, s)));
  return best;
}

/// Random matrix with prescribed singular values (Gaussian QR factors).
inline MatrixXd with_spectrum(Index n, Index m, const VectorXd& sigma, std::uint32_t seed) {
  const Index r = sigma.size();
  Eigen::HouseholderQR<MatrixXd> qu(random_matrix(n, r, seed));
  Eigen::HouseholderQR<MatrixXd> qv(random_matrix(m, r, seed + 7919));
  const MatrixXd u = qu.householderQ() * MatrixXd::Identity(n, r);
  const MatrixXd v = qv.householderQ() * MatrixXd::Identity(m, r);
  return u * sigma.asDiagonal() * v.transpose();
}

}  // namespace oracle
