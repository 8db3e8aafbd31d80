#pragma once

#include <Eigen/Dense>

#include <vector>

namespace oedcs {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

using IndexList = std::vector<Index>;

// Columns of `m` listed in `columns`, in that order.
template <typename Derived>
Matrix<typename Derived::Scalar> select_columns(const Eigen::MatrixBase<Derived>& m,
                                                const IndexList& columns) {
  Matrix<typename Derived::Scalar> out(m.rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) out.col(static_cast<Index>(j)) = m.col(columns[j]);
  return out;
}

template <typename Derived>
Vector<typename Derived::Scalar> select_entries(const Eigen::MatrixBase<Derived>& v,
                                                const IndexList& entries) {
  Vector<typename Derived::Scalar> out(static_cast<Index>(entries.size()));
  for (std::size_t j = 0; j < entries.size(); ++j) out(static_cast<Index>(j)) = v(entries[j]);
  return out;
}

}  // namespace oedcs
