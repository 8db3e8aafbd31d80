#pragma once

#include <oedcs/errors.hpp>
#include <oedcs/types.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>

namespace oedcs {

/// All randomness comes from mt19937_64 engines seeded through splitmix64.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent seed for substream `stream` of `seed` (e.g. one per sketch column).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

template <typename Scalar>
Vector<Scalar> gaussian_vector(Index n, std::uint64_t seed, Scalar stddev = Scalar(1)) {
  Engine engine = make_engine(seed);
  std::normal_distribution<Scalar> normal(Scalar(0), stddev);
  Vector<Scalar> v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(engine);
  return v;
}

/// i.i.d. N(0, variance) entries. Column j is drawn from its own substream, so
/// the matrix does not depend on the order in which columns are generated.
template <typename Scalar = double>
Matrix<Scalar> gaussian_matrix(Index rows, Index cols, Scalar variance, std::uint64_t seed) {
  if (!(variance > Scalar(0))) throw DomainError("gaussian_matrix: variance must be positive");
  const Scalar stddev = std::sqrt(variance);
  Matrix<Scalar> m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    m.col(j) = gaussian_vector<Scalar>(rows, substream_seed(seed, static_cast<std::uint64_t>(j)),
                                       stddev);
  }
  return m;
}

/// Uniform k-subset of {0, ..., m-1}, sorted ascending.
inline IndexList uniform_subset(Index m, Index k, std::uint64_t seed) {
  if (k < 0 || k > m) throw DimensionError("uniform_subset: requires 0 <= k <= m");
  IndexList all(static_cast<std::size_t>(m));
  std::iota(all.begin(), all.end(), Index{0});
  Engine engine = make_engine(seed);
  // Partial Fisher-Yates.
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, m - 1);
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(engine))]);
  }
  all.resize(static_cast<std::size_t>(k));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace oedcs
