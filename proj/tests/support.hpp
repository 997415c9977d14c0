#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hmnc/element.hpp"
#include "hmnc/geometry.hpp"
#include "hmnc/mesh.hpp"

namespace hmnc::testing {

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Eigen::VectorXd random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = u(rng);
  return v;
}

/// A point strictly inside the cell.
inline BaryPoint random_interior_point(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  BaryPoint l(n + 1);
  for (int i = 0; i <= n; ++i) l[i] = u(rng);
  return l / l.sum();
}

/// Frames for a standalone cell whose vertices carry the global ids 0..n.
inline CellFrames standalone_frames(const SimplexGeometry& cell) {
  std::vector<int> ids(cell.dim() + 1);
  for (int i = 0; i <= cell.dim(); ++i) ids[i] = i;
  return simplex_frames(cell, ids);
}

}  // namespace hmnc::testing
