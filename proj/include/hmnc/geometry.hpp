#pragma once

#include <span>
#include <vector>

#include "hmnc/types.hpp"

namespace hmnc {

/// Affine n-simplex (n = 1..3) given by its n+1 vertices.
class SimplexGeometry {
 public:
  /// Throws std::invalid_argument when the vertices are degenerate.
  explicit SimplexGeometry(std::span<const Vec> vertices);

  int dim() const { return dim_; }
  const Vec& vertex(int i) const { return vertices_[i]; }
  double volume() const { return volume_; }
  /// Signed volume in the given vertex order.
  double signed_volume() const { return signed_volume_; }
  double diameter() const;

  /// Row i is the (constant) gradient of lambda_i.
  const BaryGradients& barycentric_gradients() const { return gradients_; }

  Vec to_cartesian(const BaryPoint& lambda) const;
  BaryPoint to_barycentric(const Vec& x) const;

 private:
  int dim_;
  std::vector<Vec> vertices_;
  BaryGradients gradients_;
  double signed_volume_;
  double volume_;
};

/// s-dimensional measure of the simplex spanned by s+1 points in R^n
/// (1 for a single point).
double subsimplex_measure(std::span<const Vec> points);

}  // namespace hmnc
