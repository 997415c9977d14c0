#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hmnc/geometry.hpp"
#include "hmnc/types.hpp"

namespace hmnc {

inline constexpr int kMaxQuadratureDegree = 20;

/// Quadrature on the reference d-simplex conv{0, e_1, ..., e_d}.
///
/// Points are barycentric (lambda_0 = 1 - sum x_i, lambda_i = x_i); weights sum
/// to the reference volume 1/d!. dim = 0 is the one-point rule with weight 1.
struct QuadratureRule {
  int dim = 0;
  int degree = 0;
  std::vector<BaryPoint> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int npoints, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed-coordinate (conical product) Gauss rule exact for total degree
/// <= degree. All weights positive, all points interior.
/// Throws std::invalid_argument for dim outside 0..3 or degree outside 0..20.
QuadratureRule simplex_rule(int dim, int degree);

/// Process-wide cache of simplex_rule; returned references stay valid.
const QuadratureRule& cached_simplex_rule(int dim, int degree);

using ScalarField = std::function<double(const Vec&)>;

/// integral over the cell of f, i.e. |det J| * sum_q w_q f(x_q).
double integrate_on_cell(const QuadratureRule& rule, const ScalarField& f, const SimplexGeometry& cell);

/// integral over the sub-simplex spanned by `facet` (rule.dim + 1 points).
double integrate_on_facet(const QuadratureRule& rule, const ScalarField& f, std::span<const Vec> facet);

/// (1/|F|) * integral over F; point facets return f at the point.
double facet_average(const QuadratureRule& rule, const ScalarField& f, std::span<const Vec> facet);

/// Barycentric rule points of a sub-simplex embedded in the cell's barycentric
/// coordinates. `local_vertices` are the sub-simplex's local vertex ids in the
/// cell; the returned weights are normalised to sum to 1 (averaging weights).
void embed_facet_rule(const QuadratureRule& facet_rule, std::span<const int> local_vertices, int cell_dim,
                      std::vector<BaryPoint>& points, std::vector<double>& weights);

}  // namespace hmnc
