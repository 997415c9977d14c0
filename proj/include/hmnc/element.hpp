#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmnc/analytic.hpp"
#include "hmnc/geometry.hpp"
#include "hmnc/mesh.hpp"
#include "hmnc/polyspace.hpp"

namespace hmnc {

enum class DofKind {
  PointValue,              ///< v(a)
  PointDerivative,         ///< d v / d nu (a) at a vertex, nu a frame axis
  FacetDerivativeAverage,  ///< (1/|F|) int_F d^|alpha| v / d nu_1^a1 ... d nu_k^ak
};

struct DofFunctional {
  DofKind kind = DofKind::PointValue;
  int codim = 0;         ///< k of the owning sub-simplex (vertices: k = n)
  int local_entity = 0;  ///< index into local_subsimplices(n, k)
  int slot = 0;          ///< position among the DOFs owned by the same entity
  MultiIndex alpha;      ///< exponents over the entity's frame nu_1..nu_k

  int order() const { return alpha.order(); }
};

/// Frames of every local sub-simplex of one cell, [k-1][local].
struct CellFrames {
  std::vector<std::vector<FacetFrame>> by_codim;

  const FacetFrame& get(int codim, int local) const { return by_codim.at(codim - 1).at(local); }
};

CellFrames cell_frames(const SimplicialMesh& mesh, int cell);

/// Frames for a stand-alone simplex whose vertices carry the given global ids.
CellFrames simplex_frames(const SimplexGeometry& cell, std::span<const int> global_ids);

/// Ordered DOF set: per vertex (value, then gradient components), then codim
/// n-1 entities, ..., then facets. Throws for an unsupported variant/dim pair.
std::vector<DofFunctional> build_dof_set(Variant variant, int dim);

/// Cell-independent data of an element family: basis, DOF templates and the
/// basis tabulated at the DOF evaluation points of every local sub-simplex.
class ReferenceElement {
 public:
  /// Shared instance; thread-safe.
  static const ReferenceElement& get(Variant variant, int dim);

  ReferenceElement(Variant variant, int dim);

  Variant variant() const { return variant_; }
  int dim() const { return dim_; }
  const ShapeSpaceBasis& basis() const { return basis_; }
  const std::vector<DofFunctional>& dofs() const { return dofs_; }
  std::size_t size() const { return dofs_.size(); }
  /// DOFs attached to each codim-k entity.
  int dofs_per_entity(int codim) const { return per_entity_.at(codim - 1); }

  /// Tabulation at the evaluation points of local sub-simplex (k, local) and
  /// the matching averaging weights (sum to 1).
  const BasisTabulation& entity_tabulation(int codim, int local) const;
  const std::vector<double>& entity_weights(int codim, int local) const;

 private:
  Variant variant_;
  int dim_;
  ShapeSpaceBasis basis_;
  std::vector<DofFunctional> dofs_;
  std::vector<int> per_entity_;
  std::vector<std::vector<BasisTabulation>> tabs_;
  std::vector<std::vector<std::vector<double>>> weights_;
};

/// Frame directions realising alpha for a DOF on the given cell.
std::vector<Vec> dof_directions(const DofFunctional& d, const CellFrames& frames);

/// Symbolic application of a DOF to a polynomial: exact differentiation,
/// point evaluation or facet quadrature exact to the polynomial's degree.
double apply_dof(const DofFunctional& d, const BarycentricPolynomial& p, const SimplexGeometry& cell,
                 const CellFrames& frames);

/// Applies a DOF to an analytic function (facet averages with the given rule degree).
double apply_dof(const DofFunctional& d, const AnalyticFunction& f, const SimplexGeometry& cell,
                 const CellFrames& frames, int quad_degree = 20);

/// D_ij = d_i(b_j) assembled from the reference tabulations.
Eigen::MatrixXd dof_matrix(const ReferenceElement& ref, const SimplexGeometry& cell, const CellFrames& frames);

class SingularDofMatrix : public std::runtime_error {
 public:
  SingularDofMatrix(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Element on one cell: DOF matrix D and nodal coefficients N = D^{-1}
/// (column j holds p_j in the shape basis, so d_i(p_j) = delta_ij).
class FiniteElement {
 public:
  /// Throws SingularDofMatrix when D is numerically singular.
  FiniteElement(const ReferenceElement& ref, SimplexGeometry cell, CellFrames frames, int cell_id = -1);

  const ReferenceElement& reference() const { return *ref_; }
  Variant variant() const { return ref_->variant(); }
  int cell_id() const { return cell_id_; }
  const SimplexGeometry& geometry() const { return geometry_; }
  const CellFrames& frames() const { return frames_; }
  std::size_t size() const { return ref_->size(); }

  const Eigen::MatrixXd& dof_matrix() const { return dof_matrix_; }
  const Eigen::MatrixXd& nodal_coefficients() const { return nodal_; }

  /// p_j as a barycentric polynomial.
  BarycentricPolynomial nodal_function(int j) const;
  /// sum_i coeffs[i] * b_i.
  BarycentricPolynomial basis_combination(const Eigen::VectorXd& coeffs) const;

  /// DOF values d_i(f).
  Eigen::VectorXd interpolate_dofs(const AnalyticFunction& f, int quad_degree = 20) const;

 private:
  const ReferenceElement* ref_;
  int cell_id_;
  SimplexGeometry geometry_;
  CellFrames frames_;
  Eigen::MatrixXd dof_matrix_;
  Eigen::MatrixXd nodal_;
};

/// Builds the element on a stand-alone cell.
FiniteElement nodal_basis(Variant variant, const SimplexGeometry& cell, const CellFrames& frames);

/// Shape-basis coefficients of Pi_T f = sum_i d_i(f) p_i.
Eigen::VectorXd local_interpolate(const FiniteElement& element, const AnalyticFunction& f, int quad_degree = 20);

struct UnisolvencyTrial {
  int trial = 0;  ///< 0 is the reference simplex
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double condition = 0.0;
  bool pass = false;
};

struct UnisolvencyReport {
  int n = 0;
  Variant variant = Variant::Standard;
  std::size_t space_dimension = 0;
  std::size_t dof_count = 0;
  std::vector<UnisolvencyTrial> trials;

  bool dimensions_match() const { return space_dimension == dof_count; }
  bool pass() const;
};

/// Smallest-to-largest singular value threshold for an invertible DOF matrix.
inline constexpr double kUnisolvencyTolerance = 1e-10;

/// Reference simplex plus `trials` random shape-regular simplices.
UnisolvencyReport check_unisolvency(int n, Variant variant, int trials, std::uint64_t seed = 20240901);

/// Random simplex with vertices in [-1,1]^n and volume * n! / diam^n >= 0.2.
std::vector<Vec> random_shape_regular_simplex(int n, std::mt19937_64& rng);

/// Reference simplex conv{0, e_1, ..., e_n}.
std::vector<Vec> reference_simplex(int n);

/// C(2n+1, n) + n.
std::size_t standard_dimension(int n);

}  // namespace hmnc
