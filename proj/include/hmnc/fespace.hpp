#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hmnc/analytic.hpp"
#include "hmnc/element.hpp"
#include "hmnc/mesh.hpp"

namespace hmnc {

struct GlobalDofInfo {
  int codim = 0;
  int entity = 0;
  int slot = 0;
  DofKind kind = DofKind::PointValue;
  bool boundary = false;
  int owner_cell = 0;   ///< some incident cell
  int owner_local = 0;  ///< local DOF index in owner_cell
};

/// Identification of local DOFs across cells: a DOF attached to a shared
/// sub-simplex gets one global index. Entity frames are global, so every sign
/// factor is +1; the sign table is kept for orientation-dependent variants.
class GlobalDofMap {
 public:
  GlobalDofMap(const SimplicialMesh& mesh, const ReferenceElement& ref);

  std::size_t size() const { return info_.size(); }
  std::span<const int> cell_dofs(int c) const {
    return {dofs_.data() + static_cast<std::size_t>(c) * per_cell_, per_cell_};
  }
  std::span<const int> cell_signs(int c) const {
    return {signs_.data() + static_cast<std::size_t>(c) * per_cell_, per_cell_};
  }
  const GlobalDofInfo& info(int g) const { return info_.at(g); }
  int entity_dof(int codim, int entity, int slot) const;

 private:
  std::size_t per_cell_ = 0;
  std::vector<int> dofs_;
  std::vector<int> signs_;
  std::vector<GlobalDofInfo> info_;
  std::vector<int> entity_offset_;  // [k-1] first global index of codim-k DOFs
  std::vector<int> per_entity_;
};

GlobalDofMap build_global_dof_map(const SimplicialMesh& mesh, Variant variant);

/// Global nonconforming space on a mesh: DOF map plus the element of every cell.
class FESpace {
 public:
  FESpace(std::shared_ptr<const SimplicialMesh> mesh, Variant variant, int threads = 1);
  FESpace(SimplicialMesh mesh, Variant variant, int threads = 1);

  const SimplicialMesh& mesh() const { return *mesh_; }
  Variant variant() const { return ref_->variant(); }
  const ReferenceElement& reference() const { return *ref_; }
  const GlobalDofMap& dof_map() const { return map_; }
  std::size_t num_dofs() const { return map_.size(); }
  std::size_t num_cells() const { return elements_.size(); }
  const FiniteElement& element(int c) const { return elements_.at(c); }

  /// Local DOF values of cell c (sign-corrected gather).
  Eigen::VectorXd local_dofs(int c, const Eigen::VectorXd& global) const;
  /// Shape-basis coefficients of the restriction to cell c.
  Eigen::VectorXd local_coefficients(int c, const Eigen::VectorXd& global) const;
  /// The restriction to cell c as a polynomial.
  BarycentricPolynomial restriction(int c, const Eigen::VectorXd& global) const;

  /// Global canonical interpolant Pi_h f: every DOF evaluated on its entity.
  Eigen::VectorXd interpolate(const AnalyticFunction& f, int threads = 1, int quad_degree = 20) const;

 private:
  std::shared_ptr<const SimplicialMesh> mesh_;
  const ReferenceElement* ref_;
  GlobalDofMap map_;
  std::vector<FiniteElement> elements_;
};

enum class BoundaryKind {
  DirichletFull,  ///< every DOF on a boundary entity fixed to the interpolant of the data
  MixedNormal,    ///< only normal-derivative DOFs on the boundary (robust element)
};

struct BoundaryConditionSpec {
  BoundaryKind kind = BoundaryKind::DirichletFull;
  /// Boundary data; null means homogeneous.
  const AnalyticFunction* data = nullptr;
  /// Vertices whose value DOF is additionally fixed to the data (or 0).
  std::vector<int> pinned_value_vertices;
};

struct Constraints {
  std::vector<int> free;
  std::vector<int> constrained;
  /// Full-length vector; entries at constrained DOFs hold the prescribed values.
  Eigen::VectorXd values;
  std::vector<char> is_constrained;
};

/// Throws std::invalid_argument for MixedNormal on a non-robust space, for
/// boundary data lacking the needed derivatives, or for a boundary normal not
/// aligned with a coordinate axis.
Constraints classify_and_constrain(const FESpace& space, const BoundaryConditionSpec& bc);

struct ContinuityReport {
  /// max over interior edges/alpha of |int_F d^alpha v|_T - int_F d^alpha v|_T'|
  double max_edge_jump = 0.0;
  /// max over boundary edges/alpha of |int_F d^alpha v|_T|
  double max_boundary_moment = 0.0;
  /// max jump of values and first derivatives at shared vertices
  double max_vertex_jump = 0.0;
  /// max jump of point values along interior edges (5 samples per edge)
  double max_trace_jump = 0.0;
};

/// Derivative orders whose edge moments are single valued: {2} for the
/// standard element, {1, 2} for the robust one.
std::vector<int> continuous_moment_orders(Variant variant);

ContinuityReport verify_face_average_continuity(const FESpace& space, const Eigen::VectorXd& global);

}  // namespace hmnc
