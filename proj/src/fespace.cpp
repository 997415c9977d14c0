#include "hmnc/fespace.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "hmnc/parallel.hpp"
#include "hmnc/quadrature.hpp"

namespace hmnc {

GlobalDofMap::GlobalDofMap(const SimplicialMesh& mesh, const ReferenceElement& ref) {
  const int n = mesh.dim();
  if (ref.dim() != n) throw std::invalid_argument("GlobalDofMap: element/mesh dimension mismatch");
  per_entity_.assign(n, 0);
  entity_offset_.assign(n, 0);
  // Vertices first (k = n), then decreasing k, matching the local ordering.
  int next = 0;
  for (int k = n; k >= 1; --k) {
    per_entity_[k - 1] = ref.dofs_per_entity(k);
    entity_offset_[k - 1] = next;
    const auto& table = mesh.subsimplices(k);
    for (std::size_t e = 0; e < table.size(); ++e)
      for (int s = 0; s < per_entity_[k - 1]; ++s) {
        GlobalDofInfo gi;
        gi.codim = k;
        gi.entity = static_cast<int>(e);
        gi.slot = s;
        gi.boundary = table[e].boundary;
        gi.owner_cell = -1;
        info_.push_back(gi);
        ++next;
      }
  }
  per_cell_ = ref.size();
  const std::size_t ncells = mesh.num_cells();
  dofs_.resize(ncells * per_cell_);
  signs_.assign(ncells * per_cell_, 1);
  for (std::size_t c = 0; c < ncells; ++c) {
    for (std::size_t i = 0; i < per_cell_; ++i) {
      const auto& d = ref.dofs()[i];
      const int entity = mesh.cell_entity(static_cast<int>(c), d.codim, d.local_entity);
      const int g = entity_dof(d.codim, entity, d.slot);
      dofs_[c * per_cell_ + i] = g;
      auto& gi = info_[g];
      gi.kind = d.kind;
      if (gi.owner_cell < 0) {
        gi.owner_cell = static_cast<int>(c);
        gi.owner_local = static_cast<int>(i);
      }
    }
  }
}

int GlobalDofMap::entity_dof(int codim, int entity, int slot) const {
  return entity_offset_.at(codim - 1) + entity * per_entity_[codim - 1] + slot;
}

GlobalDofMap build_global_dof_map(const SimplicialMesh& mesh, Variant variant) {
  return GlobalDofMap(mesh, ReferenceElement::get(variant, mesh.dim()));
}

// ---------------------------------------------------------------------------

FESpace::FESpace(SimplicialMesh mesh, Variant variant, int threads)
    : FESpace(std::make_shared<const SimplicialMesh>(std::move(mesh)), variant, threads) {}

FESpace::FESpace(std::shared_ptr<const SimplicialMesh> mesh, Variant variant, int threads)
    : mesh_(std::move(mesh)),
      ref_(&ReferenceElement::get(variant, mesh_->dim())),
      map_(*mesh_, *ref_) {
  const std::size_t ncells = mesh_->num_cells();
  std::vector<std::unique_ptr<FiniteElement>> built(ncells);
  parallel_for(ncells, threads, [&](std::size_t c) {
    const int ci = static_cast<int>(c);
    built[c] = std::make_unique<FiniteElement>(*ref_, mesh_->cell_geometry(ci), cell_frames(*mesh_, ci), ci);
  });
  elements_.reserve(ncells);
  for (auto& e : built) elements_.push_back(std::move(*e));
}

Eigen::VectorXd FESpace::local_dofs(int c, const Eigen::VectorXd& global) const {
  const auto dofs = map_.cell_dofs(c);
  const auto signs = map_.cell_signs(c);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i) v[static_cast<Eigen::Index>(i)] = signs[i] * global[dofs[i]];
  return v;
}

Eigen::VectorXd FESpace::local_coefficients(int c, const Eigen::VectorXd& global) const {
  return element(c).nodal_coefficients() * local_dofs(c, global);
}

BarycentricPolynomial FESpace::restriction(int c, const Eigen::VectorXd& global) const {
  return element(c).basis_combination(local_coefficients(c, global));
}

Eigen::VectorXd FESpace::interpolate(const AnalyticFunction& f, int threads, int quad_degree) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(num_dofs()));
  parallel_for(num_dofs(), threads, [&](std::size_t g) {
    const auto& gi = map_.info(static_cast<int>(g));
    const auto& el = element(gi.owner_cell);
    const double sign = map_.cell_signs(gi.owner_cell)[gi.owner_local];
    x[static_cast<Eigen::Index>(g)] =
        sign * apply_dof(ref_->dofs()[gi.owner_local], f, el.geometry(), el.frames(), quad_degree);
  });
  return x;
}

// ---------------------------------------------------------------------------
// Boundary conditions

namespace {

int axis_of(const Vec& nu) {
  for (int i = 0; i < nu.size(); ++i)
    if (std::abs(std::abs(nu[i]) - 1.0) < 1e-12) return i;
  return -1;
}

}  // namespace

Constraints classify_and_constrain(const FESpace& space, const BoundaryConditionSpec& bc) {
  const auto& mesh = space.mesh();
  const auto& map = space.dof_map();
  const int n = mesh.dim();
  const std::size_t ndofs = map.size();
  Constraints out;
  out.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ndofs));
  out.is_constrained.assign(ndofs, 0);

  auto dof_value = [&](int g) {
    if (bc.data == nullptr) return 0.0;
    const auto& gi = map.info(g);
    const auto& el = space.element(gi.owner_cell);
    return apply_dof(space.reference().dofs()[gi.owner_local], *bc.data, el.geometry(), el.frames());
  };
  auto constrain = [&](int g, double value) {
    out.is_constrained[g] = 1;
    out.values[g] = value;
  };

  if (bc.kind == BoundaryKind::DirichletFull) {
    if (bc.data != nullptr && bc.data->max_order() < n)
      throw std::invalid_argument("Dirichlet data must supply derivatives through order " + std::to_string(n));
    for (std::size_t g = 0; g < ndofs; ++g)
      if (map.info(static_cast<int>(g)).boundary) constrain(static_cast<int>(g), dof_value(static_cast<int>(g)));
  } else {
    if (space.variant() != Variant::Robust)
      throw std::invalid_argument("MixedNormal boundary conditions require the robust element");
    if (bc.data != nullptr && bc.data->max_order() < 1)
      throw std::invalid_argument("MixedNormal data must supply first derivatives");
    const auto& edges = mesh.subsimplices(1);
    std::vector<std::set<int>> vertex_axes(mesh.num_vertices());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!edges[e].boundary) continue;
      // slot 1 of a robust edge is the average of d/dnu
      const int g = map.entity_dof(1, static_cast<int>(e), 1);
      constrain(g, dof_value(g));
      const int axis = axis_of(mesh.facet_frame(1, static_cast<int>(e)).normals[0]);
      if (axis < 0) throw std::invalid_argument("MixedNormal: boundary normal not aligned with a coordinate axis");
      for (int v : edges[e].vertices) vertex_axes[v].insert(axis);
    }
    for (std::size_t v = 0; v < vertex_axes.size(); ++v) {
      for (int axis : vertex_axes[v]) {
        const int g = map.entity_dof(n, static_cast<int>(v), 1 + axis);
        double value = 0.0;
        if (bc.data != nullptr) {
          MultiIndex a(n);
          a.set(axis, 1);
          value = bc.data->derivative(a, mesh.vertex(static_cast<int>(v)));
        }
        constrain(g, value);
      }
    }
  }
  for (int v : bc.pinned_value_vertices) {
    const int g = map.entity_dof(n, v, 0);
    constrain(g, bc.data ? bc.data->value(mesh.vertex(v)) : 0.0);
  }
  for (std::size_t g = 0; g < ndofs; ++g)
    (out.is_constrained[g] ? out.constrained : out.free).push_back(static_cast<int>(g));
  return out;
}

// ---------------------------------------------------------------------------
// Weak continuity

std::vector<int> continuous_moment_orders(Variant variant) {
  return variant == Variant::Standard ? std::vector<int>{2} : std::vector<int>{1, 2};
}

ContinuityReport verify_face_average_continuity(const FESpace& space, const Eigen::VectorXd& global) {
  const auto& mesh = space.mesh();
  const int n = mesh.dim();
  if (n != 2) throw std::invalid_argument("verify_face_average_continuity: 2D meshes only");
  ContinuityReport rep;
  std::vector<BarycentricPolynomial> local;
  local.reserve(space.num_cells());
  for (std::size_t c = 0; c < space.num_cells(); ++c) local.push_back(space.restriction(static_cast<int>(c), global));

  const auto& rule = cached_simplex_rule(1, 2 * space.reference().basis().max_degree());
  std::vector<MultiIndex> alphas;
  for (int o : continuous_moment_orders(space.variant()))
    for (const auto& a : multi_indices(n, o)) alphas.push_back(a);

  auto moment = [&](int c, const std::vector<Vec>& pts, const MultiIndex& a) {
    const auto& geo = space.element(c).geometry();
    return integrate_on_facet(
        rule, [&](const Vec& x) { return evaluate_cartesian_derivative(local[c], a, geo, geo.to_barycentric(x)); },
        pts);
  };

  const auto& edges = mesh.subsimplices(1);
  for (const auto& e : edges) {
    std::vector<Vec> pts{mesh.vertex(e.vertices[0]), mesh.vertex(e.vertices[1])};
    for (const auto& a : alphas) {
      const double m0 = moment(e.cells[0], pts, a);
      if (e.cells.size() == 2) {
        rep.max_edge_jump = std::max(rep.max_edge_jump, std::abs(m0 - moment(e.cells[1], pts, a)));
      } else {
        rep.max_boundary_moment = std::max(rep.max_boundary_moment, std::abs(m0));
      }
    }
    if (e.cells.size() == 2) {
      const auto& g0 = space.element(e.cells[0]).geometry();
      const auto& g1 = space.element(e.cells[1]).geometry();
      for (int s = 1; s <= 5; ++s) {
        const double t = s / 6.0;
        const Vec x = (1 - t) * pts[0] + t * pts[1];
        const double jump = local[e.cells[0]].evaluate(g0.to_barycentric(x)) -
                            local[e.cells[1]].evaluate(g1.to_barycentric(x));
        rep.max_trace_jump = std::max(rep.max_trace_jump, std::abs(jump));
      }
    }
  }

  // Values and gradients at vertices, compared across all incident cells.
  std::vector<MultiIndex> low{MultiIndex(n)};
  for (const auto& a : multi_indices(n, 1)) low.push_back(a);
  const auto& verts = mesh.subsimplices(n);
  for (std::size_t v = 0; v < verts.size(); ++v) {
    const Vec& x = mesh.vertex(static_cast<int>(v));
    for (const auto& a : low) {
      double lo = INFINITY, hi = -INFINITY;
      for (int c : verts[v].cells) {
        const auto& geo = space.element(c).geometry();
        const double val = evaluate_cartesian_derivative(local[c], a, geo, geo.to_barycentric(x));
        lo = std::min(lo, val);
        hi = std::max(hi, val);
      }
      rep.max_vertex_jump = std::max(rep.max_vertex_jump, hi - lo);
    }
  }
  return rep;
}

}  // namespace hmnc
