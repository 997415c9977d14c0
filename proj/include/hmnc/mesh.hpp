#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "hmnc/geometry.hpp"
#include "hmnc/types.hpp"

namespace hmnc {

/// An (n-k)-dimensional sub-simplex of the mesh (codimension k).
struct SubSimplex {
  std::vector<int> vertices;  ///< global vertex ids, ascending
  std::vector<int> cells;     ///< incident cells, ascending
  bool boundary = false;
};

/// Orthonormal frame normal to a sub-simplex of codimension k.
///
/// The frame is a function of the entity alone (its vertex coordinates taken
/// in ascending global-index order), so every incident cell sees the same
/// vectors bit for bit. For vertices (k = n) the frame is e_1..e_n.
struct FacetFrame {
  int codim = 0;
  int entity = -1;
  double measure = 1.0;
  std::vector<Vec> normals;
};

/// Frame for the sub-simplex whose vertices are given in ascending global order.
FacetFrame compute_frame(std::span<const Vec> sorted_vertices, int dim);

/// Local vertex subsets of an n-simplex forming its codimension-k sub-simplices,
/// in lexicographic order. k = n gives the single vertices.
const std::vector<std::vector<int>>& local_subsimplices(int dim, int codim);

class SimplicialMesh {
 public:
  /// Cells with negative orientation are reordered (first two vertices swapped).
  /// Throws std::invalid_argument on degenerate cells, index errors or a facet
  /// shared by more than two cells.
  SimplicialMesh(int dim, std::vector<Vec> vertices, std::vector<std::vector<int>> cells);

  int dim() const { return dim_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size() / (dim_ + 1); }

  const Vec& vertex(int v) const { return vertices_[v]; }
  std::span<const int> cell(int c) const {
    return {cells_.data() + static_cast<std::size_t>(c) * (dim_ + 1), static_cast<std::size_t>(dim_ + 1)};
  }
  SimplexGeometry cell_geometry(int c) const;

  /// Sub-simplex table F_{h,k}; throws std::out_of_range unless 1 <= k <= dim.
  const std::vector<SubSimplex>& subsimplices(int codim) const;
  /// Global entity id of the local-th codim-k sub-simplex of cell c
  /// (local order of local_subsimplices).
  int cell_entity(int c, int codim, int local) const;

  const FacetFrame& facet_frame(int codim, int entity) const;

  /// Smallest and largest cell diameter.
  double max_cell_diameter() const;

 private:
  void build_tables();

  int dim_;
  std::vector<Vec> vertices_;
  std::vector<int> cells_;
  std::vector<std::vector<SubSimplex>> entities_;    // [k-1]
  std::vector<std::vector<int>> cell_entities_;      // [k-1][c * nlocal + local]
  std::vector<std::vector<FacetFrame>> frames_;      // [k-1]
};

/// Sub-simplex records of codimension k (vertex set, incident cells, boundary flag).
inline const std::vector<SubSimplex>& enumerate_subsimplices(const SimplicialMesh& mesh, int codim) {
  return mesh.subsimplices(codim);
}

/// (0,1)^2 split into n_div^2 squares, each cut along its lower-left to
/// upper-right diagonal.
SimplicialMesh generate_unit_square_mesh(int n_div);

/// (-1,1)^2 minus [0,1)x(-1,0] with n_div squares per unit length, same diagonal.
SimplicialMesh generate_lshape_mesh(int n_div);

/// Mesh consisting of one simplex with vertex ids 0..n.
SimplicialMesh single_simplex_mesh(std::span<const Vec> vertices);

/// Debug dump: "DIM n / VERTICES count + coords / CELLS count + index tuples".
void dump_mesh(const SimplicialMesh& mesh, std::ostream& out);

}  // namespace hmnc
