#include "hmnc/mesh.hpp"
#include <Eigen/Geometry>

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hmnc {

// ---------------------------------------------------------------------------
// SimplexGeometry

SimplexGeometry::SimplexGeometry(std::span<const Vec> vertices)
    : dim_(static_cast<int>(vertices.size()) - 1), vertices_(vertices.begin(), vertices.end()) {
  if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("SimplexGeometry: need 2..4 vertices");
  for (const auto& v : vertices_) {
    if (v.size() != dim_) throw std::invalid_argument("SimplexGeometry: vertex dimension mismatch");
  }
  Eigen::MatrixXd jac(dim_, dim_);
  for (int j = 0; j < dim_; ++j) jac.col(j) = vertices_[j + 1] - vertices_[0];
  const double det = jac.determinant();
  double fact = 1.0;
  for (int i = 2; i <= dim_; ++i) fact *= i;
  signed_volume_ = det / fact;
  volume_ = std::abs(signed_volume_);
  const double scale = std::pow(diameter(), dim_);
  if (!(volume_ > 1e-14 * scale / fact)) throw std::invalid_argument("SimplexGeometry: degenerate simplex");

  // lambda_j = (J^{-1}(x - x0))_{j-1} for j >= 1, lambda_0 = 1 - sum.
  const Eigen::MatrixXd inv = jac.inverse();
  gradients_.resize(dim_ + 1, dim_);
  for (int j = 0; j < dim_; ++j) gradients_.row(j + 1) = inv.row(j);
  gradients_.row(0) = -inv.colwise().sum();
}

double SimplexGeometry::diameter() const {
  double d = 0.0;
  for (int i = 0; i <= dim_; ++i)
    for (int j = i + 1; j <= dim_; ++j) d = std::max(d, (vertices_[i] - vertices_[j]).norm());
  return d;
}

Vec SimplexGeometry::to_cartesian(const BaryPoint& lambda) const {
  Vec x = Vec::Zero(dim_);
  for (int i = 0; i <= dim_; ++i) x += lambda[i] * vertices_[i];
  return x;
}

BaryPoint SimplexGeometry::to_barycentric(const Vec& x) const {
  BaryPoint l(dim_ + 1);
  const Vec d = x - vertices_[0];
  double rest = 1.0;
  for (int j = 1; j <= dim_; ++j) {
    l[j] = gradients_.row(j).dot(d);
    rest -= l[j];
  }
  l[0] = rest;
  return l;
}

double subsimplex_measure(std::span<const Vec> points) {
  const int s = static_cast<int>(points.size()) - 1;
  if (s <= 0) return 1.0;
  const int n = static_cast<int>(points[0].size());
  Eigen::MatrixXd e(n, s);
  for (int j = 0; j < s; ++j) e.col(j) = points[j + 1] - points[0];
  const double gram = (e.transpose() * e).determinant();
  double fact = 1.0;
  for (int i = 2; i <= s; ++i) fact *= i;
  return std::sqrt(std::max(gram, 0.0)) / fact;
}

// ---------------------------------------------------------------------------
// Frames

FacetFrame compute_frame(std::span<const Vec> sorted_vertices, int dim) {
  FacetFrame frame;
  const int npts = static_cast<int>(sorted_vertices.size());
  frame.codim = dim + 1 - npts;
  frame.measure = subsimplex_measure(sorted_vertices);
  const int k = frame.codim;
  if (k == dim) {
    for (int i = 0; i < dim; ++i) frame.normals.push_back(Vec::Unit(dim, i));
    return frame;
  }
  if (dim == 2) {
    // Edge direction lowest -> highest index, rotated by +90 degrees.
    const Vec t = (sorted_vertices[1] - sorted_vertices[0]).normalized();
    Vec nu(2);
    nu << -t[1], t[0];
    frame.normals.push_back(nu);
    return frame;
  }
  if (dim == 3 && k == 1) {
    const Eigen::Vector3d a = sorted_vertices[0], b = sorted_vertices[1], c = sorted_vertices[2];
    const Eigen::Vector3d nrm = (b - a).cross(c - a).normalized();
    frame.normals.push_back(Vec(nrm));
    return frame;
  }
  if (dim == 3 && k == 2) {
    const Eigen::Vector3d t = (sorted_vertices[1] - sorted_vertices[0]).normalized();
    int axis = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(t[i]) < std::abs(t[axis])) axis = i;
    const Eigen::Vector3d e = Eigen::Vector3d::Unit(axis);
    const Eigen::Vector3d n1 = (e - e.dot(t) * t).normalized();
    const Eigen::Vector3d n2 = t.cross(n1);
    frame.normals.push_back(Vec(n1));
    frame.normals.push_back(Vec(n2));
    return frame;
  }
  throw std::invalid_argument("compute_frame: unsupported dimension");
}

const std::vector<std::vector<int>>& local_subsimplices(int dim, int codim) {
  static const auto tables = [] {
    // tables[dim][codim]
    std::vector<std::vector<std::vector<std::vector<int>>>> t(kMaxDim + 1);
    for (int n = 1; n <= kMaxDim; ++n) {
      t[n].resize(n + 1);
      for (int k = 0; k <= n; ++k) {
        const int size = n + 1 - k;
        std::vector<bool> pick(n + 1, false);
        std::fill(pick.begin(), pick.begin() + size, true);
        do {
          std::vector<int> subset;
          for (int i = 0; i <= n; ++i)
            if (pick[i]) subset.push_back(i);
          t[n][k].push_back(subset);
        } while (std::prev_permutation(pick.begin(), pick.end()));
      }
    }
    return t;
  }();
  if (dim < 1 || dim > kMaxDim || codim < 0 || codim > dim)
    throw std::out_of_range("local_subsimplices: index out of range");
  return tables[dim][codim];
}

// ---------------------------------------------------------------------------
// SimplicialMesh

SimplicialMesh::SimplicialMesh(int dim, std::vector<Vec> vertices, std::vector<std::vector<int>> cells)
    : dim_(dim), vertices_(std::move(vertices)) {
  if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("SimplicialMesh: unsupported dimension");
  if (cells.empty()) throw std::invalid_argument("SimplicialMesh: no cells");
  for (const auto& v : vertices_)
    if (v.size() != dim_) throw std::invalid_argument("SimplicialMesh: vertex dimension mismatch");
  cells_.reserve(cells.size() * (dim_ + 1));
  for (auto& c : cells) {
    if (static_cast<int>(c.size()) != dim_ + 1) throw std::invalid_argument("SimplicialMesh: bad cell arity");
    for (int v : c)
      if (v < 0 || v >= static_cast<int>(vertices_.size()))
        throw std::invalid_argument("SimplicialMesh: vertex index out of range");
    std::vector<Vec> pts;
    for (int v : c) pts.push_back(vertices_[v]);
    if (SimplexGeometry(pts).signed_volume() < 0) std::swap(c[0], c[1]);
    cells_.insert(cells_.end(), c.begin(), c.end());
  }
  build_tables();
}

void SimplicialMesh::build_tables() {
  const int ncells = static_cast<int>(num_cells());
  entities_.assign(dim_, {});
  cell_entities_.assign(dim_, {});
  frames_.assign(dim_, {});
  std::vector<std::map<std::vector<int>, int>> lookup(dim_);

  for (int k = 1; k <= dim_; ++k) {
    const auto& locals = local_subsimplices(dim_, k);
    auto& table = entities_[k - 1];
    auto& index = lookup[k - 1];
    auto& ce = cell_entities_[k - 1];
    ce.resize(static_cast<std::size_t>(ncells) * locals.size());
    // Vertex entity i is vertex i.
    if (k == dim_)
      for (int v = 0; v < static_cast<int>(vertices_.size()); ++v) {
        index.emplace(std::vector<int>{v}, v);
        table.push_back(SubSimplex{{v}, {}, false});
      }
    for (int c = 0; c < ncells; ++c) {
      const auto verts = cell(c);
      for (std::size_t l = 0; l < locals.size(); ++l) {
        std::vector<int> key;
        for (int lv : locals[l]) key.push_back(verts[lv]);
        std::sort(key.begin(), key.end());
        auto [it, inserted] = index.try_emplace(key, static_cast<int>(table.size()));
        if (inserted) table.push_back(SubSimplex{key, {}, false});
        table[it->second].cells.push_back(c);
        ce[static_cast<std::size_t>(c) * locals.size() + l] = it->second;
      }
    }
  }

  for (const auto& v : entities_[dim_ - 1])
    if (v.cells.empty()) throw std::invalid_argument("SimplicialMesh: vertex not used by any cell");

  // Facets: boundary iff exactly one incident cell.
  for (auto& f : entities_[0]) {
    if (f.cells.size() > 2) throw std::invalid_argument("SimplicialMesh: facet shared by more than two cells");
    f.boundary = f.cells.size() == 1;
  }
  // Lower-dimensional entities lie on the boundary iff some boundary facet contains them.
  for (const auto& f : entities_[0]) {
    if (!f.boundary) continue;
    for (int k = 2; k <= dim_; ++k) {
      const int size = dim_ + 1 - k;
      std::vector<bool> pick(f.vertices.size(), false);
      std::fill(pick.begin(), pick.begin() + size, true);
      do {
        std::vector<int> key;
        for (std::size_t i = 0; i < f.vertices.size(); ++i)
          if (pick[i]) key.push_back(f.vertices[i]);
        entities_[k - 1][lookup[k - 1].at(key)].boundary = true;
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
  }

  for (int k = 1; k <= dim_; ++k) {
    auto& frames = frames_[k - 1];
    const auto& table = entities_[k - 1];
    frames.reserve(table.size());
    for (std::size_t e = 0; e < table.size(); ++e) {
      std::vector<Vec> pts;
      for (int v : table[e].vertices) pts.push_back(vertices_[v]);
      FacetFrame fr = compute_frame(pts, dim_);
      fr.entity = static_cast<int>(e);
      frames.push_back(std::move(fr));
    }
  }
}

SimplexGeometry SimplicialMesh::cell_geometry(int c) const {
  std::vector<Vec> pts;
  pts.reserve(dim_ + 1);
  for (int v : cell(c)) pts.push_back(vertices_[v]);
  return SimplexGeometry(pts);
}

const std::vector<SubSimplex>& SimplicialMesh::subsimplices(int codim) const {
  if (codim < 1 || codim > dim_) throw std::out_of_range("subsimplices: codimension out of range");
  return entities_[codim - 1];
}

int SimplicialMesh::cell_entity(int c, int codim, int local) const {
  const std::size_t nlocal = local_subsimplices(dim_, codim).size();
  return cell_entities_.at(codim - 1)[static_cast<std::size_t>(c) * nlocal + local];
}

const FacetFrame& SimplicialMesh::facet_frame(int codim, int entity) const {
  if (codim < 1 || codim > dim_) throw std::out_of_range("facet_frame: codimension out of range");
  return frames_[codim - 1].at(entity);
}

double SimplicialMesh::max_cell_diameter() const {
  double h = 0.0;
  for (int c = 0; c < static_cast<int>(num_cells()); ++c) h = std::max(h, cell_geometry(c).diameter());
  return h;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

Vec point2(double x, double y) {
  Vec p(2);
  p << x, y;
  return p;
}

// Structured grid over [x0, x0 + nx*h] x [y0, y0 + ny*h]; keep(i, j) selects squares.
template <class Keep>
SimplicialMesh structured_mesh(double x0, double y0, int nx, int ny, double h, Keep keep) {
  std::vector<int> id((nx + 1) * (ny + 1), -1);
  std::vector<Vec> verts;
  std::vector<std::vector<int>> cells;
  auto vid = [&](int i, int j) {
    int& slot = id[j * (nx + 1) + i];
    if (slot < 0) {
      slot = static_cast<int>(verts.size());
      verts.push_back(point2(x0 + i * h, y0 + j * h));
    }
    return slot;
  };
  // Vertices are numbered row by row so ids grow with (y, x).
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const bool touches = (i > 0 && j > 0 && keep(i - 1, j - 1)) || (i < nx && j > 0 && keep(i, j - 1)) ||
                           (i > 0 && j < ny && keep(i - 1, j)) || (i < nx && j < ny && keep(i, j));
      if (touches) vid(i, j);
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!keep(i, j)) continue;
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      cells.push_back({v00, v10, v11});
      cells.push_back({v00, v11, v01});
    }
  return SimplicialMesh(2, std::move(verts), std::move(cells));
}

}  // namespace

SimplicialMesh generate_unit_square_mesh(int n_div) {
  if (n_div < 1) throw std::invalid_argument("generate_unit_square_mesh: n_div must be >= 1");
  return structured_mesh(0.0, 0.0, n_div, n_div, 1.0 / n_div, [](int, int) { return true; });
}

SimplicialMesh generate_lshape_mesh(int n_div) {
  if (n_div < 1) throw std::invalid_argument("generate_lshape_mesh: n_div must be >= 1");
  // Drop the lower-right quadrant [0,1) x (-1,0].
  return structured_mesh(-1.0, -1.0, 2 * n_div, 2 * n_div, 1.0 / n_div,
                         [n_div](int i, int j) { return !(i >= n_div && j < n_div); });
}

SimplicialMesh single_simplex_mesh(std::span<const Vec> vertices) {
  const int n = static_cast<int>(vertices.size()) - 1;
  std::vector<int> c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = i;
  return SimplicialMesh(n, std::vector<Vec>(vertices.begin(), vertices.end()), {c});
}

void dump_mesh(const SimplicialMesh& mesh, std::ostream& out) {
  out << "DIM\n" << mesh.dim() << "\nVERTICES\n" << mesh.num_vertices() << "\n";
  out.precision(17);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Vec& p = mesh.vertex(static_cast<int>(v));
    for (int i = 0; i < p.size(); ++i) out << (i ? " " : "") << p[i];
    out << "\n";
  }
  out << "CELLS\n" << mesh.num_cells() << "\n";
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto verts = mesh.cell(static_cast<int>(c));
    for (std::size_t i = 0; i < verts.size(); ++i) out << (i ? " " : "") << verts[i];
    out << "\n";
  }
}

}  // namespace hmnc
