#include "hmnc/element.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>

#include "hmnc/quadrature.hpp"

namespace hmnc {

double directional_derivative(const AnalyticFunction& f, std::span<const Vec> directions, const Vec& x) {
  const int n = f.dim();
  const int r = static_cast<int>(directions.size());
  if (r > f.max_order()) throw DerivativeUnavailable("directional_derivative: order exceeds supplied derivatives");
  if (r == 0) return f.value(x);
  std::vector<int> tuple(r, 0);
  double acc = 0.0;
  while (true) {
    double c = 1.0;
    for (int l = 0; l < r; ++l) c *= directions[l][tuple[l]];
    if (c != 0.0) acc += c * f.derivative(count_tuple(tuple, n), x);
    int pos = 0;
    while (pos < r && ++tuple[pos] == n) tuple[pos++] = 0;
    if (pos == r) break;
  }
  return acc;
}

CellFrames cell_frames(const SimplicialMesh& mesh, int cell) {
  CellFrames f;
  const int n = mesh.dim();
  f.by_codim.resize(n);
  for (int k = 1; k <= n; ++k) {
    const auto& locals = local_subsimplices(n, k);
    for (std::size_t l = 0; l < locals.size(); ++l)
      f.by_codim[k - 1].push_back(mesh.facet_frame(k, mesh.cell_entity(cell, k, static_cast<int>(l))));
  }
  return f;
}

CellFrames simplex_frames(const SimplexGeometry& cell, std::span<const int> global_ids) {
  CellFrames f;
  const int n = cell.dim();
  f.by_codim.resize(n);
  for (int k = 1; k <= n; ++k) {
    for (const auto& local : local_subsimplices(n, k)) {
      std::vector<int> order(local.begin(), local.end());
      std::sort(order.begin(), order.end(), [&](int a, int b) { return global_ids[a] < global_ids[b]; });
      std::vector<Vec> pts;
      for (int lv : order) pts.push_back(cell.vertex(lv));
      f.by_codim[k - 1].push_back(compute_frame(pts, n));
    }
  }
  return f;
}

std::vector<DofFunctional> build_dof_set(Variant variant, int dim) {
  std::vector<DofFunctional> dofs;
  if (variant == Variant::Robust && dim != 2) throw std::invalid_argument("robust element requires dim = 2");
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("build_dof_set: dim must be 1..3");
  const int n = dim;
  // Vertices: value, then gradient along e_1..e_n.
  for (int v = 0; v <= n; ++v) {
    dofs.push_back({DofKind::PointValue, n, v, 0, MultiIndex(n)});
    for (int i = 0; i < n; ++i) {
      MultiIndex a(n);
      a.set(i, 1);
      dofs.push_back({DofKind::PointDerivative, n, v, i + 1, a});
    }
  }
  if (variant == Variant::Standard) {
    for (int k = n - 1; k >= 1; --k) {
      const auto alphas = multi_indices(k, n + 1 - k);
      const auto& locals = local_subsimplices(n, k);
      for (std::size_t l = 0; l < locals.size(); ++l)
        for (std::size_t s = 0; s < alphas.size(); ++s)
          dofs.push_back({DofKind::FacetDerivativeAverage, k, static_cast<int>(l), static_cast<int>(s), alphas[s]});
    }
  } else {
    for (int l = 0; l < 3; ++l) {
      dofs.push_back({DofKind::FacetDerivativeAverage, 1, l, 0, MultiIndex{2}});
      dofs.push_back({DofKind::FacetDerivativeAverage, 1, l, 1, MultiIndex{1}});
    }
  }
  return dofs;
}

// ---------------------------------------------------------------------------
// ReferenceElement

const ReferenceElement& ReferenceElement::get(Variant variant, int dim) {
  static std::mutex mutex;
  static std::array<std::array<std::unique_ptr<ReferenceElement>, kMaxDim + 1>, 2> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[variant == Variant::Standard ? 0 : 1].at(dim);
  if (!slot) slot = std::make_unique<ReferenceElement>(variant, dim);
  return *slot;
}

ReferenceElement::ReferenceElement(Variant variant, int dim)
    : variant_(variant), dim_(dim), basis_(make_basis(variant, dim)), dofs_(build_dof_set(variant, dim)) {
  per_entity_.assign(dim, 0);
  int max_order = 0;
  for (const auto& d : dofs_) {
    if (d.local_entity == 0) ++per_entity_[d.codim - 1];
    max_order = std::max(max_order, d.order());
  }
  const int degree = basis_.max_degree();
  tabs_.resize(dim);
  weights_.resize(dim);
  for (int k = 1; k <= dim; ++k) {
    const auto& rule = cached_simplex_rule(dim - k, degree);
    for (const auto& local : local_subsimplices(dim, k)) {
      std::vector<BaryPoint> pts;
      std::vector<double> w;
      embed_facet_rule(rule, local, dim, pts, w);
      tabs_[k - 1].emplace_back(basis_, std::move(pts), max_order);
      weights_[k - 1].push_back(std::move(w));
    }
  }
}

const BasisTabulation& ReferenceElement::entity_tabulation(int codim, int local) const {
  return tabs_.at(codim - 1).at(local);
}

const std::vector<double>& ReferenceElement::entity_weights(int codim, int local) const {
  return weights_.at(codim - 1).at(local);
}

// ---------------------------------------------------------------------------
// DOF application

std::vector<Vec> dof_directions(const DofFunctional& d, const CellFrames& frames) {
  const auto& frame = frames.get(d.codim, d.local_entity);
  std::vector<Vec> dirs;
  for (int i = 0; i < d.alpha.size(); ++i)
    for (int e = 0; e < d.alpha[i]; ++e) dirs.push_back(frame.normals.at(i));
  return dirs;
}

namespace {

std::vector<Vec> entity_vertices(const DofFunctional& d, const SimplexGeometry& cell) {
  std::vector<Vec> pts;
  for (int lv : local_subsimplices(cell.dim(), d.codim).at(d.local_entity)) pts.push_back(cell.vertex(lv));
  return pts;
}

}  // namespace

double apply_dof(const DofFunctional& d, const BarycentricPolynomial& p, const SimplexGeometry& cell,
                 const CellFrames& frames) {
  BarycentricPolynomial dp = p;
  for (const Vec& dir : dof_directions(d, frames)) dp = differentiate(dp, dir, cell);
  const auto& local = local_subsimplices(cell.dim(), d.codim).at(d.local_entity);
  if (local.size() == 1) {
    BaryPoint l = BaryPoint::Zero(cell.dim() + 1);
    l[local[0]] = 1.0;
    return dp.evaluate(l);
  }
  const auto& rule = cached_simplex_rule(static_cast<int>(local.size()) - 1, std::max(p.degree(), 1));
  std::vector<BaryPoint> pts;
  std::vector<double> w;
  embed_facet_rule(rule, local, cell.dim(), pts, w);
  double acc = 0.0;
  for (std::size_t q = 0; q < pts.size(); ++q) acc += w[q] * dp.evaluate(pts[q]);
  return acc;
}

double apply_dof(const DofFunctional& d, const AnalyticFunction& f, const SimplexGeometry& cell,
                 const CellFrames& frames, int quad_degree) {
  const auto dirs = dof_directions(d, frames);
  const auto pts = entity_vertices(d, cell);
  if (pts.size() == 1) return directional_derivative(f, dirs, pts[0]);
  const auto& rule = cached_simplex_rule(static_cast<int>(pts.size()) - 1, quad_degree);
  return facet_average(rule, [&](const Vec& x) { return directional_derivative(f, dirs, x); }, pts);
}

Eigen::MatrixXd dof_matrix(const ReferenceElement& ref, const SimplexGeometry& cell, const CellFrames& frames) {
  const std::size_t J = ref.size();
  Eigen::MatrixXd D(J, J);
  std::vector<double> vals;
  for (std::size_t i = 0; i < J; ++i) {
    const auto& d = ref.dofs()[i];
    const auto& tab = ref.entity_tabulation(d.codim, d.local_entity);
    const auto& w = ref.entity_weights(d.codim, d.local_entity);
    const auto dirs = dof_directions(d, frames);
    directional_values(tab, cell.barycentric_gradients(), dirs, vals);
    for (std::size_t j = 0; j < J; ++j) {
      double acc = 0.0;
      for (std::size_t q = 0; q < w.size(); ++q) acc += w[q] * vals[q * J + j];
      D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
    }
  }
  return D;
}

// ---------------------------------------------------------------------------
// FiniteElement

FiniteElement::FiniteElement(const ReferenceElement& ref, SimplexGeometry cell, CellFrames frames, int cell_id)
    : ref_(&ref), cell_id_(cell_id), geometry_(std::move(cell)), frames_(std::move(frames)) {
  dof_matrix_ = hmnc::dof_matrix(ref, geometry_, frames_);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(dof_matrix_);
  nodal_ = lu.inverse();
  // Residual check instead of an SVD per cell; D N = I fails loudly when D is singular.
  const double residual =
      (dof_matrix_ * nodal_ - Eigen::MatrixXd::Identity(dof_matrix_.rows(), dof_matrix_.cols())).norm();
  if (!std::isfinite(residual) || residual > 1e-6) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dof_matrix_);
    const auto& s = svd.singularValues();
    const double cond = s[s.size() - 1] > 0 ? s[0] / s[s.size() - 1] : INFINITY;
    std::ostringstream os;
    os << "singular DOF matrix on cell " << cell_id << " (condition estimate " << cond << ")";
    throw SingularDofMatrix(os.str(), cond);
  }
}

BarycentricPolynomial FiniteElement::basis_combination(const Eigen::VectorXd& coeffs) const {
  BarycentricPolynomial p(ref_->dim() + 1);
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) p += ref_->basis().functions[i] * coeffs[i];
  return p;
}

BarycentricPolynomial FiniteElement::nodal_function(int j) const { return basis_combination(nodal_.col(j)); }

Eigen::VectorXd FiniteElement::interpolate_dofs(const AnalyticFunction& f, int quad_degree) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i)
    v[static_cast<Eigen::Index>(i)] = apply_dof(ref_->dofs()[i], f, geometry_, frames_, quad_degree);
  return v;
}

FiniteElement nodal_basis(Variant variant, const SimplexGeometry& cell, const CellFrames& frames) {
  return FiniteElement(ReferenceElement::get(variant, cell.dim()), cell, frames);
}

Eigen::VectorXd local_interpolate(const FiniteElement& element, const AnalyticFunction& f, int quad_degree) {
  return element.nodal_coefficients() * element.interpolate_dofs(f, quad_degree);
}

// ---------------------------------------------------------------------------
// Unisolvency lab

std::size_t standard_dimension(int n) {
  long c = 1;
  for (int i = 1; i <= n; ++i) c = c * (n + 1 + i) / i;  // C(2n+1, n)
  return static_cast<std::size_t>(c + n);
}

std::vector<Vec> reference_simplex(int n) {
  std::vector<Vec> v;
  v.push_back(Vec::Zero(n));
  for (int i = 0; i < n; ++i) v.push_back(Vec::Unit(n, i));
  return v;
}

std::vector<Vec> random_shape_regular_simplex(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  while (true) {
    std::vector<Vec> v(n + 1, Vec(n));
    for (auto& p : v)
      for (int i = 0; i < n; ++i) p[i] = u(rng);
    double diam = 0.0;
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) diam = std::max(diam, (v[i] - v[j]).norm());
    Eigen::MatrixXd jac(n, n);
    for (int j = 0; j < n; ++j) jac.col(j) = v[j + 1] - v[0];
    const double quality = std::abs(jac.determinant()) / std::pow(diam, n);
    if (quality >= 0.2) return v;
  }
}

bool UnisolvencyReport::pass() const {
  if (!dimensions_match() || trials.empty()) return false;
  for (const auto& t : trials)
    if (!t.pass) return false;
  return true;
}

UnisolvencyReport check_unisolvency(int n, Variant variant, int trials, std::uint64_t seed) {
  const auto& ref = ReferenceElement::get(variant, n);
  UnisolvencyReport report;
  report.n = n;
  report.variant = variant;
  report.space_dimension = ref.basis().size();
  report.dof_count = ref.size();
  std::mt19937_64 rng(seed);
  std::vector<int> ids(n + 1);
  for (int i = 0; i <= n; ++i) ids[i] = i;
  for (int t = 0; t <= trials; ++t) {
    const auto verts = t == 0 ? reference_simplex(n) : random_shape_regular_simplex(n, rng);
    SimplexGeometry cell(verts);
    const Eigen::MatrixXd D = dof_matrix(ref, cell, simplex_frames(cell, ids));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
    const auto& s = svd.singularValues();
    UnisolvencyTrial tr;
    tr.trial = t;
    tr.sigma_max = s[0];
    tr.sigma_min = s[s.size() - 1];
    tr.condition = tr.sigma_min > 0 ? tr.sigma_max / tr.sigma_min : INFINITY;
    tr.pass = D.rows() == D.cols() && tr.sigma_min > kUnisolvencyTolerance * tr.sigma_max;
    report.trials.push_back(tr);
  }
  return report;
}

}  // namespace hmnc
