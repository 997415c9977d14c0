#include "hmnc/quadrature.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hmnc {

void gauss_legendre(int npoints, std::vector<double>& nodes, std::vector<double>& weights) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  nodes.assign(npoints, 0.0);
  weights.assign(npoints, 0.0);
  const int n = npoints;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1]; x is the larger root of the symmetric pair.
    nodes[i] = 0.5 * (1.0 - x);
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.5;
}

namespace {

// Cartesian points/weights of the collapsed rule on conv{0, e_1..e_d}.
void collapsed_rule(int dim, int degree, std::vector<std::array<double, 3>>& pts, std::vector<double>& wts) {
  if (dim == 0) {
    pts = {{0.0, 0.0, 0.0}};
    wts = {1.0};
    return;
  }
  std::vector<std::array<double, 3>> inner_pts;
  std::vector<double> inner_wts;
  collapsed_rule(dim - 1, degree, inner_pts, inner_wts);
  // Last coordinate t with Jacobian (1-t)^(dim-1): degree + dim - 1 in t.
  const int m = (degree + dim) / 2 + 1;
  std::vector<double> t, wt;
  gauss_legendre(m, t, wt);
  pts.clear();
  wts.clear();
  for (std::size_t a = 0; a < inner_pts.size(); ++a) {
    for (int b = 0; b < m; ++b) {
      std::array<double, 3> p{0.0, 0.0, 0.0};
      for (int i = 0; i < dim - 1; ++i) p[i] = (1.0 - t[b]) * inner_pts[a][i];
      p[dim - 1] = t[b];
      pts.push_back(p);
      wts.push_back(inner_wts[a] * wt[b] * std::pow(1.0 - t[b], dim - 1));
    }
  }
}

}  // namespace

QuadratureRule simplex_rule(int dim, int degree) {
  if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("simplex_rule: dimension must be 0..3");
  if (degree < 0 || degree > kMaxQuadratureDegree)
    throw std::invalid_argument("simplex_rule: unsupported degree " + std::to_string(degree));
  std::vector<std::array<double, 3>> pts;
  std::vector<double> wts;
  collapsed_rule(dim, degree, pts, wts);
  QuadratureRule rule;
  rule.dim = dim;
  rule.degree = degree;
  rule.weights = std::move(wts);
  rule.points.reserve(pts.size());
  for (const auto& p : pts) {
    BaryPoint l(dim + 1);
    double rest = 1.0;
    for (int i = 0; i < dim; ++i) {
      l[i + 1] = p[i];
      rest -= p[i];
    }
    l[0] = rest;
    rule.points.push_back(l);
  }
  return rule;
}

const QuadratureRule& cached_simplex_rule(int dim, int degree) {
  static std::mutex mutex;
  static std::array<std::array<std::unique_ptr<QuadratureRule>, kMaxQuadratureDegree + 1>, kMaxDim + 1> cache;
  if (dim < 0 || dim > kMaxDim || degree < 0 || degree > kMaxQuadratureDegree) {
    simplex_rule(dim, degree);  // throws with the proper message
  }
  std::lock_guard lock(mutex);
  auto& slot = cache[dim][degree];
  if (!slot) slot = std::make_unique<QuadratureRule>(simplex_rule(dim, degree));
  return *slot;
}

double integrate_on_cell(const QuadratureRule& rule, const ScalarField& f, const SimplexGeometry& cell) {
  if (rule.dim != cell.dim()) throw std::invalid_argument("integrate_on_cell: rule/cell dimension mismatch");
  double fact = 1.0;
  for (int i = 2; i <= cell.dim(); ++i) fact *= i;
  const double jac = cell.volume() * fact;
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) acc += rule.weights[q] * f(cell.to_cartesian(rule.points[q]));
  return jac * acc;
}

double integrate_on_facet(const QuadratureRule& rule, const ScalarField& f, std::span<const Vec> facet) {
  if (static_cast<int>(facet.size()) != rule.dim + 1)
    throw std::invalid_argument("integrate_on_facet: rule/facet dimension mismatch");
  double fact = 1.0;
  for (int i = 2; i <= rule.dim; ++i) fact *= i;
  const double jac = subsimplex_measure(facet) * fact;
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    Vec x = Vec::Zero(facet[0].size());
    for (int i = 0; i <= rule.dim; ++i) x += rule.points[q][i] * facet[i];
    acc += rule.weights[q] * f(x);
  }
  return jac * acc;
}

double facet_average(const QuadratureRule& rule, const ScalarField& f, std::span<const Vec> facet) {
  if (facet.size() == 1) return f(facet[0]);
  return integrate_on_facet(rule, f, facet) / subsimplex_measure(facet);
}

void embed_facet_rule(const QuadratureRule& facet_rule, std::span<const int> local_vertices, int cell_dim,
                      std::vector<BaryPoint>& points, std::vector<double>& weights) {
  if (static_cast<int>(local_vertices.size()) != facet_rule.dim + 1)
    throw std::invalid_argument("embed_facet_rule: rule/facet dimension mismatch");
  points.clear();
  weights.clear();
  double total = 0.0;
  for (double w : facet_rule.weights) total += w;
  for (std::size_t q = 0; q < facet_rule.size(); ++q) {
    BaryPoint l = BaryPoint::Zero(cell_dim + 1);
    for (std::size_t i = 0; i < local_vertices.size(); ++i) l[local_vertices[i]] = facet_rule.points[q][i];
    points.push_back(l);
    weights.push_back(facet_rule.weights[q] / total);
  }
}

}  // namespace hmnc
