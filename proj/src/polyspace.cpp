#include "hmnc/polyspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hmnc/kernels.hpp"
#include "hmnc/quadrature.hpp"

namespace hmnc {

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex::MultiIndex(std::initializer_list<int> exps) : size_(static_cast<std::uint8_t>(exps.size())) {
  if (exps.size() > kCapacity) throw std::invalid_argument("MultiIndex: too many entries");
  int i = 0;
  for (int e : exps) {
    if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    e_[i++] = static_cast<std::uint8_t>(e);
  }
}

int MultiIndex::order() const {
  int s = 0;
  for (int i = 0; i < size_; ++i) s += e_[i];
  return s;
}

bool MultiIndex::in_leading(int k) const {
  for (int i = k; i < size_; ++i)
    if (e_[i] != 0) return false;
  return true;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int i = 0; i < size_; ++i)
    for (int j = 2; j <= e_[i]; ++j) f *= j;
  return f;
}

double MultiIndex::multinomial() const {
  double f = 1.0;
  for (int j = 2; j <= order(); ++j) f *= j;
  return f / factorial();
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < size_; ++i) os << (i ? "," : "") << int(e_[i]);
  os << ')';
  return os.str();
}

namespace {

void fill_indices(MultiIndex& cur, int pos, int remaining, std::vector<MultiIndex>& out) {
  if (pos == cur.size() - 1) {
    cur.set(pos, remaining);
    out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur.set(pos, e);
    fill_indices(cur, pos + 1, remaining - e, out);
  }
  cur.set(pos, 0);
}

}  // namespace

std::vector<MultiIndex> multi_indices(int size, int order) {
  if (size < 1 || size > MultiIndex::kCapacity) throw std::invalid_argument("multi_indices: bad size");
  std::vector<MultiIndex> out;
  MultiIndex cur(size);
  fill_indices(cur, 0, order, out);
  return out;
}

int multi_index_rank(const MultiIndex& alpha) {
  // Count indices preceding alpha in graded-lex order of the same total order.
  auto binom = [](int n, int k) {
    if (k < 0 || n < k) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
  };
  int rank = 0;
  int remaining = alpha.order();
  const int size = alpha.size();
  for (int pos = 0; pos < size - 1; ++pos) {
    // Entries larger than alpha[pos] at this position come first.
    for (int e = remaining; e > alpha[pos]; --e) {
      const int rest = remaining - e;
      const int slots = size - pos - 1;
      rank += binom(rest + slots - 1, slots - 1);
    }
    remaining -= alpha[pos];
  }
  return rank;
}

MultiIndex count_tuple(std::span<const int> axes, int size) {
  MultiIndex m(size);
  for (int a : axes) m.increment(a);
  return m;
}

// ---------------------------------------------------------------------------
// BarycentricPolynomial

BarycentricPolynomial BarycentricPolynomial::constant(int nvars, double c) {
  BarycentricPolynomial p(nvars);
  p.add_term(MultiIndex(nvars), c);
  return p;
}

BarycentricPolynomial BarycentricPolynomial::lambda(int nvars, int i) {
  MultiIndex b(nvars);
  b.set(i, 1);
  return monomial(b);
}

BarycentricPolynomial BarycentricPolynomial::monomial(const MultiIndex& beta, double c) {
  BarycentricPolynomial p(beta.size());
  p.add_term(beta, c);
  return p;
}

BarycentricPolynomial BarycentricPolynomial::bubble(int nvars) {
  MultiIndex b(nvars);
  for (int i = 0; i < nvars; ++i) b.set(i, 1);
  return monomial(b);
}

int BarycentricPolynomial::degree() const {
  int d = 0;
  for (const auto& [beta, c] : terms_) d = std::max(d, beta.order());
  return d;
}

void BarycentricPolynomial::add_term(const MultiIndex& beta, double c) {
  if (beta.size() != nvars_) throw std::invalid_argument("BarycentricPolynomial: variable count mismatch");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(beta, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

BarycentricPolynomial& BarycentricPolynomial::operator+=(const BarycentricPolynomial& o) {
  for (const auto& [beta, c] : o.terms_) add_term(beta, c);
  return *this;
}

BarycentricPolynomial& BarycentricPolynomial::operator-=(const BarycentricPolynomial& o) {
  for (const auto& [beta, c] : o.terms_) add_term(beta, -c);
  return *this;
}

BarycentricPolynomial& BarycentricPolynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [beta, c] : terms_) c *= s;
  return *this;
}

BarycentricPolynomial operator*(const BarycentricPolynomial& a, const BarycentricPolynomial& b) {
  if (a.nvars_ != b.nvars_) throw std::invalid_argument("BarycentricPolynomial: variable count mismatch");
  BarycentricPolynomial r(a.nvars_);
  for (const auto& [ba, ca] : a.terms_)
    for (const auto& [bb, cb] : b.terms_) {
      MultiIndex m = ba;
      for (int i = 0; i < m.size(); ++i) m.increment(i, bb[i]);
      r.add_term(m, ca * cb);
    }
  return r;
}

BarycentricPolynomial BarycentricPolynomial::partial(int j) const {
  BarycentricPolynomial r(nvars_);
  for (const auto& [beta, c] : terms_) {
    if (beta[j] == 0) continue;
    MultiIndex m = beta;
    m.set(j, beta[j] - 1);
    r.add_term(m, c * beta[j]);
  }
  return r;
}

double BarycentricPolynomial::evaluate(const BaryPoint& lambda) const {
  double acc = 0.0;
  for (const auto& [beta, c] : terms_) {
    double t = c;
    for (int i = 0; i < nvars_; ++i)
      for (int e = 0; e < beta[i]; ++e) t *= lambda[i];
    acc += t;
  }
  return acc;
}

BarycentricPolynomial differentiate(const BarycentricPolynomial& p, const Vec& direction,
                                    const SimplexGeometry& cell) {
  if (p.num_vars() != cell.dim() + 1 || direction.size() != cell.dim())
    throw std::invalid_argument("differentiate: dimension mismatch");
  const auto& g = cell.barycentric_gradients();
  BarycentricPolynomial r(p.num_vars());
  for (int j = 0; j < p.num_vars(); ++j) {
    const double s = g.row(j).dot(direction);
    if (s != 0.0) r += p.partial(j) * s;
  }
  return r;
}

double evaluate_cartesian_derivative(const BarycentricPolynomial& p, const MultiIndex& alpha,
                                     const SimplexGeometry& cell, const BaryPoint& lambda) {
  BarycentricPolynomial d = p;
  for (int i = 0; i < alpha.size(); ++i)
    for (int e = 0; e < alpha[i]; ++e) d = differentiate(d, Vec::Unit(cell.dim(), i), cell);
  return d.evaluate(lambda);
}

// ---------------------------------------------------------------------------
// Bases

std::string to_string(Variant v) { return v == Variant::Standard ? "standard" : "robust"; }

int ShapeSpaceBasis::max_degree() const {
  int d = 0;
  for (const auto& f : functions) d = std::max(d, f.degree());
  return d;
}

ShapeSpaceBasis standard_basis(int n) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("standard_basis: n must be 1..3");
  ShapeSpaceBasis b{Variant::Standard, n, {}};
  const int nv = n + 1;
  for (int d = 0; d <= n + 1; ++d) {
    for (const auto& reduced : multi_indices(n, d)) {
      MultiIndex beta(nv);
      for (int i = 0; i < n; ++i) beta.set(i, reduced[i]);
      b.functions.push_back(BarycentricPolynomial::monomial(beta));
    }
  }
  const auto q = BarycentricPolynomial::bubble(nv);
  for (int j = 0; j < n; ++j) b.functions.push_back(q * BarycentricPolynomial::lambda(nv, j));
  return b;
}

ShapeSpaceBasis robust_basis() {
  ShapeSpaceBasis b{Variant::Robust, 2, {}};
  for (int d = 0; d <= 3; ++d)
    for (const auto& reduced : multi_indices(2, d))
      b.functions.push_back(BarycentricPolynomial::monomial(MultiIndex{reduced[0], reduced[1], 0}));
  const auto q = BarycentricPolynomial::bubble(3);
  const auto q2 = q * q;
  b.functions.push_back(q * BarycentricPolynomial::lambda(3, 0));
  b.functions.push_back(q * BarycentricPolynomial::lambda(3, 1));
  b.functions.push_back(q2);
  b.functions.push_back(q2 * BarycentricPolynomial::lambda(3, 0));
  b.functions.push_back(q2 * BarycentricPolynomial::lambda(3, 1));
  return b;
}

ShapeSpaceBasis make_basis(Variant v, int n) {
  if (v == Variant::Robust) {
    if (n != 2) throw std::invalid_argument("robust element is two-dimensional only");
    return robust_basis();
  }
  return standard_basis(n);
}

Eigen::MatrixXd gram_matrix(const ShapeSpaceBasis& basis, const SimplexGeometry& cell) {
  const auto& rule = cached_simplex_rule(cell.dim(), std::min(2 * basis.max_degree(), kMaxQuadratureDegree));
  double fact = 1.0;
  for (int i = 2; i <= cell.dim(); ++i) fact *= i;
  const double jac = cell.volume() * fact;
  const std::size_t J = basis.size();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(J, J);
  Eigen::VectorXd vals(J);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    for (std::size_t j = 0; j < J; ++j) vals[j] = basis.functions[j].evaluate(rule.points[q]);
    g += (jac * rule.weights[q]) * vals * vals.transpose();
  }
  return g;
}

// ---------------------------------------------------------------------------
// Tabulation

BasisTabulation::BasisTabulation(const ShapeSpaceBasis& basis, std::vector<BaryPoint> points, int max_order)
    : nfun_(basis.size()), nvars_(basis.dim + 1), max_order_(max_order), points_(std::move(points)) {
  const std::size_t npts = points_.size();
  data_.resize(max_order + 1);
  for (int r = 0; r <= max_order; ++r) {
    const auto gammas = multi_indices(nvars_, r);
    data_[r].resize(gammas.size());
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      auto& block = data_[r][g];
      block.assign(npts * nfun_, 0.0);
      for (std::size_t j = 0; j < nfun_; ++j) {
        BarycentricPolynomial d = basis.functions[j];
        for (int i = 0; i < nvars_; ++i)
          for (int e = 0; e < gammas[g][i]; ++e) d = d.partial(i);
        if (d.is_zero()) continue;
        for (std::size_t q = 0; q < npts; ++q) block[q * nfun_ + j] = d.evaluate(points_[q]);
      }
    }
  }
}

std::span<const double> BasisTabulation::values(int order, int rank) const {
  if (order > max_order_) throw std::out_of_range("BasisTabulation: derivative order not tabulated");
  return data_[order].at(rank);
}

std::span<const double> BasisTabulation::values(const MultiIndex& gamma) const {
  return values(gamma.order(), multi_index_rank(gamma));
}

std::vector<std::pair<int, double>> directional_expansion(const BaryGradients& gradients,
                                                          std::span<const Vec> directions) {
  const int nv = static_cast<int>(gradients.rows());
  const int r = static_cast<int>(directions.size());
  // s(l, j) = grad(lambda_j) . direction_l
  std::vector<double> s(static_cast<std::size_t>(r) * nv);
  for (int l = 0; l < r; ++l)
    for (int j = 0; j < nv; ++j) s[l * nv + j] = gradients.row(j).dot(directions[l]);
  std::vector<double> coeff(multi_indices(nv, r).size(), 0.0);
  std::vector<int> tuple(r, 0);
  while (true) {
    double c = 1.0;
    for (int l = 0; l < r; ++l) c *= s[l * nv + tuple[l]];
    if (c != 0.0) coeff[multi_index_rank(count_tuple(tuple, nv))] += c;
    int pos = 0;
    while (pos < r && ++tuple[pos] == nv) tuple[pos++] = 0;
    if (pos == r) break;
  }
  std::vector<std::pair<int, double>> out;
  for (std::size_t g = 0; g < coeff.size(); ++g)
    if (coeff[g] != 0.0) out.emplace_back(static_cast<int>(g), coeff[g]);
  return out;
}

std::vector<Vec> cartesian_directions(const MultiIndex& alpha) {
  std::vector<Vec> dirs;
  for (int i = 0; i < alpha.size(); ++i)
    for (int e = 0; e < alpha[i]; ++e) dirs.push_back(Vec::Unit(alpha.size(), i));
  return dirs;
}

void directional_values(const BasisTabulation& tab, const BaryGradients& gradients,
                        std::span<const Vec> directions, std::vector<double>& out) {
  const std::size_t n = tab.num_points() * tab.num_functions();
  out.assign(n, 0.0);
  const int r = static_cast<int>(directions.size());
  const auto& k = kernels::active();
  for (const auto& [rank, c] : directional_expansion(gradients, directions)) {
    k.axpy(c, tab.values(r, rank).data(), out.data(), n);
  }
}

}  // namespace hmnc
