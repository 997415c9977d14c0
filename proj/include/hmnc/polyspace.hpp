#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmnc/geometry.hpp"
#include "hmnc/types.hpp"

namespace hmnc {

/// Exponent vector of length <= 4 (barycentric or Cartesian).
class MultiIndex {
 public:
  static constexpr int kCapacity = kMaxDim + 1;

  MultiIndex() = default;
  explicit MultiIndex(int size) : size_(static_cast<std::uint8_t>(size)) {}
  MultiIndex(std::initializer_list<int> exps);

  int size() const { return size_; }
  int operator[](int i) const { return e_[i]; }
  void set(int i, int v) { e_[i] = static_cast<std::uint8_t>(v); }
  void increment(int i, int by = 1) { e_[i] = static_cast<std::uint8_t>(e_[i] + by); }
  int order() const;

  /// Membership in A_k: all entries beyond the first k vanish.
  bool in_leading(int k) const;

  /// alpha! = prod alpha_i!
  double factorial() const;
  /// |alpha|! / alpha!: number of ordered derivative tuples with this count.
  double multinomial() const;

  std::string to_string() const;

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::array<std::uint8_t, kCapacity> e_{};
  std::uint8_t size_ = 0;
};

/// All multi-indices of the given length with |alpha| == order, graded
/// lexicographic (first entry largest first).
std::vector<MultiIndex> multi_indices(int size, int order);

/// Position of alpha in multi_indices(alpha.size(), alpha.order()).
int multi_index_rank(const MultiIndex& alpha);

/// Multi-index counting the entries of an ordered tuple of axis ids.
MultiIndex count_tuple(std::span<const int> axes, int size);

/// Polynomial in barycentric coordinates lambda_0..lambda_n, stored as a sparse
/// map from exponent vectors to coefficients. The lambdas are treated as
/// independent variables; the identity sum lambda_i = 1 is never applied, so
/// distinct maps may represent the same function.
class BarycentricPolynomial {
 public:
  explicit BarycentricPolynomial(int nvars = 3) : nvars_(nvars) {}

  static BarycentricPolynomial constant(int nvars, double c);
  static BarycentricPolynomial lambda(int nvars, int i);
  static BarycentricPolynomial monomial(const MultiIndex& beta, double c = 1.0);
  /// q_T = lambda_0 * ... * lambda_n
  static BarycentricPolynomial bubble(int nvars);

  int num_vars() const { return nvars_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const std::map<MultiIndex, double>& terms() const { return terms_; }

  void add_term(const MultiIndex& beta, double c);

  BarycentricPolynomial& operator+=(const BarycentricPolynomial& o);
  BarycentricPolynomial& operator-=(const BarycentricPolynomial& o);
  BarycentricPolynomial& operator*=(double s);
  friend BarycentricPolynomial operator+(BarycentricPolynomial a, const BarycentricPolynomial& b) { return a += b; }
  friend BarycentricPolynomial operator-(BarycentricPolynomial a, const BarycentricPolynomial& b) { return a -= b; }
  friend BarycentricPolynomial operator*(BarycentricPolynomial a, double s) { return a *= s; }
  friend BarycentricPolynomial operator*(double s, BarycentricPolynomial a) { return a *= s; }
  friend BarycentricPolynomial operator*(const BarycentricPolynomial& a, const BarycentricPolynomial& b);

  /// d/d(lambda_j), lambdas independent.
  BarycentricPolynomial partial(int j) const;

  double evaluate(const BaryPoint& lambda) const;

 private:
  int nvars_;
  std::map<MultiIndex, double> terms_;
};

/// Directional derivative along `direction` on an affine cell: sum_j
/// (grad lambda_j . direction) d/d(lambda_j). Throws on dimension mismatch.
BarycentricPolynomial differentiate(const BarycentricPolynomial& p, const Vec& direction,
                                    const SimplexGeometry& cell);

inline double evaluate(const BarycentricPolynomial& p, const BaryPoint& lambda) { return p.evaluate(lambda); }

/// d^alpha p / dx^alpha (alpha over Cartesian axes) at a barycentric point.
double evaluate_cartesian_derivative(const BarycentricPolynomial& p, const MultiIndex& alpha,
                                     const SimplexGeometry& cell, const BaryPoint& lambda);

enum class Variant {
  Standard,  ///< P_{n+1} + q_T P_1, n = 1..3
  Robust,    ///< P_3 + q_T P_1 + q_T^2 P_1, n = 2
};

std::string to_string(Variant v);

struct ShapeSpaceBasis {
  Variant variant;
  int dim;
  std::vector<BarycentricPolynomial> functions;

  std::size_t size() const { return functions.size(); }
  int max_degree() const;
};

/// Basis of P_{n+1}(T) + q_T P_1(T): monomials in lambda_0..lambda_{n-1} of
/// degree <= n+1 (graded), then q_T * lambda_j for j < n. Size C(2n+1,n)+n.
ShapeSpaceBasis standard_basis(int n);

/// Basis of P_3 + q_T P_1 + q_T^2 P_1 on triangles (15 functions).
ShapeSpaceBasis robust_basis();

ShapeSpaceBasis make_basis(Variant v, int n);

/// Quadrature Gram matrix (int_T b_i b_j) of a basis on the given cell.
Eigen::MatrixXd gram_matrix(const ShapeSpaceBasis& basis, const SimplexGeometry& cell);

/// Values of all lambda-derivatives of every basis function at a fixed set of
/// barycentric points. values(gamma) is an npoints x J row-major block with
/// entry (q, j) = d^gamma b_j (lambda_q), gamma a multiset of lambda indices
/// given as a barycentric MultiIndex.
class BasisTabulation {
 public:
  BasisTabulation() = default;
  BasisTabulation(const ShapeSpaceBasis& basis, std::vector<BaryPoint> points, int max_order);

  std::size_t num_points() const { return points_.size(); }
  std::size_t num_functions() const { return nfun_; }
  int max_order() const { return max_order_; }
  const std::vector<BaryPoint>& points() const { return points_; }

  std::span<const double> values(const MultiIndex& gamma) const;
  std::span<const double> values(int order, int rank) const;

 private:
  std::size_t nfun_ = 0;
  int nvars_ = 0;
  int max_order_ = 0;
  std::vector<BaryPoint> points_;
  std::vector<std::vector<std::vector<double>>> data_;  // [order][rank] -> npts * J
};

/// Expansion of d_{dir_1} ... d_{dir_r} on a cell in lambda-derivatives:
/// pairs (rank of gamma in multi_indices(n+1, r), coefficient).
std::vector<std::pair<int, double>> directional_expansion(const BaryGradients& gradients,
                                                          std::span<const Vec> directions);

/// Directions e_i repeated alpha_i times.
std::vector<Vec> cartesian_directions(const MultiIndex& alpha);

/// out (npoints x J, row-major) = values of d_{dir_1}...d_{dir_r} b_j at the
/// tabulation points.
void directional_values(const BasisTabulation& tab, const BaryGradients& gradients,
                        std::span<const Vec> directions, std::vector<double>& out);

}  // namespace hmnc
