#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "hmnc/polyspace.hpp"
#include "hmnc/types.hpp"

namespace hmnc {

/// Smooth scalar field with closed-form Cartesian partial derivatives.
class AnalyticFunction {
 public:
  virtual ~AnalyticFunction() = default;

  virtual int dim() const = 0;
  /// Highest derivative order available.
  virtual int max_order() const = 0;
  /// d^alpha f(x); alpha has dim() entries.
  virtual double derivative(const MultiIndex& alpha, const Vec& x) const = 0;

  double value(const Vec& x) const { return derivative(MultiIndex(dim()), x); }
};

/// Thrown when a requested derivative order is unavailable at a point.
class DerivativeUnavailable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// d_{dir_1} ... d_{dir_r} f(x) = sum over ordered axis tuples of
/// prod_l dir_l[i_l] * d^{count(i)} f(x).
double directional_derivative(const AnalyticFunction& f, std::span<const Vec> directions, const Vec& x);

/// A barycentric polynomial on a fixed cell viewed as a function of x.
class PolynomialOnCell final : public AnalyticFunction {
 public:
  PolynomialOnCell(BarycentricPolynomial p, SimplexGeometry cell) : p_(std::move(p)), cell_(std::move(cell)) {}

  int dim() const override { return cell_.dim(); }
  int max_order() const override { return 64; }
  double derivative(const MultiIndex& alpha, const Vec& x) const override {
    return evaluate_cartesian_derivative(p_, alpha, cell_, cell_.to_barycentric(x));
  }

 private:
  BarycentricPolynomial p_;
  SimplexGeometry cell_;
};

}  // namespace hmnc
