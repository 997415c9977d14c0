#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>
#include <random>

#include "hmnc/problems.hpp"
#include "support.hpp"

using namespace hmnc;
using namespace hmnc::testing;
using std::numbers::pi;

namespace {

void check_fd_consistency(const AnalyticFunction& f, const std::vector<Vec>& points, int max_order) {
  const double h = 1e-5;
  for (const Vec& x : points)
    for (int o = 0; o < max_order; ++o)
      for (const auto& a : multi_indices(2, o))
        for (int i = 0; i < 2; ++i) {
          MultiIndex up = a;
          up.increment(i);
          Vec xp = x, xm = x;
          xp[i] += h;
          xm[i] -= h;
          const double fd = (f.derivative(a, xp) - f.derivative(a, xm)) / (2 * h);
          const double ex = f.derivative(up, x);
          INFO("alpha " << up.to_string() << " at " << x.transpose());
          CHECK(std::abs(fd - ex) <= 1e-5 * (1.0 + std::abs(ex)));
        }
}

double laplacian(const AnalyticFunction& f, const Vec& x) {
  return f.derivative(MultiIndex{2, 0}, x) + f.derivative(MultiIndex{0, 2}, x);
}

}  // namespace

TEST_CASE("exact solutions: derivatives agree with finite differences") {
  check_fd_consistency(ExpSine(), {make_vec({0.3, 0.7}), make_vec({0.81, 0.12})}, 6);
  check_fd_consistency(CosineProduct(), {make_vec({0.3, 0.7}), make_vec({0.55, 0.2})}, 6);
  // Points in all three quadrants of the L-shape, away from the corner.
  check_fd_consistency(CornerPower(2.5), {make_vec({0.5, 0.4}), make_vec({-0.6, 0.3}), make_vec({-0.4, -0.7})}, 6);
}

TEST_CASE("exact solutions: closed-form spot values") {
  const ExpSine e;
  CHECK(e.derivative(MultiIndex{1, 2}, make_vec({0.2, 0.9})) ==
        doctest::Approx(pi * pi * pi * std::exp(pi * 0.9) * std::cos(pi * 0.2)));
}

// Only the multinomially weighted operator is a power of the Laplacian; the
// unweighted one does not annihilate harmonic functions for m >= 2.
TEST_CASE("harmonic solutions make the polyharmonic operators vanish") {
  for (const Vec& x : {make_vec({0.3, 0.4}), make_vec({-0.5, -0.5}), make_vec({-0.2, 0.8})}) {
    CHECK(std::abs(laplacian(CornerPower(), x)) < 1e-10);
    for (int m = 1; m <= 3; ++m) {
      if (x[0] >= 0.0 && x[1] >= 0.0) CHECK(std::abs(form_operator(ExpSine(), m, FormConvention::Frobenius, x)) < 1e-7);
      CHECK(std::abs(form_operator(CornerPower(), m, FormConvention::Frobenius, x)) < 1e-7);
    }
    CHECK(std::abs(form_operator(CornerPower(), 1, FormConvention::MultiIndex, x)) < 1e-10);
    CHECK(std::abs(form_operator(CornerPower(), 2, FormConvention::MultiIndex, x)) > 1e-3);
  }
}

TEST_CASE("strong operators of the cosine product") {
  const CosineProduct u;
  const Vec x = make_vec({0.21, 0.37});
  const double p6 = std::pow(pi, 6);
  CHECK(form_operator(u, 3, FormConvention::Frobenius, x) == doctest::Approx(8 * p6 * u.value(x)));
  CHECK(form_operator(u, 3, FormConvention::MultiIndex, x) == doctest::Approx(4 * p6 * u.value(x)));
  CHECK(form_operator(u, 1, FormConvention::Frobenius, x) == doctest::Approx(2 * pi * pi * u.value(x)));
  CHECK(-laplacian(u, x) == doctest::Approx(2 * pi * pi * u.value(x)));
}

TEST_CASE("corner power: branch, boundary values and undefined derivatives at the corner") {
  const CornerPower u;
  const double r = 0.5;
  // theta = pi/2 on the positive y-axis, 3 pi / 2 on the negative y-axis.
  CHECK(u.value(make_vec({0.0, r})) == doctest::Approx(std::pow(r, 2.5) * std::sin(2.5 * pi / 2)));
  CHECK(u.value(make_vec({0.0, -r})) == doctest::Approx(std::pow(r, 2.5) * std::sin(2.5 * 1.5 * pi)));
  CHECK(std::abs(u.value(make_vec({r, 0.0}))) < 1e-15);
  CHECK(u.value(make_vec({0.0, 0.0})) == 0.0);
  CHECK(u.derivative(MultiIndex{1, 0}, make_vec({0.0, 0.0})) == 0.0);
  CHECK_THROWS_AS(u.derivative(MultiIndex{2, 0}, make_vec({0.0, 0.0})), DerivativeUnavailable);
}

TEST_CASE("problem catalogue") {
  const auto a = example1();
  CHECK(a.domain == Domain::UnitSquare);
  CHECK(a.variant == Variant::Standard);
  CHECK(a.boundary == BoundaryKind::DirichletFull);
  CHECK(a.load(make_vec({0.3, 0.3})) == doctest::Approx(0.0).scale(1e-6));
  const auto b = example2();
  CHECK(b.domain == Domain::LShape);
  CHECK(build_mesh(b, 2).num_cells() == 24u);
  const auto c = robust_case(2.0, FormConvention::Frobenius);
  CHECK(c.variant == Variant::Robust);
  CHECK(c.boundary == BoundaryKind::MixedNormal);
  CHECK(c.form.c0 == 2.0);
  const Vec x = make_vec({0.1, 0.6});
  CHECK(c.load(x) == doctest::Approx((8 * std::pow(pi, 6) + 2.0) * CosineProduct().value(x)));
  const auto d = perturbed_sweep_case(1e-2, FormConvention::Frobenius);
  CHECK(d.pin_value);
  CHECK(d.form.c3 == doctest::Approx(1e-4));
  CHECK(d.load(x) == doctest::Approx((1e-4 * 8 * std::pow(pi, 6) + 2 * pi * pi) * CosineProduct().value(x)));
}

TEST_CASE("broken error: zero for the generating function, mass-matrix identity for k = 0") {
  std::mt19937_64 rng(4);
  FESpace space(generate_unit_square_mesh(3), Variant::Standard);
  const Eigen::VectorXd x = random_vector(space.num_dofs(), rng);
  const SparseMatrix M = assemble(space, BilinearFormSpec{0.0, 0.0, 1.0});
  CHECK(broken_error(space, x, nullptr, 0) == doctest::Approx(std::sqrt(x.dot(M * x))).epsilon(1e-10));
  const SparseMatrix A = assemble(space, BilinearFormSpec{1.0, 0.0, 0.0, FormConvention::Frobenius});
  CHECK(broken_error(space, x, nullptr, 3, FormConvention::Frobenius) ==
        doctest::Approx(std::sqrt(x.dot(A * x))).epsilon(1e-10));
  // A single-cell space: exact = the cell polynomial gives zero error.
  std::vector<Vec> v{make_vec({0.0, 0.0}), make_vec({1.0, 0.1}), make_vec({0.2, 0.9})};
  FESpace one(single_simplex_mesh(v), Variant::Robust);
  const Eigen::VectorXd y = random_vector(one.num_dofs(), rng);
  const PolynomialOnCell p(one.restriction(0, y), one.element(0).geometry());
  for (int k = 0; k <= 3; ++k) CHECK(broken_error(one, y, &p, k) < 1e-9);
}

TEST_CASE("Galerkin orthogonality of the discrete solution") {
  std::mt19937_64 rng(6);
  for (const auto& pc : {example1(), robust_case()}) {
    const auto sol = solve_level(pc, 4);
    const Eigen::VectorXd r = sol.matrix * sol.solution - sol.load;
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd v = random_vector(sol.space->num_dofs(), rng);
      for (int g : sol.constraints.constrained) v[g] = 0.0;
      // Size of the terms that cancel in v^T (A u - b).
      const double scale = v.cwiseAbs().dot(sol.matrix.cwiseAbs() * sol.solution.cwiseAbs() + sol.load.cwiseAbs());
      CHECK(std::abs(r.dot(v)) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("convergence study: decreasing errors and orders") {
  const std::vector<int> levels{2, 4, 8};
  const auto rec = run_convergence_study(example1(), levels);
  REQUIRE(rec.size() == 3);
  CHECK_FALSE(rec[0].orders[0].has_value());
  for (std::size_t i = 1; i < rec.size(); ++i)
    for (int k = 0; k < 4; ++k) {
      CHECK(rec[i].errors[k] < rec[i - 1].errors[k]);
      CHECK(*rec[i].orders[k] == doctest::Approx(std::log2(rec[i - 1].errors[k] / rec[i].errors[k])));
    }
  const std::vector<int> bad{4, 4};
  CHECK_THROWS_AS(run_convergence_study(example1(), bad), std::invalid_argument);
}

TEST_CASE("perturbed sweep gives finite, bounded energy errors") {
  const std::vector<double> eps{1.0, 1e-2};
  const auto rec = run_perturbed_sweep(eps, 4, FormConvention::Frobenius);
  REQUIRE(rec.size() == 2);
  for (const auto& r : rec) {
    CHECK(std::isfinite(r.energy));
    CHECK(r.energy == doctest::Approx(std::sqrt(r.epsilon * r.epsilon * r.e3 * r.e3 + r.e1 * r.e1)));
  }
}
