#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "hmnc/assembly.hpp"
#include "hmnc/kernels.hpp"
#include "hmnc/problems.hpp"
#include "support.hpp"

using namespace hmnc;
using namespace hmnc::testing;

namespace {

/// u = a + b x + c y + d x^2 + e x y + f y^2 on the whole plane.
class Quadratic final : public AnalyticFunction {
 public:
  explicit Quadratic(std::array<double, 6> c) : c_(c) {}
  int dim() const override { return 2; }
  int max_order() const override { return 16; }
  double derivative(const MultiIndex& a, const Vec& x) const override {
    const int i = a[0], j = a[1];
    if (i + j == 0) return c_[0] + c_[1] * x[0] + c_[2] * x[1] + c_[3] * x[0] * x[0] + c_[4] * x[0] * x[1] + c_[5] * x[1] * x[1];
    if (i == 1 && j == 0) return c_[1] + 2 * c_[3] * x[0] + c_[4] * x[1];
    if (i == 0 && j == 1) return c_[2] + c_[4] * x[0] + 2 * c_[5] * x[1];
    if (i == 2 && j == 0) return 2 * c_[3];
    if (i == 1 && j == 1) return c_[4];
    if (i == 0 && j == 2) return 2 * c_[5];
    return 0.0;
  }

 private:
  std::array<double, 6> c_;
};

double oracle_entry(const FiniteElement& el, int i, int j, const BilinearFormSpec& form) {
  const auto pi = el.nodal_function(i), pj = el.nodal_function(j);
  const auto& T = el.geometry();
  const auto& rule = cached_simplex_rule(T.dim(), 20);
  double total = 0.0;
  const std::array<double, 4> coef{form.c0, form.c1, 0.0, form.c3};
  for (int k : {0, 1, 3}) {
    if (coef[k] == 0.0) continue;
    for (const auto& a : multi_indices(T.dim(), k)) {
      const double w = convention_weight(a, form.convention);
      total += coef[k] * w * integrate_on_cell(rule, [&](const Vec& x) {
        const auto l = T.to_barycentric(x);
        return evaluate_cartesian_derivative(pi, a, T, l) * evaluate_cartesian_derivative(pj, a, T, l);
      }, T);
    }
  }
  return total;
}

}  // namespace

TEST_CASE("convention weights") {
  CHECK(convention_weight(MultiIndex{2, 1}, FormConvention::MultiIndex) == 1.0);
  CHECK(convention_weight(MultiIndex{2, 1}, FormConvention::Frobenius) == 3.0);
  CHECK(convention_weight(MultiIndex{3, 0}, FormConvention::Frobenius) == 1.0);
  CHECK(convention_weight(MultiIndex{1, 1}, FormConvention::Frobenius) == 2.0);
}

TEST_CASE("form validation") {
  CHECK_THROWS_AS(validate(BilinearFormSpec{}), std::invalid_argument);
  CHECK_THROWS_AS(validate(BilinearFormSpec{-1.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_NOTHROW(validate(BilinearFormSpec{1.0, 0.0, 0.0}));
}

TEST_CASE("local matrices match an independent quadrature of nodal-function derivatives") {
  std::mt19937_64 rng(8);
  for (Variant v : {Variant::Standard, Variant::Robust})
    for (FormConvention conv : {FormConvention::MultiIndex, FormConvention::Frobenius}) {
      SimplexGeometry T(random_shape_regular_simplex(2, rng));
      const auto el = nodal_basis(v, T, standalone_frames(T));
      const BilinearFormSpec form{1.0, 0.5, 2.0, conv};
      const Eigen::MatrixXd K = local_matrix(el, form);
      CHECK((K - K.transpose()).norm() == 0.0);
      for (int i = 0; i < static_cast<int>(el.size()); i += 2)
        for (int j = 0; j < static_cast<int>(el.size()); j += 3)
          CHECK(K(i, j) == doctest::Approx(oracle_entry(el, i, j, form)).epsilon(1e-9).scale(1e-6 * K.norm()));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
      CHECK(es.eigenvalues().minCoeff() > -1e-10 * es.eigenvalues().maxCoeff());
    }
}

TEST_CASE("the third-order form annihilates interpolated quadratics") {
  const Quadratic q({0.3, -1.0, 0.5, 2.0, -0.7, 1.1});
  for (Variant v : {Variant::Standard, Variant::Robust}) {
    FESpace space(generate_unit_square_mesh(4), v);
    const SparseMatrix A = assemble(space, BilinearFormSpec{1.0, 0.0, 0.0, FormConvention::Frobenius});
    const Eigen::VectorXd x = space.interpolate(q);
    CHECK((A * x).norm() <= 1e-8 * A.norm() * x.norm());
  }
}

TEST_CASE("mass and gradient forms integrate known quantities") {
  FESpace space(generate_lshape_mesh(2), Variant::Standard);
  const SparseMatrix M = assemble(space, BilinearFormSpec{0.0, 0.0, 1.0});
  const SparseMatrix G = assemble(space, BilinearFormSpec{0.0, 1.0, 0.0});
  const Quadratic one({1, 0, 0, 0, 0, 0}), x({0, 1, 0, 0, 0, 0});
  const Eigen::VectorXd e = space.interpolate(one), ex = space.interpolate(x);
  CHECK(e.dot(M * e) == doctest::Approx(3.0).epsilon(1e-12));
  // int_{L} x dA = -1/2 over [-1,1]^2 minus the removed quadrant [0,1]x[-1,0].
  CHECK(e.dot(M * ex) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(ex.dot(G * ex) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK((G * e).norm() < 1e-10);
}

TEST_CASE("load vector integrates against the interpolated constant") {
  FESpace space(generate_unit_square_mesh(3), Variant::Robust);
  const Quadratic one({1, 0, 0, 0, 0, 0});
  const Eigen::VectorXd b = assemble_load(space, [](const Vec& x) { return x[0] * x[1]; });
  CHECK(b.dot(space.interpolate(one)) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("assembly is bitwise independent of the thread count") {
  FESpace space(generate_unit_square_mesh(6), Variant::Robust);
  const BilinearFormSpec form{1.0, 1.0, 1.0};
  const SparseMatrix a = assemble(space, form, {1, -1});
  const SparseMatrix b = assemble(space, form, {4, -1});
  CHECK(Eigen::MatrixXd(a - b).cwiseAbs().maxCoeff() == 0.0);
  const auto f = [](const Vec& x) { return std::sin(x[0]) + x[1]; };
  CHECK((assemble_load(space, f, {1, -1}) - assemble_load(space, f, {3, -1})).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("patch test: quadratic Dirichlet data is reproduced exactly") {
  const Quadratic q({0.3, -1.0, 0.5, 2.0, -0.7, 1.1});
  FESpace space(generate_unit_square_mesh(4), Variant::Standard);
  const SparseMatrix A = assemble(space, BilinearFormSpec{1.0, 0.0, 0.0});
  BoundaryConditionSpec bc;
  bc.data = &q;
  const auto cons = classify_and_constrain(space, bc);
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.num_dofs()));
  const Eigen::VectorXd x = solve_constrained(A, b, cons);
  const Eigen::VectorXd pi = space.interpolate(q);
  CHECK((x - pi).cwiseAbs().maxCoeff() < 1e-7);
  SolveOptions cg;
  cg.kind = SolverKind::ConjugateGradient;
  const Eigen::VectorXd y = solve_constrained(A, b, cons, cg);
  CHECK((y - pi).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("solver rejects indefinite free blocks and mismatched sizes") {
  SparseMatrix A(2, 2);
  A.insert(0, 0) = -1.0;
  A.insert(1, 1) = 1.0;
  Constraints c;
  c.free = {0, 1};
  c.values = Eigen::VectorXd::Zero(2);
  c.is_constrained = {0, 0};
  CHECK_THROWS_AS(solve_constrained(A, Eigen::VectorXd::Ones(2), c), SolverFailure);
  CHECK_THROWS_AS(solve_constrained(A, Eigen::VectorXd::Ones(3), c), std::invalid_argument);
}

TEST_CASE("free block of the homogeneous Dirichlet D^3 stiffness is positive definite") {
  FESpace space(generate_unit_square_mesh(4), Variant::Standard);
  const SparseMatrix A = assemble(space, BilinearFormSpec{1.0, 0.0, 0.0});
  const auto cons = classify_and_constrain(space, BoundaryConditionSpec{});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(free_block_dense(A, cons));
  CHECK(es.eigenvalues().minCoeff() > 1e-8 * es.eigenvalues().maxCoeff());
}

TEST_CASE("active kernel table is reported") {
  const auto& k = kernels::active();
  CHECK_FALSE(k.name.empty());
}
