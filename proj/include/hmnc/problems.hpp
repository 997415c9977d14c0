#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmnc/analytic.hpp"
#include "hmnc/assembly.hpp"
#include "hmnc/fespace.hpp"
#include "hmnc/mesh.hpp"

namespace hmnc {

/// u = exp(pi y) sin(pi x); harmonic.
class ExpSine final : public AnalyticFunction {
 public:
  int dim() const override { return 2; }
  int max_order() const override { return 16; }
  double derivative(const MultiIndex& alpha, const Vec& x) const override;
};

/// u = r^a sin(a theta), theta in [0, 2 pi) measured so that the negative
/// y-axis is theta = 3 pi / 2. Harmonic away from the origin, where only
/// orders 0 and 1 are defined (both vanish for a > 1).
class CornerPower final : public AnalyticFunction {
 public:
  explicit CornerPower(double exponent = 2.5) : a_(exponent) {}
  int dim() const override { return 2; }
  int max_order() const override { return 16; }
  double derivative(const MultiIndex& alpha, const Vec& x) const override;

 private:
  double a_;
};

/// u = cos(pi x) cos(pi y).
class CosineProduct final : public AnalyticFunction {
 public:
  int dim() const override { return 2; }
  int max_order() const override { return 16; }
  double derivative(const MultiIndex& alpha, const Vec& x) const override;
};

/// (-1)^m sum_{|alpha|=m} w_alpha d^{2 alpha} u(x), the strong operator of the
/// order-m term of the broken form under the given convention. For the
/// Frobenius weights this is (-Delta)^m u.
double form_operator(const AnalyticFunction& u, int m, FormConvention convention, const Vec& x);

enum class Domain { UnitSquare, LShape };

struct ProblemCase {
  std::string id;
  std::string label;
  Domain domain = Domain::UnitSquare;
  Variant variant = Variant::Standard;
  BilinearFormSpec form;
  BoundaryKind boundary = BoundaryKind::DirichletFull;
  std::shared_ptr<const AnalyticFunction> exact;
  ScalarField load;
  /// Fix the value DOF at vertex 0 to the exact value (removes the constant mode).
  bool pin_value = false;
};

/// Unit square, standard element, pure D^3 form, full Dirichlet data, f = 0.
ProblemCase example1(FormConvention convention = kDefaultConvention);
/// L-shape, u = r^2.5 sin(2.5 theta), otherwise as example1.
ProblemCase example2(FormConvention convention = kDefaultConvention);
/// Unit square, robust element, D^3 + b0 * mass, MixedNormal, u = cos cos.
ProblemCase robust_case(double b0 = 1.0, FormConvention convention = kDefaultConvention);
/// Unit square, robust element, eps^2 D^3 + grad-grad, MixedNormal plus one
/// pinned value, u = cos cos. A constructed benchmark.
ProblemCase perturbed_sweep_case(double epsilon, FormConvention convention = kDefaultConvention);

SimplicialMesh build_mesh(const ProblemCase& problem, int level);

/// sqrt( sum_T int_T sum_{|alpha|=k} w_alpha (d^alpha (u - u_h))^2 ); exact may be null (u = 0).
double broken_error(const FESpace& space, const Eigen::VectorXd& x, const AnalyticFunction* exact, int k,
                    FormConvention convention = kDefaultConvention, int quad_degree = 20, int threads = 1);

struct ErrorRecord {
  int inv_h = 0;
  std::array<double, 4> errors{};                 ///< ||e||_0, |e|_1h, |e|_2h, |e|_3h
  std::array<std::optional<double>, 4> orders{};  ///< empty on the first level
};

/// Observed orders log(e_prev / e) / log(h_prev / h) between consecutive rows.
void fill_orders(std::vector<ErrorRecord>& records);

struct StudyOptions {
  int threads = 1;
  int error_degree = 20;
  int assembly_degree = -1;
  /// Weighting of the error seminorms; defaults to the form's own convention.
  std::optional<FormConvention> error_convention;
};

struct LevelSolution {
  std::shared_ptr<const FESpace> space;
  SparseMatrix matrix;
  Eigen::VectorXd load;
  Constraints constraints;
  Eigen::VectorXd solution;
};

LevelSolution solve_level(const ProblemCase& problem, int level, const StudyOptions& opts = {});

ErrorRecord measure_errors(const ProblemCase& problem, const LevelSolution& sol, int level,
                           const StudyOptions& opts = {});

/// Throws std::invalid_argument unless levels are strictly increasing.
std::vector<ErrorRecord> run_convergence_study(const ProblemCase& problem, std::span<const int> levels,
                                               const StudyOptions& opts = {});

struct SweepRecord {
  double epsilon = 0.0;
  int inv_h = 0;
  double e1 = 0.0;
  double e3 = 0.0;
  double energy = 0.0;  ///< sqrt(eps^2 |e|_3h^2 + |e|_1h^2)
};

std::vector<SweepRecord> run_perturbed_sweep(std::span<const double> epsilons, int level,
                                             FormConvention convention, const StudyOptions& opts = {});

}  // namespace hmnc
