#include "hmnc/problems.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "hmnc/kernels.hpp"
#include "hmnc/parallel.hpp"

namespace hmnc {

namespace {

constexpr double kPi = std::numbers::pi;

// d^p/dt^p sin(t) and cos(t).
double sin_derivative(int p, double t) { return std::sin(t + 0.5 * kPi * p); }
double cos_derivative(int p, double t) { return std::cos(t + 0.5 * kPi * p); }

}  // namespace

double ExpSine::derivative(const MultiIndex& alpha, const Vec& x) const {
  const int p = alpha[0], q = alpha[1];
  return std::pow(kPi, p + q) * std::exp(kPi * x[1]) * sin_derivative(p, kPi * x[0]);
}

double CosineProduct::derivative(const MultiIndex& alpha, const Vec& x) const {
  const int p = alpha[0], q = alpha[1];
  return std::pow(kPi, p + q) * cos_derivative(p, kPi * x[0]) * cos_derivative(q, kPi * x[1]);
}

double CornerPower::derivative(const MultiIndex& alpha, const Vec& x) const {
  // u = Im(z^a) with z = x + i y; on holomorphic functions d/dy = i d/dx.
  const int p = alpha[0], q = alpha[1];
  const int order = p + q;
  const double r = std::hypot(x[0], x[1]);
  if (r == 0.0) {
    if (order >= 2) throw DerivativeUnavailable("CornerPower: derivative of order >= 2 requested at the origin");
    return 0.0;
  }
  double theta = std::atan2(x[1], x[0]);
  if (theta < 0.0 && x[0] <= 0.0) theta += 2.0 * kPi;
  double falling = 1.0;
  for (int i = 0; i < order; ++i) falling *= a_ - i;
  const double s = a_ - order;
  const std::complex<double> zs = std::polar(std::pow(r, s), s * theta);
  std::complex<double> iq(1.0, 0.0);
  for (int i = 0; i < q; ++i) iq *= std::complex<double>(0.0, 1.0);
  return (falling * iq * zs).imag();
}

double form_operator(const AnalyticFunction& u, int m, FormConvention convention, const Vec& x) {
  double acc = 0.0;
  for (const auto& alpha : multi_indices(u.dim(), m)) {
    MultiIndex twice(u.dim());
    for (int i = 0; i < u.dim(); ++i) twice.set(i, 2 * alpha[i]);
    acc += convention_weight(alpha, convention) * u.derivative(twice, x);
  }
  return (m % 2 == 0 ? 1.0 : -1.0) * acc;
}

// ---------------------------------------------------------------------------
// Cases

ProblemCase example1(FormConvention convention) {
  ProblemCase pc;
  pc.id = "triharmonic-square";
  pc.label = "tri-harmonic on the unit square, u = exp(pi y) sin(pi x)";
  pc.domain = Domain::UnitSquare;
  pc.variant = Variant::Standard;
  pc.form = {1.0, 0.0, 0.0, convention};
  pc.boundary = BoundaryKind::DirichletFull;
  pc.exact = std::make_shared<ExpSine>();
  pc.load = [](const Vec&) { return 0.0; };
  return pc;
}

ProblemCase example2(FormConvention convention) {
  ProblemCase pc;
  pc.id = "triharmonic-lshape";
  pc.label = "tri-harmonic on the L-shape, u = r^2.5 sin(2.5 theta)";
  pc.domain = Domain::LShape;
  pc.variant = Variant::Standard;
  pc.form = {1.0, 0.0, 0.0, convention};
  pc.boundary = BoundaryKind::DirichletFull;
  pc.exact = std::make_shared<CornerPower>(2.5);
  pc.load = [](const Vec&) { return 0.0; };
  return pc;
}

ProblemCase robust_case(double b0, FormConvention convention) {
  if (!(b0 > 0.0)) throw std::invalid_argument("robust_case: b0 must be positive");
  ProblemCase pc;
  pc.id = "robust";
  pc.label = "sixth order with mass term and normal-derivative conditions, u = cos(pi x) cos(pi y)";
  pc.domain = Domain::UnitSquare;
  pc.variant = Variant::Robust;
  pc.form = {1.0, 0.0, b0, convention};
  pc.boundary = BoundaryKind::MixedNormal;
  auto u = std::make_shared<CosineProduct>();
  pc.exact = u;
  pc.load = [u, b0, convention](const Vec& x) { return form_operator(*u, 3, convention, x) + b0 * u->value(x); };
  return pc;
}

ProblemCase perturbed_sweep_case(double epsilon, FormConvention convention) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("perturbed_sweep_case: epsilon must be in (0, 1]");
  ProblemCase pc;
  pc.id = "perturbed";
  pc.label = "constructed benchmark: eps^2 sixth order + Laplacian, u = cos(pi x) cos(pi y)";
  pc.domain = Domain::UnitSquare;
  pc.variant = Variant::Robust;
  const double e2 = epsilon * epsilon;
  pc.form = {e2, 1.0, 0.0, convention};
  pc.boundary = BoundaryKind::MixedNormal;
  pc.pin_value = true;
  auto u = std::make_shared<CosineProduct>();
  pc.exact = u;
  pc.load = [u, e2, convention](const Vec& x) {
    return e2 * form_operator(*u, 3, convention, x) + form_operator(*u, 1, convention, x);
  };
  return pc;
}

SimplicialMesh build_mesh(const ProblemCase& problem, int level) {
  return problem.domain == Domain::UnitSquare ? generate_unit_square_mesh(level) : generate_lshape_mesh(level);
}

// ---------------------------------------------------------------------------
// Errors

double broken_error(const FESpace& space, const Eigen::VectorXd& x, const AnalyticFunction* exact, int k,
                    FormConvention convention, int quad_degree, int threads) {
  const auto& ref = space.reference();
  const int n = ref.dim();
  const auto& ct = cell_tabulation(ref, quad_degree, 3);
  const std::size_t nq = ct.rule->size();
  const std::size_t J = ref.size();
  const auto alphas = multi_indices(n, k);
  const auto& kern = kernels::active();
  std::vector<double> per_cell(space.num_cells(), 0.0);
  parallel_for(space.num_cells(), threads, [&](std::size_t c) {
    const auto& el = space.element(static_cast<int>(c));
    const auto& geo = el.geometry();
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    const double jac = geo.volume() * fact;
    const Eigen::VectorXd coeffs = space.local_coefficients(static_cast<int>(c), x);
    std::vector<Vec> pts;
    pts.reserve(nq);
    for (const auto& l : ct.rule->points) pts.push_back(geo.to_cartesian(l));
    std::vector<double> vals, diff(nq), w(nq);
    double acc = 0.0;
    for (const auto& alpha : alphas) {
      cartesian_basis_values(ct, geo, alpha, vals);
      for (std::size_t q = 0; q < nq; ++q) diff[q] = exact ? -exact->derivative(alpha, pts[q]) : 0.0;
      kern.gemv_accumulate(vals.data(), coeffs.data(), nq, J, diff.data());
      const double s = convention_weight(alpha, convention) * jac;
      for (std::size_t q = 0; q < nq; ++q) w[q] = s * ct.rule->weights[q];
      acc += kern.weighted_dot(diff.data(), diff.data(), w.data(), nq);
    }
    per_cell[c] = acc;
  });
  double total = 0.0;
  for (double v : per_cell) total += v;
  return std::sqrt(total);
}

void fill_orders(std::vector<ErrorRecord>& records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (int k = 0; k < 4; ++k) {
      if (i == 0) {
        records[i].orders[k].reset();
        continue;
      }
      const double ratio = records[i - 1].errors[k] / records[i].errors[k];
      const double hr = static_cast<double>(records[i].inv_h) / records[i - 1].inv_h;
      records[i].orders[k] = std::log(ratio) / std::log(hr);
    }
  }
}

LevelSolution solve_level(const ProblemCase& problem, int level, const StudyOptions& opts) {
  LevelSolution sol;
  auto mesh = std::make_shared<const SimplicialMesh>(build_mesh(problem, level));
  sol.space = std::make_shared<const FESpace>(mesh, problem.variant, opts.threads);
  const FESpace& space = *sol.space;
  AssemblyOptions ao{opts.threads, opts.assembly_degree};
  sol.matrix = assemble(space, problem.form, ao);
  sol.load = assemble_load(space, problem.load, {opts.threads, -1});
  BoundaryConditionSpec bc;
  bc.kind = problem.boundary;
  bc.data = problem.exact.get();
  if (problem.pin_value) bc.pinned_value_vertices.push_back(0);
  sol.constraints = classify_and_constrain(space, bc);
  sol.solution = solve_constrained(sol.matrix, sol.load, sol.constraints);
  return sol;
}

ErrorRecord measure_errors(const ProblemCase& problem, const LevelSolution& sol, int level,
                           const StudyOptions& opts) {
  ErrorRecord rec;
  rec.inv_h = level;
  for (int k = 0; k < 4; ++k)
    rec.errors[k] = broken_error(*sol.space, sol.solution, problem.exact.get(), k,
                                 opts.error_convention.value_or(problem.form.convention), opts.error_degree, opts.threads);
  return rec;
}

std::vector<ErrorRecord> run_convergence_study(const ProblemCase& problem, std::span<const int> levels,
                                               const StudyOptions& opts) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1 || (i > 0 && levels[i] <= levels[i - 1]))
      throw std::invalid_argument("run_convergence_study: levels must be positive and strictly increasing");
  }
  std::vector<ErrorRecord> out;
  for (int level : levels) {
    const auto sol = solve_level(problem, level, opts);
    out.push_back(measure_errors(problem, sol, level, opts));
  }
  fill_orders(out);
  return out;
}

std::vector<SweepRecord> run_perturbed_sweep(std::span<const double> epsilons, int level,
                                             FormConvention convention, const StudyOptions& opts) {
  std::vector<SweepRecord> out;
  for (double eps : epsilons) {
    const auto pc = perturbed_sweep_case(eps, convention);
    const auto sol = solve_level(pc, level, opts);
    const FormConvention ec = opts.error_convention.value_or(convention);
    SweepRecord r;
    r.epsilon = eps;
    r.inv_h = level;
    r.e1 = broken_error(*sol.space, sol.solution, pc.exact.get(), 1, ec, opts.error_degree, opts.threads);
    r.e3 = broken_error(*sol.space, sol.solution, pc.exact.get(), 3, ec, opts.error_degree, opts.threads);
    r.energy = std::sqrt(eps * eps * r.e3 * r.e3 + r.e1 * r.e1);
    out.push_back(r);
  }
  return out;
}

}  // namespace hmnc
