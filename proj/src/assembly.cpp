#include "hmnc/assembly.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "hmnc/kernels.hpp"
#include "hmnc/parallel.hpp"

namespace hmnc {

double convention_weight(const MultiIndex& alpha, FormConvention convention) {
  return convention == FormConvention::MultiIndex ? 1.0 : alpha.multinomial();
}

void validate(const BilinearFormSpec& form) {
  if (form.c3 < 0 || form.c1 < 0 || form.c0 < 0)
    throw std::invalid_argument("BilinearFormSpec: coefficients must be nonnegative");
  if (form.c3 == 0 && form.c1 == 0 && form.c0 == 0)
    throw std::invalid_argument("BilinearFormSpec: at least one coefficient must be positive");
}

const CellTabulation& cell_tabulation(const ReferenceElement& ref, int degree, int max_order) {
  using Key = std::tuple<int, int, int, int>;
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<CellTabulation>> cache;
  const Key key{ref.variant() == Variant::Standard ? 0 : 1, ref.dim(), degree, max_order};
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot) {
    slot = std::make_unique<CellTabulation>();
    slot->rule = &cached_simplex_rule(ref.dim(), degree);
    slot->tab = BasisTabulation(ref.basis(), slot->rule->points, max_order);
  }
  return *slot;
}

void cartesian_basis_values(const CellTabulation& ct, const SimplexGeometry& cell, const MultiIndex& alpha,
                            std::vector<double>& out) {
  const auto dirs = cartesian_directions(alpha);
  directional_values(ct.tab, cell.barycentric_gradients(), dirs, out);
}

namespace {

double jacobian_scale(const SimplexGeometry& cell) {
  double fact = 1.0;
  for (int i = 2; i <= cell.dim(); ++i) fact *= i;
  return cell.volume() * fact;
}

int resolve_degree(const ReferenceElement& ref, int requested) {
  return requested >= 0 ? requested : std::min(2 * ref.basis().max_degree(), kMaxQuadratureDegree);
}

}  // namespace

Eigen::MatrixXd local_matrix(const FiniteElement& element, const BilinearFormSpec& form, int quad_degree) {
  validate(form);
  const auto& ref = element.reference();
  const int n = ref.dim();
  const std::size_t J = ref.size();
  const auto& ct = cell_tabulation(ref, resolve_degree(ref, quad_degree), 3);
  const std::size_t nq = ct.rule->size();
  const double jac = jacobian_scale(element.geometry());
  const auto& k = kernels::active();

  // Row-major J x J accumulator in the shape basis.
  std::vector<double> K(J * J, 0.0);
  std::vector<double> vals, w(nq);
  const std::array<std::pair<int, double>, 3> terms{{{3, form.c3}, {1, form.c1}, {0, form.c0}}};
  for (const auto& [order, coef] : terms) {
    if (coef == 0.0) continue;
    for (const auto& alpha : multi_indices(n, order)) {
      const double s = coef * convention_weight(alpha, form.convention) * jac;
      for (std::size_t q = 0; q < nq; ++q) w[q] = s * ct.rule->weights[q];
      cartesian_basis_values(ct, element.geometry(), alpha, vals);
      k.weighted_gram(vals.data(), w.data(), nq, J, K.data());
    }
  }
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Kb(
      K.data(), static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(J));
  const auto& N = element.nodal_coefficients();
  Eigen::MatrixXd local = N.transpose() * Kb * N;
  return 0.5 * (local + local.transpose());
}

SparseMatrix assemble(const FESpace& space, const BilinearFormSpec& form, const AssemblyOptions& opts) {
  validate(form);
  const std::size_t ncells = space.num_cells();
  std::vector<Eigen::MatrixXd> locals(ncells);
  parallel_for(ncells, opts.threads, [&](std::size_t c) {
    locals[c] = local_matrix(space.element(static_cast<int>(c)), form, opts.quad_degree);
  });
  const auto& map = space.dof_map();
  std::vector<Eigen::Triplet<double>> triplets;
  const std::size_t J = space.reference().size();
  triplets.reserve(ncells * J * J);
  for (std::size_t c = 0; c < ncells; ++c) {
    const auto dofs = map.cell_dofs(static_cast<int>(c));
    const auto signs = map.cell_signs(static_cast<int>(c));
    for (std::size_t i = 0; i < J; ++i)
      for (std::size_t j = 0; j < J; ++j)
        triplets.emplace_back(dofs[i], dofs[j],
                              signs[i] * signs[j] *
                                  locals[c](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }
  const auto ndofs = static_cast<Eigen::Index>(space.num_dofs());
  SparseMatrix A(ndofs, ndofs);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

Eigen::VectorXd assemble_load(const FESpace& space, const ScalarField& f, const AssemblyOptions& opts) {
  const auto& ref = space.reference();
  const int degree = opts.quad_degree >= 0 ? opts.quad_degree : kMaxQuadratureDegree;
  const auto& ct = cell_tabulation(ref, degree, 0);
  const std::size_t nq = ct.rule->size();
  const std::size_t J = ref.size();
  const auto values = ct.tab.values(0, 0);
  const std::size_t ncells = space.num_cells();
  std::vector<Eigen::VectorXd> locals(ncells);
  parallel_for(ncells, opts.threads, [&](std::size_t c) {
    const auto& el = space.element(static_cast<int>(c));
    const double jac = jacobian_scale(el.geometry());
    Eigen::VectorXd vb = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(J));
    for (std::size_t q = 0; q < nq; ++q) {
      const double fw = jac * ct.rule->weights[q] * f(el.geometry().to_cartesian(ct.rule->points[q]));
      for (std::size_t j = 0; j < J; ++j) vb[static_cast<Eigen::Index>(j)] += fw * values[q * J + j];
    }
    locals[c] = el.nodal_coefficients().transpose() * vb;
  });
  const auto& map = space.dof_map();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.num_dofs()));
  for (std::size_t c = 0; c < ncells; ++c) {
    const auto dofs = map.cell_dofs(static_cast<int>(c));
    const auto signs = map.cell_signs(static_cast<int>(c));
    for (std::size_t i = 0; i < J; ++i) b[dofs[i]] += signs[i] * locals[c][static_cast<Eigen::Index>(i)];
  }
  return b;
}

namespace {

SparseMatrix extract_block(const SparseMatrix& A, const std::vector<int>& rows_new, int nrows,
                           const std::vector<int>& cols_new, int ncols) {
  std::vector<Eigen::Triplet<double>> t;
  for (int col = 0; col < A.outerSize(); ++col) {
    if (cols_new[col] < 0) continue;
    for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
      const int r = rows_new[it.row()];
      if (r >= 0) t.emplace_back(r, cols_new[col], it.value());
    }
  }
  SparseMatrix B(nrows, ncols);
  B.setFromTriplets(t.begin(), t.end());
  B.makeCompressed();
  return B;
}

}  // namespace

Eigen::VectorXd solve_constrained(const SparseMatrix& A, const Eigen::VectorXd& b, const Constraints& constraints,
                                  const SolveOptions& opts) {
  const auto ndofs = A.rows();
  if (A.cols() != ndofs || b.size() != ndofs || constraints.values.size() != ndofs)
    throw std::invalid_argument("solve_constrained: size mismatch");
  Eigen::VectorXd x = constraints.values;
  const int nfree = static_cast<int>(constraints.free.size());
  if (nfree == 0) return x;
  const int ncon = static_cast<int>(constraints.constrained.size());

  std::vector<int> free_new(ndofs, -1), con_new(ndofs, -1);
  for (int i = 0; i < nfree; ++i) free_new[constraints.free[i]] = i;
  for (int i = 0; i < ncon; ++i) con_new[constraints.constrained[i]] = i;

  const SparseMatrix Aff = extract_block(A, free_new, nfree, free_new, nfree);
  Eigen::VectorXd rhs(nfree);
  for (int i = 0; i < nfree; ++i) rhs[i] = b[constraints.free[i]];
  if (ncon > 0) {
    const SparseMatrix Afc = extract_block(A, free_new, nfree, con_new, ncon);
    Eigen::VectorXd xc(ncon);
    for (int i = 0; i < ncon; ++i) xc[i] = constraints.values[constraints.constrained[i]];
    rhs -= Afc * xc;
  }

  Eigen::VectorXd xf;
  if (opts.kind == SolverKind::Direct) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(Aff);
    if (ldlt.info() != Eigen::Success) throw SolverFailure("solve_constrained: factorization failed");
    if (!(ldlt.vectorD().minCoeff() > 0.0))
      throw SolverFailure("solve_constrained: free block is not positive definite (pivot " +
                          std::to_string(ldlt.vectorD().minCoeff()) + ")");
    xf = ldlt.solve(rhs);
    for (int s = 0; s < opts.refinement_steps; ++s) xf += ldlt.solve(rhs - Aff * xf);
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(opts.cg_tolerance);
    cg.setMaxIterations(static_cast<int>(10 * nfree + 100));
    cg.compute(Aff);
    xf = cg.solve(rhs);
    if (cg.info() != Eigen::Success)
      throw SolverFailure("solve_constrained: CG did not converge (residual " + std::to_string(cg.error()) + ")");
  }
  for (int i = 0; i < nfree; ++i) x[constraints.free[i]] = xf[i];
  return x;
}

Eigen::MatrixXd free_block_dense(const SparseMatrix& A, const Constraints& constraints) {
  const int nfree = static_cast<int>(constraints.free.size());
  std::vector<int> free_new(A.rows(), -1);
  for (int i = 0; i < nfree; ++i) free_new[constraints.free[i]] = i;
  return Eigen::MatrixXd(extract_block(A, free_new, nfree, free_new, nfree));
}

}  // namespace hmnc
