#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hmnc/fespace.hpp"
#include "hmnc/quadrature.hpp"

namespace hmnc {

/// How sum_{|alpha|=m} d^alpha v d^alpha w counts mixed partials.
enum class FormConvention {
  MultiIndex,  ///< each multi-index once
  Frobenius,   ///< full tensor contraction: weight |alpha|!/alpha!
};

/// Default for assembly and error norms; it is the convention under which
/// the square and L-shape reference numbers are reproduced.
inline constexpr FormConvention kDefaultConvention = FormConvention::Frobenius;

double convention_weight(const MultiIndex& alpha, FormConvention convention);

/// c3 (D^3 v, D^3 w) + c1 (grad v, grad w) + c0 (v, w), element by element.
struct BilinearFormSpec {
  double c3 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;
  FormConvention convention = kDefaultConvention;
};

/// Throws std::invalid_argument for a negative coefficient or an all-zero form.
void validate(const BilinearFormSpec& form);

struct AssemblyOptions {
  int threads = 1;
  /// Volume rule degree; negative selects 2 * (max shape degree).
  int quad_degree = -1;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Volume rule and basis tabulation shared by every cell of one element family.
struct CellTabulation {
  const QuadratureRule* rule = nullptr;
  BasisTabulation tab;
};

/// Cached per (variant, dim, degree, max_order); thread-safe.
const CellTabulation& cell_tabulation(const ReferenceElement& ref, int degree, int max_order);

/// Values of d^alpha b_j (shape basis) at the tabulation points of a cell,
/// npoints x J row-major.
void cartesian_basis_values(const CellTabulation& ct, const SimplexGeometry& cell, const MultiIndex& alpha,
                            std::vector<double>& out);

/// Local matrix in the nodal basis of the element.
Eigen::MatrixXd local_matrix(const FiniteElement& element, const BilinearFormSpec& form, int quad_degree = -1);

/// Global matrix; both triangles stored, exactly symmetric. Scatter runs in
/// fixed cell order, so the result does not depend on opts.threads.
SparseMatrix assemble(const FESpace& space, const BilinearFormSpec& form, const AssemblyOptions& opts = {});

/// b_i = sum_T int_T f p_i with a degree-20 rule (opts.quad_degree overrides).
Eigen::VectorXd assemble_load(const FESpace& space, const ScalarField& f, const AssemblyOptions& opts = {});

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolverKind { Direct, ConjugateGradient };

struct SolveOptions {
  SolverKind kind = SolverKind::Direct;
  double cg_tolerance = 1e-12;
  int refinement_steps = 2;
};

/// Eliminates constrained DOFs and solves the free block. Throws SolverFailure
/// when the free block is not positive definite.
Eigen::VectorXd solve_constrained(const SparseMatrix& A, const Eigen::VectorXd& b, const Constraints& constraints,
                                  const SolveOptions& opts = {});

/// Free-free block of A as a dense matrix (diagnostics on small meshes).
Eigen::MatrixXd free_block_dense(const SparseMatrix& A, const Constraints& constraints);

}  // namespace hmnc
