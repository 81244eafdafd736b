#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <string>

namespace crackcell {

enum class LinearMethod { Auto, Direct, Cg };

LinearMethod parse_linear_method(const std::string& name);

struct LinearOptions {
  LinearMethod method = LinearMethod::Auto;
  double tol = 1e-8;          // relative residual required of the solution
  int max_iterations = 20000;
  std::int64_t direct_limit = 150000;  // Auto switches to CG above this size
};

struct LinearReport {
  bool used_direct = true;
  int iterations = 0;
  double rel_residual = 0.0;
};

// Symmetric positive definite solve on lower-triangle-stored matrices.
// Direct Cholesky below the size limit, incomplete-Cholesky CG above; a
// direct factorization whose solution misses the tolerance falls back to CG.
// Throws Error with conditioning diagnostics on breakdown or indefiniteness.
// Reuses the symbolic analysis while the sparsity pattern is unchanged, so
// keep one instance per repeatedly solved system.
class LinearSolver {
 public:
  LinearSolver();
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& A,
                        const Eigen::VectorXd& b, const LinearOptions& opts,
                        LinearReport* report = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper.
Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& A,
                             const Eigen::VectorXd& b,
                             const LinearOptions& opts = {},
                             LinearReport* report = nullptr);

}  // namespace crackcell
