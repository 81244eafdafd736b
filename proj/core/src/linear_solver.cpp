#include "crackcell/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>

#include "crackcell/error.hpp"
#include "crackcell/log.hpp"

namespace crackcell {

LinearMethod parse_linear_method(const std::string& name) {
  if (name == "auto") return LinearMethod::Auto;
  if (name == "direct") return LinearMethod::Direct;
  if (name == "cg") return LinearMethod::Cg;
  throw Error("unknown linear method '" + name + "' (expected auto|direct|cg)");
}

struct LinearSolver::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt;
  bool analyzed = false;
  Eigen::Index n = 0;
  Eigen::Index nnz = 0;
};

LinearSolver::LinearSolver() : impl_(new Impl) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

namespace {

double relative_residual(const Eigen::SparseMatrix<double>& A,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double bn = b.norm();
  const Eigen::VectorXd r = A.selfadjointView<Eigen::Lower>() * x - b;
  return bn > 0.0 ? r.norm() / bn : r.norm();
}

Eigen::VectorXd solve_cg(const Eigen::SparseMatrix<double>& A,
                         const Eigen::VectorXd& b, const LinearOptions& opts,
                         LinearReport* report) {
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower,
                           Eigen::IncompleteCholesky<double, Eigen::Lower>>
      cg;
  cg.setTolerance(opts.tol);
  cg.setMaxIterations(opts.max_iterations);
  cg.compute(A);
  if (cg.info() != Eigen::Success)
    throw Error("linear solve: incomplete-Cholesky preconditioner failed "
                "(matrix likely not positive definite)");
  Eigen::VectorXd x = cg.solve(b);
  const double rel = relative_residual(A, x, b);
  if (report) {
    report->used_direct = false;
    report->iterations = static_cast<int>(cg.iterations());
    report->rel_residual = rel;
  }
  if (!(rel <= opts.tol * 10.0) || !x.allFinite()) {
    std::ostringstream os;
    os << "linear solve: CG failed to converge (n=" << A.rows()
       << ", iterations=" << cg.iterations() << ", relative residual=" << rel
       << ")";
    throw Error(os.str());
  }
  return x;
}

}  // namespace

Eigen::VectorXd LinearSolver::solve(const Eigen::SparseMatrix<double>& A,
                                    const Eigen::VectorXd& b,
                                    const LinearOptions& opts,
                                    LinearReport* report) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw Error("linear solve: dimension mismatch");
  const bool want_direct =
      opts.method == LinearMethod::Direct ||
      (opts.method == LinearMethod::Auto && A.rows() <= opts.direct_limit);

  if (!want_direct) return solve_cg(A, b, opts, report);

  if (!impl_->analyzed || impl_->n != A.rows() || impl_->nnz != A.nonZeros()) {
    impl_->ldlt.analyzePattern(A);
    impl_->analyzed = true;
    impl_->n = A.rows();
    impl_->nnz = A.nonZeros();
  }
  impl_->ldlt.factorize(A);
  if (impl_->ldlt.info() == Eigen::Success) {
    const Eigen::VectorXd d = impl_->ldlt.vectorD();
    const double dmin = d.minCoeff(), dmax = d.maxCoeff();
    if (dmin <= 0.0 || dmin < 1e-20 * dmax) {
      std::ostringstream os;
      os << "linear solve: matrix is singular or not positive definite (n="
         << A.rows() << ", min pivot=" << dmin << ", max pivot=" << dmax
         << "); check that boundary conditions constrain all rigid modes";
      throw Error(os.str());
    }
    Eigen::VectorXd x = impl_->ldlt.solve(b);
    const double rel = relative_residual(A, x, b);
    if (report) {
      report->used_direct = true;
      report->iterations = 1;
      report->rel_residual = rel;
    }
    if (rel <= opts.tol && x.allFinite()) return x;
    log_warn("linear solve: direct solution residual ", rel,
             " misses tolerance ", opts.tol, " (pivot range ", dmin, " .. ",
             dmax, "), retrying with CG");
  } else {
    log_warn("linear solve: Cholesky factorization failed, retrying with CG");
  }
  return solve_cg(A, b, opts, report);
}

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& A,
                             const Eigen::VectorXd& b,
                             const LinearOptions& opts, LinearReport* report) {
  LinearSolver solver;
  return solver.solve(A, b, opts, report);
}

}  // namespace crackcell
