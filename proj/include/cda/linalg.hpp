#pragma once

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <unsupported/Eigen/IterativeSolvers>

namespace cda {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using VecX = Eigen::VectorXd;

struct SolveReport {
  int iterations = 0;      // 0 for direct solves
  double residual = 0.0;   // ||Ax - b|| / max(||b||, eps), recomputed
  double seconds = 0.0;
};

struct SolverOptions {
  enum class Backend { lu, gmres } backend = Backend::lu;
  double tol = 1e-10;
  int max_iterations = 2000;
};

inline SpMat from_triplets(int rows, int cols, const std::vector<Triplet>& trips) {
  SpMat A(rows, cols);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

// Drops stored entries below `eps` in magnitude (duplicates already summed).
inline void prune_zeros(SpMat& A, double eps = 0.0) {
  A.prune([eps](int, int, double v) { return std::abs(v) > eps; });
}

inline double relative_residual(const SpMat& A, const VecX& x, const VecX& b) {
  const double bn = b.norm();
  return (A * x - b).norm() / (bn > 0 ? bn : 1.0);
}

// One-shot sparse solve. Factors every call; use DirectSolver for repeated
// solves with a fixed sparsity pattern.
inline VecX solve(const SpMat& A, const VecX& b, SolverOptions opts,
                  SolveReport* report = nullptr) {
  if (A.rows() != A.cols()) throw std::invalid_argument("solve: matrix not square");
  if (b.size() != A.rows()) throw std::invalid_argument("solve: rhs size mismatch");

  const auto t0 = std::chrono::steady_clock::now();
  VecX x;
  int iters = 0;

  if (opts.backend == SolverOptions::Backend::lu) {
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("solve: LU factorization failed (singular matrix?)");
    x = lu.solve(b);
  } else {
    Eigen::GMRES<SpMat, Eigen::IncompleteLUT<double>> gmres;
    gmres.setTolerance(opts.tol);
    gmres.setMaxIterations(opts.max_iterations);
    gmres.preconditioner().setFillfactor(20);
    gmres.preconditioner().setDroptol(1e-6);
    gmres.compute(A);
    if (gmres.info() != Eigen::Success)
      throw std::runtime_error("solve: GMRES setup failed");
    x = gmres.solve(b);
    iters = static_cast<int>(gmres.iterations());
    if (gmres.info() != Eigen::Success)
      throw std::runtime_error("solve: GMRES did not converge in " +
                               std::to_string(opts.max_iterations) + " iterations");
  }

  if (!x.allFinite()) throw std::runtime_error("solve: non-finite solution");
  const double res = relative_residual(A, x, b);
  if (opts.backend == SolverOptions::Backend::lu && res > 1e-6)
    throw std::runtime_error("solve: direct solve residual " + std::to_string(res));

  if (report) {
    report->iterations = iters;
    report->residual = res;
    report->seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return x;
}

// SparseLU wrapper that caches the symbolic analysis. As long as successive
// matrices keep the same sparsity pattern only the numeric factorization is
// redone, which is the dominant win in time stepping.
class DirectSolver {
 public:
  void factorize(const SpMat& A) {
    if (A.rows() != A.cols())
      throw std::invalid_argument("DirectSolver: matrix not square");
    if (!analyzed_ || A.rows() != rows_ || A.nonZeros() != nnz_) {
      lu_.analyzePattern(A);
      analyzed_ = true;
      rows_ = A.rows();
      nnz_ = A.nonZeros();
    }
    lu_.factorize(A);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("DirectSolver: factorization failed");
  }

  VecX solve(const VecX& b) const {
    if (!analyzed_) throw std::runtime_error("DirectSolver: factorize first");
    VecX x = lu_.solve(b);
    if (!x.allFinite()) throw std::runtime_error("DirectSolver: non-finite solution");
    return x;
  }

 private:
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
  Eigen::Index rows_ = 0;
  Eigen::Index nnz_ = 0;
};

}  // namespace cda
