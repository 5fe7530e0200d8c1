#include "cohobs/quadrature.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include <fmt/format.h>

#include "cohobs/errors.hpp"

namespace cohobs {

void require_even(Eigen::Index n, const char* what) {
  if (n <= 0 || n % 2 != 0) {
    throw DimensionError(fmt::format("{} must be a positive even integer, got {}", what, n));
  }
}

void require_finite(const RealMatrix& M, const char* what) {
  if (!M.allFinite()) {
    throw InputError(fmt::format("{} has non-finite entries", what));
  }
}

RealMatrix symplectic_form(Eigen::Index n) {
  require_even(n, "symplectic form dimension");
  RealMatrix theta = RealMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; k += 2) {
    theta(k, k + 1) = 1.0;
    theta(k + 1, k) = -1.0;
  }
  return theta;
}

RealMatrix permutation_matrix(Eigen::Index m) {
  require_even(m, "permutation dimension");
  const Eigen::Index half = m / 2;
  RealMatrix P = RealMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < half; ++i) {
    P(i, 2 * i) = 1.0;
    P(half + i, 2 * i + 1) = 1.0;
  }
  return P;
}

ComplexMatrix gamma_matrix(Eigen::Index m) {
  require_even(m, "gamma dimension");
  using namespace std::complex_literals;
  ComplexMatrix blocks = ComplexMatrix::Zero(m, m);
  for (Eigen::Index k = 0; k < m; k += 2) {
    blocks(k, k) = 0.5;
    blocks(k, k + 1) = 0.5i;
    blocks(k + 1, k) = 0.5;
    blocks(k + 1, k + 1) = -0.5i;
  }
  return permutation_matrix(m).cast<std::complex<double>>() * blocks;
}

RealMatrix selector(Eigen::Index rows, Eigen::Index cols) {
  if (rows > cols) {
    throw DimensionError(fmt::format("selector [I 0] needs rows <= cols, got {}x{}", rows, cols));
  }
  RealMatrix S = RealMatrix::Zero(rows, cols);
  S.leftCols(rows).setIdentity();
  return S;
}

HurwitzResult is_hurwitz(const RealMatrix& A, double margin) {
  if (A.rows() != A.cols()) {
    throw DimensionError(fmt::format("is_hurwitz needs a square matrix, got {}x{}", A.rows(), A.cols()));
  }
  if (A.size() == 0) return {true, -std::numeric_limits<double>::infinity()};
  Eigen::EigenSolver<RealMatrix> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw SingularityError("eigenvalue iteration did not converge");
  }
  const double max_re = solver.eigenvalues().real().maxCoeff();
  return {max_re < -margin, max_re};
}

double frobenius_norm(const RealMatrix& A) { return A.norm(); }

double frobenius_norm(const ComplexMatrix& A) { return A.norm(); }

QuadratureSystem QuadratureSystem::make(RealMatrix A, RealMatrix B, RealMatrix C, RealMatrix D) {
  require_even(A.rows(), "n_x");
  require_even(B.cols(), "n_w");
  require_even(C.rows(), "n_y");
  if (A.cols() != A.rows()) throw DimensionError(fmt::format("A must be square, got {}x{}", A.rows(), A.cols()));
  if (B.rows() != A.rows()) throw DimensionError(fmt::format("B must have {} rows, got {}", A.rows(), B.rows()));
  if (C.cols() != A.rows()) throw DimensionError(fmt::format("C must have {} columns, got {}", A.rows(), C.cols()));
  if (C.rows() > B.cols()) throw DimensionError(fmt::format("n_y = {} exceeds n_w = {}", C.rows(), B.cols()));
  if (D.rows() != C.rows() || D.cols() != B.cols()) {
    throw DimensionError(fmt::format("D must be {}x{}, got {}x{}", C.rows(), B.cols(), D.rows(), D.cols()));
  }
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(C, "C");
  if (D != selector(C.rows(), B.cols())) {
    throw InputError("D must be exactly [I 0]");
  }
  return QuadratureSystem{std::move(A), std::move(B), std::move(C), std::move(D)};
}

QuadratureSystem QuadratureSystem::make(RealMatrix A, RealMatrix B, RealMatrix C) {
  require_even(C.rows(), "n_y");
  RealMatrix D = selector(C.rows(), B.cols());
  return make(std::move(A), std::move(B), std::move(C), std::move(D));
}

}  // namespace cohobs
