#include "cohobs/realizability.hpp"

#include <complex>

#include <fmt/format.h>

#include "cohobs/errors.hpp"

namespace cohobs {

namespace {

constexpr double kImaginaryResidueTol = 1e-10;

using Complex = std::complex<double>;

// Output matrix C from the first n_y/2 coupling rows:
// C = P_{n_y}^T blockdiag(T, T) [Lambda + conj(Lambda); -i Lambda + i conj(Lambda)].
RealMatrix output_matrix_from_coupling(const ComplexMatrix& Lambda, Eigen::Index n_y) {
  const Eigen::Index half_w = Lambda.rows();
  const Eigen::Index half_y = n_y / 2;
  const Eigen::Index n = Lambda.cols();
  RealMatrix stacked(2 * half_w, n);
  stacked.topRows(half_w) = (Lambda + Lambda.conjugate()).real();
  stacked.bottomRows(half_w) = (Complex(0, -1) * Lambda + Complex(0, 1) * Lambda.conjugate()).real();
  RealMatrix T = selector(half_y, half_w);
  RealMatrix blocks = RealMatrix::Zero(n_y, 2 * half_w);
  blocks.topLeftCorner(half_y, half_w) = T;
  blocks.bottomRightCorner(half_y, half_w) = T;
  return permutation_matrix(n_y).transpose() * blocks * stacked;
}

}  // namespace

RealMatrix noise_matrix_from_coupling(const ComplexMatrix& Lambda) {
  const Eigen::Index n = Lambda.cols();
  const Eigen::Index n_w = 2 * Lambda.rows();
  require_even(n, "coupling column count");
  if (n_w == 0) return RealMatrix::Zero(n, 0);
  ComplexMatrix stacked(n, n_w);
  stacked.leftCols(n_w / 2) = -Lambda.adjoint();
  stacked.rightCols(n_w / 2) = Lambda.transpose();
  ComplexMatrix B = Complex(0, 2) * symplectic_form(n).cast<Complex>() * stacked * gamma_matrix(n_w);
  const double residue = B.imag().cwiseAbs().maxCoeff();
  if (residue > kImaginaryResidueTol) {
    throw ConsistencyError(fmt::format("noise matrix has imaginary residue {:.3e}", residue));
  }
  return B.real();
}

QuadratureSystem abcd_from_slh(const SLHParams& slh, Eigen::Index n_y) {
  const Eigen::Index n = slh.R.rows();
  require_even(n, "n");
  require_even(n_y, "n_y");
  if (slh.R.cols() != n) throw DimensionError("R must be square");
  if (slh.Lambda.cols() != n) {
    throw DimensionError(fmt::format("Lambda must have {} columns, got {}", n, slh.Lambda.cols()));
  }
  if (slh.Lambda.rows() == 0) throw DimensionError("Lambda must have at least one row");
  const Eigen::Index n_w = 2 * slh.Lambda.rows();
  if (n_y > n_w) throw DimensionError(fmt::format("n_y = {} exceeds n_w = {}", n_y, n_w));

  const RealMatrix theta = symplectic_form(n);
  const RealMatrix im_gram = (slh.Lambda.adjoint() * slh.Lambda).imag();
  RealMatrix A = 2.0 * theta * (slh.R + im_gram);
  RealMatrix B = noise_matrix_from_coupling(slh.Lambda);
  RealMatrix C = output_matrix_from_coupling(slh.Lambda, n_y);
  return QuadratureSystem::make(std::move(A), std::move(B), std::move(C));
}

RealizabilityReport check_physical_realizability(const QuadratureSystem& sys, double tol) {
  const RealMatrix th_x = symplectic_form(sys.n_x());
  const RealMatrix th_w = symplectic_form(sys.n_w());
  const RealMatrix th_y = symplectic_form(sys.n_y());
  const double res_a = frobenius_norm(RealMatrix(sys.A * th_x + th_x * sys.A.transpose() +
                                                 sys.B * th_w * sys.B.transpose()));
  const double res_b =
      frobenius_norm(RealMatrix(sys.B * sys.D.transpose() - th_x * sys.C.transpose() * th_y));
  return {res_a <= tol && res_b <= tol, res_a, res_b, tol};
}

SLHParams recover_slh(const QuadratureSystem& sys, double tol) {
  const Eigen::Index n = sys.n_x();
  const Eigen::Index channels = sys.n_w() / 2;
  const RealMatrix theta = symplectic_form(n);

  // Columns (2k, 2k+1) of B are (-2 Th Im(l_k)^T, 2 Th Re(l_k)^T) for coupling row l_k.
  ComplexMatrix Lambda(channels, n);
  for (Eigen::Index k = 0; k < channels; ++k) {
    const RealVector im_row = 0.5 * theta * sys.B.col(2 * k);
    const RealVector re_row = -0.5 * theta * sys.B.col(2 * k + 1);
    for (Eigen::Index j = 0; j < n; ++j) Lambda(k, j) = Complex(re_row(j), im_row(j));
  }

  const double c_mismatch =
      frobenius_norm(RealMatrix(output_matrix_from_coupling(Lambda, sys.n_y()) - sys.C));
  if (c_mismatch > tol) {
    throw InversionError(fmt::format(
        "output matrix C is inconsistent with the coupling implied by B (residual {:.3e})", c_mismatch));
  }

  const RealMatrix half = -0.5 * theta * sys.A;
  RealMatrix R = 0.5 * (half + half.transpose());
  const RealMatrix antisym = 0.5 * (half - half.transpose());
  const RealMatrix im_gram = (Lambda.adjoint() * Lambda).imag();
  const double defect = frobenius_norm(RealMatrix(antisym - im_gram));
  if (defect > tol) {
    throw NotRealizableError(fmt::format(
        "antisymmetric part of -Th A / 2 differs from Im(Lambda^dagger Lambda) by {:.3e}; "
        "no symmetric Hamiltonian matrix exists",
        defect));
  }
  return SLHParams{std::move(R), std::move(Lambda)};
}

bool detectability_check(const RealMatrix& A, const RealMatrix& C, double margin) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw DimensionError("detectability_check: A must be square");
  if (C.cols() != n) {
    throw DimensionError(fmt::format("detectability_check: C must have {} columns, got {}", n, C.cols()));
  }
  Eigen::EigenSolver<RealMatrix> solver(A, false);
  const auto eig = solver.eigenvalues();
  const double scale = std::max(1.0, std::max(A.norm(), C.norm()));
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (eig(i).real() < -margin) continue;
    ComplexMatrix pbh(n + C.rows(), n);
    pbh.topRows(n) = eig(i) * ComplexMatrix::Identity(n, n) - A.cast<Complex>();
    pbh.bottomRows(C.rows()) = C.cast<Complex>();
    Eigen::JacobiSVD<ComplexMatrix> svd(pbh);
    if (svd.singularValues()(n - 1) <= 1e-9 * scale) return false;
  }
  return true;
}

}  // namespace cohobs
