#pragma once

#include <Eigen/Dense>

namespace cohobs {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultHurwitzMargin = 1e-9;

/// Linear QSDE coefficients of an open oscillator network:
///   dx = A x dt + B dw,   dy = C x dt + D dw.
///
/// Dimensions are positive and even; n_y <= n_w and D is exactly [I 0].
/// Use make() to construct: it validates every invariant.
struct QuadratureSystem {
  RealMatrix A;
  RealMatrix B;
  RealMatrix C;
  RealMatrix D;

  Eigen::Index n_x() const { return A.rows(); }
  Eigen::Index n_w() const { return B.cols(); }
  Eigen::Index n_y() const { return C.rows(); }

  static QuadratureSystem make(RealMatrix A, RealMatrix B, RealMatrix C, RealMatrix D);
  // D is filled in as [I_{n_y} 0].
  static QuadratureSystem make(RealMatrix A, RealMatrix B, RealMatrix C);
};

/// Theta_n = I_{n/2} (x) [[0,1],[-1,0]].
RealMatrix symplectic_form(Eigen::Index n);

/// P_m a = (a1, a3, ..., a_{m-1}, a2, a4, ..., a_m).
RealMatrix permutation_matrix(Eigen::Index m);

/// Gamma_m = P_m (I_{m/2} (x) M), M = 1/2 [[1, i], [1, -i]].
ComplexMatrix gamma_matrix(Eigen::Index m);

/// [I_rows 0] of shape rows x cols.
RealMatrix selector(Eigen::Index rows, Eigen::Index cols);

struct HurwitzResult {
  bool hurwitz;
  double max_real_part;
};

HurwitzResult is_hurwitz(const RealMatrix& A, double margin = kDefaultHurwitzMargin);

double frobenius_norm(const RealMatrix& A);
double frobenius_norm(const ComplexMatrix& A);

// Throws InputError naming `what` if any entry is NaN or infinite.
void require_finite(const RealMatrix& M, const char* what);

// Throws DimensionError unless n is positive and even.
void require_even(Eigen::Index n, const char* what);

}  // namespace cohobs
