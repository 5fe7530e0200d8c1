#pragma once

#include "cohobs/quadrature.hpp"

namespace cohobs {

inline constexpr double kDefaultRealizabilityTol = 1e-8;

/// Open oscillator described by H = 1/2 x^T R x and L = Lambda x (scattering = I).
struct SLHParams {
  RealMatrix R;          // n x n, symmetric
  ComplexMatrix Lambda;  // (n_w/2) x n
};

struct RealizabilityReport {
  bool passed;
  double residual_a;  // ||A Th + Th A^T + B Th B^T||_F
  double residual_b;  // ||B D^T - Th C^T Th||_F
  double tolerance;
};

/// B = 2i Theta_n [-Lambda^dagger, Lambda^T] Gamma_{n_w}, asserted real.
/// Throws ConsistencyError when the imaginary residue exceeds 1e-10.
RealMatrix noise_matrix_from_coupling(const ComplexMatrix& Lambda);

QuadratureSystem abcd_from_slh(const SLHParams& slh, Eigen::Index n_y);

RealizabilityReport check_physical_realizability(const QuadratureSystem& sys,
                                                 double tol = kDefaultRealizabilityTol);

/// Inverse of abcd_from_slh. Lambda is read from the columns of B (unique), then
/// checked against C; R is the symmetric part of -1/2 Theta A, whose antisymmetric
/// part must equal Im(Lambda^dagger Lambda).
SLHParams recover_slh(const QuadratureSystem& sys, double tol = kDefaultRealizabilityTol);

/// PBH test: every eigenvalue with real part >= -margin is observable through C.
bool detectability_check(const RealMatrix& A, const RealMatrix& C,
                         double margin = kDefaultHurwitzMargin);

}  // namespace cohobs
