#pragma once

#include <vector>

#include "cohobs/quadrature.hpp"

namespace cohobs {

/// Gaussian state in the vacuum = I convention ([q, p] = 2i).
struct GaussianState {
  RealVector mu;
  RealMatrix sigma;

  /// Validates evenness, symmetry and positive semidefiniteness. With
  /// `strict`, also requires sigma + i Theta >= 0 (uncertainty principle).
  static GaussianState make(RealVector mu, RealMatrix sigma, bool strict = false);
};

/// Minimum eigenvalue of the Hermitian matrix sigma + i Theta. Negative
/// values beyond round-off mean the covariance violates the uncertainty principle.
double heisenberg_min_eigenvalue(const RealMatrix& sigma);

/// Moduli of the eigenvalues of i Theta sigma, one per mode, ascending.
std::vector<double> symplectic_eigenvalues(const RealMatrix& sigma);

/// Momentum sign flip on the second mode of a two-mode covariance.
RealMatrix partial_transpose(const RealMatrix& sigma);

/// Smallest symplectic eigenvalue of the partially transposed two-mode
/// state; the state is entangled iff the value is below 1.
double ppt_nu_minus(const RealMatrix& sigma);

/// Fidelity between two single-mode Gaussian states (1 iff identical).
double gaussian_fidelity_single_mode(const GaussianState& s1, const GaussianState& s2);

double covariance_error_norm(const RealMatrix& sigma_p, const RealMatrix& sigma_o);

}  // namespace cohobs
