#include "cohobs/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <fmt/format.h>

#include "cohobs/errors.hpp"

namespace cohobs {

namespace {

constexpr double kStateTol = 1e-9;

void require_symmetric(const RealMatrix& sigma) {
  if (sigma.rows() != sigma.cols()) throw DimensionError("covariance must be square");
  require_even(sigma.rows(), "covariance dimension");
  require_finite(sigma, "covariance");
  const double asym = (sigma - sigma.transpose()).norm();
  if (asym > kStateTol * std::max(1.0, sigma.norm())) {
    throw InputError(fmt::format("covariance is not symmetric (asymmetry {:.3e})", asym));
  }
}

}  // namespace

GaussianState GaussianState::make(RealVector mu, RealMatrix sigma, bool strict) {
  require_symmetric(sigma);
  if (mu.size() != sigma.rows()) {
    throw DimensionError(fmt::format("mean has length {}, covariance is {}x{}", mu.size(), sigma.rows(), sigma.cols()));
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -kStateTol) {
    throw InputError(fmt::format("covariance is not positive semidefinite (min eigenvalue {:.3e})",
                                 es.eigenvalues()(0)));
  }
  if (strict && heisenberg_min_eigenvalue(sigma) < -kStateTol) {
    throw InputError("covariance violates the uncertainty principle");
  }
  return GaussianState{std::move(mu), std::move(sigma)};
}

double heisenberg_min_eigenvalue(const RealMatrix& sigma) {
  require_symmetric(sigma);
  Eigen::MatrixXcd H = sigma.cast<std::complex<double>>();
  H += std::complex<double>(0, 1) * symplectic_form(sigma.rows()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

std::vector<double> symplectic_eigenvalues(const RealMatrix& sigma) {
  require_symmetric(sigma);
  const RealMatrix sym = 0.5 * (sigma + sigma.transpose());
  Eigen::EigenSolver<RealMatrix> es(symplectic_form(sigma.rows()) * sym, false);
  std::vector<double> moduli;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) moduli.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(moduli.begin(), moduli.end());
  // Spectrum is {+i nu, -i nu}: adjacent pairs after sorting.
  std::vector<double> nu;
  for (std::size_t k = 0; k + 1 < moduli.size(); k += 2) nu.push_back(0.5 * (moduli[k] + moduli[k + 1]));
  return nu;
}

RealMatrix partial_transpose(const RealMatrix& sigma) {
  if (sigma.rows() != 4 || sigma.cols() != 4) throw DimensionError("partial transpose needs a 4x4 covariance");
  RealVector flip(4);
  flip << 1.0, 1.0, 1.0, -1.0;
  return flip.asDiagonal() * sigma * flip.asDiagonal();
}

double ppt_nu_minus(const RealMatrix& sigma) {
  if (sigma.rows() != 4 || sigma.cols() != 4) {
    throw DimensionError(fmt::format("ppt_nu_minus needs a 4x4 covariance, got {}x{}", sigma.rows(), sigma.cols()));
  }
  require_symmetric(sigma);
  const double det_a = sigma.topLeftCorner<2, 2>().determinant();
  const double det_b = sigma.bottomRightCorner<2, 2>().determinant();
  const double det_c = sigma.topRightCorner<2, 2>().determinant();
  const double det_s = sigma.determinant();
  const double delta = det_a + det_b - 2.0 * det_c;
  double disc = delta * delta - 4.0 * det_s;
  const double scale = std::max(1.0, delta * delta);
  if (disc < -kStateTol * scale) {
    throw InputError(fmt::format("invalid two-mode state: negative discriminant {:.3e}", disc));
  }
  disc = std::max(disc, 0.0);
  return std::sqrt(std::max(0.0, 0.5 * (delta - std::sqrt(disc))));
}

double gaussian_fidelity_single_mode(const GaussianState& s1, const GaussianState& s2) {
  if (s1.sigma.rows() != 2 || s2.sigma.rows() != 2) {
    throw DimensionError("single-mode fidelity needs 2x2 covariances");
  }
  const RealMatrix sum = s1.sigma + s2.sigma;
  const double det_sum = sum.determinant();
  if (!(det_sum > 0.0)) throw InputError("sum of covariances is singular");
  const RealVector d = s1.mu - s2.mu;
  const double delta = (s1.sigma.determinant() - 1.0) * (s2.sigma.determinant() - 1.0);
  const double small = std::sqrt(std::max(delta, 0.0));
  const double denom = std::sqrt(det_sum + std::max(delta, 0.0)) - small;
  const double exponent = -0.5 * d.dot(sum.llt().solve(d));
  return std::clamp(2.0 * std::exp(exponent) / denom, 0.0, 1.0);
}

double covariance_error_norm(const RealMatrix& sigma_p, const RealMatrix& sigma_o) {
  if (sigma_p.rows() != sigma_o.rows() || sigma_p.cols() != sigma_o.cols()) {
    throw DimensionError("covariance_error_norm: dimension mismatch");
  }
  return frobenius_norm(RealMatrix(sigma_p - sigma_o));
}

}  // namespace cohobs
