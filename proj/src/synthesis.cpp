#include "cohobs/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <future>

#include <fmt/format.h>

#include "cohobs/errors.hpp"
#include "cohobs/moments.hpp"

namespace cohobs {

namespace {

using Complex = std::complex<double>;

void require_gain_shape(const QuadratureSystem& plant, const RealMatrix& K) {
  if (K.rows() != plant.n_x() || K.cols() != plant.n_y()) {
    throw DimensionError(
        fmt::format("gain K must be {}x{}, got {}x{}", plant.n_x(), plant.n_y(), K.rows(), K.cols()));
  }
  require_finite(K, "K");
}

ObserverModel finish_observer(const QuadratureSystem& plant, const RealMatrix& K, RealMatrix B_o,
                              std::optional<ComplexMatrix> Lambda_o, const SynthesisOptions& opts) {
  const Eigen::Index n_yo = opts.n_yo.value_or(plant.n_y());
  auto [C_o, D_o] = derive_observer_output(K, B_o, n_yo);
  return ObserverModel{K, std::move(B_o), std::move(C_o), std::move(D_o), std::move(Lambda_o)};
}

}  // namespace

const char* to_string(ObserverMode mode) { return mode == ObserverMode::MT ? "mt" : "cmt"; }

const char* to_string(SynthesisStatus status) {
  switch (status) {
    case SynthesisStatus::Feasible: return "feasible";
    case SynthesisStatus::Infeasible: return "infeasible";
    case SynthesisStatus::PreconditionFailed: return "precondition_failed";
  }
  return "unknown";
}

GainCheck validate_gain(const QuadratureSystem& plant, const RealMatrix& K, double margin) {
  require_gain_shape(plant, K);
  RealMatrix A_err = plant.A - K * plant.C;
  const auto h = is_hurwitz(A_err, margin);
  return {std::move(A_err), h.hurwitz, h.max_real_part};
}

RealMatrix noise_form_target(const QuadratureSystem& plant, const RealMatrix& K) {
  require_gain_shape(plant, K);
  const RealMatrix A_err = plant.A - K * plant.C;
  const RealMatrix th_x = symplectic_form(plant.n_x());
  const RealMatrix th_y = symplectic_form(plant.n_y());
  return -A_err * th_x - th_x * A_err.transpose() - K * th_y * K.transpose();
}

RealMatrix realize_noise_form(const RealMatrix& Z) {
  const Eigen::Index n = Z.rows();
  if (Z.cols() != n) throw DimensionError("noise form target must be square");
  if ((Z + Z.transpose()).norm() > 1e-9 * std::max(1.0, Z.norm())) {
    throw InputError("noise form target must be antisymmetric");
  }
  // iZ is Hermitian; an eigenpair (beta > 0, a + ib) gives Z a = beta b, Z b = -beta a,
  // so on the orthonormal pair (sqrt2 a, sqrt2 b) Z acts as -beta J.
  const ComplexMatrix H = Complex(0, 1) * Z.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (H + H.adjoint()));
  const double drop = 1e-12 * std::max(1.0, Z.norm());
  std::vector<RealVector> columns;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double beta = es.eigenvalues()(i);
    if (beta <= drop) continue;
    const Eigen::VectorXcd v = es.eigenvectors().col(i);
    columns.push_back(std::sqrt(2.0) * v.real());
    columns.push_back(-beta * std::sqrt(2.0) * v.imag());
  }
  RealMatrix B(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) B.col(static_cast<Eigen::Index>(j)) = columns[j];
  return B;
}

std::pair<RealMatrix, RealMatrix> derive_observer_output(const RealMatrix& K, const RealMatrix& B_o,
                                                         Eigen::Index n_yo) {
  const Eigen::Index n_x = K.rows();
  require_even(n_x, "n_x");
  require_even(n_yo, "n_yo");
  if (B_o.rows() != n_x) throw DimensionError("K and B_o must have the same row count");
  const Eigen::Index inputs = K.cols() + B_o.cols();
  if (n_yo > inputs) {
    throw DimensionError(fmt::format("n_yo = {} exceeds n_yp + n_wo = {}", n_yo, inputs));
  }
  RealMatrix KB(n_x, inputs);
  KB << K, B_o;
  RealMatrix D_o = selector(n_yo, inputs);
  RealMatrix C_o = (symplectic_form(n_x) * KB * D_o.transpose() * symplectic_form(n_yo)).transpose();
  return {std::move(C_o), std::move(D_o)};
}

RealizabilityReport observer_realizability(const QuadratureSystem& plant, const ObserverModel& obs, double tol) {
  require_gain_shape(plant, obs.K);
  RealMatrix KB(plant.n_x(), obs.K.cols() + obs.n_wo());
  KB << obs.K, obs.B_o;
  const auto sys = QuadratureSystem::make(plant.A - obs.K * plant.C, std::move(KB), obs.C_o, obs.D_o);
  return check_physical_realizability(sys, tol);
}

ObserverModel mt_synthesize(const QuadratureSystem& plant, const RealMatrix& K, const SynthesisOptions& opts) {
  const auto gain = validate_gain(plant, K, opts.hurwitz_margin);
  if (!gain.hurwitz) {
    throw InfeasibleError(fmt::format(
        "A_p - K C_p is not Hurwitz (max real part {:.6g}); mean error does not converge", gain.max_real_part));
  }
  RealMatrix B_o = realize_noise_form(noise_form_target(plant, K));
  ObserverModel obs = finish_observer(plant, K, std::move(B_o), std::nullopt, opts);
  const auto rep = observer_realizability(plant, obs, opts.realizability_tol);
  if (!rep.passed) {
    throw ConsistencyError(fmt::format("constructed MT observer fails realizability ({:.3e}, {:.3e})",
                                       rep.residual_a, rep.residual_b));
  }
  return obs;
}

CmtResult cmt_synthesize(const QuadratureSystem& plant, const RealMatrix& K, const SynthesisOptions& opts) {
  const auto plant_rep = check_physical_realizability(plant, opts.realizability_tol);
  if (!plant_rep.passed) {
    throw PreconditionError(fmt::format("plant is not physically realizable (residuals {:.3e}, {:.3e})",
                                        plant_rep.residual_a, plant_rep.residual_b));
  }
  const auto plant_h = is_hurwitz(plant.A, opts.hurwitz_margin);
  if (!plant_h.hurwitz) {
    throw PreconditionError(fmt::format(
        "plant drift A_p is not Hurwitz (max real part {:.6g}); the steady-state construction does not "
        "apply, use the small-s limit test instead",
        plant_h.max_real_part));
  }

  CmtResult result;
  SynthesisReport& rep = result.report;
  rep.mode = ObserverMode::CMT;

  const auto gain = validate_gain(plant, K, opts.hurwitz_margin);
  rep.hurwitz_margin = -gain.max_real_part;
  rep.bo_form_target = noise_form_target(plant, K);
  if (!gain.hurwitz) {
    rep.status = SynthesisStatus::Infeasible;
    rep.message = fmt::format("A_p - K C_p is not Hurwitz (max real part {:.6g})", gain.max_real_part);
    return result;
  }

  const Eigen::Index n = plant.n_x();
  const RealMatrix th_x = symplectic_form(n);
  const RealMatrix BpBpT = plant.B * plant.B.transpose();
  const RealMatrix KC = K * plant.C;

  // A_p G + G (A_p - K C_p)^T + B_p B_p^T - B_p D_p^T K^T = 0, G = Sigma_p - Sigma_po.
  const RealMatrix G =
      solve_sylvester(plant.A, gain.A_err.transpose(), BpBpT - plant.B * plant.D.transpose() * K.transpose());
  rep.sigma_gap = G;
  const RealMatrix N = KC * G + G.transpose() * KC.transpose() + BpBpT - K * K.transpose();
  rep.bo_gram_target = N;
  const RealMatrix& Z = rep.bo_form_target;

  // Lambda_o^dagger Lambda_o = -1/4 Th (N + iZ) Th.
  ComplexMatrix NZ(n, n);
  NZ.real() = N;
  NZ.imag() = Z;
  const ComplexMatrix M = -0.25 * th_x.cast<Complex>() * NZ * th_x.cast<Complex>();
  rep.residuals.hermiticity = (M - M.adjoint()).norm();
  if (rep.residuals.hermiticity > opts.cross_check_tol) {
    throw ConsistencyError(fmt::format("coupling Gram matrix not Hermitian (residual {:.3e})",
                                       rep.residuals.hermiticity));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (M + M.adjoint()));
  const RealVector lambda = es.eigenvalues();
  rep.psd_min_eigenvalue = lambda.minCoeff();
  if (rep.psd_min_eigenvalue < -opts.psd_tol) {
    rep.status = SynthesisStatus::Infeasible;
    rep.message = fmt::format(
        "coupling Gram matrix is not positive semidefinite (min eigenvalue {:.6g}); no CMT observer for this gain",
        rep.psd_min_eigenvalue);
    return result;
  }

  const double cutoff = opts.rank_rel_tol * std::max(lambda.maxCoeff(), 0.0);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = lambda.size() - 1; i >= 0; --i) {
    if (lambda(i) > cutoff && lambda(i) > 0.0) kept.push_back(i);
  }
  ComplexMatrix Lambda_o(static_cast<Eigen::Index>(kept.size()), n);
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const Eigen::Index i = kept[r];
    Lambda_o.row(static_cast<Eigen::Index>(r)) = std::sqrt(lambda(i)) * es.eigenvectors().col(i).adjoint();
  }
  RealMatrix B_o = Lambda_o.rows() > 0 ? noise_matrix_from_coupling(Lambda_o) : RealMatrix::Zero(n, 0);

  const RealMatrix th_wo = B_o.cols() > 0 ? symplectic_form(B_o.cols()) : RealMatrix::Zero(0, 0);
  rep.residuals.bo_gram = (B_o * B_o.transpose() - N).norm();
  rep.residuals.bo_form = (B_o * th_wo * B_o.transpose() - Z).norm();
  if (rep.residuals.bo_gram > opts.cross_check_tol || rep.residuals.bo_form > opts.cross_check_tol) {
    throw ConsistencyError(fmt::format("factored B_o misses its targets (gram {:.3e}, form {:.3e})",
                                       rep.residuals.bo_gram, rep.residuals.bo_form));
  }

  ObserverModel obs = finish_observer(plant, K, std::move(B_o), std::move(Lambda_o), opts);
  const auto obs_rep = observer_realizability(plant, obs, opts.realizability_tol);
  rep.residuals.realizability_a = obs_rep.residual_a;
  rep.residuals.realizability_b = obs_rep.residual_b;
  if (!obs_rep.passed) {
    throw ConsistencyError(fmt::format("constructed CMT observer fails realizability ({:.3e}, {:.3e})",
                                       obs_rep.residual_a, obs_rep.residual_b));
  }
  rep.status = SynthesisStatus::Feasible;
  rep.feasible = true;
  rep.message = fmt::format("CMT observer constructed with n_wo = {}", obs.n_wo());
  result.observer = std::move(obs);
  return result;
}

std::vector<GridEntry> gain_grid_search(const QuadratureSystem& plant, const std::vector<RealMatrix>& candidates,
                                        const SynthesisOptions& opts) {
  for (const auto& K : candidates) require_gain_shape(plant, K);

  std::vector<std::future<GridEntry>> jobs;
  jobs.reserve(candidates.size());
  for (const auto& K : candidates) {
    jobs.push_back(std::async(std::launch::async, [&plant, &opts, K]() {
      GridEntry entry{K, {}};
      try {
        entry.report = cmt_synthesize(plant, K, opts).report;
      } catch (const PreconditionError& e) {
        const auto gain = validate_gain(plant, K, opts.hurwitz_margin);
        entry.report.status = SynthesisStatus::PreconditionFailed;
        entry.report.hurwitz_margin = -gain.max_real_part;
        entry.report.message = e.what();
      }
      return entry;
    }));
  }
  std::vector<GridEntry> out;
  out.reserve(jobs.size());
  for (auto& job : jobs) out.push_back(job.get());
  std::stable_sort(out.begin(), out.end(), [](const GridEntry& a, const GridEntry& b) {
    return a.report.hurwitz_margin > b.report.hurwitz_margin;
  });
  return out;
}

}  // namespace cohobs
