#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cohobs/observer_model.hpp"
#include "cohobs/quadrature.hpp"
#include "cohobs/realizability.hpp"

namespace cohobs {

enum class ObserverMode { MT, CMT };
enum class SynthesisStatus { Feasible, Infeasible, PreconditionFailed };

const char* to_string(ObserverMode mode);
const char* to_string(SynthesisStatus status);

struct SynthesisResiduals {
  double hermiticity = 0.0;     // ||M - M^dagger||_F of the coupling Gram matrix
  double bo_gram = 0.0;         // ||B_o B_o^T - target||_F
  double bo_form = 0.0;         // ||B_o Th B_o^T - target||_F
  double realizability_a = 0.0; // observer commutation identity
  double realizability_b = 0.0; // observer output identity
};

struct SynthesisReport {
  ObserverMode mode = ObserverMode::CMT;
  SynthesisStatus status = SynthesisStatus::Infeasible;
  bool feasible = false;
  std::string message;
  double hurwitz_margin = 0.0;  // -max Re eig(A_p - K C_p); positive when stable
  double psd_min_eigenvalue = 0.0;
  RealMatrix sigma_gap;         // Sigma_p - Sigma_po at steady state (CMT)
  RealMatrix bo_gram_target;    // required B_o B_o^T (CMT)
  RealMatrix bo_form_target;    // required B_o Th B_o^T
  SynthesisResiduals residuals;
};

struct SynthesisOptions {
  double realizability_tol = kDefaultRealizabilityTol;
  double psd_tol = 1e-8;
  double rank_rel_tol = 1e-10;
  double cross_check_tol = 1e-6;
  double hurwitz_margin = kDefaultHurwitzMargin;
  std::optional<Eigen::Index> n_yo;  // defaults to n_yp
};

struct GainCheck {
  RealMatrix A_err;  // A_p - K C_p
  bool hurwitz;
  double max_real_part;
};

GainCheck validate_gain(const QuadratureSystem& plant, const RealMatrix& K,
                        double margin = kDefaultHurwitzMargin);

/// Z = -(A_p - K C_p) Th - Th (A_p - K C_p)^T - K Th K^T, the value that
/// B_o Th B_o^T must take for the observer to be physically realizable.
RealMatrix noise_form_target(const QuadratureSystem& plant, const RealMatrix& K);

/// Real B with B Th B^T = Z for antisymmetric Z, using the canonical
/// block form of Z. Blocks with |beta| below tolerance are dropped.
RealMatrix realize_noise_form(const RealMatrix& Z);

/// Mean-tracking observer for a gain that makes A_p - K C_p Hurwitz.
/// Throws InfeasibleError otherwise.
ObserverModel mt_synthesize(const QuadratureSystem& plant, const RealMatrix& K,
                            const SynthesisOptions& opts = {});

struct CmtResult {
  std::optional<ObserverModel> observer;  // present iff report.feasible
  SynthesisReport report;
};

/// Covariance-tracking observer for a Hurwitz plant. Infeasibility is a
/// regular outcome carried in the report; a non-Hurwitz plant or an
/// unrealizable plant throws PreconditionError.
CmtResult cmt_synthesize(const QuadratureSystem& plant, const RealMatrix& K,
                         const SynthesisOptions& opts = {});

/// C_o = (Th_{n_x} [K B_o] D_o^T Th_{n_yo})^T and D_o = [I 0].
std::pair<RealMatrix, RealMatrix> derive_observer_output(const RealMatrix& K, const RealMatrix& B_o,
                                                         Eigen::Index n_yo);

/// Realizability of (A_p - K C_p, [K B_o], C_o, D_o).
RealizabilityReport observer_realizability(const QuadratureSystem& plant, const ObserverModel& obs,
                                           double tol = kDefaultRealizabilityTol);

struct GridEntry {
  RealMatrix K;
  SynthesisReport report;
};

/// Runs cmt_synthesize for each candidate (concurrently), sorted by
/// decreasing Hurwitz margin.
std::vector<GridEntry> gain_grid_search(const QuadratureSystem& plant, const std::vector<RealMatrix>& candidates,
                                        const SynthesisOptions& opts = {});

}  // namespace cohobs
