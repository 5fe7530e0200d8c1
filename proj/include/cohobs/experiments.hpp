#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cohobs/config.hpp"
#include "cohobs/moments.hpp"
#include "cohobs/synthesis.hpp"

namespace cohobs {

struct RunOptions {
  double tol = kDefaultRealizabilityTol;
  std::optional<double> dt;  // overrides simulation.dt
  bool quiet = false;
};

struct CheckSummary {
  RealizabilityReport realizability;
  bool detectable;
  HurwitzResult hurwitz;
};

CheckSummary cmd_check(const ExperimentConfig& cfg, const RunOptions& opts = {});
std::string format_check(const CheckSummary& summary);
nlohmann::json check_to_json(const CheckSummary& summary);

struct SynthesisOutcome {
  std::optional<ObserverModel> observer;
  SynthesisReport report;
};

/// Synthesizes the observer requested by cfg.observer (mode overridable).
/// MT infeasibility is reported, not thrown.
SynthesisOutcome cmd_synthesize(const ExperimentConfig& cfg, std::optional<ObserverMode> mode = std::nullopt,
                                const RunOptions& opts = {});
nlohmann::json synthesis_to_json(const SynthesisOutcome& outcome);
/// Reads the "observer" object of a synthesis artifact.
ObserverModel observer_from_json(const nlohmann::json& artifact);

/// Observer used for simulation: an explicit B_o is validated against the
/// realizability identities, otherwise the observer is synthesized.
/// Throws InfeasibleError when synthesis fails.
ObserverModel resolve_observer(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct TimeSeriesRow {
  double t = 0.0;
  std::optional<double> e_mu_norm;
  std::optional<double> e_sigma_fro;
  std::optional<double> nu_minus;
  std::optional<double> nu_minus_plant;
  std::optional<double> nu_minus_observer;
  std::optional<double> fidelity;
};

struct SimulationOutput {
  std::vector<std::string> columns;
  std::vector<TimeSeriesRow> rows;
  std::vector<std::string> warnings;  // covariance floor and uncertainty-principle violations
};

SimulationOutput cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Header plus one line per row, 12 significant digits, blank for missing values.
void write_csv(const SimulationOutput& out, std::ostream& os);
void write_csv(const SimulationOutput& out, const std::filesystem::path& path);

struct Theorem1Entry {
  RealMatrix K;
  double max_real_part;  // of A_p - K C_p
  LimitResult limit;
};

/// Evaluates the covariance-tracking limit for each gain, pairing it with the
/// noise matrix that makes the observer realizable.
std::vector<Theorem1Entry> theorem1_scan(const QuadratureSystem& plant, const std::vector<RealMatrix>& candidates);

/// diag(a, b) for a, b in {0.25, 0.5, 1, 2, 3}: 25 gains including I and its multiples.
std::vector<RealMatrix> ex3_gain_grid();

struct ReproduceSummary {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> notes;
  std::size_t warnings = 0;
};

/// Writes configs, synthesis artifacts and CSVs for ex1, ex2 or ex3 into out_dir.
ReproduceSummary cmd_reproduce(const std::string& example, const std::filesystem::path& out_dir,
                               const RunOptions& opts = {});

}  // namespace cohobs
