#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cohobs/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitInvalid = 3;
constexpr int kExitNumerical = 4;

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cohobs::InputError(fmt::format("cannot write {}", path));
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent quantum observer design and simulation for linear quantum plants"};
  app.require_subcommand(1);
  app.fallthrough();

  cohobs::RunOptions opts;
  double dt = 0.0;
  app.add_option("--tol", opts.tol, "Realizability tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  auto* dt_opt = app.add_option("--dt", dt, "Override the integration step")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", opts.quiet, "Suppress informational output");

  std::string config_path;
  std::string out_path;
  std::string format = "text";
  std::string mode_name;
  std::string example;
  std::string out_dir = "out";

  auto* check = app.add_subcommand("check", "Check realizability, detectability and stability of the plant");
  check->add_option("--config", config_path, "Experiment config (JSON)")->required();
  check->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto* synth = app.add_subcommand("synthesize", "Synthesize an MT or CMT observer");
  synth->add_option("--config", config_path, "Experiment config (JSON)")->required();
  synth->add_option("--mode", mode_name, "Observer type (defaults to the config)")->check(CLI::IsMember({"mt", "cmt"}));
  synth->add_option("--out", out_path, "Output JSON artifact (stdout if omitted)");

  auto* sim = app.add_subcommand("simulate", "Integrate the joint moment equations and write a CSV");
  sim->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sim->add_option("--out", out_path, "Output CSV (stdout if omitted)");

  auto* repro = app.add_subcommand("reproduce", "Write the bundled example experiments to a directory");
  repro->add_option("example", example, "ex1, ex2 or ex3")->required()->check(CLI::IsMember({"ex1", "ex2", "ex3"}));
  repro->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  if (dt_opt->count() > 0) opts.dt = dt;

  try {
    if (check->parsed()) {
      const auto summary = cohobs::cmd_check(cohobs::load_config(config_path), opts);
      if (format == "json") {
        std::cout << cohobs::check_to_json(summary).dump(2) << '\n';
      } else {
        std::cout << cohobs::format_check(summary);
      }
      return summary.realizability.passed ? kExitOk : kExitInvalid;
    }

    if (synth->parsed()) {
      std::optional<cohobs::ObserverMode> mode;
      if (mode_name == "mt") mode = cohobs::ObserverMode::MT;
      if (mode_name == "cmt") mode = cohobs::ObserverMode::CMT;
      const auto outcome = cohobs::cmd_synthesize(cohobs::load_config(config_path), mode, opts);
      write_text(cohobs::synthesis_to_json(outcome).dump(2) + "\n", out_path);
      if (!opts.quiet && !out_path.empty()) {
        std::cerr << fmt::format("{}: {}\n", cohobs::to_string(outcome.report.status), outcome.report.message);
      }
      return outcome.report.feasible ? kExitOk : kExitInfeasible;
    }

    if (sim->parsed()) {
      const auto result = cohobs::cmd_simulate(cohobs::load_config(config_path), opts);
      if (out_path.empty() || out_path == "-") {
        cohobs::write_csv(result, std::cout);
      } else {
        cohobs::write_csv(result, std::filesystem::path(out_path));
      }
      if (!opts.quiet) {
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
        if (!out_path.empty()) std::cerr << fmt::format("wrote {} rows to {}\n", result.rows.size(), out_path);
      }
      return kExitOk;
    }

    if (repro->parsed()) {
      const auto summary = cohobs::cmd_reproduce(example, out_dir, opts);
      if (!opts.quiet) {
        for (const auto& n : summary.notes) std::cout << n << '\n';
        for (const auto& f : summary.files) std::cout << "wrote " << f.string() << '\n';
        if (summary.warnings > 0) std::cout << summary.warnings << " covariance warnings\n";
      }
      return kExitOk;
    }
  } catch (const cohobs::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const cohobs::NotRealizableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const cohobs::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
