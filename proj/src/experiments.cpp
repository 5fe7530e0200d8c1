#include "cohobs/experiments.hpp"

#include <fstream>
#include <future>
#include <ostream>

#include <fmt/format.h>

#include "cohobs/builtin_examples.hpp"
#include "cohobs/gaussian.hpp"

namespace cohobs {

using nlohmann::json;

namespace {

constexpr double kHeisenbergTol = 1e-9;

const ObserverSpec& require_observer(const ExperimentConfig& cfg) {
  if (!cfg.observer) throw ConfigError("observer: missing required section");
  return *cfg.observer;
}

SynthesisOptions synthesis_options(const ExperimentConfig& cfg, const RunOptions& opts) {
  SynthesisOptions s;
  s.realizability_tol = opts.tol;
  if (cfg.observer) s.n_yo = cfg.observer->n_yo;
  return s;
}

std::string format_value(const std::optional<double>& v) {
  return v ? fmt::format("{:.12g}", *v) : std::string{};
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  out << j.dump(2) << '\n';
}

ExperimentConfig builtin(const std::string& name) { return parse_config(builtin_config(name)); }

}  // namespace

CheckSummary cmd_check(const ExperimentConfig& cfg, const RunOptions& opts) {
  return {check_physical_realizability(cfg.plant, opts.tol), detectability_check(cfg.plant.A, cfg.plant.C),
          is_hurwitz(cfg.plant.A)};
}

std::string format_check(const CheckSummary& s) {
  return fmt::format(
      "physical realizability: {} (residual_a = {:.3e}, residual_b = {:.3e}, tol = {:.1e})\n"
      "detectable: {}\n"
      "A_p Hurwitz: {} (max real part {:.6g})\n",
      s.realizability.passed ? "pass" : "FAIL", s.realizability.residual_a, s.realizability.residual_b,
      s.realizability.tolerance, s.detectable ? "yes" : "no", s.hurwitz.hurwitz ? "yes" : "no",
      s.hurwitz.max_real_part);
}

json check_to_json(const CheckSummary& s) {
  return json{{"realizability",
               {{"passed", s.realizability.passed},
                {"residual_a", s.realizability.residual_a},
                {"residual_b", s.realizability.residual_b},
                {"tolerance", s.realizability.tolerance}}},
              {"detectable", s.detectable},
              {"hurwitz", {{"hurwitz", s.hurwitz.hurwitz}, {"max_real_part", s.hurwitz.max_real_part}}}};
}

SynthesisOutcome cmd_synthesize(const ExperimentConfig& cfg, std::optional<ObserverMode> mode,
                                const RunOptions& opts) {
  const ObserverSpec& spec = require_observer(cfg);
  const ObserverMode m = mode.value_or(spec.mode);
  const SynthesisOptions sopts = synthesis_options(cfg, opts);
  SynthesisOutcome outcome;
  if (m == ObserverMode::CMT) {
    auto res = cmt_synthesize(cfg.plant, spec.K, sopts);
    outcome.observer = std::move(res.observer);
    outcome.report = std::move(res.report);
    return outcome;
  }

  SynthesisReport& rep = outcome.report;
  rep.mode = ObserverMode::MT;
  const auto gain = validate_gain(cfg.plant, spec.K, sopts.hurwitz_margin);
  rep.hurwitz_margin = -gain.max_real_part;
  rep.bo_form_target = noise_form_target(cfg.plant, spec.K);
  try {
    ObserverModel obs = mt_synthesize(cfg.plant, spec.K, sopts);
    const RealMatrix th = obs.n_wo() > 0 ? symplectic_form(obs.n_wo()) : RealMatrix(0, 0);
    rep.residuals.bo_form = (obs.B_o * th * obs.B_o.transpose() - rep.bo_form_target).norm();
    const auto r = observer_realizability(cfg.plant, obs, sopts.realizability_tol);
    rep.residuals.realizability_a = r.residual_a;
    rep.residuals.realizability_b = r.residual_b;
    rep.status = SynthesisStatus::Feasible;
    rep.feasible = true;
    rep.message = fmt::format("MT observer constructed with n_wo = {}", obs.n_wo());
    outcome.observer = std::move(obs);
  } catch (const InfeasibleError& e) {
    rep.status = SynthesisStatus::Infeasible;
    rep.message = e.what();
  }
  return outcome;
}

json synthesis_to_json(const SynthesisOutcome& o) {
  const SynthesisReport& r = o.report;
  json rep = {{"hurwitz_margin", r.hurwitz_margin},
              {"bo_form_target", matrix_to_json(r.bo_form_target)},
              {"residuals",
               {{"hermiticity", r.residuals.hermiticity},
                {"bo_gram", r.residuals.bo_gram},
                {"bo_form", r.residuals.bo_form},
                {"realizability_a", r.residuals.realizability_a},
                {"realizability_b", r.residuals.realizability_b}}}};
  if (r.mode == ObserverMode::CMT && r.sigma_gap.size() > 0) {
    rep["psd_min_eigenvalue"] = r.psd_min_eigenvalue;
    rep["G"] = matrix_to_json(r.sigma_gap);
    rep["bo_gram_target"] = matrix_to_json(r.bo_gram_target);
  }
  json j = {{"mode", to_string(r.mode)},
            {"status", to_string(r.status)},
            {"feasible", r.feasible},
            {"message", r.message},
            {"report", std::move(rep)}};
  if (o.observer) {
    const ObserverModel& obs = *o.observer;
    json oj = {{"n_wo", obs.n_wo()},          {"n_yo", obs.n_yo()},
               {"K", matrix_to_json(obs.K)},  {"B_o", matrix_to_json(obs.B_o)},
               {"C_o", matrix_to_json(obs.C_o)}, {"D_o", matrix_to_json(obs.D_o)}};
    if (obs.Lambda_o && obs.Lambda_o->rows() > 0) oj["Lambda_o"] = complex_matrix_to_json(*obs.Lambda_o);
    j["observer"] = std::move(oj);
  }
  return j;
}

ObserverModel observer_from_json(const json& artifact) {
  if (!artifact.is_object() || !artifact.contains("observer")) {
    throw ConfigError("synthesis artifact has no observer section");
  }
  const json& o = artifact["observer"];
  ObserverModel obs;
  obs.K = matrix_from_json(o.at("K"), "observer.K");
  obs.B_o = matrix_from_json(o.at("B_o"), "observer.B_o");
  if (obs.B_o.size() == 0) obs.B_o = RealMatrix::Zero(obs.K.rows(), 0);
  obs.C_o = matrix_from_json(o.at("C_o"), "observer.C_o");
  obs.D_o = matrix_from_json(o.at("D_o"), "observer.D_o");
  if (o.contains("Lambda_o")) obs.Lambda_o = complex_matrix_from_json(o["Lambda_o"], "observer.Lambda_o");
  return obs;
}

ObserverModel resolve_observer(const ExperimentConfig& cfg, const RunOptions& opts) {
  const ObserverSpec& spec = require_observer(cfg);
  const SynthesisOptions sopts = synthesis_options(cfg, opts);
  if (spec.B_o) {
    auto [C_o, D_o] = derive_observer_output(spec.K, *spec.B_o, sopts.n_yo.value_or(cfg.plant.n_y()));
    ObserverModel obs{spec.K, *spec.B_o, std::move(C_o), std::move(D_o), std::nullopt};
    const auto rep = observer_realizability(cfg.plant, obs, opts.tol);
    if (!rep.passed) {
      throw NotRealizableError(fmt::format("observer with the given B_o is not physically realizable "
                                           "(residual_a = {:.3e}, residual_b = {:.3e})",
                                           rep.residual_a, rep.residual_b));
    }
    return obs;
  }
  if (spec.mode == ObserverMode::MT) return mt_synthesize(cfg.plant, spec.K, sopts);
  auto res = cmt_synthesize(cfg.plant, spec.K, sopts);
  if (!res.report.feasible) throw InfeasibleError(res.report.message);
  return std::move(*res.observer);
}

SimulationOutput cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (!cfg.simulation) throw ConfigError("simulation: missing required section");
  const SimulationSpec& sim = *cfg.simulation;
  const ObserverModel obs = resolve_observer(cfg, opts);
  const JointSystem joint = build_joint_system(cfg.plant, obs);

  MomentState init;
  init.mu_p = sim.mu_p0;
  init.mu_o = sim.mu_o0;
  init.sigma_p = sim.sigma_p0;
  init.sigma_po = sim.sigma_po0;
  init.sigma_o = sim.sigma_o0;
  const double dt = opts.dt.value_or(sim.dt);
  Trajectory traj = integrate_joint_moments(joint, init, sim.t_final, dt, sim.sample_stride);

  const Eigen::Index n = cfg.plant.n_x();
  SimulationOutput out;
  out.warnings = std::move(traj.warnings);
  out.columns.push_back("t");
  if (cfg.metrics.e_mu_norm) out.columns.push_back("e_mu_norm");
  if (cfg.metrics.e_sigma_norm) out.columns.push_back("e_sigma_fro");
  const bool joint_nu = cfg.metrics.nu_minus && n == 2;
  const bool split_nu = cfg.metrics.nu_minus && n == 4;
  if (joint_nu) out.columns.push_back("nu_minus");
  if (split_nu) {
    out.columns.push_back("nu_minus_plant");
    out.columns.push_back("nu_minus_observer");
  }
  if (cfg.metrics.fidelity) out.columns.push_back("fidelity");

  for (const MomentState& st : traj.states) {
    const RealMatrix S = st.joint_covariance();
    if (heisenberg_min_eigenvalue(S) < -kHeisenbergTol) {
      out.warnings.push_back(fmt::format("t={:.6g}: joint covariance violates the uncertainty principle", st.t));
    }
    TimeSeriesRow row;
    row.t = st.t;
    if (cfg.metrics.e_mu_norm) row.e_mu_norm = (st.mu_p - st.mu_o).norm();
    if (cfg.metrics.e_sigma_norm) row.e_sigma_fro = covariance_error_norm(st.sigma_p, st.sigma_o);
    if (joint_nu) row.nu_minus = ppt_nu_minus(S);
    if (split_nu) {
      row.nu_minus_plant = ppt_nu_minus(st.sigma_p);
      row.nu_minus_observer = ppt_nu_minus(st.sigma_o);
    }
    if (cfg.metrics.fidelity && n == 2) {
      row.fidelity = gaussian_fidelity_single_mode(GaussianState{st.mu_p, st.sigma_p},
                                                   GaussianState{st.mu_o, st.sigma_o});
    }
    out.rows.push_back(row);
  }
  return out;
}

void write_csv(const SimulationOutput& out, std::ostream& os) {
  for (std::size_t i = 0; i < out.columns.size(); ++i) os << (i ? "," : "") << out.columns[i];
  os << '\n';
  for (const TimeSeriesRow& r : out.rows) {
    for (std::size_t i = 0; i < out.columns.size(); ++i) {
      const std::string& c = out.columns[i];
      std::optional<double> v;
      if (c == "t") v = r.t;
      else if (c == "e_mu_norm") v = r.e_mu_norm;
      else if (c == "e_sigma_fro") v = r.e_sigma_fro;
      else if (c == "nu_minus") v = r.nu_minus;
      else if (c == "nu_minus_plant") v = r.nu_minus_plant;
      else if (c == "nu_minus_observer") v = r.nu_minus_observer;
      else if (c == "fidelity") v = r.fidelity;
      os << (i ? "," : "") << format_value(v);
    }
    os << '\n';
  }
}

void write_csv(const SimulationOutput& out, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError(fmt::format("cannot write {}", path.string()));
  write_csv(out, os);
}

std::vector<Theorem1Entry> theorem1_scan(const QuadratureSystem& plant, const std::vector<RealMatrix>& candidates) {
  std::vector<Theorem1Entry> out;
  for (const RealMatrix& K : candidates) {
    const auto gain = validate_gain(plant, K);
    RealMatrix B_o = realize_noise_form(noise_form_target(plant, K));
    auto [C_o, D_o] = derive_observer_output(K, B_o, plant.n_y());
    const ObserverModel obs{K, std::move(B_o), std::move(C_o), std::move(D_o), std::nullopt};
    const JointSystem joint = build_joint_system(plant, obs);
    out.push_back({K, gain.max_real_part, theorem1_limit(joint, plant.n_x())});
  }
  return out;
}

std::vector<RealMatrix> ex3_gain_grid() {
  const double levels[] = {0.25, 0.5, 1.0, 2.0, 3.0};
  std::vector<RealMatrix> grid;
  for (double a : levels) {
    for (double b : levels) {
      RealMatrix K = RealMatrix::Zero(2, 2);
      K(0, 0) = a;
      K(1, 1) = b;
      grid.push_back(K);
    }
  }
  return grid;
}

ReproduceSummary cmd_reproduce(const std::string& example, const std::filesystem::path& out_dir,
                               const RunOptions& opts) {
  std::filesystem::create_directories(out_dir);
  ReproduceSummary summary;
  auto emit_json = [&](const json& j, const std::string& name) {
    write_json(j, out_dir / name);
    summary.files.push_back(out_dir / name);
  };
  auto emit_csv = [&](const SimulationOutput& s, const std::string& name) {
    write_csv(s, out_dir / name);
    summary.files.push_back(out_dir / name);
    summary.warnings += s.warnings.size();
  };

  if (example == "ex1") {
    const auto cmt_cfg = builtin("ex1_cmt");
    const auto mt_cfg = builtin("ex1_mt");
    const auto k3_cfg = builtin("ex1_cmt_k3");
    emit_json(config_to_json(cmt_cfg), "ex1_cmt_config.json");
    emit_json(config_to_json(mt_cfg), "ex1_mt_config.json");
    emit_json(config_to_json(k3_cfg), "ex1_cmt_k3_config.json");

    auto cmt_run = std::async(std::launch::async, [&] { return cmd_simulate(cmt_cfg, opts); });
    auto mt_run = std::async(std::launch::async, [&] { return cmd_simulate(mt_cfg, opts); });

    const auto cmt_syn = cmd_synthesize(cmt_cfg, std::nullopt, opts);
    const auto mt_syn = cmd_synthesize(mt_cfg, std::nullopt, opts);
    const auto k3_syn = cmd_synthesize(k3_cfg, std::nullopt, opts);
    emit_json(synthesis_to_json(cmt_syn), "ex1_cmt_synthesis.json");
    emit_json(synthesis_to_json(mt_syn), "ex1_mt_synthesis.json");
    emit_json(synthesis_to_json(k3_syn), "ex1_cmt_k3_synthesis.json");
    summary.notes.push_back(fmt::format("K = I: CMT {}", to_string(cmt_syn.report.status)));
    summary.notes.push_back(fmt::format("K = 3I: CMT {} ({})", to_string(k3_syn.report.status), k3_syn.report.message));
    summary.notes.push_back(fmt::format("K = 3I: MT {}", to_string(mt_syn.report.status)));

    emit_csv(cmt_run.get(), "ex1_cmt.csv");
    emit_csv(mt_run.get(), "ex1_mt.csv");
  } else if (example == "ex2") {
    const auto cfg = builtin("ex2");
    emit_json(config_to_json(cfg), "ex2_config.json");
    const auto syn = cmd_synthesize(cfg, std::nullopt, opts);
    emit_json(synthesis_to_json(syn), "ex2_synthesis.json");
    summary.notes.push_back(fmt::format("CMT {}", to_string(syn.report.status)));
    emit_csv(cmd_simulate(cfg, opts), "ex2.csv");
  } else if (example == "ex3") {
    const auto cfg = builtin("ex3");
    emit_json(config_to_json(cfg), "ex3_config.json");
    const auto syn = cmd_synthesize(cfg, std::nullopt, opts);
    emit_json(synthesis_to_json(syn), "ex3_mt_synthesis.json");
    summary.notes.push_back(fmt::format("K = I: MT {}", to_string(syn.report.status)));
    emit_csv(cmd_simulate(cfg, opts), "ex3_mt.csv");

    const auto scan = theorem1_scan(cfg.plant, ex3_gain_grid());
    const auto path = out_dir / "ex3_theorem1.csv";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError(fmt::format("cannot write {}", path.string()));
    os << "k11,k12,k21,k22,max_real_part,limit_norm,converged,direct\n";
    std::size_t vanishing = 0;
    for (const auto& e : scan) {
      const double norm = e.limit.value.norm();
      if (e.limit.converged && norm < 1e-8) ++vanishing;
      os << fmt::format("{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{},{}\n", e.K(0, 0), e.K(0, 1), e.K(1, 0),
                        e.K(1, 1), e.max_real_part, norm, e.limit.converged ? 1 : 0, e.limit.direct ? 1 : 0);
    }
    summary.files.push_back(path);
    summary.notes.push_back(fmt::format("covariance-tracking limit is nonzero or divergent for {} of {} gains",
                                        scan.size() - vanishing, scan.size()));
  } else {
    throw InputError(fmt::format("unknown example '{}'; expected ex1, ex2 or ex3", example));
  }
  return summary;
}

}  // namespace cohobs
