#include "cohobs/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace cohobs {

using nlohmann::json;

namespace {

const json& require_field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError(fmt::format("{}: expected an object", path));
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(fmt::format("{}.{}: missing required field", path, key));
  return *it;
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(fmt::format("{}: expected a number", path));
  return j.get<double>();
}

Eigen::Index even_int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(fmt::format("{}: expected an integer", path));
  const auto v = j.get<long long>();
  if (v <= 0 || v % 2 != 0) throw ConfigError(fmt::format("{}: must be a positive even integer, got {}", path, v));
  return static_cast<Eigen::Index>(v);
}

RealVector vector_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(fmt::format("{}: expected an array of numbers", path));
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_at(j[i], fmt::format("{}[{}]", path, i));
  return v;
}

void require_shape(const RealMatrix& M, Eigen::Index rows, Eigen::Index cols, const std::string& path) {
  if (M.rows() != rows || M.cols() != cols) {
    throw ConfigError(fmt::format("{}: expected {}x{}, got {}x{}", path, rows, cols, M.rows(), M.cols()));
  }
}

void require_symmetric(const RealMatrix& M, const std::string& path) {
  if ((M - M.transpose()).norm() > 1e-12 * std::max(1.0, M.norm())) {
    throw ConfigError(fmt::format("{}: covariance block must be symmetric", path));
  }
}

bool flag_at(const json& obj, const char* key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(fmt::format("metrics.{}: expected a boolean", key));
  return it->get<bool>();
}

QuadratureSystem parse_plant(const json& j) {
  const std::string path = "plant";
  RealMatrix A = matrix_from_json(require_field(j, "A", path), "plant.A");
  RealMatrix B = matrix_from_json(require_field(j, "B", path), "plant.B");
  RealMatrix C = matrix_from_json(require_field(j, "C", path), "plant.C");
  const Eigen::Index n_x = j.contains("n_x") ? even_int_at(j["n_x"], "plant.n_x") : A.rows();
  const Eigen::Index n_w = j.contains("n_w") ? even_int_at(j["n_w"], "plant.n_w") : B.cols();
  const Eigen::Index n_y = j.contains("n_y") ? even_int_at(j["n_y"], "plant.n_y") : C.rows();
  if (n_x % 2 != 0 || n_x == 0) throw ConfigError(fmt::format("plant.n_x: must be a positive even integer, got {}", n_x));
  if (n_w % 2 != 0 || n_w == 0) throw ConfigError(fmt::format("plant.n_w: must be a positive even integer, got {}", n_w));
  if (n_y % 2 != 0 || n_y == 0) throw ConfigError(fmt::format("plant.n_y: must be a positive even integer, got {}", n_y));
  require_shape(A, n_x, n_x, "plant.A");
  require_shape(B, n_x, n_w, "plant.B");
  require_shape(C, n_y, n_x, "plant.C");
  RealMatrix D = j.contains("D") ? matrix_from_json(j["D"], "plant.D") : selector(n_y, n_w);
  require_shape(D, n_y, n_w, "plant.D");
  try {
    return QuadratureSystem::make(std::move(A), std::move(B), std::move(C), std::move(D));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("plant: {}", e.what()));
  }
}

ObserverSpec parse_observer(const json& j, const QuadratureSystem& plant) {
  ObserverSpec spec;
  spec.K = matrix_from_json(require_field(j, "K", "observer"), "observer.K");
  require_shape(spec.K, plant.n_x(), plant.n_y(), "observer.K");
  const json& mode = require_field(j, "mode", "observer");
  if (mode == "mt") {
    spec.mode = ObserverMode::MT;
  } else if (mode == "cmt") {
    spec.mode = ObserverMode::CMT;
  } else {
    throw ConfigError("observer.mode: expected \"mt\" or \"cmt\"");
  }
  if (j.contains("n_yo")) spec.n_yo = even_int_at(j["n_yo"], "observer.n_yo");
  if (j.contains("B_o")) {
    RealMatrix B_o = matrix_from_json(j["B_o"], "observer.B_o");
    if (B_o.rows() != plant.n_x() || B_o.cols() % 2 != 0) {
      throw ConfigError(fmt::format("observer.B_o: expected {} rows and an even column count, got {}x{}",
                                    plant.n_x(), B_o.rows(), B_o.cols()));
    }
    spec.B_o = std::move(B_o);
  }
  return spec;
}

SimulationSpec parse_simulation(const json& j, Eigen::Index n_x) {
  const std::string path = "simulation";
  SimulationSpec sim;
  sim.t_final = number_at(require_field(j, "t_final", path), "simulation.t_final");
  if (!(sim.t_final >= 0.0)) throw ConfigError("simulation.t_final: must be nonnegative");
  if (j.contains("dt")) sim.dt = number_at(j["dt"], "simulation.dt");
  if (!(sim.dt > 0.0)) throw ConfigError("simulation.dt: must be positive");
  if (j.contains("sample_stride")) {
    if (!j["sample_stride"].is_number_integer() || j["sample_stride"].get<long long>() < 1) {
      throw ConfigError("simulation.sample_stride: expected a positive integer");
    }
    sim.sample_stride = static_cast<int>(j["sample_stride"].get<long long>());
  }
  sim.mu_p0 = vector_from_json(require_field(j, "mu_p0", path), "simulation.mu_p0");
  sim.mu_o0 = vector_from_json(require_field(j, "mu_o0", path), "simulation.mu_o0");
  sim.sigma_p0 = matrix_from_json(require_field(j, "sigma_p0", path), "simulation.sigma_p0");
  sim.sigma_o0 = matrix_from_json(require_field(j, "sigma_o0", path), "simulation.sigma_o0");
  sim.sigma_po0 = j.contains("sigma_po0") ? matrix_from_json(j["sigma_po0"], "simulation.sigma_po0")
                                          : RealMatrix::Zero(n_x, n_x);
  if (sim.mu_p0.size() != n_x) throw ConfigError(fmt::format("simulation.mu_p0: expected length {}", n_x));
  if (sim.mu_o0.size() != n_x) throw ConfigError(fmt::format("simulation.mu_o0: expected length {}", n_x));
  require_shape(sim.sigma_p0, n_x, n_x, "simulation.sigma_p0");
  require_shape(sim.sigma_o0, n_x, n_x, "simulation.sigma_o0");
  require_shape(sim.sigma_po0, n_x, n_x, "simulation.sigma_po0");
  require_symmetric(sim.sigma_p0, "simulation.sigma_p0");
  require_symmetric(sim.sigma_o0, "simulation.sigma_o0");
  return sim;
}

}  // namespace

json matrix_to_json(const RealMatrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json complex_matrix_to_json(const ComplexMatrix& M) {
  return json{{"re", matrix_to_json(M.real())}, {"im", matrix_to_json(M.imag())}};
}

RealMatrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(fmt::format("{}: expected an array of rows", path));
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return RealMatrix(0, 0);
  if (!j[0].is_array()) throw ConfigError(fmt::format("{}[0]: expected an array", path));
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  RealMatrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(fmt::format("{}[{}]: expected a row of {} numbers", path, i, cols));
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      M(i, k) = number_at(row[static_cast<std::size_t>(k)], fmt::format("{}[{}][{}]", path, i, k));
    }
  }
  return M;
}

ComplexMatrix complex_matrix_from_json(const json& j, const std::string& path) {
  const RealMatrix re = matrix_from_json(require_field(j, "re", path), path + ".re");
  const RealMatrix im = matrix_from_json(require_field(j, "im", path), path + ".im");
  require_shape(im, re.rows(), re.cols(), path + ".im");
  ComplexMatrix M(re.rows(), re.cols());
  M.real() = re;
  M.imag() = im;
  return M;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig cfg{parse_plant(require_field(j, "plant", "config")), std::nullopt, std::nullopt, {}};
  if (j.contains("observer")) cfg.observer = parse_observer(j["observer"], cfg.plant);
  if (j.contains("simulation")) cfg.simulation = parse_simulation(j["simulation"], cfg.plant.n_x());
  if (j.contains("metrics")) {
    const json& m = j["metrics"];
    if (!m.is_object()) throw ConfigError("metrics: expected an object");
    cfg.metrics.e_sigma_norm = flag_at(m, "e_sigma_norm", true);
    cfg.metrics.e_mu_norm = flag_at(m, "e_mu_norm", true);
    cfg.metrics.nu_minus = flag_at(m, "nu_minus", true);
    cfg.metrics.fidelity = flag_at(m, "fidelity", true);
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = text.substr(0, std::min<std::size_t>(e.byte, text.size()));
    const auto line = 1 + std::count(upto.begin(), upto.end(), '\n');
    throw ConfigError(fmt::format("{}:{}: JSON parse error: {}", source, line, e.what()));
  }
  return parse_config(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["plant"] = {{"n_x", cfg.plant.n_x()}, {"n_w", cfg.plant.n_w()}, {"n_y", cfg.plant.n_y()},
                {"A", matrix_to_json(cfg.plant.A)}, {"B", matrix_to_json(cfg.plant.B)},
                {"C", matrix_to_json(cfg.plant.C)}, {"D", matrix_to_json(cfg.plant.D)}};
  if (cfg.observer) {
    json o = {{"K", matrix_to_json(cfg.observer->K)}, {"mode", to_string(cfg.observer->mode)}};
    if (cfg.observer->n_yo) o["n_yo"] = *cfg.observer->n_yo;
    if (cfg.observer->B_o) o["B_o"] = matrix_to_json(*cfg.observer->B_o);
    j["observer"] = std::move(o);
  }
  if (cfg.simulation) {
    const auto& s = *cfg.simulation;
    j["simulation"] = {{"t_final", s.t_final}, {"dt", s.dt}, {"sample_stride", s.sample_stride},
                       {"mu_p0", vector_to_json(s.mu_p0)}, {"mu_o0", vector_to_json(s.mu_o0)},
                       {"sigma_p0", matrix_to_json(s.sigma_p0)}, {"sigma_o0", matrix_to_json(s.sigma_o0)},
                       {"sigma_po0", matrix_to_json(s.sigma_po0)}};
  }
  j["metrics"] = {{"e_sigma_norm", cfg.metrics.e_sigma_norm}, {"e_mu_norm", cfg.metrics.e_mu_norm},
                  {"nu_minus", cfg.metrics.nu_minus}, {"fidelity", cfg.metrics.fidelity}};
  return j;
}

}  // namespace cohobs
