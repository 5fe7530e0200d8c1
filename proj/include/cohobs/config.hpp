#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "cohobs/errors.hpp"
#include "cohobs/quadrature.hpp"
#include "cohobs/synthesis.hpp"

namespace cohobs {

// Malformed or inconsistent configuration; the message names the field path.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

struct ObserverSpec {
  RealMatrix K;
  ObserverMode mode = ObserverMode::CMT;
  std::optional<Eigen::Index> n_yo;
  std::optional<RealMatrix> B_o;  // explicit noise matrix; otherwise synthesized
};

struct SimulationSpec {
  double t_final = 0.0;
  double dt = 1e-3;
  int sample_stride = 100;
  RealVector mu_p0;
  RealVector mu_o0;
  RealMatrix sigma_p0;
  RealMatrix sigma_o0;
  RealMatrix sigma_po0;  // zero (separable) unless given
};

struct MetricFlags {
  bool e_sigma_norm = true;
  bool e_mu_norm = true;
  bool nu_minus = true;
  bool fidelity = true;
};

struct ExperimentConfig {
  QuadratureSystem plant;
  std::optional<ObserverSpec> observer;
  std::optional<SimulationSpec> simulation;
  MetricFlags metrics;
};

nlohmann::json matrix_to_json(const RealMatrix& M);
nlohmann::json vector_to_json(const RealVector& v);
nlohmann::json complex_matrix_to_json(const ComplexMatrix& M);
RealMatrix matrix_from_json(const nlohmann::json& j, const std::string& path);
ComplexMatrix complex_matrix_from_json(const nlohmann::json& j, const std::string& path);

ExperimentConfig parse_config(const nlohmann::json& j);
/// Parses JSON text; syntax errors report the line number.
ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace cohobs
