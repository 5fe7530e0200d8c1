#include "cohobs/builtin_examples.hpp"

#include <map>
#include <stdexcept>

namespace cohobs {

namespace {

// Single-mode optical parametric oscillator; the CMT run uses K = I.
constexpr const char* kEx1Cmt = R"({
  "plant": {"n_x": 2, "n_w": 2, "n_y": 2,
            "A": [[-0.4, 0.0], [0.0, -0.6]],
            "B": [[-1.0, 0.0], [0.0, -1.0]],
            "C": [[1.0, 0.0], [0.0, 1.0]]},
  "observer": {"K": [[1.0, 0.0], [0.0, 1.0]], "mode": "cmt"},
  "simulation": {"t_final": 6.0, "dt": 0.001, "sample_stride": 10,
                 "mu_p0": [1.0, 1.0], "mu_o0": [0.0, 0.0],
                 "sigma_p0": [[1.1, 0.0], [0.0, 1.1]],
                 "sigma_o0": [[2.0, 0.0], [0.0, 2.0]]},
  "metrics": {"e_sigma_norm": true, "e_mu_norm": true, "nu_minus": true, "fidelity": true}
})";

// Same plant, mean-tracking observer with K = 3I and B_o = diag(1, -2).
constexpr const char* kEx1Mt = R"({
  "plant": {"n_x": 2, "n_w": 2, "n_y": 2,
            "A": [[-0.4, 0.0], [0.0, -0.6]],
            "B": [[-1.0, 0.0], [0.0, -1.0]],
            "C": [[1.0, 0.0], [0.0, 1.0]]},
  "observer": {"K": [[3.0, 0.0], [0.0, 3.0]], "mode": "mt",
               "B_o": [[1.0, 0.0], [0.0, -2.0]]},
  "simulation": {"t_final": 6.0, "dt": 0.001, "sample_stride": 10,
                 "mu_p0": [1.0, 1.0], "mu_o0": [0.0, 0.0],
                 "sigma_p0": [[1.1, 0.0], [0.0, 1.1]],
                 "sigma_o0": [[2.0, 0.0], [0.0, 2.0]]},
  "metrics": {"e_sigma_norm": true, "e_mu_norm": true, "nu_minus": true, "fidelity": true}
})";

// K = 3I admits an MT observer but no CMT observer.
constexpr const char* kEx1CmtK3 = R"({
  "plant": {"n_x": 2, "n_w": 2, "n_y": 2,
            "A": [[-0.4, 0.0], [0.0, -0.6]],
            "B": [[-1.0, 0.0], [0.0, -1.0]],
            "C": [[1.0, 0.0], [0.0, 1.0]]},
  "observer": {"K": [[3.0, 0.0], [0.0, 3.0]], "mode": "cmt"}
})";

// Two coupled oscillators that become entangled; observer starts at 2I.
constexpr const char* kEx2 = R"({
  "plant": {"n_x": 4, "n_w": 4, "n_y": 4,
            "A": [[-0.4, 0.0, 0.0, 0.0], [0.0, -0.6, 0.0, 0.0], [1.0, 0.0, -1.4, 0.0], [0.0, 1.0, 0.0, -1.6]],
            "B": [[-1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 2.0]],
            "C": [[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0], [0.0, 0.0, -2.0, 0.0], [0.0, 0.0, 0.0, -1.0]]},
  "observer": {"K": [[0.2, 0.0, -0.1, 0.0], [0.0, 0.05, 0.0, -0.1], [0.6, 0.0, -0.1, 0.0], [0.0, 0.4, 0.0, -0.1]],
               "mode": "cmt"},
  "simulation": {"t_final": 10.0, "dt": 0.001, "sample_stride": 10,
                 "mu_p0": [1.0, 1.0, 1.0, 1.0], "mu_o0": [0.0, 0.0, 0.0, 0.0],
                 "sigma_p0": [[1.1, 0.0, 0.0, 0.0], [0.0, 1.1, 0.0, 0.0], [0.0, 0.0, 2.0, 0.0], [0.0, 0.0, 0.0, 2.0]],
                 "sigma_o0": [[2.0, 0.0, 0.0, 0.0], [0.0, 2.0, 0.0, 0.0], [0.0, 0.0, 2.0, 0.0], [0.0, 0.0, 0.0, 2.0]]},
  "metrics": {"e_sigma_norm": true, "e_mu_norm": true, "nu_minus": true, "fidelity": true}
})";

// Marginally stable plant: mean tracking works, covariance tracking cannot.
constexpr const char* kEx3 = R"({
  "plant": {"n_x": 2, "n_w": 2, "n_y": 2,
            "A": [[-1.0, 1.0], [1.0, -1.0]],
            "B": [[-1.4142135623730951, 0.0], [0.0, -1.4142135623730951]],
            "C": [[1.4142135623730951, 0.0], [0.0, 1.4142135623730951]]},
  "observer": {"K": [[1.0, 0.0], [0.0, 1.0]], "mode": "mt"},
  "simulation": {"t_final": 6.0, "dt": 0.001, "sample_stride": 10,
                 "mu_p0": [1.0, 1.0], "mu_o0": [0.0, 0.0],
                 "sigma_p0": [[1.0, 0.0], [0.0, 1.0]],
                 "sigma_o0": [[2.0, 0.0], [0.0, 2.0]]},
  "metrics": {"e_sigma_norm": true, "e_mu_norm": true, "nu_minus": true, "fidelity": true}
})";

const std::map<std::string, const char*>& registry() {
  static const std::map<std::string, const char*> configs = {
      {"ex1_cmt", kEx1Cmt}, {"ex1_mt", kEx1Mt}, {"ex1_cmt_k3", kEx1CmtK3}, {"ex2", kEx2}, {"ex3", kEx3}};
  return configs;
}

}  // namespace

std::vector<std::string> builtin_config_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : registry()) names.push_back(name);
  return names;
}

nlohmann::json builtin_config(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) throw std::out_of_range("unknown built-in config: " + name);
  return nlohmann::json::parse(it->second);
}

}  // namespace cohobs
