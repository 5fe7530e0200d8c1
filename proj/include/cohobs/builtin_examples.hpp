#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace cohobs {

/// Names of the bundled experiment configs: ex1_cmt, ex1_mt, ex1_cmt_k3, ex2, ex3.
std::vector<std::string> builtin_config_names();

/// Throws std::out_of_range for an unknown name.
nlohmann::json builtin_config(const std::string& name);

}  // namespace cohobs
