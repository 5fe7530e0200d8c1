#pragma once

#include <optional>

#include "cohobs/quadrature.hpp"

namespace cohobs {

/// Cascaded coherent observer driven by the plant output:
///   dx_o = (A_p - K C_p) x_o dt + K dy_p + B_o dw_o
///   dy_o = C_o x_o dt + D_o [dy_p; dw_o]
struct ObserverModel {
  RealMatrix K;                          // n_x x n_yp
  RealMatrix B_o;                        // n_x x n_wo, n_wo may be 0
  RealMatrix C_o;                        // n_yo x n_x
  RealMatrix D_o;                        // n_yo x (n_yp + n_wo), [I 0]
  std::optional<ComplexMatrix> Lambda_o; // (n_wo/2) x n_x, when synthesized from a coupling

  Eigen::Index n_wo() const { return B_o.cols(); }
  Eigen::Index n_yo() const { return C_o.rows(); }
};

}  // namespace cohobs
