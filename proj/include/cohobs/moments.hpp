#pragma once

#include <string>
#include <vector>

#include "cohobs/observer_model.hpp"
#include "cohobs/quadrature.hpp"

namespace cohobs {

/// First and second moments of the plant/observer pair at time t.
struct MomentState {
  double t = 0.0;
  RealVector mu_p;
  RealVector mu_o;
  RealMatrix sigma_p;
  RealMatrix sigma_po;
  RealMatrix sigma_o;

  Eigen::Index n_x() const { return mu_p.size(); }
  RealVector joint_mean() const;
  RealMatrix joint_covariance() const;
  static MomentState from_joint(double t, const RealVector& mu, const RealMatrix& sigma);
};

/// Cascade coefficients A = [A_p 0; K C_p  A_p - K C_p], B = [B_p 0; K D_p  B_o].
struct JointSystem {
  RealMatrix A;
  RealMatrix B;
  Eigen::Index n_x = 0;
};

/// Solves Acoef X + X Bcoef + Q = 0 (complex Schur Bartels-Stewart).
/// Throws SingularityError when Acoef and -Bcoef share an eigenvalue.
RealMatrix solve_sylvester(const RealMatrix& Acoef, const RealMatrix& Bcoef, const RealMatrix& Q);

/// Solves A X + X A^T + N = 0 for Hurwitz A; result is symmetrized.
RealMatrix steady_state_covariance(const RealMatrix& A, const RealMatrix& N);

JointSystem build_joint_system(const QuadratureSystem& plant, const ObserverModel& obs);

struct Trajectory {
  std::vector<MomentState> states;
  std::vector<std::string> warnings;  // covariance eigenvalue floor violations
};

/// Fixed-step RK4 on mu' = A mu and Sigma' = A Sigma + Sigma A^T + B B^T.
/// The step is adjusted to t_final / round(t_final / dt); every `stride`-th
/// state and the final state are recorded.
Trajectory integrate_joint_moments(const JointSystem& joint, const MomentState& init,
                                   double t_final, double dt, int stride = 1);

/// 10 / |max real part of eig(A)|, the default simulation horizon.
double default_horizon(const JointSystem& joint);

struct LimitResult {
  RealVector value;     // length n_x^2, vec(Sigma_o - Sigma_p) in the limit
  bool converged;
  bool direct;          // evaluated exactly at s = 0
};

/// lim_{s->0} (E_o (x) E_o - E_p (x) E_p)(sI - I (x) A - A (x) I)^{-1} vec(B B^T).
/// Solved directly at s = 0 when the Kronecker sum is nonsingular; otherwise
/// probed at s = 1e-2..1e-5 and Richardson-extrapolated.
LimitResult theorem1_limit(const JointSystem& joint, Eigen::Index n_x);

}  // namespace cohobs
