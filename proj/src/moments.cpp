#include "cohobs/moments.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include <fmt/format.h>

#include "cohobs/errors.hpp"

namespace cohobs {

namespace {

using Complex = std::complex<double>;

constexpr double kPsdFloor = -1e-8;

RealMatrix kron(const RealMatrix& X, const RealMatrix& Y) {
  RealMatrix out(X.rows() * Y.rows(), X.cols() * Y.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      out.block(i * Y.rows(), j * Y.cols(), Y.rows(), Y.cols()) = X(i, j) * Y;
    }
  }
  return out;
}

RealVector vec(const RealMatrix& M) { return Eigen::Map<const RealVector>(M.data(), M.size()); }

double min_eigenvalue(const RealMatrix& S) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

RealVector MomentState::joint_mean() const {
  RealVector mu(2 * n_x());
  mu << mu_p, mu_o;
  return mu;
}

RealMatrix MomentState::joint_covariance() const {
  const Eigen::Index n = n_x();
  RealMatrix S(2 * n, 2 * n);
  S.topLeftCorner(n, n) = sigma_p;
  S.topRightCorner(n, n) = sigma_po;
  S.bottomLeftCorner(n, n) = sigma_po.transpose();
  S.bottomRightCorner(n, n) = sigma_o;
  return S;
}

MomentState MomentState::from_joint(double t, const RealVector& mu, const RealMatrix& sigma) {
  const Eigen::Index n = mu.size() / 2;
  MomentState s;
  s.t = t;
  s.mu_p = mu.head(n);
  s.mu_o = mu.tail(n);
  s.sigma_p = sigma.topLeftCorner(n, n);
  s.sigma_po = sigma.topRightCorner(n, n);
  s.sigma_o = sigma.bottomRightCorner(n, n);
  return s;
}

RealMatrix solve_sylvester(const RealMatrix& Acoef, const RealMatrix& Bcoef, const RealMatrix& Q) {
  const Eigen::Index n = Acoef.rows();
  const Eigen::Index m = Bcoef.rows();
  if (Acoef.cols() != n || Bcoef.cols() != m) throw DimensionError("solve_sylvester: coefficients must be square");
  if (Q.rows() != n || Q.cols() != m) {
    throw DimensionError(fmt::format("solve_sylvester: Q must be {}x{}, got {}x{}", n, m, Q.rows(), Q.cols()));
  }
  if (n == 0 || m == 0) return RealMatrix::Zero(n, m);

  Eigen::ComplexSchur<ComplexMatrix> schur_a(Acoef.cast<Complex>());
  Eigen::ComplexSchur<ComplexMatrix> schur_b(Bcoef.cast<Complex>());
  const ComplexMatrix& T = schur_a.matrixT();
  const ComplexMatrix& S = schur_b.matrixT();
  const ComplexMatrix& U = schur_a.matrixU();
  const ComplexMatrix& V = schur_b.matrixU();

  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) gap = std::min(gap, std::abs(T(i, i) + S(j, j)));
  }
  const double scale = std::max(1.0, Acoef.norm() + Bcoef.norm());
  if (gap <= 1e-10 * scale) {
    throw SingularityError(fmt::format(
        "Sylvester equation has no unique solution: min |lambda_i(A) + lambda_j(B)| = {:.3e}", gap));
  }

  // T Y + Y S = F with T, S upper triangular; solve column by column.
  ComplexMatrix F = -(U.adjoint() * Q.cast<Complex>() * V);
  ComplexMatrix Y(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    Eigen::VectorXcd rhs = F.col(j);
    for (Eigen::Index k = 0; k < j; ++k) rhs -= S(k, j) * Y.col(k);
    ComplexMatrix shifted = T;
    shifted.diagonal().array() += S(j, j);
    Y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  RealMatrix X = (U * Y * V.adjoint()).real();

  const double residual = (Acoef * X + X * Bcoef + Q).norm();
  if (residual > 1e-8 * (1.0 + Q.norm())) {
    throw ConsistencyError(fmt::format("Sylvester residual {:.3e} above tolerance", residual));
  }
  return X;
}

RealMatrix steady_state_covariance(const RealMatrix& A, const RealMatrix& N) {
  if (A.rows() != A.cols() || N.rows() != A.rows() || N.cols() != A.cols()) {
    throw DimensionError("steady_state_covariance: A and N must be square and equal in size");
  }
  const auto h = is_hurwitz(A);
  if (!h.hurwitz) {
    throw StabilityError(fmt::format("drift matrix is not Hurwitz (max real part {:.6g})", h.max_real_part));
  }
  RealMatrix X = solve_sylvester(A, A.transpose(), N);
  return 0.5 * (X + X.transpose());
}

JointSystem build_joint_system(const QuadratureSystem& plant, const ObserverModel& obs) {
  const Eigen::Index n = plant.n_x();
  if (obs.K.rows() != n || obs.K.cols() != plant.n_y()) {
    throw DimensionError(fmt::format("gain K must be {}x{}, got {}x{}", n, plant.n_y(), obs.K.rows(), obs.K.cols()));
  }
  if (obs.B_o.rows() != n) {
    throw DimensionError(fmt::format("B_o must have {} rows, got {}", n, obs.B_o.rows()));
  }
  const Eigen::Index n_wp = plant.n_w();
  const Eigen::Index n_wo = obs.n_wo();
  JointSystem joint;
  joint.n_x = n;
  joint.A = RealMatrix::Zero(2 * n, 2 * n);
  joint.A.topLeftCorner(n, n) = plant.A;
  joint.A.bottomLeftCorner(n, n) = obs.K * plant.C;
  joint.A.bottomRightCorner(n, n) = plant.A - obs.K * plant.C;
  joint.B = RealMatrix::Zero(2 * n, n_wp + n_wo);
  joint.B.topLeftCorner(n, n_wp) = plant.B;
  joint.B.bottomLeftCorner(n, n_wp) = obs.K * plant.D;
  joint.B.bottomRightCorner(n, n_wo) = obs.B_o;
  return joint;
}

Trajectory integrate_joint_moments(const JointSystem& joint, const MomentState& init, double t_final,
                                   double dt, int stride) {
  if (!(dt > 0.0)) throw InputError(fmt::format("dt must be positive, got {}", dt));
  if (!(t_final >= 0.0)) throw InputError(fmt::format("t_final must be nonnegative, got {}", t_final));
  if (stride < 1) throw InputError(fmt::format("sample stride must be >= 1, got {}", stride));
  const Eigen::Index n2 = joint.A.rows();
  if (init.n_x() * 2 != n2) {
    throw DimensionError(fmt::format("initial state has n_x = {}, joint system expects {}", init.n_x(), n2 / 2));
  }

  const RealMatrix& A = joint.A;
  const RealMatrix At = A.transpose();
  const RealMatrix noise = joint.B * joint.B.transpose();
  auto cov_rhs = [&](const RealMatrix& S) -> RealMatrix { return A * S + S * At + noise; };

  Trajectory out;
  auto record = [&](double t, const RealVector& mu, const RealMatrix& S) {
    MomentState st = MomentState::from_joint(t, mu, S);
    const double ep = min_eigenvalue(st.sigma_p);
    const double eo = min_eigenvalue(st.sigma_o);
    if (ep < kPsdFloor || eo < kPsdFloor) {
      out.warnings.push_back(fmt::format("t={:.6g}: covariance eigenvalue below floor (plant {:.3e}, observer {:.3e})",
                                         t, ep, eo));
    }
    out.states.push_back(std::move(st));
  };

  RealVector mu = init.joint_mean();
  RealMatrix S = init.joint_covariance();
  record(init.t, mu, S);
  const long steps = std::lround(t_final / dt);
  if (steps == 0) return out;
  const double h = t_final / static_cast<double>(steps);

  for (long k = 1; k <= steps; ++k) {
    const RealVector m1 = A * mu;
    const RealVector m2 = A * (mu + 0.5 * h * m1);
    const RealVector m3 = A * (mu + 0.5 * h * m2);
    const RealVector m4 = A * (mu + h * m3);
    mu += (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);

    const RealMatrix k1 = cov_rhs(S);
    const RealMatrix k2 = cov_rhs(S + 0.5 * h * k1);
    const RealMatrix k3 = cov_rhs(S + 0.5 * h * k2);
    const RealMatrix k4 = cov_rhs(S + h * k3);
    S += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    S = 0.5 * (S + S.transpose()).eval();

    const double t = init.t + static_cast<double>(k) * h;
    if (!mu.allFinite() || !S.allFinite()) {
      throw DivergenceError(fmt::format("moment integration diverged at t = {:.6g}", t), t);
    }
    if (k % stride == 0 || k == steps) record(t, mu, S);
  }
  return out;
}

double default_horizon(const JointSystem& joint) {
  const auto h = is_hurwitz(joint.A);
  const double rate = std::abs(h.max_real_part);
  if (rate < 1e-12) throw StabilityError("joint system has a marginal mode; no default horizon");
  return 10.0 / rate;
}

LimitResult theorem1_limit(const JointSystem& joint, Eigen::Index n_x) {
  const Eigen::Index n2 = joint.A.rows();
  if (n2 != 2 * n_x) throw DimensionError(fmt::format("joint system has {} states, expected {}", n2, 2 * n_x));
  require_even(n_x, "n_x");

  const RealMatrix I2 = RealMatrix::Identity(n2, n2);
  const RealMatrix kron_sum = kron(I2, joint.A) + kron(joint.A, I2);
  const RealVector rhs = vec(joint.B * joint.B.transpose());
  RealMatrix E_p = RealMatrix::Zero(n_x, n2);
  RealMatrix E_o = RealMatrix::Zero(n_x, n2);
  E_p.leftCols(n_x).setIdentity();
  E_o.rightCols(n_x).setIdentity();
  const RealMatrix select = kron(E_o, E_o) - kron(E_p, E_p);

  Eigen::EigenSolver<RealMatrix> es(joint.A, false);
  const auto lambda = es.eigenvalues();
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    for (Eigen::Index j = 0; j < lambda.size(); ++j) gap = std::min(gap, std::abs(lambda(i) + lambda(j)));
  }
  const Eigen::Index dim = n2 * n2;
  if (gap > 1e-9 * std::max(1.0, joint.A.norm())) {
    RealVector v = (-kron_sum).fullPivLu().solve(rhs);
    return {select * v, true, true};
  }

  const double probes[] = {1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<RealVector> values;
  for (double s : probes) {
    Eigen::FullPivLU<RealMatrix> lu(s * RealMatrix::Identity(dim, dim) - kron_sum);
    if (!lu.isInvertible()) break;
    values.push_back(select * lu.solve(rhs));
  }
  if (values.empty()) throw SingularityError("Kronecker system singular at every probe point");
  if (values.size() < 3) return {values.back(), false, false};

  // Probes shrink by 10x: f0 ~ (10 f(s/10) - f(s)) / 9.
  std::vector<RealVector> extrapolated;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    extrapolated.push_back((10.0 * values[k + 1] - values[k]) / 9.0);
  }
  // The two finest extrapolations must agree; coarser probes still carry O(s^2) bias.
  const RealVector& a = extrapolated[extrapolated.size() - 2];
  const RealVector& b = extrapolated.back();
  const double diff = (b - a).norm();
  const bool converged = diff <= 1e-6 * std::max(a.norm(), b.norm()) || diff <= 1e-14;
  return {extrapolated.back(), converged, false};
}

}  // namespace cohobs
