#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cohobs/errors.hpp"
#include "cohobs/moments.hpp"
#include "test_support.hpp"

using namespace cohobs;

namespace {

RealMatrix random_stable(std::mt19937& rng, Eigen::Index n) {
  RealMatrix A = oracle::random_matrix(rng, n, n);
  const double shift = is_hurwitz(A).max_real_part + 0.5;
  return A - shift * RealMatrix::Identity(n, n);
}

JointSystem ex1_joint() {
  const auto cfg = testing_support::example("ex1_cmt");
  auto res = cmt_synthesize(cfg.plant, cfg.observer->K);
  return build_joint_system(cfg.plant, *res.observer);
}

MomentState ex1_initial() {
  const auto sim = *testing_support::example("ex1_cmt").simulation;
  MomentState s;
  s.mu_p = sim.mu_p0;
  s.mu_o = sim.mu_o0;
  s.sigma_p = sim.sigma_p0;
  s.sigma_o = sim.sigma_o0;
  s.sigma_po = sim.sigma_po0;
  return s;
}

}  // namespace

TEST(Sylvester, MatchesKroneckerOracle) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    const Eigen::Index m = 2 + (trial / 5) % 4;
    const RealMatrix A = random_stable(rng, n);
    const RealMatrix B = random_stable(rng, m);
    const RealMatrix Q = oracle::random_matrix(rng, n, m);
    const RealMatrix X = solve_sylvester(A, B, Q);
    EXPECT_LT((A * X + X * B + Q).norm(), 1e-8) << trial;
    EXPECT_LT((X - oracle::sylvester(A, B, Q)).norm(), 1e-8 * (1.0 + X.norm())) << trial;
  }
}

TEST(Sylvester, RejectsSharedSpectrum) {
  const RealMatrix A = RealMatrix::Identity(2, 2);
  EXPECT_THROW(solve_sylvester(A, -A, RealMatrix::Identity(2, 2)), SingularityError);
}

TEST(SteadyState, LyapunovSolution) {
  std::mt19937 rng(8);
  const RealMatrix A = random_stable(rng, 4);
  const RealMatrix B = oracle::random_matrix(rng, 4, 4);
  const RealMatrix S = steady_state_covariance(A, B * B.transpose());
  EXPECT_LT((A * S + S * A.transpose() + B * B.transpose()).norm(), 1e-10);
  EXPECT_TRUE(S.isApprox(S.transpose(), 0.0));
  EXPECT_THROW(steady_state_covariance(RealMatrix::Identity(2, 2), RealMatrix::Identity(2, 2)), StabilityError);
}

TEST(Integration, MatchesClosedForm) {
  const JointSystem joint = ex1_joint();
  const MomentState init = ex1_initial();
  const auto traj = integrate_joint_moments(joint, init, 3.0, 1e-3, 500);
  ASSERT_FALSE(traj.states.empty());
  const RealMatrix N = joint.B * joint.B.transpose();
  for (const auto& st : traj.states) {
    const RealMatrix S = oracle::covariance_at(joint.A, N, init.joint_covariance(), st.t);
    const RealVector mu = oracle::mean_at(joint.A, init.joint_mean(), st.t);
    EXPECT_LT((st.joint_covariance() - S).norm(), 1e-10) << st.t;
    EXPECT_LT((st.joint_mean() - mu).norm(), 1e-10) << st.t;
  }
  EXPECT_TRUE(traj.warnings.empty());
}

TEST(Integration, RandomSystemsMatchClosedForm) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = testing_support::random_feasible_cmt(rng, 2, 1);
    const JointSystem joint = build_joint_system(inst.plant, inst.observer);
    MomentState init;
    init.mu_p = oracle::random_matrix(rng, 2, 1);
    init.mu_o = RealVector::Zero(2);
    init.sigma_p = oracle::random_state_covariance(rng, 2);
    init.sigma_o = oracle::random_state_covariance(rng, 2);
    init.sigma_po = RealMatrix::Zero(2, 2);
    const auto traj = integrate_joint_moments(joint, init, 2.0, 1e-3, 2000);
    const auto& last = traj.states.back();
    EXPECT_DOUBLE_EQ(last.t, 2.0);
    const RealMatrix S =
        oracle::covariance_at(joint.A, joint.B * joint.B.transpose(), init.joint_covariance(), 2.0);
    EXPECT_LT((last.joint_covariance() - S).norm(), 1e-8 * (1.0 + S.norm())) << trial;
  }
}

TEST(Integration, FourthOrderConvergence) {
  const JointSystem joint = ex1_joint();
  const MomentState init = ex1_initial();
  const RealMatrix exact = oracle::covariance_at(joint.A, joint.B * joint.B.transpose(), init.joint_covariance(), 1.0);
  double prev = 0.0;
  for (double dt : {0.1, 0.05, 0.025}) {
    const auto traj = integrate_joint_moments(joint, init, 1.0, dt, 1000);
    const double err = (traj.states.back().joint_covariance() - exact).norm();
    if (prev > 0.0) {
      const double order = std::log2(prev / err);
      EXPECT_GT(order, 3.7) << dt;
      EXPECT_LT(order, 4.3) << dt;
    }
    prev = err;
  }
}

TEST(Integration, SamplingAndSymmetry) {
  const auto traj = integrate_joint_moments(ex1_joint(), ex1_initial(), 1.0, 0.01, 7);
  double last_t = -1.0;
  for (const auto& st : traj.states) {
    EXPECT_GT(st.t, last_t);
    last_t = st.t;
    const RealMatrix S = st.joint_covariance();
    EXPECT_TRUE(S.isApprox(S.transpose(), 0.0));
  }
  EXPECT_DOUBLE_EQ(traj.states.front().t, 0.0);
  EXPECT_DOUBLE_EQ(traj.states.back().t, 1.0);
  EXPECT_EQ(traj.states.size(), 16u);
}

TEST(Integration, DivergenceIsReported) {
  JointSystem joint;
  joint.n_x = 2;
  joint.A = 60.0 * RealMatrix::Identity(4, 4);
  joint.B = RealMatrix::Identity(4, 4);
  MomentState init = ex1_initial();
  try {
    integrate_joint_moments(joint, init, 20.0, 0.01);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), 20.0);
  }
}

TEST(Integration, RejectsBadStep) {
  EXPECT_THROW(integrate_joint_moments(ex1_joint(), ex1_initial(), 1.0, -0.1), std::invalid_argument);
}

TEST(TrackingLimit, VanishesForCmtObserver) {
  const auto lim = theorem1_limit(ex1_joint(), 2);
  EXPECT_TRUE(lim.converged);
  EXPECT_TRUE(lim.direct);
  EXPECT_LT(lim.value.norm(), 1e-10);
}

TEST(TrackingLimit, NonzeroForMarginallyStablePlant) {
  const auto cfg = testing_support::example("ex3");
  const RealMatrix K = cfg.observer->K;
  const RealMatrix B_o = realize_noise_form(noise_form_target(cfg.plant, K));
  auto [C_o, D_o] = derive_observer_output(K, B_o, 2);
  const ObserverModel obs{K, B_o, C_o, D_o, std::nullopt};
  const auto lim = theorem1_limit(build_joint_system(cfg.plant, obs), 2);
  EXPECT_FALSE(lim.direct);
  EXPECT_TRUE(lim.converged);
  RealVector expected(4);
  expected << -1.0448, -0.3694, -0.3694, 1.7836;
  EXPECT_LT((lim.value - expected).cwiseAbs().maxCoeff(), 1e-3);
}
