// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cohobs/experiments.hpp"
#include "cohobs/gaussian.hpp"
#include "test_support.hpp"

using namespace cohobs;
using testing_support::example;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

RealMatrix diag2(double a, double b) {
  RealMatrix M = RealMatrix::Zero(2, 2);
  M(0, 0) = a;
  M(1, 1) = b;
  return M;
}

double max_abs(const RealMatrix& M) { return M.cwiseAbs().maxCoeff(); }

MomentState initial_state(const SimulationSpec& sim) {
  MomentState s;
  s.mu_p = sim.mu_p0;
  s.mu_o = sim.mu_o0;
  s.sigma_p = sim.sigma_p0;
  s.sigma_o = sim.sigma_o0;
  s.sigma_po = sim.sigma_po0;
  return s;
}

Outcome ac1() {
  const auto t0 = Clock::now();
  const auto res = cmt_synthesize(example("ex1_cmt").plant, RealMatrix::Identity(2, 2));
  const double elapsed = seconds_since(t0);
  const double err = max_abs(res.report.sigma_gap - diag2(1.1111, 0.9091));
  return {err < 1e-3 && elapsed < 1.0,
          fmt::format("Sigma_p - Sigma_po = diag({:.4f}, {:.4f}), max error {:.1e}, {:.3f} s", res.report.sigma_gap(0, 0),
                      res.report.sigma_gap(1, 1), err, elapsed)};
}

Outcome ac2() {
  const auto res = cmt_synthesize(example("ex1_cmt").plant, 3.0 * RealMatrix::Identity(2, 2));
  const RealMatrix& N = res.report.bo_gram_target;
  const double err = max_abs(N - diag2(-1.6842, -2.2857));
  return {!res.report.feasible && res.report.status == SynthesisStatus::Infeasible && err < 1e-3,
          fmt::format("status {}, required B_o B_o^T = diag({:.4f}, {:.4f}), max error {:.1e}",
                      to_string(res.report.status), N(0, 0), N(1, 1), err)};
}

Outcome ac3() {
  const auto p = example("ex1_cmt").plant;
  const RealMatrix K = RealMatrix::Identity(2, 2);
  const auto res = cmt_synthesize(p, K);
  if (!res.report.feasible) return {false, "synthesis infeasible"};
  const ObserverModel& obs = *res.observer;
  using cd = std::complex<double>;
  ComplexMatrix L(2, 2);
  L << 0.6742, cd(0, 0.7416), 0.0, 0.0745;
  const ComplexMatrix& Lo = *obs.Lambda_o;
  const double gram = (Lo.adjoint() * Lo - L.adjoint() * L).norm();
  const double bb = max_abs(obs.B_o * obs.B_o.transpose() - diag2(2.2222, 1.8182));
  const double form = (obs.B_o * symplectic_form(obs.n_wo()) * obs.B_o.transpose() - noise_form_target(p, K)).norm();
  return {gram < 2e-3 && bb < 1e-3 && form < 1e-8,
          fmt::format("coupling Gram error {:.1e}, B_o B_o^T error {:.1e}, B_o Th B_o^T error {:.1e}", gram, bb, form)};
}

// Least-squares fit y ~ c1 exp(-r1 t) + c2 exp(-r2 t); rates by nested grids,
// coefficients by linear least squares for each rate pair.
struct ExpFit {
  double r1, r2, c1, c2, rss;
};

ExpFit fit_at(const std::vector<double>& t, const std::vector<double>& y, double r1, double r2) {
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0, yy = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double e1 = std::exp(-r1 * t[k]), e2 = std::exp(-r2 * t[k]);
    s11 += e1 * e1;
    s12 += e1 * e2;
    s22 += e2 * e2;
    b1 += e1 * y[k];
    b2 += e2 * y[k];
    yy += y[k] * y[k];
  }
  const double det = s11 * s22 - s12 * s12;
  const double c1 = (s22 * b1 - s12 * b2) / det;
  const double c2 = (s11 * b2 - s12 * b1) / det;
  const double rss = yy - 2 * (c1 * b1 + c2 * b2) + c1 * c1 * s11 + 2 * c1 * c2 * s12 + c2 * c2 * s22;
  return {r1, r2, c1, c2, rss};
}

ExpFit fit_two_exponentials(const std::vector<double>& t, const std::vector<double>& y) {
  ExpFit best{0, 0, 0, 0, std::numeric_limits<double>::infinity()};
  auto scan = [&](double lo1, double hi1, double lo2, double hi2, double step) {
    for (double r1 = lo1; r1 <= hi1; r1 += step) {
      for (double r2 = std::max(lo2, r1 + step); r2 <= hi2; r2 += step) {
        const ExpFit f = fit_at(t, y, r1, r2);
        if (std::isfinite(f.rss) && f.rss < best.rss) best = f;
      }
    }
  };
  scan(0.1, 6.0, 0.1, 6.0, 0.02);
  for (double step : {1e-3, 5e-5, 2.5e-6}) {
    const ExpFit c = best;
    scan(c.r1 - 20 * step, c.r1 + 20 * step, c.r2 - 20 * step, c.r2 + 20 * step, step);
  }
  return best;
}

Outcome ac4() {
  const auto cfg = example("ex1_cmt");
  const auto res = cmt_synthesize(cfg.plant, cfg.observer->K);
  const JointSystem joint = build_joint_system(cfg.plant, *res.observer);
  const MomentState init = initial_state(*cfg.simulation);
  const auto traj = integrate_joint_moments(joint, init, 6.0, 1e-3, 10);

  // Exact coefficients from the Laplace-domain solution of the error ODE for this
  // initial covariance.
  const double exact[2][2] = {{-1.0 / 45.0, -79.0 / 90.0}, {21.0 / 55.0, -141.0 / 110.0}};
  const double rates[2][2] = {{1.8, 2.8}, {2.2, 3.2}};

  bool pass = true;
  std::string detail;
  double oracle_err = 0.0;
  for (int i = 0; i < 2; ++i) {
    std::vector<double> t, y;
    for (const auto& st : traj.states) {
      t.push_back(st.t);
      y.push_back(st.sigma_p(i, i) - st.sigma_o(i, i));
      const RealMatrix S =
          oracle::covariance_at(joint.A, joint.B * joint.B.transpose(), init.joint_covariance(), st.t);
      oracle_err = std::max(oracle_err, std::abs(y.back() - (S(i, i) - S(i + 2, i + 2))));
    }
    const ExpFit f = fit_two_exponentials(t, y);
    const double rate_err = std::max(std::abs(f.r1 - rates[i][0]) / rates[i][0], std::abs(f.r2 - rates[i][1]) / rates[i][1]);
    const double coef_err = std::max(std::abs(f.c1 - exact[i][0]), std::abs(f.c2 - exact[i][1]));
    pass = pass && rate_err < 0.02 && coef_err < 1e-3;
    detail += fmt::format("e{}{}: rates -{:.4f}, -{:.4f} (rel err {:.1e}), coeffs {:.5f}, {:.5f} (err {:.1e}); ", i + 1,
                          i + 1, f.r1, f.r2, rate_err, f.c1, f.c2, coef_err);
  }
  pass = pass && oracle_err < 1e-9;
  detail += fmt::format("trajectory vs closed form {:.1e}", oracle_err);
  return {pass, detail};
}

Outcome ac5() {
  struct Case {
    std::string name;
    QuadratureSystem plant;
    ObserverModel obs;
    MomentState init;
  };
  std::vector<Case> cases;
  for (const char* name : {"ex1_cmt", "ex2"}) {
    const auto cfg = example(name);
    auto res = cmt_synthesize(cfg.plant, cfg.observer->K);
    if (!res.report.feasible) return {false, fmt::format("{} infeasible", name)};
    cases.push_back({name, cfg.plant, *res.observer, initial_state(*cfg.simulation)});
  }
  std::mt19937 rng(20240517);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index n = k % 2 ? 4 : 2;
    auto inst = testing_support::random_feasible_cmt(rng, n, n / 2 + (k % 3 == 0), 0.25);
    MomentState init;
    init.mu_p = oracle::random_matrix(rng, n, 1);
    init.mu_o = RealVector::Zero(n);
    init.sigma_p = oracle::random_state_covariance(rng, n);
    init.sigma_o = oracle::random_state_covariance(rng, n);
    init.sigma_po = RealMatrix::Zero(n, n);
    cases.push_back({fmt::format("random{}", k), inst.plant, inst.observer, init});
  }

  double worst_ss = 0.0, worst_int = 0.0;
  std::string worst_name;
  for (const auto& c : cases) {
    const JointSystem joint = build_joint_system(c.plant, c.obs);
    const Eigen::Index n = c.plant.n_x();
    const RealMatrix S = steady_state_covariance(joint.A, joint.B * joint.B.transpose());
    const double ss = (S.topLeftCorner(n, n) - S.bottomRightCorner(n, n)).norm();
    const double horizon = 20.0 / -is_hurwitz(joint.A).max_real_part;
    const auto traj = integrate_joint_moments(joint, c.init, horizon, 0.01, 1000000);
    const auto& last = traj.states.back();
    const double integ = (last.sigma_p - last.sigma_o).norm();
    if (ss > worst_ss || integ > worst_int) worst_name = c.name;
    worst_ss = std::max(worst_ss, ss);
    worst_int = std::max(worst_int, integ);
  }
  return {worst_ss < 1e-6 && worst_int < 1e-5,
          fmt::format("{} instances; worst steady-state gap {:.1e}, worst long-horizon gap {:.1e} ({})", cases.size(),
                      worst_ss, worst_int, worst_name)};
}

Outcome ac6() {
  const auto cfg1 = example("ex1_cmt");
  const auto run1 = cmd_simulate(cfg1);
  double last_above = -1.0;
  for (const auto& r : run1.rows) {
    if (*r.nu_minus >= 1.0) last_above = r.t;
  }
  const auto res = cmt_synthesize(cfg1.plant, cfg1.observer->K);
  const JointSystem joint = build_joint_system(cfg1.plant, *res.observer);
  const double nu_ss = ppt_nu_minus(steady_state_covariance(joint.A, joint.B * joint.B.transpose()));
  const double horizon = run1.rows.back().t;
  const bool ex1_ok = last_above < horizon && *run1.rows.back().nu_minus < 1.0 && nu_ss < 1.0;

  const auto run2 = cmd_simulate(example("ex2"));
  const auto& end = run2.rows.back();
  const double gap = std::abs(*end.nu_minus_observer - *end.nu_minus_plant);
  const bool ex2_ok = std::abs(end.t - 10.0) < 1e-12 && gap < 1e-3;
  return {ex1_ok && ex2_ok,
          fmt::format("ex1: nu_minus < 1 for t > {:.2f} (steady state {:.4f}); ex2: |nu_o - nu_p| = {:.1e} at t = {:g}",
                      last_above, nu_ss, gap, end.t)};
}

Outcome ac7() {
  const auto cmt = cmd_simulate(example("ex1_cmt"));
  const auto mt = cmd_simulate(example("ex1_mt"));
  if (cmt.rows.size() != mt.rows.size()) return {false, "time grids differ"};
  double crossover = -1.0;
  for (std::size_t k = 0; k < cmt.rows.size(); ++k) {
    if (*cmt.rows[k].fidelity <= *mt.rows[k].fidelity) crossover = cmt.rows[k].t;
  }
  const double f_cmt = *cmt.rows.back().fidelity;
  const double f_mt = *mt.rows.back().fidelity;
  return {crossover < cmt.rows.back().t && f_cmt > 1.0 - 1e-3,
          fmt::format("CMT above MT for t > {:.2f}; at t = {:g}: F_cmt = {:.6f}, F_mt = {:.6f}", crossover,
                      cmt.rows.back().t, f_cmt, f_mt)};
}

Outcome ac8() {
  const auto cfg = example("ex3");
  const auto grid = ex3_gain_grid();
  bool has_identity = false;
  int multiples = 0;
  for (const auto& K : grid) {
    if (K.isApprox(RealMatrix::Identity(2, 2))) has_identity = true;
    if (K(0, 0) == K(1, 1) && K(0, 1) == 0.0 && K(1, 0) == 0.0) ++multiples;
  }
  const auto scan = theorem1_scan(cfg.plant, grid);
  int vanishing = 0;
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& e : scan) {
    const double norm = e.limit.value.norm();
    if (e.limit.converged) smallest = std::min(smallest, norm);
    if (e.limit.converged && norm < 1e-6) ++vanishing;
  }
  bool mt_ok = false;
  try {
    const ObserverModel obs = mt_synthesize(cfg.plant, RealMatrix::Identity(2, 2));
    mt_ok = observer_realizability(cfg.plant, obs).passed;
  } catch (const std::exception&) {
    mt_ok = false;
  }
  return {grid.size() >= 25 && has_identity && multiples >= 3 && vanishing == 0 && mt_ok,
          fmt::format("{} gains ({} scalar multiples of I): {} with vanishing limit, smallest converged norm {:.3f}; "
                      "MT observer for K = I {}",
                      grid.size(), multiples, vanishing, smallest, mt_ok ? "realizable" : "FAILED")};
}

Outcome ac9() {
  std::mt19937 rng(99);
  double slh_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = 2 * (1 + k % 3);
    const Eigen::Index m = 1 + k % 2;
    const auto slh = testing_support::random_slh(rng, n, m);
    const auto back = recover_slh(abcd_from_slh(slh, 2 * m));
    slh_err = std::max({slh_err, (back.R - slh.R).norm(), (back.Lambda - slh.Lambda).norm()});
  }

  double syl_res = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = 2 + k % 6;
    auto stable = [&](Eigen::Index d) {
      const RealMatrix M = oracle::random_matrix(rng, d, d);
      return RealMatrix(M - (is_hurwitz(M).max_real_part + 0.5) * RealMatrix::Identity(d, d));
    };
    const RealMatrix A = stable(n), B = stable(n);
    const RealMatrix Q = oracle::random_matrix(rng, n, n);
    const RealMatrix X = solve_sylvester(A, B, Q);
    syl_res = std::max(syl_res, (A * X + X * B + Q).norm());
  }

  double nu_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const RealMatrix S = oracle::random_state_covariance(rng, 4);
    nu_err = std::max(nu_err, std::abs(ppt_nu_minus(S) - oracle::nu_minus(S)));
  }

  const auto cfg = example("ex1_cmt");
  const auto res = cmt_synthesize(cfg.plant, cfg.observer->K);
  const JointSystem joint = build_joint_system(cfg.plant, *res.observer);
  const MomentState init = initial_state(*cfg.simulation);
  const RealMatrix exact =
      oracle::covariance_at(joint.A, joint.B * joint.B.transpose(), init.joint_covariance(), 1.0);
  const double e1 = (integrate_joint_moments(joint, init, 1.0, 0.1, 1000).states.back().joint_covariance() - exact).norm();
  const double e2 = (integrate_joint_moments(joint, init, 1.0, 0.05, 1000).states.back().joint_covariance() - exact).norm();
  const double order = std::log2(e1 / e2);

  return {slh_err < 1e-10 && syl_res < 1e-8 && nu_err < 1e-10 && order > 3.7 && order < 4.3,
          fmt::format("round trip {:.1e}, Sylvester residual {:.1e}, nu_minus vs oracle {:.1e}, RK4 order {:.2f}",
                      slh_err, syl_res, nu_err, order)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 Sylvester steady-state gap (K = I)", ac1},
      {"AC2 CMT infeasibility (K = 3I)", ac2},
      {"AC3 coupling and noise invariants (K = I)", ac3},
      {"AC4 error-dynamics rates", ac4},
      {"AC5 steady-state covariance tracking", ac5},
      {"AC6 entanglement behaviour", ac6},
      {"AC7 fidelity ordering", ac7},
      {"AC8 marginally stable plant", ac8},
      {"AC9 property suites", ac9},
  };
  const auto t0 = Clock::now();
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = Clock::now();
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, fmt::format("exception: {}", e.what())};
    }
    if (!out.pass) ++failures;
    std::cout << fmt::format("{} {} [{:.2f} s] {}\n", out.pass ? "PASS" : "FAIL", name, seconds_since(start),
                             out.detail);
  }
  const double total = seconds_since(t0);
  std::cout << fmt::format("{} of {} criteria passed in {:.2f} s\n", criteria.size() - failures, criteria.size(),
                           total);
  return failures == 0 && total < 60.0 ? 0 : 1;
}
