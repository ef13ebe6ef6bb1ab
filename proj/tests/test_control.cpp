#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "wavecatch/config.hpp"
#include "wavecatch/control.hpp"
#include "wavecatch/errors.hpp"
#include "wavecatch/rng.hpp"

using namespace wavecatch;

namespace {

struct Scene {
  ArmModel model = ArmModel::standard_seven_dof();
  DiscreteModel discrete = build_discrete_model(0.05);
  CostWeights weights = Config::defaults().scenario.weights;
  SolverOptions options;
  JointState z0;
  Pose6 ee;

  Scene() {
    z0.q = Config::defaults().scenario.q_home;
    ee = forward_kinematics(model, z0.q, Pose6{});
  }

  std::vector<Pose6> static_target(const Eigen::Vector3d& offset, int h) const {
    Pose6 t = ee;
    t.position += offset;
    return std::vector<Pose6>(static_cast<std::size_t>(h) + 1, t);
  }

  std::vector<Pose6> static_base(int h) const {
    return std::vector<Pose6>(static_cast<std::size_t>(h) + 1, Pose6{});
  }
};

}  // namespace

TEST_CASE("weights validation") {
  CostWeights w = CostWeights::diagonal(1.0, 1.0, 1e-3, 1.0, 1.0);
  CHECK_NOTHROW(w.validate());
  w.r_control.setZero();
  CHECK_THROWS_AS(w.validate(), ConfigError);  // R must be PD
  w = CostWeights::diagonal(1.0, 1.0, 1e-3, 1.0, 1.0);
  w.q_stage(0, 0) = -1.0;
  CHECK_THROWS_AS(w.validate(), ConfigError);
}

TEST_CASE("evaluate_cost trivial cases") {
  Scene s;
  HorizonPlan plan;
  plan.controls.assign(3, Vector7d::Zero());
  plan.ee_poses.assign(4, s.ee);
  plan.states.assign(4, s.z0);
  const std::vector<Pose6> on_target(4, s.ee);
  CHECK(evaluate_cost(plan, on_target, s.weights) == doctest::Approx(0.0).epsilon(1e-15));

  // H = 1, Q = QN = I, R = 0 idiom: stationary 1 m off -> J = 2
  HorizonPlan one;
  one.controls.assign(1, Vector7d::Zero());
  one.ee_poses.assign(2, s.ee);
  Pose6 target = s.ee;
  target.position += Eigen::Vector3d(1.0, 0.0, 0.0);
  const std::vector<Pose6> targets(2, target);
  CostWeights unit = CostWeights::diagonal(1.0, 1.0, 0.0, 1.0, 1.0);
  unit.r_control.setZero();
  CHECK(evaluate_cost(one, targets, unit) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(evaluate_cost(one, std::vector<Pose6>(3, target), unit), ShapeError);
}

TEST_CASE("already intercepted: controls and cost stay near zero") {
  Scene s;
  const auto plan = solve_horizon(s.z0, s.static_target({0, 0, 0}, 20), s.static_base(20),
                                  s.model, s.discrete, s.weights, 20, std::nullopt, s.options);
  CHECK(plan.feasible);
  CHECK(plan.cost <= 1e-8);
  for (const auto& u : plan.controls) CHECK(u.norm() < 1e-4);
}

TEST_CASE("static reachable target reached within 1 cm at the horizon end") {
  Scene s;
  const auto target = s.static_target({0.18, 0.18, 0.15}, 20);
  const auto plan = solve_horizon(s.z0, target, s.static_base(20), s.model, s.discrete,
                                  s.weights, 20, std::nullopt, s.options);
  REQUIRE(plan.feasible);
  CHECK((plan.ee_poses.back().position - target.back().position).norm() <= 0.01);
  CHECK(plan.kkt_residual <= 1e-6);
  CHECK(audit_plan(plan, s.model, 1e-6));
}

TEST_CASE("predicted states satisfy the discrete recursion exactly") {
  Scene s;
  const auto plan = solve_horizon(s.z0, s.static_target({0.1, -0.05, 0.08}, 12),
                                  s.static_base(12), s.model, s.discrete, s.weights, 12,
                                  std::nullopt, s.options);
  for (std::size_t k = 0; k + 1 < plan.states.size(); ++k) {
    const JointState expect = s.discrete.step(plan.states[k], plan.controls[k]);
    CHECK((expect.q - plan.states[k + 1].q).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((expect.q_dot - plan.states[k + 1].q_dot).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("more relinearization passes never increase the cost") {
  Scene s;
  SolverOptions one_pass = s.options;
  one_pass.max_passes = 1;
  SolverOptions three_pass = s.options;
  three_pass.max_passes = 3;
  const auto target = s.static_target({0.2, 0.1, -0.1}, 20);
  const auto p1 = solve_horizon(s.z0, target, s.static_base(20), s.model, s.discrete, s.weights,
                                20, std::nullopt, one_pass);
  const auto p3 = solve_horizon(s.z0, target, s.static_base(20), s.model, s.discrete, s.weights,
                                20, std::nullopt, three_pass);
  CHECK(p3.cost <= p1.cost + 1e-9);
}

TEST_CASE("acceleration constraint: box mode implies the Euclidean ball") {
  Scene s;
  const auto plan = solve_horizon(s.z0, s.static_target({0.35, 0.2, 0.1}, 10), s.static_base(10),
                                  s.model, s.discrete, s.weights, 10, std::nullopt, s.options);
  REQUIRE(plan.feasible);
  for (const auto& u : plan.controls) {
    CHECK(u.lpNorm<Eigen::Infinity>() <= s.model.u_norm_max_rad_s2 / std::sqrt(7.0) + 1e-9);
    CHECK(u.norm() <= s.model.u_norm_max_rad_s2 + 1e-9);
  }
}

TEST_CASE("exact-ball mode keeps the Euclidean bound while allowing larger components") {
  Scene s;
  SolverOptions ball = s.options;
  ball.accel_mode = AccelConstraintMode::ExactBall;
  const auto plan = solve_horizon(s.z0, s.static_target({0.35, 0.2, 0.1}, 10), s.static_base(10),
                                  s.model, s.discrete, s.weights, 10, std::nullopt, ball);
  REQUIRE(plan.feasible);
  for (const auto& u : plan.controls) CHECK(u.norm() <= s.model.u_norm_max_rad_s2 * (1 + 1e-6));
}

TEST_CASE("velocity limits bind and hold exactly on aggressive targets") {
  Scene s;
  const auto plan = solve_horizon(s.z0, s.static_target({0.4, 0.25, 0.15}, 20),
                                  s.static_base(20), s.model, s.discrete, s.weights, 20,
                                  std::nullopt, s.options);
  REQUIRE(plan.feasible);
  bool any_near_limit = false;
  for (const auto& st : plan.states) {
    for (int i = 0; i < 7; ++i) {
      CHECK(std::abs(st.q_dot(i)) <= s.model.qd_max_rad_s(i) + 1e-6);
      if (std::abs(st.q_dot(i)) > 0.95 * s.model.qd_max_rad_s(i)) any_near_limit = true;
    }
  }
  CHECK(any_near_limit);  // the scenario is aggressive enough to saturate
}

TEST_CASE("simple following: zero error produces zero acceleration") {
  Scene s;
  FollowGains gains;
  Pose6 target = s.ee;
  const Vector7d u =
      simple_following_step(s.z0, target, Vector6d::Zero(), s.model, Pose6{}, gains);
  CHECK(u.norm() < 1e-10);
}

TEST_CASE("simple following clamps exactly to the acceleration bound") {
  Scene s;
  FollowGains gains;
  gains.kp_pos = 1e6;  // demand far beyond the bound
  Pose6 target = s.ee;
  target.position += Eigen::Vector3d(0.5, 0.0, 0.0);
  const Vector7d u =
      simple_following_step(s.z0, target, Vector6d::Zero(), s.model, Pose6{}, gains);
  CHECK(u.norm() == doctest::Approx(s.model.u_norm_max_rad_s2).epsilon(1e-12));
}

TEST_CASE("simple following accelerates along the error direction as damping vanishes") {
  Scene s;
  FollowGains gains;
  gains.kp_ori = 0.0;
  gains.kd_ori = 0.0;
  gains.dls_lambda = 1e-9;
  Pose6 target = s.ee;
  target.position += Eigen::Vector3d(0.05, 0.0, 0.0);
  const Vector7d u =
      simple_following_step(s.z0, target, Vector6d::Zero(), s.model, Pose6{}, gains);
  const Eigen::Vector3d accel = (geometric_jacobian(s.model, s.z0.q, Pose6{}) * u).head<3>();
  CHECK(accel.normalized().isApprox(Eigen::Vector3d::UnitX(), 1e-6));
}

TEST_CASE("fixed horizon is a thin wrapper over solve_horizon") {
  Scene s;
  const auto target = s.static_target({0.1, 0.05, 0.0}, 20);
  const auto direct = solve_horizon(s.z0, target, s.static_base(20), s.model, s.discrete,
                                    s.weights, 20, std::nullopt, s.options);
  const auto wrapped = fixed_horizon_step(s.z0, target, s.static_base(20), s.model, s.discrete,
                                          s.weights, 20, std::nullopt, s.options);
  CHECK(std::memcmp(wrapped.u0.data(), direct.controls[0].data(), sizeof(double) * 7) == 0);
  CHECK(wrapped.plan.cost == direct.cost);
}

TEST_CASE("warm-started receding step uses fewer relinearization passes") {
  Scene s;
  SolverOptions roomy = s.options;
  roomy.max_passes = 8;  // lift the cap so convergence is observable
  const auto target = s.static_target({0.15, -0.12, 0.1}, 20);
  // first (cold) call, then advance the state as the receding loop would
  const auto first = fixed_horizon_step(s.z0, target, s.static_base(20), s.model, s.discrete,
                                        s.weights, 20, std::nullopt, roomy);
  const JointState z1 = s.discrete.step(s.z0, first.u0);
  const auto warm = fixed_horizon_step(z1, target, s.static_base(20), s.model, s.discrete,
                                       s.weights, 20, first.plan, roomy);
  const auto cold = fixed_horizon_step(z1, target, s.static_base(20), s.model, s.discrete,
                                       s.weights, 20, std::nullopt, roomy);
  CHECK(warm.plan.relinearization_passes < cold.plan.relinearization_passes);
  // both land on comparable costs at the convergence tolerance
  CHECK(warm.plan.cost <= cold.plan.cost * (1.0 + 1e-2) + 1e-6);
}

TEST_CASE("identical warm starts reproduce the solve bit-for-bit") {
  Scene s;
  const auto target = s.static_target({0.1, 0.08, -0.06}, 20);
  const auto base_plan = solve_horizon(s.z0, target, s.static_base(20), s.model, s.discrete,
                                       s.weights, 20, std::nullopt, s.options);
  const auto a = solve_horizon(s.z0, target, s.static_base(20), s.model, s.discrete, s.weights,
                               20, base_plan, s.options);
  const auto b = solve_horizon(s.z0, target, s.static_base(20), s.model, s.discrete, s.weights,
                               20, base_plan, s.options);
  CHECK(a.cost == b.cost);
  for (std::size_t k = 0; k < a.controls.size(); ++k) {
    CHECK(std::memcmp(a.controls[k].data(), b.controls[k].data(), sizeof(double) * 7) == 0);
  }
}

TEST_CASE("static target at the end effector keeps u0 at zero (fixed horizon)") {
  Scene s;
  const auto res = fixed_horizon_step(s.z0, s.static_target({0, 0, 0}, 20), s.static_base(20),
                                      s.model, s.discrete, s.weights, 20, std::nullopt,
                                      s.options);
  CHECK(res.u0.norm() < 1e-4);
}

TEST_CASE("shrinking horizon counts down and resets") {
  Scene s;
  RhcState rhc = RhcState::fresh(5);
  const auto target = s.static_target({0.05, 0.0, 0.0}, 5);
  std::vector<int> used;
  for (int i = 0; i < 7; ++i) {
    const auto res = shrinking_horizon_step(rhc, s.z0, target, s.static_base(5), s.model,
                                            s.discrete, s.weights, s.options);
    used.push_back(res.plan.horizon());
    rhc = res.next;
  }
  CHECK(used == std::vector<int>{5, 4, 3, 2, 1, 5, 4});
}

TEST_CASE("one-step horizon is locally optimal under perturbations") {
  Scene s;
  RhcState rhc = RhcState::fresh(1);
  const auto target = s.static_target({0.02, -0.015, 0.01}, 1);
  const auto res = shrinking_horizon_step(rhc, s.z0, target, s.static_base(1), s.model,
                                          s.discrete, s.weights, s.options);
  REQUIRE(res.plan.feasible);
  auto cost_of = [&](const Vector7d& u) {
    HorizonPlan p;
    p.controls = {u};
    p.states = {s.z0, s.discrete.step(s.z0, u)};
    p.ee_poses = {forward_kinematics(s.model, s.z0.q, Pose6{}),
                  forward_kinematics(s.model, p.states[1].q, Pose6{})};
    return evaluate_cost(p, target, s.weights);
  };
  const double j_star = cost_of(res.u0);
  Rng rng(3);
  const double u_box = s.model.u_norm_max_rad_s2 / std::sqrt(7.0);
  for (int i = 0; i < 60; ++i) {
    Vector7d delta;
    for (int k = 0; k < 7; ++k) delta(k) = 0.02 * rng.gaussian();
    Vector7d u_try = res.u0 + delta;
    bool feasible = true;
    for (int k = 0; k < 7; ++k) feasible = feasible && std::abs(u_try(k)) <= u_box;
    if (!feasible) continue;
    CHECK(cost_of(u_try) >= j_star - 1e-9);
  }
}

TEST_CASE("infeasible-from-the-start state falls back with the flag cleared") {
  Scene s;
  JointState stuck = s.z0;
  stuck.q_dot.setConstant(3.4);  // beyond every velocity limit at k>=1
  // velocity rows at k = 1 demand |qd| <= limit, but qd_1 = qd_0 + dt u with
  // |u| bounded; 3.4 - 0.05 * 15.1 > limit for the slowest joints.
  const auto plan = solve_horizon(stuck, s.static_target({0.05, 0, 0}, 5), s.static_base(5),
                                  s.model, s.discrete, s.weights, 5, std::nullopt, s.options);
  CHECK_FALSE(plan.feasible);
}

TEST_CASE("wave-severity adaptation scales the tracking weights") {
  const CostWeights base = CostWeights::diagonal(10.0, 2.0, 1e-3, 100.0, 20.0);
  const CostWeights adapted = adapt_weights_to_sea(base, 5.0 * M_PI / 180.0, 0.5);
  CHECK(adapted.q_stage(0, 0) == doctest::Approx(15.0));
  CHECK(adapted.q_terminal(0, 0) == doctest::Approx(150.0));
  CHECK(adapted.r_control(0, 0) == doctest::Approx(base.r_control(0, 0)));
  const CostWeights calm = adapt_weights_to_sea(base, 0.0, 0.5);
  CHECK(calm.q_stage(0, 0) == doctest::Approx(10.0));
}

TEST_CASE("horizon and trajectory shape validation") {
  Scene s;
  CHECK_THROWS_AS(solve_horizon(s.z0, s.static_target({0, 0, 0}, 5), s.static_base(5), s.model,
                                s.discrete, s.weights, 0, std::nullopt, s.options),
                  ConfigError);
  CHECK_THROWS_AS(solve_horizon(s.z0, s.static_target({0, 0, 0}, 3), s.static_base(5), s.model,
                                s.discrete, s.weights, 5, std::nullopt, s.options),
                  ShapeError);
}
