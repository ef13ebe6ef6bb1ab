#include "wavecatch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wavecatch/errors.hpp"
#include "wavecatch/rng.hpp"

namespace wavecatch {

using nlohmann::json;

const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::SimpleFollowing: return "simple_following";
    case ControllerKind::FixedHorizon: return "fixed_horizon";
    case ControllerKind::ShrinkingHorizon: return "shrinking_horizon";
  }
  return "?";
}

ControllerKind controller_from_string(const std::string& name) {
  if (name == "simple_following") return ControllerKind::SimpleFollowing;
  if (name == "fixed_horizon") return ControllerKind::FixedHorizon;
  if (name == "shrinking_horizon") return ControllerKind::ShrinkingHorizon;
  throw ConfigError("unknown controller: " + name);
}

void Scenario::validate() const {
  sea.validate();
  if (dt_s < 0.01 || dt_s > 0.05) throw ConfigError("Scenario: dt must be in [0.01, 0.05] s");
  if (!(duration_s > 0.0) || duration_s > 600.0) {
    throw ConfigError("Scenario: duration must be in (0, 600] s");
  }
  if (horizon_steps < 1 || horizon_steps > 100) {
    throw ConfigError("Scenario: horizon_steps must be in [1, 100]");
  }
  if (!(prediction_lead_s > 0.0) || prediction_lead_s > 2.0) {
    throw ConfigError("Scenario: prediction_lead must be in (0, 2] s");
  }
  arm.validate();
  weights.validate();
  filter_model.validate();
  uav.validate();
  uav_gains.validate();
  if (!(measurement.rate_hz >= 20.0 && measurement.rate_hz <= 1000.0)) {
    throw ConfigError("Scenario: measurement rate must be in [20, 1000] Hz");
  }
}

namespace {

// Truth sample of the moving target.
struct TargetSample {
  Pose6 pose;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};

// Inertial angular velocity of the deck for ZYX angles with zero yaw.
Eigen::Vector3d deck_angular_velocity(const BasePose& bp) {
  return Eigen::Vector3d(bp.roll_rate_rad_s * std::cos(bp.pitch_rad), bp.pitch_rate_rad_s,
                         -bp.roll_rate_rad_s * std::sin(bp.pitch_rad));
}

// Simulates the three target variants behind one interface.
class TargetSimulator {
 public:
  TargetSimulator(const Scenario& scenario, std::uint64_t seed)
      : scenario_(scenario), rng_(seed) {
    if (std::holds_alternative<TargetCircular>(scenario.target)) {
      phase_jitter_ = rng_.uniform(0.0, 2.0 * M_PI);
    } else if (const auto* tr = std::get_if<TargetRandom>(&scenario.target)) {
      position_ = tr->start_m;
      velocity_.setZero();
    } else if (const auto* tu = std::get_if<TargetUavHover>(&scenario.target)) {
      uav_state_.position = tu->hover_position_m;
      hover_ref_ = tu->hover_position_m;
    }
  }

  TargetSample at_time(double t) const {
    TargetSample s;
    if (const auto* tc = std::get_if<TargetCircular>(&scenario_.target)) {
      // radius zero degenerates to a parked target
      const double omega = tc->radius_m > 0.0 ? tc->speed_mps / tc->radius_m : 0.0;
      const double a = omega * t + tc->phase0_rad + phase_jitter_;
      s.pose.position = tc->center_m + tc->radius_m * Eigen::Vector3d(std::cos(a), std::sin(a), 0.0);
      if (tc->radius_m > 0.0) {
        s.velocity = tc->speed_mps * Eigen::Vector3d(-std::sin(a), std::cos(a), 0.0);
      }
    } else if (std::holds_alternative<TargetRandom>(scenario_.target)) {
      s.pose.position = position_;
      s.velocity = velocity_;
    } else {
      s.pose.position = uav_state_.position;
      s.pose.orientation = uav_state_.orientation;
      s.velocity = uav_state_.velocity;
    }
    return s;
  }

  // Advances stochastic / closed-loop targets by one substep.
  void advance(double t, double dt, const CaptureCommands& commands) {
    if (const auto* tr = std::get_if<TargetRandom>(&scenario_.target)) {
      const double beta = tr->mean_reversion_hz;
      const double sq = tr->volatility * std::sqrt(dt);
      for (int i = 0; i < 3; ++i) velocity_(i) += -beta * velocity_(i) * dt + sq * rng_.gaussian();
      const double speed = velocity_.norm();
      if (speed > tr->speed_cap_mps) velocity_ *= tr->speed_cap_mps / speed;
      position_ += velocity_ * dt;
      for (int i = 0; i < 3; ++i) {
        if (position_(i) < tr->bounds_min_m(i)) {
          position_(i) = 2.0 * tr->bounds_min_m(i) - position_(i);
          velocity_(i) = -velocity_(i);
        } else if (position_(i) > tr->bounds_max_m(i)) {
          position_(i) = 2.0 * tr->bounds_max_m(i) - position_(i);
          velocity_(i) = -velocity_(i);
        }
      }
    } else if (const auto* tu = std::get_if<TargetUavHover>(&scenario_.target)) {
      (void)t;
      if (commands.reduce_lateral_velocity && !lateral_hold_) {
        lateral_hold_ = true;
        hover_ref_.head<2>() = uav_state_.position.head<2>();
      }
      UavState measured = uav_state_;
      for (int i = 0; i < 3; ++i) {
        measured.position(i) += tu->position_noise_sigma_m * rng_.gaussian();
      }
      const RotorCommand cmd = cascaded_pd(measured, hover_ref_, 0.0, scenario_.uav_gains,
                                           scenario_.uav, dt);
      uav_state_ = integrate_uav(uav_state_, cmd, scenario_.uav, dt);
    }
  }

 private:
  const Scenario& scenario_;
  Rng rng_;
  Eigen::Vector3d position_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity_ = Eigen::Vector3d::Zero();
  UavState uav_state_;
  Eigen::Vector3d hover_ref_ = Eigen::Vector3d::Zero();
  bool lateral_hold_ = false;
  double phase_jitter_ = 0.0;
};

bool row_finite(const TrialRow& row) {
  return std::isfinite(row.pos_error_m) && row.joint.q.allFinite() && row.joint.q_dot.allFinite() &&
         row.ee_pose.position.allFinite();
}

}  // namespace

TrialRecord run_trial(const Scenario& scenario) {
  scenario.validate();

  // All stochastic streams derive from the single trial seed.
  SeaStateConfig sea_cfg = scenario.sea;
  if (sea_cfg.seed == 0) sea_cfg.seed = derive_seed(scenario.seed, 1);
  const SeaState sea(sea_cfg);
  TargetSimulator target_sim(scenario, derive_seed(scenario.seed, 2));
  Rng meas_rng(derive_seed(scenario.seed, 3));

  const double dt = scenario.dt_s;
  int n_sub = std::max(1, static_cast<int>(std::lround(dt * scenario.measurement.rate_hz)));
  while (dt / n_sub > 0.015) ++n_sub;  // keep the UAV integrator comfortable
  const double dt_sub = dt / n_sub;
  const int n_ticks = static_cast<int>(std::lround(scenario.duration_s / dt));

  const DiscreteModel discrete = build_discrete_model(dt);
  const CostWeights weights =
      adapt_weights_to_sea(scenario.weights, sea_cfg.roll_amplitude_rad, scenario.wave_gain_kappa);

  // Filter seeded at the first truth sample with a loose prior.
  const TargetSample first = target_sim.at_time(0.0);
  ErrorFilterState filter = ErrorFilterState::create(scenario.filter_model, first.pose.position,
                                                     Eigen::Vector3d::Zero());
  filter.r_position =
      scenario.measurement.pos_sigma_m * scenario.measurement.pos_sigma_m * Eigen::Matrix3d::Identity();
  filter.r_attitude =
      scenario.measurement.att_sigma_rad * scenario.measurement.att_sigma_rad * Eigen::Matrix3d::Identity();

  JointState joint;
  joint.q = scenario.q_home;

  CaptureState capture;
  CaptureCommands commands;
  std::optional<HorizonPlan> prev_plan;
  RhcState rhc = RhcState::fresh(scenario.horizon_steps);

  TrialRecord record;
  record.rows.reserve(static_cast<std::size_t>(n_ticks));

  double t = 0.0;
  for (int tick = 0; tick < n_ticks; ++tick) {
   try {
    // Physics and filtering at the substep rate.
    for (int sub = 0; sub < n_sub; ++sub) {
      const double t_next = t + dt_sub;
      target_sim.advance(t, dt_sub, commands);
      filter = predict(filter, dt_sub);
      const TargetSample truth = target_sim.at_time(t_next);
      Measurement z;
      z.stamp_s = t_next;
      for (int i = 0; i < 3; ++i) {
        z.position(i) = truth.pose.position(i) + scenario.measurement.pos_sigma_m * meas_rng.gaussian();
      }
      if (scenario.measurement.use_orientation) {
        const Eigen::Vector3d datt(scenario.measurement.att_sigma_rad * meas_rng.gaussian(),
                                   scenario.measurement.att_sigma_rad * meas_rng.gaussian(),
                                   scenario.measurement.att_sigma_rad * meas_rng.gaussian());
        z.orientation = truth.pose.orientation * UnitQuaternion::from_rotation_vector(datt);
      }
      filter = update(filter, z).state;
      t = t_next;
    }

    const TargetSample truth = target_sim.at_time(t);
    const BasePose base_pose = sea.base_pose_at(t);
    const Pose6 base = base_transform(base_pose);

    // Planner references over the controller horizon, plus the canonical
    // 0.5 s point prediction for logging and metrics.
    const int h = scenario.controller == ControllerKind::ShrinkingHorizon
                      ? rhc.remaining_steps
                      : scenario.horizon_steps;
    const bool retrieving = capture.phase == CapturePhase::Retrieve;
    std::vector<Pose6> target_traj(static_cast<std::size_t>(h) + 1);
    std::vector<Pose6> base_traj(static_cast<std::size_t>(h) + 1);
    for (int k = 0; k <= h; ++k) {
      base_traj[static_cast<std::size_t>(k)] = base_transform(sea.base_pose_at(t + k * dt));
    }
    Extrapolation extrap = extrapolate(filter, scenario.prediction_lead_s, scenario.horizon_steps);
    if (retrieving) {
      Pose6 retrieve_target;
      for (int k = 0; k <= h; ++k) {
        retrieve_target = base_traj[static_cast<std::size_t>(k)];
        Pose6 goal;
        goal.position = retrieve_target.apply(scenario.retrieve_position_deck_m);
        goal.orientation = retrieve_target.orientation;
        target_traj[static_cast<std::size_t>(k)] = goal;
      }
    } else {
      const Extrapolation horizon_pred = extrapolate(filter, std::max(h * dt, 1e-6), h);
      for (int k = 0; k <= h; ++k) {
        target_traj[static_cast<std::size_t>(k)] = horizon_pred.samples[static_cast<std::size_t>(k)].pose;
      }
    }

    // Controller step.
    TrialRow row;
    row.horizon_used = h;
    Vector7d u = Vector7d::Zero();
    switch (scenario.controller) {
      case ControllerKind::SimpleFollowing: {
        const auto t0 = std::chrono::steady_clock::now();
        Vector6d target_vel = Vector6d::Zero();
        if (!retrieving) target_vel.head<3>() = extrap.samples.front().velocity;
        u = simple_following_step(joint, target_traj.front(), target_vel, scenario.arm, base,
                                  scenario.follow);
        row.solve_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.plan_feasible = true;
        row.audit_ok = true;
        break;
      }
      case ControllerKind::FixedHorizon: {
        auto result = fixed_horizon_step(joint, target_traj, base_traj, scenario.arm, discrete,
                                         weights, scenario.horizon_steps, prev_plan,
                                         scenario.solver);
        u = result.u0;
        prev_plan = result.plan;
        row.plan_cost = result.plan.cost;
        row.solve_time_s = result.plan.solve_time_s;
        row.solver_iterations = result.plan.solver_iterations;
        row.kkt_residual = result.plan.kkt_residual;
        row.plan_feasible = result.plan.feasible;
        row.audit_ok = !result.plan.feasible || audit_plan(result.plan, scenario.arm, 1e-6);
        break;
      }
      case ControllerKind::ShrinkingHorizon: {
        auto result = shrinking_horizon_step(rhc, joint, target_traj, base_traj, scenario.arm,
                                             discrete, weights, scenario.solver);
        u = result.u0;
        rhc = result.next;
        row.plan_cost = result.plan.cost;
        row.solve_time_s = result.plan.solve_time_s;
        row.solver_iterations = result.plan.solver_iterations;
        row.kkt_residual = result.plan.kkt_residual;
        row.plan_feasible = result.plan.feasible;
        row.audit_ok = !result.plan.feasible || audit_plan(result.plan, scenario.arm, 1e-6);
        break;
      }
    }

    // Plant step: exact discrete double integrator, then clamp into the
    // simulator invariants (the baseline controller may push the limits).
    joint = discrete.step(joint, u);
    for (int i = 0; i < 7; ++i) {
      if (joint.q(i) > scenario.arm.q_max_rad(i)) {
        joint.q(i) = scenario.arm.q_max_rad(i);
        joint.q_dot(i) = std::min(joint.q_dot(i), 0.0);
      } else if (joint.q(i) < scenario.arm.q_min_rad(i)) {
        joint.q(i) = scenario.arm.q_min_rad(i);
        joint.q_dot(i) = std::max(joint.q_dot(i), 0.0);
      }
      joint.q_dot(i) = std::clamp(joint.q_dot(i), -scenario.arm.qd_max_rad_s(i),
                                  scenario.arm.qd_max_rad_s(i));
    }

    const Pose6 ee = forward_kinematics(scenario.arm, joint.q, base);
    const Pose6 ee_deck = forward_kinematics(scenario.arm, joint.q, Pose6{});

    // End-effector inertial velocity includes the deck motion.
    const Eigen::Vector3d ee_vel_joints =
        (geometric_jacobian(scenario.arm, joint.q, base) * joint.q_dot).head<3>();
    const Eigen::Vector3d omega = deck_angular_velocity(base_pose);
    const Eigen::Vector3d base_origin(0.0, 0.0, base_pose.heave_m);
    const Eigen::Vector3d ee_vel = ee_vel_joints + Eigen::Vector3d(0.0, 0.0, base_pose.heave_rate_m_s) +
                                   omega.cross(ee.position - base_origin);

    // Mission tick.
    CaptureInputs inputs;
    inputs.ee_pose = ee;
    inputs.ee_stamp_s = t;
    inputs.uav_pose = truth.pose;
    inputs.uav_stamp_s = t;
    inputs.ee_position_deck = ee_deck.position;
    inputs.relative_speed_mps = (ee_vel - truth.velocity).norm();
    inputs.plan_feasible = row.plan_feasible;
    inputs.t_s = t;
    const CaptureTickResult tick_result = capture_tick(capture, inputs, scenario.capture);
    const bool entered_retrieve =
        tick_result.state.phase == CapturePhase::Retrieve && capture.phase == CapturePhase::Grasp;
    capture = tick_result.state;
    commands = tick_result.commands;
    if (entered_retrieve) rhc.reset();  // capture confirmed: new window

    // Log row.
    row.t_s = t;
    row.target_truth = truth.pose;
    row.target_truth_velocity = truth.velocity;
    row.target_estimate.position = filter.position;
    row.target_estimate.orientation = filter.orientation;
    row.prediction_05 = extrap.samples.back().pose;
    row.joint = joint;
    row.ee_pose = ee;
    row.phase = capture.phase;
    row.pos_error_m = (ee.position - truth.pose.position).norm();
    row.ori_error_deg = pose_error(ee, truth.pose).tail<3>().norm() * 180.0 / M_PI;
    row.relative_speed_mps = inputs.relative_speed_mps;
    record.rows.push_back(row);

    if (!row_finite(row)) {
      record.summary = compute_metrics(record.rows, scenario.capture);
      record.summary.success = false;
      record.summary.diverged_at_row = static_cast<int>(record.rows.size()) - 1;
      record.summary.seed = scenario.seed;
      record.summary.controller = scenario.controller;
      return record;
    }
    if (capture.phase == CapturePhase::Done || capture.phase == CapturePhase::Aborted) break;
   } catch (const NumericError&) {
      if (record.rows.empty()) {
        TrialRow sentinel;
        sentinel.t_s = t;
        sentinel.pos_error_m = std::numeric_limits<double>::quiet_NaN();
        record.rows.push_back(sentinel);
      }
      record.summary = compute_metrics(record.rows, scenario.capture);
      record.summary.success = false;
      record.summary.diverged_at_row = static_cast<int>(record.rows.size()) - 1;
      record.summary.seed = scenario.seed;
      record.summary.controller = scenario.controller;
      return record;
   }
  }

  record.summary = compute_metrics(record.rows, scenario.capture);
  record.summary.abort_cause = capture.abort_cause;
  record.summary.seed = scenario.seed;
  record.summary.controller = scenario.controller;
  return record;
}

TrialSummary compute_metrics(const std::vector<TrialRow>& rows, const CaptureParams& capture) {
  if (rows.empty()) throw ShapeError("compute_metrics: empty row set");
  TrialSummary s;
  s.total_ticks = static_cast<int>(rows.size());
  s.final_phase = rows.back().phase;
  s.success = s.final_phase == CapturePhase::Done;
  s.time_to_capture_s = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    if (row.phase == CapturePhase::Done) {
      s.time_to_capture_s = row.t_s;
      break;
    }
  }

  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i - 1].phase == CapturePhase::Grasp && rows[i].phase == CapturePhase::InterceptPlan) {
      ++s.attempts;
    }
  }

  double first_lock = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    if (row.pos_error_m <= capture.r_capture_m) {
      first_lock = row.t_s;
      break;
    }
  }

  double sum_sq = 0.0, sum = 0.0, sum_ori = 0.0;
  int n_window = 0;
  for (const auto& row : rows) {
    s.mean_solve_time_s += row.solve_time_s;
    s.max_solve_time_s = std::max(s.max_solve_time_s, row.solve_time_s);
    const bool tracking_phase =
        row.phase == CapturePhase::ApproachAlign || row.phase == CapturePhase::Grasp;
    if (tracking_phase && row.t_s >= first_lock) {
      ++n_window;
      sum_sq += row.pos_error_m * row.pos_error_m;
      sum += row.pos_error_m;
      s.max_pos_error_m = std::max(s.max_pos_error_m, row.pos_error_m);
      sum_ori += row.ori_error_deg;
      s.max_ori_error_deg = std::max(s.max_ori_error_deg, row.ori_error_deg);
    }
  }
  s.mean_solve_time_s /= static_cast<double>(rows.size());
  s.capture_window_ticks = n_window;
  s.metrics_applicable = n_window > 0;
  if (s.metrics_applicable) {
    s.rms_pos_error_m = std::sqrt(sum_sq / n_window);
    s.mean_pos_error_m = sum / n_window;
    s.mean_ori_error_deg = sum_ori / n_window;
  } else {
    s.rms_pos_error_m = s.mean_pos_error_m = s.mean_ori_error_deg = s.max_ori_error_deg =
        std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double idx = p * (static_cast<double>(v.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (idx - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

CampaignReport run_campaign(const Scenario& scenario_template, const CampaignSpec& spec) {
  if (spec.n_trials < 1) throw ConfigError("run_campaign: n_trials must be >= 1");
  CampaignReport report;
  report.seeds.reserve(static_cast<std::size_t>(spec.n_trials));
  for (int i = 0; i < spec.n_trials; ++i) {
    report.seeds.push_back(derive_seed(spec.master_seed, static_cast<std::uint64_t>(i)));
  }

  auto scenario_for = [&](std::uint64_t seed, ControllerKind kind) {
    Scenario sc = scenario_template;
    sc.seed = seed;
    sc.controller = kind;
    if (spec.roll_range_deg) {
      std::uint64_t draw_state = derive_seed(seed, 99);
      const double u = static_cast<double>(splitmix64(draw_state) >> 11) * 0x1.0p-53;
      const double deg = spec.roll_range_deg->first +
                         u * (spec.roll_range_deg->second - spec.roll_range_deg->first);
      sc.sea.roll_amplitude_rad = deg * M_PI / 180.0;
      sc.sea.pitch_amplitude_rad = 0.5 * deg * M_PI / 180.0;
    }
    return sc;
  };

  const int threads = std::max(1, spec.max_threads);
  for (ControllerKind kind : spec.controllers) {
    ControllerAggregate agg;
    agg.controller = kind;
    agg.n_trials = spec.n_trials;
    agg.trials.resize(static_cast<std::size_t>(spec.n_trials));

    std::atomic<int> next{0};
    auto worker = [&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= spec.n_trials) return;
        const TrialRecord rec = run_trial(scenario_for(report.seeds[static_cast<std::size_t>(i)], kind));
        agg.trials[static_cast<std::size_t>(i)] = rec.summary;
        if (spec.on_trial) spec.on_trial(kind, i, rec);
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(threads));
      for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    std::vector<double> rms, ori, ttc, solve_means;
    for (const auto& trial : agg.trials) {
      if (trial.success) {
        ++agg.n_success;
        ttc.push_back(trial.time_to_capture_s);
      }
      if (trial.metrics_applicable) {
        rms.push_back(trial.rms_pos_error_m);
        ori.push_back(trial.mean_ori_error_deg);
      }
      solve_means.push_back(trial.mean_solve_time_s);
    }
    agg.success_rate = static_cast<double>(agg.n_success) / spec.n_trials;
    agg.mean_rms_pos_error_m =
        rms.empty() ? std::numeric_limits<double>::quiet_NaN()
                    : std::accumulate(rms.begin(), rms.end(), 0.0) / static_cast<double>(rms.size());
    agg.mean_ori_error_deg =
        ori.empty() ? std::numeric_limits<double>::quiet_NaN()
                    : std::accumulate(ori.begin(), ori.end(), 0.0) / static_cast<double>(ori.size());
    agg.median_time_to_capture_s = median(ttc);
    agg.median_rms_pos_error_m = median(rms);
    agg.mean_solve_time_s = solve_means.empty()
                                ? 0.0
                                : std::accumulate(solve_means.begin(), solve_means.end(), 0.0) /
                                      static_cast<double>(solve_means.size());
    agg.p95_solve_time_s = percentile(solve_means, 0.95);
    report.aggregates.push_back(std::move(agg));
  }

  // Paired deltas against the simple-following baseline when present.
  const ControllerAggregate* baseline = nullptr;
  for (const auto& agg : report.aggregates) {
    if (agg.controller == ControllerKind::SimpleFollowing) {
      baseline = &agg;
      break;
    }
  }
  if (baseline != nullptr) {
    for (const auto& agg : report.aggregates) {
      if (agg.controller == ControllerKind::SimpleFollowing) continue;
      std::vector<double> ttc_base, ttc_ctrl, rms_base, rms_ctrl;
      for (int i = 0; i < spec.n_trials; ++i) {
        const auto& tb = baseline->trials[static_cast<std::size_t>(i)];
        const auto& tc = agg.trials[static_cast<std::size_t>(i)];
        if (tb.success && tc.success) {
          ttc_base.push_back(tb.time_to_capture_s);
          ttc_ctrl.push_back(tc.time_to_capture_s);
        }
        if (tb.metrics_applicable && tc.metrics_applicable) {
          rms_base.push_back(tb.rms_pos_error_m);
          rms_ctrl.push_back(tc.rms_pos_error_m);
        }
      }
      CampaignReport::BaselineDelta delta;
      delta.controller = agg.controller;
      const double mb = median(ttc_base), mc = median(ttc_ctrl);
      delta.time_to_capture_reduction_pct = 100.0 * (mb - mc) / mb;
      const double rb = median(rms_base), rc = median(rms_ctrl);
      delta.rms_error_reduction_pct = 100.0 * (rb - rc) / rb;
      report.deltas.push_back(delta);
    }
  }
  return report;
}

namespace {

json pose_to_json(const Pose6& pose) {
  return json{{"p", {pose.position.x(), pose.position.y(), pose.position.z()}},
              {"q", {pose.orientation.w(), pose.orientation.x(), pose.orientation.y(),
                     pose.orientation.z()}}};
}

json row_to_json(const TrialRow& row, bool include_timing) {
  json j;
  j["type"] = "row";
  j["t_s"] = row.t_s;
  j["target_truth"] = pose_to_json(row.target_truth);
  j["target_truth_vel"] = {row.target_truth_velocity.x(), row.target_truth_velocity.y(),
                           row.target_truth_velocity.z()};
  j["target_estimate"] = pose_to_json(row.target_estimate);
  j["prediction_05"] = pose_to_json(row.prediction_05);
  j["q"] = std::vector<double>(row.joint.q.data(), row.joint.q.data() + 7);
  j["q_dot"] = std::vector<double>(row.joint.q_dot.data(), row.joint.q_dot.data() + 7);
  j["ee"] = pose_to_json(row.ee_pose);
  j["plan_cost"] = row.plan_cost;
  j["plan_feasible"] = row.plan_feasible;
  j["audit_ok"] = row.audit_ok;
  j["kkt_residual"] = row.kkt_residual;
  j["solver_iterations"] = row.solver_iterations;
  j["phase"] = to_string(row.phase);
  j["pos_error_m"] = row.pos_error_m;
  j["ori_error_deg"] = row.ori_error_deg;
  j["relative_speed_mps"] = row.relative_speed_mps;
  j["horizon_used"] = row.horizon_used;
  if (include_timing) j["solve_time_s"] = row.solve_time_s;
  return j;
}

json summary_to_json(const TrialSummary& s, bool include_timing) {
  json j;
  j["type"] = "summary";
  j["schema_version"] = kTrialSchemaVersion;
  j["success"] = s.success;
  j["time_to_capture_s"] = std::isnan(s.time_to_capture_s) ? json(nullptr) : json(s.time_to_capture_s);
  j["metrics_applicable"] = s.metrics_applicable;
  j["rms_pos_error_m"] = std::isnan(s.rms_pos_error_m) ? json(nullptr) : json(s.rms_pos_error_m);
  j["mean_pos_error_m"] = std::isnan(s.mean_pos_error_m) ? json(nullptr) : json(s.mean_pos_error_m);
  j["max_pos_error_m"] = s.max_pos_error_m;
  j["mean_ori_error_deg"] = std::isnan(s.mean_ori_error_deg) ? json(nullptr) : json(s.mean_ori_error_deg);
  j["max_ori_error_deg"] = std::isnan(s.max_ori_error_deg) ? json(nullptr) : json(s.max_ori_error_deg);
  j["capture_window_ticks"] = s.capture_window_ticks;
  j["total_ticks"] = s.total_ticks;
  j["attempts"] = s.attempts;
  j["final_phase"] = to_string(s.final_phase);
  j["abort_cause"] = s.abort_cause;
  j["diverged_at_row"] = s.diverged_at_row;
  j["seed"] = s.seed;
  j["controller"] = to_string(s.controller);
  if (include_timing) {
    j["mean_solve_time_s"] = s.mean_solve_time_s;
    j["max_solve_time_s"] = s.max_solve_time_s;
  }
  return j;
}

}  // namespace

std::string trial_to_jsonl(const TrialRecord& record, bool include_timing) {
  std::ostringstream os;
  for (const auto& row : record.rows) {
    os << row_to_json(row, include_timing).dump() << "\n";
  }
  os << summary_to_json(record.summary, include_timing).dump() << "\n";
  return os.str();
}

void write_trial_jsonl(const TrialRecord& record, const std::string& path, bool include_timing) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << trial_to_jsonl(record, include_timing);
}

std::string campaign_to_csv(const CampaignReport& report) {
  std::ostringstream os;
  os << "schema_version,controller,n_trials,n_success,success_rate,mean_rms_pos_error_m,"
        "median_rms_pos_error_m,mean_ori_error_deg,median_time_to_capture_s,"
        "ttc_reduction_vs_baseline_pct,rms_reduction_vs_baseline_pct\n";
  for (const auto& agg : report.aggregates) {
    const CampaignReport::BaselineDelta* delta = nullptr;
    for (const auto& d : report.deltas) {
      if (d.controller == agg.controller) delta = &d;
    }
    os << kTrialSchemaVersion << "," << to_string(agg.controller) << "," << agg.n_trials << ","
       << agg.n_success << "," << agg.success_rate << "," << agg.mean_rms_pos_error_m << ","
       << agg.median_rms_pos_error_m << "," << agg.mean_ori_error_deg << ","
       << agg.median_time_to_capture_s << ",";
    if (delta != nullptr) {
      os << delta->time_to_capture_reduction_pct << "," << delta->rms_error_reduction_pct;
    } else {
      os << ",";
    }
    os << "\n";
  }
  return os.str();
}

std::string campaign_timing_csv(const CampaignReport& report) {
  std::ostringstream os;
  os << "controller,mean_solve_time_s,p95_solve_time_s\n";
  for (const auto& agg : report.aggregates) {
    os << to_string(agg.controller) << "," << agg.mean_solve_time_s << "," << agg.p95_solve_time_s
       << "\n";
  }
  return os.str();
}

}  // namespace wavecatch
