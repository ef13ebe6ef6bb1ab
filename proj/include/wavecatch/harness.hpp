#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wavecatch/arm.hpp"
#include "wavecatch/control.hpp"
#include "wavecatch/eskf.hpp"
#include "wavecatch/mission.hpp"
#include "wavecatch/uav.hpp"
#include "wavecatch/wave.hpp"

namespace wavecatch {

inline constexpr int kTrialSchemaVersion = 1;

enum class ControllerKind { SimpleFollowing, FixedHorizon, ShrinkingHorizon };

const char* to_string(ControllerKind kind);
ControllerKind controller_from_string(const std::string& name);

/// Target on a circle at constant speed, level orientation. The default
/// circle rings the arm base so the azimuth rate stays trackable at 1 m/s;
/// each trial adds a seed-derived phase offset.
struct TargetCircular {
  Eigen::Vector3d center_m = Eigen::Vector3d(0.0, 0.0, 0.72);
  double radius_m = 0.55;
  double speed_mps = 0.5;
  double phase0_rad = 0.0;
};

/// Ornstein-Uhlenbeck velocity process with a speed cap; position reflects
/// off the bounds box so the target stays within reach.
struct TargetRandom {
  double mean_reversion_hz = 1.0;
  double volatility = 0.35;  // m/s^1.5
  double speed_cap_mps = 1.0;
  Eigen::Vector3d start_m = Eigen::Vector3d(0.42, 0.0, 0.78);
  Eigen::Vector3d bounds_min_m = Eigen::Vector3d(0.30, -0.20, 0.70);
  Eigen::Vector3d bounds_max_m = Eigen::Vector3d(0.55, 0.20, 0.84);
};

/// Closed-loop quadrotor plant holding a hover reference above the deck.
struct TargetUavHover {
  Eigen::Vector3d hover_position_m = Eigen::Vector3d(0.42, 0.0, 0.82);
  double position_noise_sigma_m = 0.01;  // noise fed to the UAV's own loops
};

using TargetMotion = std::variant<TargetCircular, TargetRandom, TargetUavHover>;

struct MeasurementModel {
  double pos_sigma_m = 0.005;
  double att_sigma_rad = 0.5 * M_PI / 180.0;
  double rate_hz = 100.0;
  bool use_orientation = true;
};

struct Scenario {
  SeaStateConfig sea;
  TargetMotion target = TargetCircular{};
  ControllerKind controller = ControllerKind::ShrinkingHorizon;
  double duration_s = 20.0;
  double dt_s = 0.05;
  std::uint64_t seed = 1;
  double prediction_lead_s = 0.5;
  int horizon_steps = 20;

  ArmModel arm = ArmModel::standard_seven_dof();
  Vector7d q_home = (Vector7d() << 0.0, 0.188362, 0.0, -1.737137, 0.0, -1.9255, 0.0).finished();
  CostWeights weights = CostWeights::diagonal(60.0, 8.0, 2e-3, 600.0, 40.0);
  SolverOptions solver;
  FollowGains follow;
  double wave_gain_kappa = 0.5;

  TargetMotionModel filter_model;
  MeasurementModel measurement;
  CaptureParams capture;
  Eigen::Vector3d retrieve_position_deck_m = Eigen::Vector3d(0.45, 0.0, 0.60);

  UavParams uav;
  PdGains uav_gains;

  void validate() const;
};

struct TrialRow {
  double t_s = 0.0;
  Pose6 target_truth;
  Eigen::Vector3d target_truth_velocity = Eigen::Vector3d::Zero();
  Pose6 target_estimate;
  Pose6 prediction_05;  // pose predicted prediction_lead_s ahead
  JointState joint;
  Pose6 ee_pose;        // inertial
  double plan_cost = 0.0;
  double solve_time_s = 0.0;
  int solver_iterations = 0;
  double kkt_residual = 0.0;
  bool plan_feasible = false;
  bool audit_ok = true;
  CapturePhase phase = CapturePhase::PoseSync;
  double pos_error_m = 0.0;
  double ori_error_deg = 0.0;
  double relative_speed_mps = 0.0;
  int horizon_used = 0;
};

struct TrialSummary {
  bool success = false;
  double time_to_capture_s = 0.0;   // NaN when no capture
  bool metrics_applicable = false;  // capture window non-empty
  double rms_pos_error_m = 0.0;
  double mean_pos_error_m = 0.0;
  double max_pos_error_m = 0.0;
  double mean_ori_error_deg = 0.0;
  double max_ori_error_deg = 0.0;
  double mean_solve_time_s = 0.0;
  double max_solve_time_s = 0.0;
  int capture_window_ticks = 0;
  int total_ticks = 0;
  int attempts = 0;
  CapturePhase final_phase = CapturePhase::PoseSync;
  std::string abort_cause;
  int diverged_at_row = -1;  // >= 0 when the trial blew up numerically
  std::uint64_t seed = 0;
  ControllerKind controller = ControllerKind::ShrinkingHorizon;
};

struct TrialRecord {
  std::vector<TrialRow> rows;
  TrialSummary summary;
};

/// Deterministic fixed-step closed loop:
/// wave -> target truth -> noisy measurement -> filter -> 0.5 s
/// extrapolation -> controller -> arm discrete step -> capture tick -> log.
TrialRecord run_trial(const Scenario& scenario);

/// Summary reduction over rows; idempotent (recomputing from rows yields
/// the stored summary). The capture window is every ApproachAlign/Grasp
/// tick at or after the first tick with position error <= r_capture.
TrialSummary compute_metrics(const std::vector<TrialRow>& rows, const CaptureParams& capture);

struct CampaignSpec {
  int n_trials = 40;
  std::vector<ControllerKind> controllers = {ControllerKind::ShrinkingHorizon};
  std::uint64_t master_seed = 7;
  /// When set, per-trial roll amplitude is drawn deterministically from
  /// this range (degrees); pitch amplitude follows at half the roll.
  std::optional<std::pair<double, double>> roll_range_deg;
  int max_threads = 1;
  /// Invoked for every finished trial (possibly from worker threads, one
  /// call per trial); used by the CLI to stream trial logs to disk.
  std::function<void(ControllerKind, int, const TrialRecord&)> on_trial;
};

struct ControllerAggregate {
  ControllerKind controller = ControllerKind::ShrinkingHorizon;
  int n_trials = 0;
  int n_success = 0;
  double success_rate = 0.0;
  double mean_rms_pos_error_m = 0.0;
  double mean_ori_error_deg = 0.0;
  double median_time_to_capture_s = 0.0;
  double median_rms_pos_error_m = 0.0;
  double mean_solve_time_s = 0.0;
  double p95_solve_time_s = 0.0;
  std::vector<TrialSummary> trials;  // index-aligned with the seed set
};

struct CampaignReport {
  std::vector<ControllerAggregate> aggregates;
  std::vector<std::uint64_t> seeds;  // identical for every controller
  /// Paired deltas vs the first SimpleFollowing aggregate when present:
  /// positive = improvement of the compared controller over the baseline.
  struct BaselineDelta {
    ControllerKind controller;
    double time_to_capture_reduction_pct = 0.0;  // on medians, paired seeds
    double rms_error_reduction_pct = 0.0;
  };
  std::vector<BaselineDelta> deltas;
};

CampaignReport run_campaign(const Scenario& scenario_template, const CampaignSpec& spec);

/// JSONL serialization: one row object per line, then one summary object.
/// Timing fields are wall-clock and therefore excluded from the canonical
/// form used for byte-identity checks (include_timing = false).
std::string trial_to_jsonl(const TrialRecord& record, bool include_timing = true);
void write_trial_jsonl(const TrialRecord& record, const std::string& path,
                       bool include_timing = true);

/// Deterministic campaign summary (no wall-clock columns).
std::string campaign_to_csv(const CampaignReport& report);
/// Solve-time distribution, kept separate so the main CSV stays
/// byte-reproducible.
std::string campaign_timing_csv(const CampaignReport& report);

}  // namespace wavecatch
