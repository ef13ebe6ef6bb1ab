#pragma once

#include <string>

#include "wavecatch/arm.hpp"
#include "wavecatch/control.hpp"
#include "wavecatch/frames.hpp"

namespace wavecatch {

enum class CapturePhase {
  PoseSync,
  InterceptPlan,
  ApproachAlign,
  Grasp,
  Retrieve,
  Done,
  Aborted,
};

const char* to_string(CapturePhase phase);

struct CaptureParams {
  double r_capture_m = 0.05;
  double v_capture_mps = 0.2;
  double grasp_dwell_s = 0.2;
  double pose_fresh_s = 0.1;
  /// Deck-frame box the end-effector must reach to complete retrieval.
  Eigen::Vector3d holding_min_m = Eigen::Vector3d(0.31, -0.14, 0.46);
  Eigen::Vector3d holding_max_m = Eigen::Vector3d(0.59, 0.14, 0.74);
};

/// Capture workflow state. Transitions move forward one phase at a time;
/// Grasp falls back to InterceptPlan on a miss; any active phase can abort
/// on stale pose streams. Done and Aborted are absorbing.
struct CaptureState {
  CapturePhase phase = CapturePhase::PoseSync;
  double phase_entry_time_s = 0.0;
  int attempts = 0;
  std::string abort_cause;
};

struct CaptureInputs {
  Pose6 ee_pose;                    // inertial
  double ee_stamp_s = 0.0;
  Pose6 uav_pose;                   // inertial
  double uav_stamp_s = 0.0;
  Eigen::Vector3d ee_position_deck = Eigen::Vector3d::Zero();
  double relative_speed_mps = 0.0;  // || v_ee - v_target ||
  bool plan_feasible = false;
  double t_s = 0.0;
};

/// Commands emitted toward the UAV/gripper this tick.
struct CaptureCommands {
  bool reduce_lateral_velocity = false;  // during ApproachAlign
  bool close_gripper = false;            // during Grasp dwell
  bool disarm_uav = false;               // at Done
};

struct CaptureTickResult {
  CaptureState state;
  CaptureCommands commands;
};

CaptureTickResult capture_tick(const CaptureState& state, const CaptureInputs& inputs,
                               const CaptureParams& params);

enum class DeliveryVerdict { Proceed, Wait, Abort };

const char* to_string(DeliveryVerdict verdict);

struct DeliveryDecision {
  bool cargo_ready = false;
  bool target_reachable = false;
  bool within_deadline = false;
  DeliveryVerdict verdict = DeliveryVerdict::Abort;
};

/// Proceed iff all three predicates hold; Wait only when cargo readiness is
/// the sole missing predicate (waiting cannot fix an unreachable target or
/// a blown deadline); Abort otherwise. Reachability = workspace membership
/// plus a full-horizon feasibility probe solve. Pure function.
DeliveryDecision delivery_decide(bool cargo_ready, const Pose6& target_pose_deck,
                                 const ArmModel& model, const JointState& z0,
                                 const DiscreteModel& discrete, const CostWeights& weights,
                                 double deadline_remaining_s, double estimated_completion_s,
                                 int probe_horizon = 20);

}  // namespace wavecatch
