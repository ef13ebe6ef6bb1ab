#include "wavecatch/mission.hpp"

#include <cmath>

#include "wavecatch/errors.hpp"

namespace wavecatch {

const char* to_string(CapturePhase phase) {
  switch (phase) {
    case CapturePhase::PoseSync: return "PoseSync";
    case CapturePhase::InterceptPlan: return "InterceptPlan";
    case CapturePhase::ApproachAlign: return "ApproachAlign";
    case CapturePhase::Grasp: return "Grasp";
    case CapturePhase::Retrieve: return "Retrieve";
    case CapturePhase::Done: return "Done";
    case CapturePhase::Aborted: return "Aborted";
  }
  return "?";
}

const char* to_string(DeliveryVerdict verdict) {
  switch (verdict) {
    case DeliveryVerdict::Proceed: return "Proceed";
    case DeliveryVerdict::Wait: return "Wait";
    case DeliveryVerdict::Abort: return "Abort";
  }
  return "?";
}

CaptureTickResult capture_tick(const CaptureState& state, const CaptureInputs& inputs,
                               const CaptureParams& params) {
  CaptureTickResult out;
  out.state = state;
  auto enter = [&](CapturePhase phase) {
    out.state.phase = phase;
    out.state.phase_entry_time_s = inputs.t_s;
  };

  if (state.phase == CapturePhase::Done) {
    out.commands.disarm_uav = true;
    return out;
  }
  if (state.phase == CapturePhase::Aborted) return out;

  const double ee_age = inputs.t_s - inputs.ee_stamp_s;
  const double uav_age = inputs.t_s - inputs.uav_stamp_s;
  if (ee_age > params.pose_fresh_s || uav_age > params.pose_fresh_s) {
    enter(CapturePhase::Aborted);
    out.state.abort_cause = ee_age > params.pose_fresh_s ? "stale end-effector pose stream"
                                                         : "stale target pose stream";
    return out;
  }

  const double pos_error = (inputs.ee_pose.position - inputs.uav_pose.position).norm();
  const bool in_capture_ball =
      pos_error <= params.r_capture_m && inputs.relative_speed_mps <= params.v_capture_mps;

  switch (state.phase) {
    case CapturePhase::PoseSync:
      // Both pose streams fresh (checked above).
      enter(CapturePhase::InterceptPlan);
      break;
    case CapturePhase::InterceptPlan:
      if (inputs.plan_feasible) enter(CapturePhase::ApproachAlign);
      break;
    case CapturePhase::ApproachAlign:
      out.commands.reduce_lateral_velocity = true;
      if (in_capture_ball) enter(CapturePhase::Grasp);
      break;
    case CapturePhase::Grasp:
      out.commands.close_gripper = true;
      if (pos_error > params.r_capture_m) {
        // Miss: target slipped out during the gripper dwell.
        enter(CapturePhase::InterceptPlan);
        out.state.attempts = state.attempts + 1;
        out.commands.close_gripper = false;
      } else if (inputs.t_s - state.phase_entry_time_s >= params.grasp_dwell_s) {
        enter(CapturePhase::Retrieve);
      }
      break;
    case CapturePhase::Retrieve: {
      const bool held = (inputs.ee_position_deck.array() >= params.holding_min_m.array()).all() &&
                        (inputs.ee_position_deck.array() <= params.holding_max_m.array()).all();
      if (held) {
        enter(CapturePhase::Done);
        out.commands.disarm_uav = true;
      }
      break;
    }
    case CapturePhase::Done:
    case CapturePhase::Aborted:
      break;
  }
  return out;
}

DeliveryDecision delivery_decide(bool cargo_ready, const Pose6& target_pose_deck,
                                 const ArmModel& model, const JointState& z0,
                                 const DiscreteModel& discrete, const CostWeights& weights,
                                 double deadline_remaining_s, double estimated_completion_s,
                                 int probe_horizon) {
  if (deadline_remaining_s < 0.0) {
    throw ConfigError("delivery_decide: deadline_remaining must be >= 0");
  }
  DeliveryDecision d;
  d.cargo_ready = cargo_ready;
  d.within_deadline = estimated_completion_s <= deadline_remaining_s;

  d.target_reachable = model.workspace_contains(target_pose_deck.position);
  if (d.target_reachable) {
    const std::vector<Pose6> target(static_cast<std::size_t>(probe_horizon) + 1,
                                    target_pose_deck);
    const std::vector<Pose6> base(static_cast<std::size_t>(probe_horizon) + 1, Pose6{});
    const HorizonPlan probe =
        solve_horizon(z0, target, base, model, discrete, weights, probe_horizon);
    d.target_reachable = probe.feasible;
  }

  if (d.cargo_ready && d.target_reachable && d.within_deadline) {
    d.verdict = DeliveryVerdict::Proceed;
  } else if (!d.target_reachable || !d.within_deadline) {
    d.verdict = DeliveryVerdict::Abort;
  } else {
    d.verdict = DeliveryVerdict::Wait;
  }
  return d;
}

}  // namespace wavecatch
