#pragma once

#include <array>

#include "wavecatch/frames.hpp"
#include "wavecatch/types.hpp"

namespace wavecatch {

/// Quadrotor physical parameters. The suspended payload (when present) is
/// modeled as added point mass at the airframe origin.
struct UavParams {
  double mass_kg = 1.5;
  double arm_length_m = 0.25;
  double inertia_xx_kgm2 = 0.02;
  double inertia_yy_kgm2 = 0.02;
  double inertia_zz_kgm2 = 0.04;
  double gravity_mps2 = 9.81;
  /// Yaw reaction torque per newton of rotor thrust, alternating signs
  /// (+ for rotors 1 and 3, - for 2 and 4).
  double rotor_drag_coeff_nm_per_n = 0.02;
  double rotor_thrust_max_n = 8.0;
  double payload_mass_kg = 0.0;
  /// References farther than this from the current position are rejected.
  double envelope_radius_m = 50.0;

  double total_mass() const { return mass_kg + payload_mass_kg; }
  void validate() const;
};

struct UavState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();   // m, inertial
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();   // m/s, inertial
  UnitQuaternion orientation;                            // body -> inertial
  Eigen::Vector3d body_rates = Eigen::Vector3d::Zero();  // p, q, r in rad/s
};

/// Individual rotor thrusts in newtons, F1..F4.
struct RotorCommand {
  std::array<double, 4> thrust_n{0.0, 0.0, 0.0, 0.0};

  double total() const { return thrust_n[0] + thrust_n[1] + thrust_n[2] + thrust_n[3]; }
};

struct PdGains {
  Eigen::Vector3d kp_pos = Eigen::Vector3d(2.2, 2.2, 4.0);
  Eigen::Vector3d kd_pos = Eigen::Vector3d(2.4, 2.4, 3.2);
  Eigen::Vector3d kp_att = Eigen::Vector3d(1.4, 1.4, 0.6);
  Eigen::Vector3d kd_att = Eigen::Vector3d(0.32, 0.32, 0.24);
  double max_tilt_rad = 0.5;

  void validate() const;
};

/// Time derivative of the 13-component rigid-body state.
struct UavDerivative {
  Eigen::Vector3d velocity;
  Eigen::Vector3d acceleration;
  std::array<double, 4> orientation_dot;  // d/dt of (w, x, y, z)
  Eigen::Vector3d body_rate_dot;
};

/// Newton translational equations plus Euler rotational equations with
/// moments (l(F2-F4), l(F1-F3), sum of alternating drag torques).
/// Throws NumericError on non-finite input.
UavDerivative uav_derivative(const UavState& state, const RotorCommand& cmd, const UavParams& params);

/// One classical 4th-order Runge-Kutta step; quaternion renormalized after.
/// Requires 0 < dt <= 0.02 s.
UavState integrate_uav(const UavState& state, const RotorCommand& cmd, const UavParams& params, double dt);

/// Cascaded PD: outer position loop produces desired accelerations, mapped
/// to tilt references by small-angle inversion of the translational
/// equations; inner attitude loop produces moments; moments plus total
/// thrust are allocated to the four rotors and clamped.
/// Derivative terms use the measured velocity and body rates.
/// Throws EnvelopeError when the reference leaves the flight envelope.
RotorCommand cascaded_pd(const UavState& state, const Eigen::Vector3d& reference_position,
                         double reference_yaw, const PdGains& gains, const UavParams& params,
                         double dt);

/// Maps (total thrust, 3 moments) to rotor thrusts; exact inverse of the
/// moment structure when no clamping occurs.
RotorCommand allocate_rotors(double total_thrust, const Eigen::Vector3d& moments,
                             const UavParams& params, bool clamp = true);

/// Moments implied by a rotor command, for the allocation round-trip check.
Eigen::Vector3d moments_from_rotors(const RotorCommand& cmd, const UavParams& params);

}  // namespace wavecatch
