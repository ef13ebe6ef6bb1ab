#include "wavecatch/uav.hpp"

#include <algorithm>
#include <cmath>

#include "wavecatch/errors.hpp"

namespace wavecatch {

namespace {

bool all_finite(const UavState& s, const RotorCommand& c) {
  return s.position.allFinite() && s.velocity.allFinite() && s.body_rates.allFinite() &&
         std::isfinite(s.orientation.w()) &&
         std::all_of(c.thrust_n.begin(), c.thrust_n.end(), [](double f) { return std::isfinite(f); });
}

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace

void UavParams::validate() const {
  if (!(mass_kg > 0.0) || !(arm_length_m > 0.0) || !(gravity_mps2 > 0.0) ||
      !(inertia_xx_kgm2 > 0.0) || !(inertia_yy_kgm2 > 0.0) || !(inertia_zz_kgm2 > 0.0) ||
      !(rotor_drag_coeff_nm_per_n > 0.0) || !(rotor_thrust_max_n > 0.0)) {
    throw ConfigError("UavParams: all physical parameters must be strictly positive");
  }
  if (inertia_zz_kgm2 < std::max(inertia_xx_kgm2, inertia_yy_kgm2)) {
    throw ConfigError("UavParams: J_z must be >= max(J_x, J_y) for a flat quadrotor");
  }
  if (payload_mass_kg < 0.0) throw ConfigError("UavParams: payload mass must be >= 0");
}

void PdGains::validate() const {
  auto nonneg = [](const Eigen::Vector3d& v) { return (v.array() >= 0.0).all(); };
  if (!nonneg(kp_pos) || !nonneg(kd_pos) || !nonneg(kp_att) || !nonneg(kd_att)) {
    throw ConfigError("PdGains: gains must be >= 0");
  }
}

UavDerivative uav_derivative(const UavState& state, const RotorCommand& cmd,
                             const UavParams& params) {
  if (!all_finite(state, cmd)) throw NumericError("uav_derivative: non-finite input");

  const double m = params.total_mass();
  const double total = cmd.total();

  UavDerivative d;
  d.velocity = state.velocity;

  // Translational: R_b^e (0, 0, sum F) / m + (0, 0, -g).
  const Eigen::Vector3d thrust_inertial =
      state.orientation.rotate(Eigen::Vector3d(0.0, 0.0, total));
  d.acceleration = thrust_inertial / m + Eigen::Vector3d(0.0, 0.0, -params.gravity_mps2);

  // Rotational: Euler equations with differential-thrust and drag moments.
  const double f1 = cmd.thrust_n[0], f2 = cmd.thrust_n[1], f3 = cmd.thrust_n[2],
               f4 = cmd.thrust_n[3];
  const double mx = params.arm_length_m * (f2 - f4);
  const double my = params.arm_length_m * (f1 - f3);
  const double mz = params.rotor_drag_coeff_nm_per_n * (f1 - f2 + f3 - f4);
  const double p = state.body_rates.x(), q = state.body_rates.y(), r = state.body_rates.z();
  const double jx = params.inertia_xx_kgm2, jy = params.inertia_yy_kgm2,
               jz = params.inertia_zz_kgm2;
  d.body_rate_dot = Eigen::Vector3d(
      (mx - (jz - jy) * q * r) / jx,
      (my - (jx - jz) * p * r) / jy,
      (mz - (jy - jx) * p * q) / jz);

  // Quaternion kinematics: qdot = 1/2 q ⊗ (0, p, q, r).
  const double w = state.orientation.w(), x = state.orientation.x(),
               y = state.orientation.y(), z = state.orientation.z();
  d.orientation_dot = {
      0.5 * (-x * p - y * q - z * r),
      0.5 * (w * p + y * r - z * q),
      0.5 * (w * q - x * r + z * p),
      0.5 * (w * r + x * q - y * p)};
  return d;
}

namespace {

// Flat 13-vector view for the RK4 stages; quaternion handled as R^4.
struct RawState {
  Eigen::Matrix<double, 13, 1> v;

  static RawState from(const UavState& s) {
    RawState r;
    r.v.segment<3>(0) = s.position;
    r.v.segment<3>(3) = s.velocity;
    r.v(6) = s.orientation.w();
    r.v(7) = s.orientation.x();
    r.v(8) = s.orientation.y();
    r.v(9) = s.orientation.z();
    r.v.segment<3>(10) = s.body_rates;
    return r;
  }

  UavState to() const {
    UavState s;
    s.position = v.segment<3>(0);
    s.velocity = v.segment<3>(3);
    s.orientation = UnitQuaternion(v(6), v(7), v(8), v(9));
    s.body_rates = v.segment<3>(10);
    return s;
  }
};

Eigen::Matrix<double, 13, 1> derivative_vector(const Eigen::Matrix<double, 13, 1>& raw,
                                               const RotorCommand& cmd, const UavParams& params) {
  UavState s;
  s.position = raw.segment<3>(0);
  s.velocity = raw.segment<3>(3);
  // Mid-stage quaternions drift off unit norm; normalize for the dynamics
  // evaluation only (the cumulative state is renormalized at step end).
  s.orientation = UnitQuaternion(raw(6), raw(7), raw(8), raw(9));
  s.body_rates = raw.segment<3>(10);
  const UavDerivative d = uav_derivative(s, cmd, params);
  Eigen::Matrix<double, 13, 1> out;
  out.segment<3>(0) = d.velocity;
  out.segment<3>(3) = d.acceleration;
  out(6) = d.orientation_dot[0];
  out(7) = d.orientation_dot[1];
  out(8) = d.orientation_dot[2];
  out(9) = d.orientation_dot[3];
  out.segment<3>(10) = d.body_rate_dot;
  return out;
}

}  // namespace

UavState integrate_uav(const UavState& state, const RotorCommand& cmd, const UavParams& params,
                       double dt) {
  if (!(dt > 0.0) || dt > 0.02) {
    throw ConfigError("integrate_uav: dt must satisfy 0 < dt <= 0.02 s");
  }
  const auto y0 = RawState::from(state).v;
  const auto k1 = derivative_vector(y0, cmd, params);
  const auto k2 = derivative_vector(y0 + 0.5 * dt * k1, cmd, params);
  const auto k3 = derivative_vector(y0 + 0.5 * dt * k2, cmd, params);
  const auto k4 = derivative_vector(y0 + dt * k3, cmd, params);
  RawState out;
  out.v = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return out.to();  // UnitQuaternion ctor renormalizes
}

RotorCommand allocate_rotors(double total_thrust, const Eigen::Vector3d& moments,
                             const UavParams& params, bool clamp) {
  const double l = params.arm_length_m;
  const double cd = params.rotor_drag_coeff_nm_per_n;
  const double quarter = total_thrust / 4.0;
  RotorCommand cmd;
  cmd.thrust_n[0] = quarter + moments.y() / (2.0 * l) + moments.z() / (4.0 * cd);
  cmd.thrust_n[1] = quarter + moments.x() / (2.0 * l) - moments.z() / (4.0 * cd);
  cmd.thrust_n[2] = quarter - moments.y() / (2.0 * l) + moments.z() / (4.0 * cd);
  cmd.thrust_n[3] = quarter - moments.x() / (2.0 * l) - moments.z() / (4.0 * cd);
  if (clamp) {
    for (auto& f : cmd.thrust_n) f = std::clamp(f, 0.0, params.rotor_thrust_max_n);
  }
  return cmd;
}

Eigen::Vector3d moments_from_rotors(const RotorCommand& cmd, const UavParams& params) {
  const double f1 = cmd.thrust_n[0], f2 = cmd.thrust_n[1], f3 = cmd.thrust_n[2],
               f4 = cmd.thrust_n[3];
  return Eigen::Vector3d(params.arm_length_m * (f2 - f4), params.arm_length_m * (f1 - f3),
                         params.rotor_drag_coeff_nm_per_n * (f1 - f2 + f3 - f4));
}

RotorCommand cascaded_pd(const UavState& state, const Eigen::Vector3d& reference_position,
                         double reference_yaw, const PdGains& gains, const UavParams& params,
                         double dt) {
  if (!(dt > 0.0)) throw ConfigError("cascaded_pd: dt must be > 0");
  const Eigen::Vector3d pos_error = reference_position - state.position;
  if (pos_error.norm() > params.envelope_radius_m) {
    throw EnvelopeError("cascaded_pd: reference outside flight envelope");
  }

  // Outer loop, PD without integral. Derivative of the error for a fixed
  // reference is -velocity.
  const Eigen::Vector3d u =
      gains.kp_pos.cwiseProduct(pos_error) - gains.kd_pos.cwiseProduct(state.velocity);

  const EulerAngles att = euler_from_quaternion(state.orientation);
  const double g = params.gravity_mps2;
  const double cy = std::cos(att.yaw), sy = std::sin(att.yaw);

  // Small-angle inversion of the translational equations.
  double pitch_des = (u.x() * cy + u.y() * sy) / g;
  double roll_des = (u.x() * sy - u.y() * cy) / g;
  pitch_des = std::clamp(pitch_des, -gains.max_tilt_rad, gains.max_tilt_rad);
  roll_des = std::clamp(roll_des, -gains.max_tilt_rad, gains.max_tilt_rad);

  const double tilt = std::max(std::cos(att.roll) * std::cos(att.pitch), 0.5);
  const double total_thrust = params.total_mass() * (g + u.z()) / tilt;

  // Inner loop on attitude error, rate damping from gyro feedback.
  const Eigen::Vector3d att_error(wrap_angle(roll_des - att.roll),
                                  wrap_angle(pitch_des - att.pitch),
                                  wrap_angle(reference_yaw - att.yaw));
  const Eigen::Vector3d moments =
      gains.kp_att.cwiseProduct(att_error) - gains.kd_att.cwiseProduct(state.body_rates);

  return allocate_rotors(std::max(total_thrust, 0.0), moments, params, true);
}

}  // namespace wavecatch
