#include "wavecatch/arm.hpp"

#include <cmath>
#include <sstream>

#include "wavecatch/errors.hpp"

namespace wavecatch {

void ArmModel::validate() const {
  for (int i = 0; i < kArmDof; ++i) {
    if (!(q_min_rad(i) < q_max_rad(i))) {
      throw ConfigError("ArmModel: q_min must be < q_max elementwise");
    }
    if (!(qd_max_rad_s(i) > 0.0)) {
      throw ConfigError("ArmModel: velocity limits must be positive");
    }
  }
  if (!(u_norm_max_rad_s2 > 0.0)) {
    throw ConfigError("ArmModel: acceleration bound must be positive");
  }
  if (!((workspace_min_m.array() < workspace_max_m.array()).all())) {
    throw ConfigError("ArmModel: workspace box must have positive extent");
  }
}

bool ArmModel::workspace_contains(const Eigen::Vector3d& deck_position, double tol) const {
  return (deck_position.array() >= workspace_min_m.array() - tol).all() &&
         (deck_position.array() <= workspace_max_m.array() + tol).all();
}

ArmModel ArmModel::standard_seven_dof() {
  ArmModel m;
  const double hp = M_PI / 2.0;
  const std::array<double, 7> alphas = {0.0, -hp, hp, hp, -hp, -hp, hp};
  const std::array<double, 7> ds = {0.34, 0.0, 0.40, 0.0, 0.40, 0.0, 0.126};
  for (int i = 0; i < kArmDof; ++i) {
    m.dh[i] = DhRow{0.0, alphas[i], ds[i], 0.0};
  }
  m.q_min_rad << -2.9, -2.2, -2.9, -2.2, -2.9, -2.2, -3.0;
  m.q_max_rad << 2.9, 2.2, 2.9, 2.2, 2.9, 2.2, 3.0;
  m.qd_max_rad_s << 2.5, 2.5, 2.8, 3.0, 3.2, 3.5, 3.5;
  m.u_norm_max_rad_s2 = 40.0;
  m.workspace_min_m = Eigen::Vector3d(-0.95, -0.95, 0.05);
  m.workspace_max_m = Eigen::Vector3d(0.95, 0.95, 1.35);
  return m;
}

std::optional<Vector7d> level_catch_ik(const ArmModel& model, const Eigen::Vector3d& deck_position) {
  // Planar shoulder-elbow solution in the vertical plane through the target,
  // wrist yaw canceling the base yaw so the end-effector stays level.
  const double d_base = model.dh[0].d_m;
  const double l_upper = model.dh[2].d_m;
  const double l_fore = model.dh[4].d_m;
  const double d_tool = model.dh[6].d_m;
  const double az = std::atan2(deck_position.y(), deck_position.x());
  const double rho = std::hypot(deck_position.x(), deck_position.y());
  const double h = deck_position.z() - d_base - d_tool;
  const double reach = std::hypot(rho, h);
  if (reach >= l_upper + l_fore - 1e-9 || reach <= std::abs(l_upper - l_fore) + 1e-9) {
    return std::nullopt;
  }
  const double cos_elbow = (l_upper * l_upper + l_fore * l_fore - reach * reach) /
                           (2.0 * l_upper * l_fore);
  const double q4 = -(M_PI - std::acos(std::clamp(cos_elbow, -1.0, 1.0)));
  const double cos_shoulder = (l_upper * l_upper + reach * reach - l_fore * l_fore) /
                              (2.0 * l_upper * reach);
  const double q2 = std::atan2(rho, h) - std::acos(std::clamp(cos_shoulder, -1.0, 1.0));
  Vector7d q;
  q << az, q2, 0.0, q4, 0.0, q4 - q2, -az;
  for (int i = 0; i < kArmDof; ++i) {
    if (q(i) < model.q_min_rad(i) || q(i) > model.q_max_rad(i)) return std::nullopt;
  }
  return q;
}

JointState DiscreteModel::step(const JointState& z, const Vector7d& u) const {
  Eigen::Matrix<double, 14, 1> zv;
  zv << z.q, z.q_dot;
  const Eigen::Matrix<double, 14, 1> next = a * zv + b * u;
  JointState out;
  out.q = next.head<7>();
  out.q_dot = next.tail<7>();
  out.stamp_s = z.stamp_s + dt_s;
  return out;
}

DiscreteModel build_discrete_model(double dt_s) {
  if (!(dt_s > 0.0)) throw ConfigError("build_discrete_model: dt must be > 0");
  DiscreteModel m;
  m.dt_s = dt_s;
  m.dt_outside_nominal = dt_s < 0.025 || dt_s > 0.05;
  m.a.setIdentity();
  m.a.topRightCorner<7, 7>() = dt_s * Matrix7d::Identity();
  m.b.setZero();
  m.b.topRows<7>() = 0.5 * dt_s * dt_s * Matrix7d::Identity();
  m.b.bottomRows<7>() = dt_s * Matrix7d::Identity();
  return m;
}

namespace {

Eigen::Matrix4d dh_transform(const DhRow& row, double q) {
  const double ca = std::cos(row.alpha_rad), sa = std::sin(row.alpha_rad);
  const double theta = q + row.theta_offset_rad;
  const double ct = std::cos(theta), st = std::sin(theta);
  // RotX(alpha) TransX(a) RotZ(theta) TransZ(d), multiplied out.
  Eigen::Matrix4d t;
  t << ct, -st, 0.0, row.a_m,
      st * ca, ct * ca, -sa, -sa * row.d_m,
      st * sa, ct * sa, ca, ca * row.d_m,
      0.0, 0.0, 0.0, 1.0;
  return t;
}

}  // namespace

Pose6 forward_kinematics(const ArmModel& model, const Vector7d& q, const Pose6& base) {
  if (!q.allFinite()) throw NumericError("forward_kinematics: non-finite joint vector");
  Eigen::Matrix4d t = base.matrix();
  for (int i = 0; i < kArmDof; ++i) {
    t = t * dh_transform(model.dh[i], q(i));
  }
  Pose6 out;
  out.position = t.topRightCorner<3, 1>();
  out.orientation = UnitQuaternion::from_rotation_matrix(t.topLeftCorner<3, 3>());
  return out;
}

Eigen::Matrix<double, 6, 7> geometric_jacobian(const ArmModel& model, const Vector7d& q,
                                               const Pose6& base) {
  if (!q.allFinite()) throw NumericError("geometric_jacobian: non-finite joint vector");
  // Joint i rotates about the z axis of frame i; accumulate frames and
  // read axes/origins in the inertial frame.
  std::array<Eigen::Vector3d, kArmDof> axes;
  std::array<Eigen::Vector3d, kArmDof> origins;
  Eigen::Matrix4d t = base.matrix();
  for (int i = 0; i < kArmDof; ++i) {
    t = t * dh_transform(model.dh[i], q(i));
    axes[i] = t.block<3, 1>(0, 2);
    origins[i] = t.topRightCorner<3, 1>();
  }
  const Eigen::Vector3d ee = origins[kArmDof - 1];
  Eigen::Matrix<double, 6, 7> jac;
  for (int i = 0; i < kArmDof; ++i) {
    jac.block<3, 1>(0, i) = axes[i].cross(ee - origins[i]);
    jac.block<3, 1>(3, i) = axes[i];
  }
  return jac;
}

std::string LimitViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case LimitKind::Position:
      os << "joint " << index << " position";
      break;
    case LimitKind::Velocity:
      os << "joint " << index << " velocity";
      break;
    case LimitKind::AccelerationNorm:
      os << "acceleration norm";
      break;
    case LimitKind::Workspace:
      os << "workspace axis " << index;
      break;
  }
  os << " value " << value << " bound " << bound << " margin " << margin;
  return os.str();
}

LimitReport check_limits(const ArmModel& model, const Vector7d& q, const Vector7d& q_dot,
                         const Vector7d& u) {
  LimitReport report;
  for (int i = 0; i < kArmDof; ++i) {
    if (q(i) > model.q_max_rad(i)) {
      report.violations.push_back(
          {LimitKind::Position, i, q(i), model.q_max_rad(i), q(i) - model.q_max_rad(i)});
    } else if (q(i) < model.q_min_rad(i)) {
      report.violations.push_back(
          {LimitKind::Position, i, q(i), model.q_min_rad(i), model.q_min_rad(i) - q(i)});
    }
    if (std::abs(q_dot(i)) > model.qd_max_rad_s(i)) {
      report.violations.push_back({LimitKind::Velocity, i, q_dot(i), model.qd_max_rad_s(i),
                                   std::abs(q_dot(i)) - model.qd_max_rad_s(i)});
    }
  }
  const double unorm = u.norm();
  if (unorm > model.u_norm_max_rad_s2) {
    report.violations.push_back({LimitKind::AccelerationNorm, -1, unorm, model.u_norm_max_rad_s2,
                                 unorm - model.u_norm_max_rad_s2});
  }
  // Workspace membership is checked on the deck-frame end-effector position.
  const Eigen::Vector3d p = forward_kinematics(model, q, Pose6{}).position;
  for (int axis = 0; axis < 3; ++axis) {
    if (p(axis) > model.workspace_max_m(axis)) {
      report.violations.push_back({LimitKind::Workspace, axis, p(axis),
                                   model.workspace_max_m(axis),
                                   p(axis) - model.workspace_max_m(axis)});
    } else if (p(axis) < model.workspace_min_m(axis)) {
      report.violations.push_back({LimitKind::Workspace, axis, p(axis),
                                   model.workspace_min_m(axis),
                                   model.workspace_min_m(axis) - p(axis)});
    }
  }
  return report;
}

}  // namespace wavecatch
