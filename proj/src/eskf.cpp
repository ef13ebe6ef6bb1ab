#include "wavecatch/eskf.hpp"

#include <cmath>

#include "wavecatch/errors.hpp"

namespace wavecatch {

void TargetMotionModel::validate() const {
  if (accel_noise_density < 0.0 || attitude_rw_density < 0.0) {
    throw ConfigError("TargetMotionModel: noise densities must be >= 0");
  }
}

ErrorFilterState ErrorFilterState::create(const TargetMotionModel& model,
                                          const Eigen::Vector3d& position,
                                          const Eigen::Vector3d& velocity, double sigma_pos,
                                          double sigma_vel, double sigma_att) {
  model.validate();
  ErrorFilterState s;
  s.model = model;
  s.position = position;
  s.velocity = velocity;
  const int n = model.error_dim();
  s.covariance = Eigen::MatrixXd::Zero(n, n);
  s.covariance.block<3, 3>(0, 0) = sigma_pos * sigma_pos * Eigen::Matrix3d::Identity();
  s.covariance.block<3, 3>(3, 3) = sigma_vel * sigma_vel * Eigen::Matrix3d::Identity();
  if (model.kind == MotionModelKind::ConstantAcceleration) {
    s.covariance.block<3, 3>(6, 6) = Eigen::Matrix3d::Identity();  // 1 (m/s^2)^2
  }
  const int att = n - 3;
  s.covariance.block<3, 3>(att, att) = sigma_att * sigma_att * Eigen::Matrix3d::Identity();
  return s;
}

Eigen::MatrixXd transition_matrix(const TargetMotionModel& model, double dt) {
  const int n = model.error_dim();
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(n, n);
  f.block<3, 3>(0, 3) = dt * Eigen::Matrix3d::Identity();
  if (model.kind == MotionModelKind::ConstantAcceleration) {
    f.block<3, 3>(0, 6) = 0.5 * dt * dt * Eigen::Matrix3d::Identity();
    f.block<3, 3>(3, 6) = dt * Eigen::Matrix3d::Identity();
  }
  return f;
}

Eigen::MatrixXd process_noise(const TargetMotionModel& model, double dt) {
  const int n = model.error_dim();
  const double s = model.accel_noise_density;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  const Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();
  if (model.kind == MotionModelKind::ConstantVelocity) {
    // Exact discretization of white-noise acceleration.
    q.block<3, 3>(0, 0) = s * dt * dt * dt / 3.0 * eye;
    q.block<3, 3>(0, 3) = s * dt * dt / 2.0 * eye;
    q.block<3, 3>(3, 0) = s * dt * dt / 2.0 * eye;
    q.block<3, 3>(3, 3) = s * dt * eye;
  } else {
    // Exact discretization of white-noise jerk.
    const double d2 = dt * dt, d3 = d2 * dt, d4 = d3 * dt, d5 = d4 * dt;
    q.block<3, 3>(0, 0) = s * d5 / 20.0 * eye;
    q.block<3, 3>(0, 3) = s * d4 / 8.0 * eye;
    q.block<3, 3>(0, 6) = s * d3 / 6.0 * eye;
    q.block<3, 3>(3, 0) = s * d4 / 8.0 * eye;
    q.block<3, 3>(3, 3) = s * d3 / 3.0 * eye;
    q.block<3, 3>(3, 6) = s * d2 / 2.0 * eye;
    q.block<3, 3>(6, 0) = s * d3 / 6.0 * eye;
    q.block<3, 3>(6, 3) = s * d2 / 2.0 * eye;
    q.block<3, 3>(6, 6) = s * dt * eye;
  }
  const int att = n - 3;
  q.block<3, 3>(att, att) = model.attitude_rw_density * dt * eye;
  return q;
}

namespace {

void check_finite(const ErrorFilterState& s, const char* who) {
  if (!s.position.allFinite() || !s.velocity.allFinite() || !s.acceleration.allFinite() ||
      !s.covariance.allFinite()) {
    throw NumericError(std::string(who) + ": non-finite filter state");
  }
}

void symmetrize(Eigen::MatrixXd& p) { p = 0.5 * (p + p.transpose()).eval(); }

}  // namespace

ErrorFilterState predict(const ErrorFilterState& state, double dt) {
  if (!(dt > 0.0)) throw ConfigError("eskf predict: dt must be > 0");
  check_finite(state, "eskf predict");

  ErrorFilterState out = state;
  out.position += state.velocity * dt;
  if (state.model.kind == MotionModelKind::ConstantAcceleration) {
    out.position += 0.5 * dt * dt * state.acceleration;
    out.velocity += dt * state.acceleration;
  }
  // Orientation held: the attitude model is a pure random walk.
  out.stamp_s = state.stamp_s + dt;

  const Eigen::MatrixXd f = transition_matrix(state.model, dt);
  out.covariance = f * state.covariance * f.transpose() + process_noise(state.model, dt);
  symmetrize(out.covariance);
  return out;
}

UpdateResult update(const ErrorFilterState& state, const Measurement& z) {
  check_finite(state, "eskf update");
  if (z.stamp_s < state.stamp_s - 1e-12) {
    throw TimestampError("eskf update: measurement stamp precedes filter stamp");
  }

  const int n = state.model.error_dim();
  const int att = n - 3;
  const bool with_att = z.orientation.has_value();
  const int m = with_att ? 6 : 3;

  // delta z = z ⊖ h(x̂): position difference, then axis-angle residual.
  Eigen::VectorXd innovation(m);
  innovation.head<3>() = z.position - state.position;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, n);
  h.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m, m);
  r.topLeftCorner<3, 3>() = state.r_position;
  if (with_att) {
    innovation.tail<3>() =
        (state.orientation.inverse() * (*z.orientation)).to_rotation_vector();
    h.block<3, 3>(3, att) = Eigen::Matrix3d::Identity();
    r.bottomRightCorner<3, 3>() = state.r_attitude;
  }
  if (z.r_override) {
    if (z.r_override->rows() != m || z.r_override->cols() != m) {
      throw ShapeError("eskf update: R override dimension mismatch");
    }
    r = *z.r_override;
  }

  const Eigen::MatrixXd s_mat = h * state.covariance * h.transpose() + r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s_mat);
  const double eig_min = eig.eigenvalues().minCoeff();
  const double eig_max = eig.eigenvalues().maxCoeff();
  UpdateResult result;
  result.innovation = innovation;
  result.innovation_covariance = s_mat;
  if (!(eig_min > 0.0) || eig_max / eig_min > 1e12) {
    result.state = state;
    result.singular = true;
    return result;
  }

  const Eigen::MatrixXd s_inv = eig.eigenvectors() *
                                eig.eigenvalues().cwiseInverse().asDiagonal() *
                                eig.eigenvectors().transpose();
  const Eigen::MatrixXd k = state.covariance * h.transpose() * s_inv;
  const Eigen::VectorXd dx = k * innovation;
  result.nis = innovation.dot(s_inv * innovation);

  ErrorFilterState out = state;
  out.position += dx.segment<3>(0);
  out.velocity += dx.segment<3>(3);
  if (state.model.kind == MotionModelKind::ConstantAcceleration) {
    out.acceleration += dx.segment<3>(6);
  }
  // ⊕: quaternion right-multiplication by exp of the attitude correction.
  out.orientation =
      state.orientation * UnitQuaternion::from_rotation_vector(dx.segment<3>(att));
  out.stamp_s = z.stamp_s;

  // Joseph-stabilized covariance update.
  const Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(n, n) - k * h;
  out.covariance = ikh * state.covariance * ikh.transpose() + k * r * k.transpose();
  symmetrize(out.covariance);

  result.state = out;
  return result;
}

Extrapolation extrapolate(const ErrorFilterState& state, double alpha_s, int steps) {
  if (!(alpha_s > 0.0) || alpha_s > 2.0) {
    throw ConfigError("eskf extrapolate: alpha must satisfy 0 < alpha <= 2 s");
  }
  if (steps < 1) throw ConfigError("eskf extrapolate: steps must be >= 1");
  check_finite(state, "eskf extrapolate");

  Extrapolation out;
  out.samples.reserve(static_cast<std::size_t>(steps) + 1);
  const double tick = alpha_s / steps;
  for (int i = 0; i <= steps; ++i) {
    const double tau = tick * i;
    PredictedSample sample;
    sample.offset_s = tau;
    sample.pose.position = state.position + state.velocity * tau;
    sample.velocity = state.velocity;
    if (state.model.kind == MotionModelKind::ConstantAcceleration) {
      sample.pose.position += 0.5 * tau * tau * state.acceleration;
      sample.velocity += tau * state.acceleration;
    }
    sample.pose.orientation = state.orientation;
    out.samples.push_back(sample);
  }
  const Eigen::MatrixXd f = transition_matrix(state.model, alpha_s);
  out.final_covariance =
      f * state.covariance * f.transpose() + process_noise(state.model, alpha_s);
  return out;
}

}  // namespace wavecatch
