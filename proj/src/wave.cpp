#include "wavecatch/wave.hpp"

#include <cmath>

#include "wavecatch/errors.hpp"
#include "wavecatch/rng.hpp"

namespace wavecatch {

void SeaStateConfig::validate() const {
  if (roll_amplitude_rad < 0.0 || pitch_amplitude_rad < 0.0 || heave_amplitude_m < 0.0) {
    throw ConfigError("SeaStateConfig: amplitudes must be >= 0");
  }
  if (roll_amplitude_rad > 0.35) {
    throw ConfigError("SeaStateConfig: roll_amplitude_rad exceeds 0.35 rad sanity bound");
  }
  if (component_frequencies_rad_s.size() > 3) {
    throw ConfigError("SeaStateConfig: at most 3 component frequencies");
  }
  for (double f : component_frequencies_rad_s) {
    if (!(f > 0.0)) throw ConfigError("SeaStateConfig: frequencies must be strictly positive");
  }
  if (!phases_rad.empty() && !component_frequencies_rad_s.empty() &&
      phases_rad.size() != component_frequencies_rad_s.size()) {
    throw ConfigError("SeaStateConfig: phases list length must match frequencies");
  }
}

SeaState::SeaState(const SeaStateConfig& config) {
  config.validate();
  Rng rng(config.seed);

  frequencies_ = config.component_frequencies_rad_s;
  if (frequencies_.empty()) {
    // Sea-state-3-ish slow component plus a faster one for stress.
    frequencies_.push_back(rng.uniform(0.5, 1.0));
    frequencies_.push_back(rng.uniform(1.0, 1.5));
  }
  const std::size_t n = frequencies_.size();

  auto make_axis = [&](double total_amplitude) {
    AxisSignal axis;
    axis.amplitudes.assign(n, total_amplitude / static_cast<double>(n));
    if (!config.phases_rad.empty()) {
      axis.phases = config.phases_rad;
    } else {
      axis.phases.resize(n);
      for (auto& p : axis.phases) p = rng.uniform(0.0, 2.0 * M_PI);
    }
    return axis;
  };

  roll_ = make_axis(config.roll_amplitude_rad);
  pitch_ = make_axis(config.pitch_amplitude_rad);
  heave_ = make_axis(config.heave_amplitude_m);
}

double SeaState::eval(const AxisSignal& axis, double t, double* rate) const {
  double value = 0.0;
  double deriv = 0.0;
  for (std::size_t i = 0; i < axis.amplitudes.size(); ++i) {
    const double w = frequencies_[i];
    const double arg = w * t + axis.phases[i];
    value += axis.amplitudes[i] * std::sin(arg);
    deriv += axis.amplitudes[i] * w * std::cos(arg);
  }
  *rate = deriv;
  return value;
}

BasePose SeaState::base_pose_at(double t) const {
  if (t < 0.0) throw ConfigError("SeaState: time must be >= 0");
  BasePose pose;
  pose.time_s = t;
  pose.roll_rad = eval(roll_, t, &pose.roll_rate_rad_s);
  pose.pitch_rad = eval(pitch_, t, &pose.pitch_rate_rad_s);
  pose.heave_m = eval(heave_, t, &pose.heave_rate_m_s);
  return pose;
}

BasePose base_pose_at(const SeaStateConfig& config, double t) {
  return SeaState(config).base_pose_at(t);
}

Pose6 base_transform(const BasePose& pose) {
  Pose6 out;
  out.position = Eigen::Vector3d(0.0, 0.0, pose.heave_m);
  out.orientation = quaternion_from_euler({pose.roll_rad, pose.pitch_rad, 0.0});
  return out;
}

}  // namespace wavecatch
