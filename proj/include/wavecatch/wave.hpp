#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wavecatch/frames.hpp"

namespace wavecatch {

/// Wave-induced deck motion parameters. Each axis (roll, pitch, heave) is a
/// sum of 1-3 sinusoids whose per-component amplitudes split the configured
/// total equally, so the peak never exceeds the configured amplitude.
struct SeaStateConfig {
  double roll_amplitude_rad = 0.0;   // <= 0.35 rad (~20 deg)
  double pitch_amplitude_rad = 0.0;
  double heave_amplitude_m = 0.0;
  /// 1-3 shared component frequencies; empty -> two drawn from seed in
  /// [0.5, 1.5] rad/s.
  std::vector<double> component_frequencies_rad_s;
  /// Per-component phases applied to every axis; empty -> drawn per axis
  /// and per component from seed.
  std::vector<double> phases_rad;
  std::uint64_t seed = 0;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Deck pose sample. Rates are the exact analytic derivatives of the
/// angle/heave signals at the same instant.
struct BasePose {
  double time_s = 0.0;
  double roll_rad = 0.0;
  double pitch_rad = 0.0;
  double heave_m = 0.0;
  double roll_rate_rad_s = 0.0;
  double pitch_rate_rad_s = 0.0;
  double heave_rate_m_s = 0.0;
};

/// Seed-resolved sum-of-sines coefficients, fixed for a whole trial.
class SeaState {
 public:
  explicit SeaState(const SeaStateConfig& config);

  BasePose base_pose_at(double t) const;

  const std::vector<double>& frequencies() const { return frequencies_; }

 private:
  struct AxisSignal {
    std::vector<double> amplitudes;
    std::vector<double> phases;
  };

  double eval(const AxisSignal& axis, double t, double* rate) const;

  std::vector<double> frequencies_;
  AxisSignal roll_, pitch_, heave_;
};

/// Convenience one-shot evaluation; deterministic for a fixed config.
BasePose base_pose_at(const SeaStateConfig& config, double t);

/// Rigid transform of the deck frame relative to the inertial frame:
/// rotation = euler(roll, pitch, 0), translation = (0, 0, heave).
Pose6 base_transform(const BasePose& pose);

}  // namespace wavecatch
