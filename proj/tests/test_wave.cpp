#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wavecatch/errors.hpp"
#include "wavecatch/wave.hpp"

using namespace wavecatch;

namespace {

SeaStateConfig single_component(double amp_rad, double omega, double phase) {
  SeaStateConfig cfg;
  cfg.roll_amplitude_rad = amp_rad;
  cfg.component_frequencies_rad_s = {omega};
  cfg.phases_rad = {phase};
  return cfg;
}

}  // namespace

TEST_CASE("single sinusoid peaks at the configured amplitude") {
  const double amp = 5.0 * M_PI / 180.0;
  const SeaStateConfig cfg = single_component(amp, 1.0, 0.0);
  const BasePose pose = base_pose_at(cfg, M_PI / 2.0);
  CHECK(pose.roll_rad == doctest::Approx(amp).epsilon(1e-12));
  CHECK(pose.roll_rate_rad_s == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("calm water is identically zero") {
  SeaStateConfig cfg;
  cfg.component_frequencies_rad_s = {0.8};
  cfg.phases_rad = {0.3};
  for (double t : {0.0, 0.7, 13.9, 80.0}) {
    const BasePose pose = base_pose_at(cfg, t);
    CHECK(pose.roll_rad == 0.0);
    CHECK(pose.pitch_rad == 0.0);
    CHECK(pose.heave_m == 0.0);
    CHECK(pose.roll_rate_rad_s == 0.0);
    CHECK(pose.heave_rate_m_s == 0.0);
  }
}

TEST_CASE("two-component value matches sum-of-sines formula") {
  SeaStateConfig cfg;
  cfg.roll_amplitude_rad = 5.0 * M_PI / 180.0;
  cfg.component_frequencies_rad_s = {0.9, 1.7};
  cfg.phases_rad = {0.4, 2.1};
  const BasePose pose = base_pose_at(cfg, 1.7);
  // Frozen from the independent sum-of-sines oracle (equal amplitude split).
  CHECK(pose.roll_rad == doctest::Approx(-0.001114211697942638).epsilon(1e-10));
  CHECK(pose.roll_rate_rad_s == doctest::Approx(0.006524224242652189).epsilon(1e-10));
}

TEST_CASE("amplitude bound holds over 100 s") {
  SeaStateConfig cfg;
  cfg.roll_amplitude_rad = 0.12;
  cfg.pitch_amplitude_rad = 0.06;
  cfg.heave_amplitude_m = 0.2;
  cfg.seed = 99;
  const SeaState sea(cfg);
  for (double t = 0.0; t <= 100.0; t += 0.01) {
    const BasePose pose = sea.base_pose_at(t);
    CHECK(std::abs(pose.roll_rad) <= cfg.roll_amplitude_rad + 1e-12);
    CHECK(std::abs(pose.pitch_rad) <= cfg.pitch_amplitude_rad + 1e-12);
    CHECK(std::abs(pose.heave_m) <= cfg.heave_amplitude_m + 1e-12);
  }
}

TEST_CASE("rates are analytic derivatives (finite differences)") {
  SeaStateConfig cfg;
  cfg.roll_amplitude_rad = 0.08;
  cfg.pitch_amplitude_rad = 0.05;
  cfg.heave_amplitude_m = 0.1;
  cfg.seed = 3;
  const SeaState sea(cfg);
  const double h = 1e-5;
  for (double t : {0.5, 2.0, 7.3, 31.0}) {
    const BasePose mid = sea.base_pose_at(t);
    const BasePose plus = sea.base_pose_at(t + h);
    const BasePose minus = sea.base_pose_at(t - h);
    CHECK((plus.roll_rad - minus.roll_rad) / (2 * h) ==
          doctest::Approx(mid.roll_rate_rad_s).epsilon(1e-7));
    CHECK((plus.pitch_rad - minus.pitch_rad) / (2 * h) ==
          doctest::Approx(mid.pitch_rate_rad_s).epsilon(1e-7));
    CHECK((plus.heave_m - minus.heave_m) / (2 * h) ==
          doctest::Approx(mid.heave_rate_m_s).epsilon(1e-7));
  }
}

TEST_CASE("deterministic for fixed config") {
  SeaStateConfig cfg;
  cfg.roll_amplitude_rad = 0.1;
  cfg.heave_amplitude_m = 0.05;
  cfg.seed = 42;
  const SeaState a(cfg);
  const SeaState b(cfg);
  for (double t : {0.0, 1.1, 5.7, 64.2}) {
    CHECK(a.base_pose_at(t).roll_rad == b.base_pose_at(t).roll_rad);
    CHECK(a.base_pose_at(t).heave_m == b.base_pose_at(t).heave_m);
  }
}

TEST_CASE("config invariants are enforced") {
  SeaStateConfig cfg;
  cfg.roll_amplitude_rad = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.roll_amplitude_rad = 0.5;  // above the 0.35 rad sanity bound
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.roll_amplitude_rad = 0.1;
  cfg.component_frequencies_rad_s = {0.5, -1.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.component_frequencies_rad_s = {0.5, 0.8, 1.0, 1.4};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.component_frequencies_rad_s = {0.5, 0.8};
  cfg.phases_rad = {0.1};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.phases_rad = {0.1, 0.2};
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("base_transform basics") {
  // zero pose -> identity transform
  const Pose6 ident = base_transform(BasePose{});
  CHECK(ident.position.norm() == 0.0);
  CHECK(pose_error(ident, Pose6{}).norm() < 1e-12);

  // pure roll
  BasePose roll;
  roll.roll_rad = 0.1;
  const Pose6 tf = base_transform(roll);
  CHECK(tf.orientation.to_rotation_matrix().isApprox(euler_to_rotation({0.1, 0.0, 0.0}), 1e-12));
  CHECK(tf.position.norm() == 0.0);

  // generic pose composes rotation and heave
  BasePose generic;
  generic.roll_rad = 0.07;
  generic.pitch_rad = -0.04;
  generic.heave_m = 0.12;
  const Pose6 tfg = base_transform(generic);
  CHECK(tfg.orientation.to_rotation_matrix().isApprox(
      euler_to_rotation({0.07, -0.04, 0.0}), 1e-12));
  CHECK(tfg.position == Eigen::Vector3d(0.0, 0.0, 0.12));
}
