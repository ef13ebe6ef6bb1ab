#include "wavecatch/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "wavecatch/errors.hpp"

namespace wavecatch {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ConfigError(path + "." + item.key() + ": unknown key");
    }
  }
}

double num(const json& j, const std::string& path, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(path + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

int integer(const json& j, const std::string& path, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
  return j.at(key).get<int>();
}

std::uint64_t u64(const json& j, const std::string& path, const std::string& key,
                  std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer()) {
    throw ConfigError(path + "." + key + ": expected an integer seed");
  }
  return j.at(key).get<std::uint64_t>();
}

bool boolean(const json& j, const std::string& path, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(path + "." + key + ": expected a boolean");
  return j.at(key).get<bool>();
}

std::string str(const json& j, const std::string& path, const std::string& key,
                const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(path + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

Eigen::Vector3d vec3(const json& j, const std::string& path, const std::string& key,
                     const Eigen::Vector3d& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw ConfigError(path + "." + key + ": expected [x, y, z]");
  return Eigen::Vector3d(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

Vector7d vec7(const json& j, const std::string& path, const std::string& key,
              const Vector7d& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 7) {
    throw ConfigError(path + "." + key + ": expected 7 numbers");
  }
  Vector7d v;
  for (int i = 0; i < 7; ++i) v(i) = a[static_cast<std::size_t>(i)].get<double>();
  return v;
}

std::vector<double> num_list(const json& j, const std::string& path, const std::string& key,
                             const std::vector<double>& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& a = j.at(key);
  if (!a.is_array()) throw ConfigError(path + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : a) out.push_back(x.get<double>());
  return out;
}

constexpr double kDeg = M_PI / 180.0;

void parse_sea(const json& j, SeaStateConfig& sea) {
  const std::string path = "sea_state";
  check_keys(j, path,
             {"roll_amplitude_deg", "pitch_amplitude_deg", "heave_amplitude_m",
              "component_frequencies_rad_s", "phases_rad", "seed"});
  sea.roll_amplitude_rad = num(j, path, "roll_amplitude_deg", sea.roll_amplitude_rad / kDeg) * kDeg;
  sea.pitch_amplitude_rad =
      num(j, path, "pitch_amplitude_deg", sea.pitch_amplitude_rad / kDeg) * kDeg;
  sea.heave_amplitude_m = num(j, path, "heave_amplitude_m", sea.heave_amplitude_m);
  sea.component_frequencies_rad_s =
      num_list(j, path, "component_frequencies_rad_s", sea.component_frequencies_rad_s);
  sea.phases_rad = num_list(j, path, "phases_rad", sea.phases_rad);
  sea.seed = u64(j, path, "seed", sea.seed);
}

void parse_uav(const json& j, UavParams& uav, PdGains& gains) {
  const std::string path = "uav";
  check_keys(j, path,
             {"mass_kg", "arm_length_m", "inertia_xx_kgm2", "inertia_yy_kgm2", "inertia_zz_kgm2",
              "gravity_mps2", "rotor_drag_coeff_nm_per_n", "rotor_thrust_max_n", "payload_mass_kg",
              "envelope_radius_m", "kp_pos", "kd_pos", "kp_att", "kd_att", "max_tilt_rad"});
  uav.mass_kg = num(j, path, "mass_kg", uav.mass_kg);
  uav.arm_length_m = num(j, path, "arm_length_m", uav.arm_length_m);
  uav.inertia_xx_kgm2 = num(j, path, "inertia_xx_kgm2", uav.inertia_xx_kgm2);
  uav.inertia_yy_kgm2 = num(j, path, "inertia_yy_kgm2", uav.inertia_yy_kgm2);
  uav.inertia_zz_kgm2 = num(j, path, "inertia_zz_kgm2", uav.inertia_zz_kgm2);
  uav.gravity_mps2 = num(j, path, "gravity_mps2", uav.gravity_mps2);
  uav.rotor_drag_coeff_nm_per_n =
      num(j, path, "rotor_drag_coeff_nm_per_n", uav.rotor_drag_coeff_nm_per_n);
  uav.rotor_thrust_max_n = num(j, path, "rotor_thrust_max_n", uav.rotor_thrust_max_n);
  uav.payload_mass_kg = num(j, path, "payload_mass_kg", uav.payload_mass_kg);
  uav.envelope_radius_m = num(j, path, "envelope_radius_m", uav.envelope_radius_m);
  gains.kp_pos = vec3(j, path, "kp_pos", gains.kp_pos);
  gains.kd_pos = vec3(j, path, "kd_pos", gains.kd_pos);
  gains.kp_att = vec3(j, path, "kp_att", gains.kp_att);
  gains.kd_att = vec3(j, path, "kd_att", gains.kd_att);
  gains.max_tilt_rad = num(j, path, "max_tilt_rad", gains.max_tilt_rad);
}

void parse_arm(const json& j, ArmModel& arm, Vector7d& q_home) {
  const std::string path = "arm";
  check_keys(j, path,
             {"dh_table", "q_min_rad", "q_max_rad", "qd_max_rad_s", "u_norm_max_rad_s2",
              "workspace_min_m", "workspace_max_m", "q_home_rad"});
  if (j.contains("dh_table")) {
    const auto& table = j.at("dh_table");
    if (!table.is_array() || table.size() != 7) {
      throw ConfigError("arm.dh_table: expected 7 rows");
    }
    for (int i = 0; i < 7; ++i) {
      const auto& row = table[static_cast<std::size_t>(i)];
      const std::string row_path = "arm.dh_table[" + std::to_string(i) + "]";
      check_keys(row, row_path, {"a_m", "alpha_rad", "d_m", "theta_offset_rad"});
      arm.dh[static_cast<std::size_t>(i)].a_m = num(row, row_path, "a_m", 0.0);
      arm.dh[static_cast<std::size_t>(i)].alpha_rad = num(row, row_path, "alpha_rad", 0.0);
      arm.dh[static_cast<std::size_t>(i)].d_m = num(row, row_path, "d_m", 0.0);
      arm.dh[static_cast<std::size_t>(i)].theta_offset_rad =
          num(row, row_path, "theta_offset_rad", 0.0);
    }
  }
  arm.q_min_rad = vec7(j, path, "q_min_rad", arm.q_min_rad);
  arm.q_max_rad = vec7(j, path, "q_max_rad", arm.q_max_rad);
  arm.qd_max_rad_s = vec7(j, path, "qd_max_rad_s", arm.qd_max_rad_s);
  arm.u_norm_max_rad_s2 = num(j, path, "u_norm_max_rad_s2", arm.u_norm_max_rad_s2);
  arm.workspace_min_m = vec3(j, path, "workspace_min_m", arm.workspace_min_m);
  arm.workspace_max_m = vec3(j, path, "workspace_max_m", arm.workspace_max_m);
  q_home = vec7(j, path, "q_home_rad", q_home);
}

void parse_eskf(const json& j, TargetMotionModel& model, MeasurementModel& meas) {
  const std::string path = "eskf";
  check_keys(j, path,
             {"model", "accel_noise_density", "attitude_rw_density", "meas_pos_sigma_m",
              "meas_att_sigma_deg", "meas_rate_hz", "use_orientation"});
  const std::string kind = str(j, path, "model",
                               model.kind == MotionModelKind::ConstantVelocity ? "cv" : "ca");
  if (kind == "cv") {
    model.kind = MotionModelKind::ConstantVelocity;
  } else if (kind == "ca") {
    model.kind = MotionModelKind::ConstantAcceleration;
  } else {
    throw ConfigError("eskf.model: expected \"cv\" or \"ca\"");
  }
  model.accel_noise_density = num(j, path, "accel_noise_density", model.accel_noise_density);
  model.attitude_rw_density = num(j, path, "attitude_rw_density", model.attitude_rw_density);
  meas.pos_sigma_m = num(j, path, "meas_pos_sigma_m", meas.pos_sigma_m);
  meas.att_sigma_rad = num(j, path, "meas_att_sigma_deg", meas.att_sigma_rad / kDeg) * kDeg;
  meas.rate_hz = num(j, path, "meas_rate_hz", meas.rate_hz);
  meas.use_orientation = boolean(j, path, "use_orientation", meas.use_orientation);
}

void parse_controller(const json& j, Scenario& sc) {
  const std::string path = "controller";
  check_keys(j, path,
             {"kind", "horizon_steps", "q_pos", "q_ori", "r_u", "qn_pos", "qn_ori",
              "accel_constraint", "workspace_margin_m", "max_passes", "wave_gain_kappa",
              "follow_kp_pos", "follow_kd_pos", "follow_kp_ori", "follow_kd_ori", "dls_lambda"});
  sc.controller = controller_from_string(str(j, path, "kind", to_string(sc.controller)));
  sc.horizon_steps = integer(j, path, "horizon_steps", sc.horizon_steps);
  const double q_pos = num(j, path, "q_pos", sc.weights.q_stage(0, 0));
  const double q_ori = num(j, path, "q_ori", sc.weights.q_stage(3, 3));
  const double r_u = num(j, path, "r_u", sc.weights.r_control(0, 0));
  const double qn_pos = num(j, path, "qn_pos", sc.weights.q_terminal(0, 0));
  const double qn_ori = num(j, path, "qn_ori", sc.weights.q_terminal(3, 3));
  sc.weights = CostWeights::diagonal(q_pos, q_ori, r_u, qn_pos, qn_ori);
  const std::string accel = str(
      j, path, "accel_constraint",
      sc.solver.accel_mode == AccelConstraintMode::ConservativeBox ? "box" : "ball");
  if (accel == "box") {
    sc.solver.accel_mode = AccelConstraintMode::ConservativeBox;
  } else if (accel == "ball") {
    sc.solver.accel_mode = AccelConstraintMode::ExactBall;
  } else {
    throw ConfigError("controller.accel_constraint: expected \"box\" or \"ball\"");
  }
  sc.solver.workspace_margin_m = num(j, path, "workspace_margin_m", sc.solver.workspace_margin_m);
  sc.solver.max_passes = integer(j, path, "max_passes", sc.solver.max_passes);
  sc.wave_gain_kappa = num(j, path, "wave_gain_kappa", sc.wave_gain_kappa);
  sc.follow.kp_pos = num(j, path, "follow_kp_pos", sc.follow.kp_pos);
  sc.follow.kd_pos = num(j, path, "follow_kd_pos", sc.follow.kd_pos);
  sc.follow.kp_ori = num(j, path, "follow_kp_ori", sc.follow.kp_ori);
  sc.follow.kd_ori = num(j, path, "follow_kd_ori", sc.follow.kd_ori);
  sc.follow.dls_lambda = num(j, path, "dls_lambda", sc.follow.dls_lambda);
}

void parse_mission(const json& j, Scenario& sc) {
  const std::string path = "mission";
  check_keys(j, path,
             {"r_capture_m", "v_capture_mps", "grasp_dwell_s", "pose_fresh_s", "holding_min_m",
              "holding_max_m", "retrieve_position_deck_m"});
  sc.capture.r_capture_m = num(j, path, "r_capture_m", sc.capture.r_capture_m);
  sc.capture.v_capture_mps = num(j, path, "v_capture_mps", sc.capture.v_capture_mps);
  sc.capture.grasp_dwell_s = num(j, path, "grasp_dwell_s", sc.capture.grasp_dwell_s);
  sc.capture.pose_fresh_s = num(j, path, "pose_fresh_s", sc.capture.pose_fresh_s);
  sc.capture.holding_min_m = vec3(j, path, "holding_min_m", sc.capture.holding_min_m);
  sc.capture.holding_max_m = vec3(j, path, "holding_max_m", sc.capture.holding_max_m);
  sc.retrieve_position_deck_m =
      vec3(j, path, "retrieve_position_deck_m", sc.retrieve_position_deck_m);
}

void parse_target(const json& j, Scenario& sc) {
  const std::string path = "scenario.target";
  const std::string kind = str(j, path, "kind", "circular");
  if (kind == "circular") {
    check_keys(j, path, {"kind", "center_m", "radius_m", "speed_mps", "phase0_rad"});
    TargetCircular t;
    if (const auto* cur = std::get_if<TargetCircular>(&sc.target)) t = *cur;
    t.center_m = vec3(j, path, "center_m", t.center_m);
    t.radius_m = num(j, path, "radius_m", t.radius_m);
    t.speed_mps = num(j, path, "speed_mps", t.speed_mps);
    t.phase0_rad = num(j, path, "phase0_rad", t.phase0_rad);
    sc.target = t;
  } else if (kind == "random") {
    check_keys(j, path,
               {"kind", "mean_reversion_hz", "volatility", "speed_cap_mps", "start_m",
                "bounds_min_m", "bounds_max_m"});
    TargetRandom t;
    if (const auto* cur = std::get_if<TargetRandom>(&sc.target)) t = *cur;
    t.mean_reversion_hz = num(j, path, "mean_reversion_hz", t.mean_reversion_hz);
    t.volatility = num(j, path, "volatility", t.volatility);
    t.speed_cap_mps = num(j, path, "speed_cap_mps", t.speed_cap_mps);
    t.start_m = vec3(j, path, "start_m", t.start_m);
    t.bounds_min_m = vec3(j, path, "bounds_min_m", t.bounds_min_m);
    t.bounds_max_m = vec3(j, path, "bounds_max_m", t.bounds_max_m);
    sc.target = t;
  } else if (kind == "uav_hover") {
    check_keys(j, path, {"kind", "hover_position_m", "position_noise_sigma_m"});
    TargetUavHover t;
    if (const auto* cur = std::get_if<TargetUavHover>(&sc.target)) t = *cur;
    t.hover_position_m = vec3(j, path, "hover_position_m", t.hover_position_m);
    t.position_noise_sigma_m = num(j, path, "position_noise_sigma_m", t.position_noise_sigma_m);
    sc.target = t;
  } else {
    throw ConfigError("scenario.target.kind: expected circular, random or uav_hover");
  }
}

void parse_scenario_block(const json& j, Scenario& sc) {
  const std::string path = "scenario";
  check_keys(j, path, {"target", "duration_s", "dt_s", "seed", "prediction_lead_s"});
  if (j.contains("target")) parse_target(j.at("target"), sc);
  sc.duration_s = num(j, path, "duration_s", sc.duration_s);
  sc.dt_s = num(j, path, "dt_s", sc.dt_s);
  sc.seed = u64(j, path, "seed", sc.seed);
  sc.prediction_lead_s = num(j, path, "prediction_lead_s", sc.prediction_lead_s);
}

void parse_campaign(const json& j, CampaignSpec& spec) {
  const std::string path = "campaign";
  check_keys(j, path, {"n_trials", "controllers", "master_seed", "roll_sweep_deg"});
  spec.n_trials = integer(j, path, "n_trials", spec.n_trials);
  if (j.contains("controllers")) {
    spec.controllers.clear();
    for (const auto& name : j.at("controllers")) {
      spec.controllers.push_back(controller_from_string(name.get<std::string>()));
    }
  }
  spec.master_seed = u64(j, path, "master_seed", spec.master_seed);
  if (j.contains("roll_sweep_deg")) {
    const auto& sweep = j.at("roll_sweep_deg");
    if (sweep.is_null() || (sweep.is_array() && sweep.empty())) {
      spec.roll_range_deg.reset();
    } else if (sweep.is_array() && sweep.size() == 2) {
      spec.roll_range_deg = {sweep[0].get<double>(), sweep[1].get<double>()};
    } else {
      throw ConfigError("campaign.roll_sweep_deg: expected [lo_deg, hi_deg] or []");
    }
  }
}

}  // namespace

Config Config::defaults() { return Config{}; }

Config parse_config(const json& j) {
  check_keys(j, "config",
             {"schema_version", "sea_state", "uav", "arm", "eskf", "controller", "mission",
              "scenario", "campaign"});
  for (const char* block :
       {"sea_state", "uav", "arm", "eskf", "controller", "mission", "scenario", "campaign"}) {
    if (!j.contains(block)) {
      throw ConfigError(std::string("config: missing required block \"") + block + "\"");
    }
  }
  Config cfg;
  parse_sea(j.at("sea_state"), cfg.scenario.sea);
  parse_uav(j.at("uav"), cfg.scenario.uav, cfg.scenario.uav_gains);
  parse_arm(j.at("arm"), cfg.scenario.arm, cfg.scenario.q_home);
  parse_eskf(j.at("eskf"), cfg.scenario.filter_model, cfg.scenario.measurement);
  parse_controller(j.at("controller"), cfg.scenario);
  parse_mission(j.at("mission"), cfg.scenario);
  parse_scenario_block(j.at("scenario"), cfg.scenario);
  parse_campaign(j.at("campaign"), cfg.campaign);
  cfg.scenario.validate();
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

json dump_config(const Config& config) {
  const Scenario& sc = config.scenario;
  json j;
  j["schema_version"] = kTrialSchemaVersion;
  j["sea_state"] = {{"roll_amplitude_deg", sc.sea.roll_amplitude_rad / kDeg},
                    {"pitch_amplitude_deg", sc.sea.pitch_amplitude_rad / kDeg},
                    {"heave_amplitude_m", sc.sea.heave_amplitude_m},
                    {"component_frequencies_rad_s", sc.sea.component_frequencies_rad_s},
                    {"phases_rad", sc.sea.phases_rad},
                    {"seed", sc.sea.seed}};
  j["uav"] = {{"mass_kg", sc.uav.mass_kg},
              {"arm_length_m", sc.uav.arm_length_m},
              {"inertia_xx_kgm2", sc.uav.inertia_xx_kgm2},
              {"inertia_yy_kgm2", sc.uav.inertia_yy_kgm2},
              {"inertia_zz_kgm2", sc.uav.inertia_zz_kgm2},
              {"gravity_mps2", sc.uav.gravity_mps2},
              {"rotor_drag_coeff_nm_per_n", sc.uav.rotor_drag_coeff_nm_per_n},
              {"rotor_thrust_max_n", sc.uav.rotor_thrust_max_n},
              {"payload_mass_kg", sc.uav.payload_mass_kg},
              {"envelope_radius_m", sc.uav.envelope_radius_m},
              {"kp_pos", {sc.uav_gains.kp_pos.x(), sc.uav_gains.kp_pos.y(), sc.uav_gains.kp_pos.z()}},
              {"kd_pos", {sc.uav_gains.kd_pos.x(), sc.uav_gains.kd_pos.y(), sc.uav_gains.kd_pos.z()}},
              {"kp_att", {sc.uav_gains.kp_att.x(), sc.uav_gains.kp_att.y(), sc.uav_gains.kp_att.z()}},
              {"kd_att", {sc.uav_gains.kd_att.x(), sc.uav_gains.kd_att.y(), sc.uav_gains.kd_att.z()}},
              {"max_tilt_rad", sc.uav_gains.max_tilt_rad}};
  json dh = json::array();
  for (const auto& row : sc.arm.dh) {
    dh.push_back({{"a_m", row.a_m},
                  {"alpha_rad", row.alpha_rad},
                  {"d_m", row.d_m},
                  {"theta_offset_rad", row.theta_offset_rad}});
  }
  auto vec7_json = [](const Vector7d& v) {
    return std::vector<double>(v.data(), v.data() + 7);
  };
  j["arm"] = {{"dh_table", dh},
              {"q_min_rad", vec7_json(sc.arm.q_min_rad)},
              {"q_max_rad", vec7_json(sc.arm.q_max_rad)},
              {"qd_max_rad_s", vec7_json(sc.arm.qd_max_rad_s)},
              {"u_norm_max_rad_s2", sc.arm.u_norm_max_rad_s2},
              {"workspace_min_m",
               {sc.arm.workspace_min_m.x(), sc.arm.workspace_min_m.y(), sc.arm.workspace_min_m.z()}},
              {"workspace_max_m",
               {sc.arm.workspace_max_m.x(), sc.arm.workspace_max_m.y(), sc.arm.workspace_max_m.z()}},
              {"q_home_rad", vec7_json(sc.q_home)}};
  j["eskf"] = {{"model", sc.filter_model.kind == MotionModelKind::ConstantVelocity ? "cv" : "ca"},
               {"accel_noise_density", sc.filter_model.accel_noise_density},
               {"attitude_rw_density", sc.filter_model.attitude_rw_density},
               {"meas_pos_sigma_m", sc.measurement.pos_sigma_m},
               {"meas_att_sigma_deg", sc.measurement.att_sigma_rad / kDeg},
               {"meas_rate_hz", sc.measurement.rate_hz},
               {"use_orientation", sc.measurement.use_orientation}};
  j["controller"] = {{"kind", to_string(sc.controller)},
                     {"horizon_steps", sc.horizon_steps},
                     {"q_pos", sc.weights.q_stage(0, 0)},
                     {"q_ori", sc.weights.q_stage(3, 3)},
                     {"r_u", sc.weights.r_control(0, 0)},
                     {"qn_pos", sc.weights.q_terminal(0, 0)},
                     {"qn_ori", sc.weights.q_terminal(3, 3)},
                     {"accel_constraint",
                      sc.solver.accel_mode == AccelConstraintMode::ConservativeBox ? "box" : "ball"},
                     {"workspace_margin_m", sc.solver.workspace_margin_m},
                     {"max_passes", sc.solver.max_passes},
                     {"wave_gain_kappa", sc.wave_gain_kappa},
                     {"follow_kp_pos", sc.follow.kp_pos},
                     {"follow_kd_pos", sc.follow.kd_pos},
                     {"follow_kp_ori", sc.follow.kp_ori},
                     {"follow_kd_ori", sc.follow.kd_ori},
                     {"dls_lambda", sc.follow.dls_lambda}};
  j["mission"] = {{"r_capture_m", sc.capture.r_capture_m},
                  {"v_capture_mps", sc.capture.v_capture_mps},
                  {"grasp_dwell_s", sc.capture.grasp_dwell_s},
                  {"pose_fresh_s", sc.capture.pose_fresh_s},
                  {"holding_min_m",
                   {sc.capture.holding_min_m.x(), sc.capture.holding_min_m.y(),
                    sc.capture.holding_min_m.z()}},
                  {"holding_max_m",
                   {sc.capture.holding_max_m.x(), sc.capture.holding_max_m.y(),
                    sc.capture.holding_max_m.z()}},
                  {"retrieve_position_deck_m",
                   {sc.retrieve_position_deck_m.x(), sc.retrieve_position_deck_m.y(),
                    sc.retrieve_position_deck_m.z()}}};
  json target;
  if (const auto* tc = std::get_if<TargetCircular>(&sc.target)) {
    target = {{"kind", "circular"},
              {"center_m", {tc->center_m.x(), tc->center_m.y(), tc->center_m.z()}},
              {"radius_m", tc->radius_m},
              {"speed_mps", tc->speed_mps},
              {"phase0_rad", tc->phase0_rad}};
  } else if (const auto* tr = std::get_if<TargetRandom>(&sc.target)) {
    target = {{"kind", "random"},
              {"mean_reversion_hz", tr->mean_reversion_hz},
              {"volatility", tr->volatility},
              {"speed_cap_mps", tr->speed_cap_mps},
              {"start_m", {tr->start_m.x(), tr->start_m.y(), tr->start_m.z()}},
              {"bounds_min_m", {tr->bounds_min_m.x(), tr->bounds_min_m.y(), tr->bounds_min_m.z()}},
              {"bounds_max_m", {tr->bounds_max_m.x(), tr->bounds_max_m.y(), tr->bounds_max_m.z()}}};
  } else if (const auto* tu = std::get_if<TargetUavHover>(&sc.target)) {
    target = {{"kind", "uav_hover"},
              {"hover_position_m",
               {tu->hover_position_m.x(), tu->hover_position_m.y(), tu->hover_position_m.z()}},
              {"position_noise_sigma_m", tu->position_noise_sigma_m}};
  }
  j["scenario"] = {{"target", target},
                   {"duration_s", sc.duration_s},
                   {"dt_s", sc.dt_s},
                   {"seed", sc.seed},
                   {"prediction_lead_s", sc.prediction_lead_s}};
  json controllers = json::array();
  for (ControllerKind kind : config.campaign.controllers) controllers.push_back(to_string(kind));
  json sweep;
  if (config.campaign.roll_range_deg) {
    sweep = {config.campaign.roll_range_deg->first, config.campaign.roll_range_deg->second};
  } else {
    sweep = json::array();
  }
  j["campaign"] = {{"n_trials", config.campaign.n_trials},
                   {"controllers", controllers},
                   {"master_seed", config.campaign.master_seed},
                   {"roll_sweep_deg", sweep}};
  return j;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set expects path.to.key=value, got: " + assignment);
  }
  const std::string key_path = assignment.substr(0, eq);
  const std::string value_text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::parse_error&) {
    value = value_text;  // bare strings like controller kinds
  }
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key_path.find('.', start);
    const std::string part = key_path.substr(start, dot - start);
    if (part.empty()) throw ConfigError("--set: empty key segment in " + key_path);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace wavecatch
