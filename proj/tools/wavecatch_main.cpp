// wavecatch command-line tool: single-trial simulation, multi-trial
// campaigns, offline filter replay, and solver benchmarking.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavecatch/config.hpp"
#include "wavecatch/errors.hpp"
#include "wavecatch/harness.hpp"
#include "wavecatch/rng.hpp"

namespace {

using namespace wavecatch;

Config load_with_overrides(const std::string& config_path,
                           const std::vector<std::string>& overrides) {
  nlohmann::json j;
  if (config_path.empty()) {
    j = dump_config(Config::defaults());
  } else {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file: " + config_path);
    try {
      in >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config parse error in " + config_path + ": " + e.what());
    }
  }
  for (const auto& assignment : overrides) apply_override(j, assignment);
  return parse_config(j);
}

int thread_cap(int requested) {
  if (const char* env = std::getenv("WAVECATCH_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) requested = std::min(requested, cap);
  }
  return std::max(1, requested);
}

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& overrides,
                 const std::string& out_path, bool no_fail_on_miss) {
  const Config cfg = load_with_overrides(config_path, overrides);
  const TrialRecord record = run_trial(cfg.scenario);
  write_trial_jsonl(record, out_path);
  const auto& s = record.summary;
  std::cout << "controller=" << to_string(s.controller) << " seed=" << s.seed
            << " success=" << (s.success ? "true" : "false")
            << " time_to_capture_s=" << s.time_to_capture_s
            << " rms_pos_error_m=" << s.rms_pos_error_m
            << " mean_ori_error_deg=" << s.mean_ori_error_deg
            << " mean_solve_time_s=" << s.mean_solve_time_s << " final_phase="
            << to_string(s.final_phase) << "\n";
  if (s.success || no_fail_on_miss) return 0;
  return 2;
}

int cmd_campaign(const std::string& config_path, const std::vector<std::string>& overrides,
                 int n_override, const std::vector<std::string>& controller_names,
                 const std::string& out_dir, int parallel) {
  Config cfg = load_with_overrides(config_path, overrides);
  if (n_override > 0) cfg.campaign.n_trials = n_override;
  if (!controller_names.empty()) {
    cfg.campaign.controllers.clear();
    for (const auto& name : controller_names) {
      cfg.campaign.controllers.push_back(controller_from_string(name));
    }
  }
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream probe(std::filesystem::path(out_dir) / ".write_probe");
    if (!probe) {
      std::cerr << "error: output directory not writable: " << out_dir << "\n";
      return 1;
    }
  }
  std::filesystem::remove(std::filesystem::path(out_dir) / ".write_probe");

  cfg.campaign.max_threads = thread_cap(parallel);
  cfg.campaign.on_trial = [&](ControllerKind kind, int index, const TrialRecord& record) {
    std::ostringstream name;
    name << "trial_" << to_string(kind) << "_" << index << ".jsonl";
    write_trial_jsonl(record, (std::filesystem::path(out_dir) / name.str()).string());
  };

  const CampaignReport report = run_campaign(cfg.scenario, cfg.campaign);
  {
    std::ofstream csv(std::filesystem::path(out_dir) / "campaign.csv");
    csv << campaign_to_csv(report);
  }
  {
    std::ofstream csv(std::filesystem::path(out_dir) / "campaign_timing.csv");
    csv << campaign_timing_csv(report);
  }
  for (const auto& agg : report.aggregates) {
    std::cout << to_string(agg.controller) << ": success_rate=" << agg.success_rate
              << " mean_rms_pos_error_m=" << agg.mean_rms_pos_error_m
              << " median_time_to_capture_s=" << agg.median_time_to_capture_s << "\n";
  }
  for (const auto& delta : report.deltas) {
    std::cout << to_string(delta.controller)
              << " vs baseline: ttc_reduction_pct=" << delta.time_to_capture_reduction_pct
              << " rms_reduction_pct=" << delta.rms_error_reduction_pct << "\n";
  }
  return 0;
}

int cmd_replay_eskf(const std::string& trace_path, const std::string& out_path,
                    const std::string& model_name, double alpha_s) {
  std::ifstream in(trace_path);
  if (!in) throw ConfigError("cannot open trace file: " + trace_path);

  std::string header;
  if (!std::getline(in, header)) throw ConfigError("empty trace: " + trace_path);
  const std::vector<std::string> expected = {"t",  "px", "py", "pz",
                                             "qw", "qx", "qy", "qz"};
  std::vector<std::string> columns;
  {
    std::istringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) columns.push_back(col);
  }
  if (columns.size() != expected.size()) {
    throw ConfigError("trace header: expected 8 columns t,px,py,pz,qw,qx,qy,qz");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (columns[i] != expected[i]) {
      throw ConfigError("trace header: column " + std::to_string(i + 1) + " is \"" + columns[i] +
                        "\", expected \"" + expected[i] + "\"");
    }
  }

  TargetMotionModel model;
  if (model_name == "cv") {
    model.kind = MotionModelKind::ConstantVelocity;
  } else if (model_name == "ca") {
    model.kind = MotionModelKind::ConstantAcceleration;
  } else {
    throw ConfigError("--model: expected cv or ca");
  }

  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot open for writing: " + out_path);
  out << "t,est_px,est_py,est_pz,est_vx,est_vy,est_vz,pred05_px,pred05_py,pred05_pz,trace_P\n";
  out.precision(12);

  std::optional<ErrorFilterState> filter;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::array<double, 8> v{};
    std::string cell;
    for (double& x : v) {
      if (!std::getline(ls, cell, ',')) {
        throw ConfigError("trace row " + std::to_string(rows + 1) + ": too few columns");
      }
      x = std::stod(cell);
    }
    Measurement z;
    z.stamp_s = v[0];
    z.position = Eigen::Vector3d(v[1], v[2], v[3]);
    z.orientation = UnitQuaternion(v[4], v[5], v[6], v[7]);
    if (!filter) {
      filter = ErrorFilterState::create(model, z.position, Eigen::Vector3d::Zero());
      filter->orientation = *z.orientation;
      filter->stamp_s = z.stamp_s;
    } else {
      if (z.stamp_s < filter->stamp_s) {
        throw ConfigError("trace row " + std::to_string(rows + 1) +
                          ": timestamps must be nondecreasing");
      }
      if (z.stamp_s > filter->stamp_s) *filter = predict(*filter, z.stamp_s - filter->stamp_s);
      *filter = update(*filter, z).state;
    }
    const Extrapolation pred = extrapolate(*filter, alpha_s, 1);
    const auto& far = pred.samples.back().pose.position;
    out << v[0] << "," << filter->position.x() << "," << filter->position.y() << ","
        << filter->position.z() << "," << filter->velocity.x() << "," << filter->velocity.y()
        << "," << filter->velocity.z() << "," << far.x() << "," << far.y() << "," << far.z()
        << "," << filter->covariance.trace() << "\n";
    ++rows;
  }
  if (rows == 0) throw ConfigError("trace has a header but no data rows: " + trace_path);
  std::cout << "replayed " << rows << " measurements -> " << out_path << "\n";
  return 0;
}

int cmd_bench(const std::vector<int>& horizons, int repeats, const std::string& out_path) {
  const Config cfg = Config::defaults();
  const Scenario& sc = cfg.scenario;
  const DiscreteModel discrete = build_discrete_model(sc.dt_s);

  std::ostringstream csv;
  csv << "h,n,median_ms,p95_ms,max_ms\n";
  for (int h : horizons) {
    if (h < 1 || h > 100) throw ConfigError("bench: horizons must be in [1, 100]");
    std::vector<double> times_ms;
    Rng rng(20240u + static_cast<std::uint64_t>(h));
    for (int rep = 0; rep < repeats; ++rep) {
      JointState z0;
      for (int i = 0; i < 7; ++i) {
        z0.q(i) = sc.q_home(i) + rng.uniform(-0.3, 0.3);
        z0.q_dot(i) = rng.uniform(-0.5, 0.5);
      }
      const Pose6 ee = forward_kinematics(sc.arm, z0.q, Pose6{});
      std::vector<Pose6> target(static_cast<std::size_t>(h) + 1);
      std::vector<Pose6> base(static_cast<std::size_t>(h) + 1);
      const Eigen::Vector3d offset(rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25),
                                   rng.uniform(-0.15, 0.15));
      SeaStateConfig sea_cfg;
      sea_cfg.roll_amplitude_rad = 5.0 * M_PI / 180.0;
      sea_cfg.pitch_amplitude_rad = 2.5 * M_PI / 180.0;
      sea_cfg.seed = 17u + static_cast<std::uint64_t>(rep);
      const SeaState sea(sea_cfg);
      for (int k = 0; k <= h; ++k) {
        target[static_cast<std::size_t>(k)].position = ee.position + offset;
        base[static_cast<std::size_t>(k)] = base_transform(sea.base_pose_at(1.0 + k * sc.dt_s));
      }
      const HorizonPlan plan =
          solve_horizon(z0, target, base, sc.arm, discrete, sc.weights, h, std::nullopt, sc.solver);
      times_ms.push_back(plan.solve_time_s * 1e3);
    }
    std::sort(times_ms.begin(), times_ms.end());
    const auto pct = [&](double p) {
      const double idx = p * (static_cast<double>(times_ms.size()) - 1.0);
      const std::size_t lo = static_cast<std::size_t>(idx);
      const std::size_t hi = std::min(lo + 1, times_ms.size() - 1);
      return times_ms[lo] + (idx - static_cast<double>(lo)) * (times_ms[hi] - times_ms[lo]);
    };
    csv << h << "," << times_ms.size() << "," << pct(0.5) << "," << pct(0.95) << ","
        << times_ms.back() << "\n";
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot open for writing: " + out_path);
    out << csv.str();
  }
  std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavecatch: manipulator-assisted drone recovery simulation"};
  app.require_subcommand(0, 1);

  bool dump_defaults = false;
  app.add_flag("--dump-default-config", dump_defaults, "print the fully resolved default config");

  std::string config_path, out_path = "trial.jsonl";
  std::vector<std::string> overrides;
  bool no_fail_on_miss = false;
  auto* simulate = app.add_subcommand("simulate", "run one trial and write a JSONL log");
  simulate->add_option("--config", config_path, "config file (defaults used when omitted)");
  simulate->add_option("--set", overrides, "override config keys, e.g. scenario.seed=3");
  simulate->add_option("--out", out_path, "output JSONL path");
  simulate->add_flag("--no-fail-on-miss", no_fail_on_miss, "exit 0 even when capture misses");

  std::string camp_config, camp_out = "campaign_out";
  std::vector<std::string> camp_overrides, camp_controllers;
  int camp_n = 0, camp_parallel = 1;
  auto* campaign = app.add_subcommand("campaign", "run a paired multi-trial campaign");
  campaign->add_option("--config", camp_config, "config file (defaults used when omitted)");
  campaign->add_option("--set", camp_overrides, "override config keys");
  campaign->add_option("-n,--trials", camp_n, "number of trials (overrides campaign.n_trials)");
  campaign->add_option("--controllers", camp_controllers, "controllers to compare");
  campaign->add_option("--out", camp_out, "output directory");
  campaign->add_option("--parallel", camp_parallel,
                       "worker threads (capped by WAVECATCH_THREADS)");

  std::string trace_path, replay_out = "estimates.csv", replay_model = "cv";
  double replay_alpha = 0.5;
  auto* replay = app.add_subcommand("replay-eskf", "replay a measurement trace offline");
  replay->add_option("--trace", trace_path, "input CSV: t,px,py,pz,qw,qx,qy,qz")->required();
  replay->add_option("--out", replay_out, "output estimate CSV");
  replay->add_option("--model", replay_model, "target model: cv or ca");
  replay->add_option("--alpha", replay_alpha, "prediction lead in seconds");

  std::vector<int> bench_horizons = {1, 5, 10, 20};
  int bench_repeats = 50;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "measure horizon solve times");
  bench->add_option("--horizons", bench_horizons, "horizon lengths to benchmark");
  bench->add_option("--repeats", bench_repeats, "instances per horizon");
  bench->add_option("--out", bench_out, "optional CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (dump_defaults) {
      std::cout << wavecatch::dump_config(wavecatch::Config::defaults()).dump(2) << "\n";
      return 0;
    }
    if (simulate->parsed()) {
      return cmd_simulate(config_path, overrides, out_path, no_fail_on_miss);
    }
    if (campaign->parsed()) {
      return cmd_campaign(camp_config, camp_overrides, camp_n, camp_controllers, camp_out,
                          camp_parallel);
    }
    if (replay->parsed()) {
      return cmd_replay_eskf(trace_path, replay_out, replay_model, replay_alpha);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_horizons, bench_repeats, bench_out);
    }
    std::cout << app.help();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
