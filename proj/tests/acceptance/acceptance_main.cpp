// Acceptance suite: every criterion below runs end to end at its pinned
// tolerance and prints one PASS/FAIL line. Exit code = number of failures.
//
//   1 tracking error        4 campaign success rate   7 hover drift
//   2 intercept success     5 baseline deltas         8 property suites
//   3 orientation error     6 solver latency          9 oracle fixtures

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <numeric>
#include <sstream>
#include <vector>

#include "oracle_cases.hpp"
#include "wavecatch/config.hpp"
#include "wavecatch/harness.hpp"
#include "wavecatch/qp.hpp"
#include "wavecatch/rng.hpp"

using namespace wavecatch;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << what << " ("
            << detail << ")\n";
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Scenario circular_scenario(double speed, double roll_deg) {
  Scenario sc = Config::defaults().scenario;
  sc.sea.roll_amplitude_rad = roll_deg * M_PI / 180.0;
  sc.sea.pitch_amplitude_rad = 0.5 * roll_deg * M_PI / 180.0;
  sc.sea.heave_amplitude_m = 0.03;
  TargetCircular target;
  target.speed_mps = speed;
  sc.target = target;
  sc.duration_s = 20.0;
  return sc;
}

const double kSpeedSweep[4] = {0.25, 0.5, 0.75, 1.0};

// 50 trials, speeds cycled through the sweep, one controller.
CampaignReport speed_cycled_campaign(ControllerKind kind, double roll_deg, int n_trials,
                                     std::uint64_t master_seed) {
  // run_campaign keeps one scenario per campaign; cycle speeds by slicing
  // the seed set into four sub-campaigns (paired across controllers by
  // construction since seeds derive from the master seed and index).
  CampaignReport merged;
  ControllerAggregate agg;
  agg.controller = kind;
  for (int si = 0; si < 4; ++si) {
    Scenario sc = circular_scenario(kSpeedSweep[si], roll_deg);
    sc.controller = kind;
    CampaignSpec spec;
    spec.n_trials = n_trials / 4 + (si < n_trials % 4 ? 1 : 0);
    spec.controllers = {kind};
    spec.master_seed = master_seed + static_cast<std::uint64_t>(si);
    spec.max_threads = 4;
    const CampaignReport part = run_campaign(sc, spec);
    for (const auto& trial : part.aggregates[0].trials) agg.trials.push_back(trial);
    for (std::uint64_t seed : part.seeds) merged.seeds.push_back(seed);
  }
  agg.n_trials = static_cast<int>(agg.trials.size());
  for (const auto& trial : agg.trials) {
    if (trial.success) ++agg.n_success;
  }
  agg.success_rate = static_cast<double>(agg.n_success) / agg.n_trials;
  merged.aggregates.push_back(agg);
  return merged;
}

void criterion_1() {
  const auto report_data = speed_cycled_campaign(ControllerKind::ShrinkingHorizon, 5.0, 50, 1001);
  const auto& trials = report_data.aggregates[0].trials;
  double sum = 0.0;
  int n = 0;
  for (const auto& t : trials) {
    if (t.metrics_applicable) {
      sum += t.mean_pos_error_m;
      ++n;
    }
  }
  const double mean_err = n > 0 ? sum / n : 1e9;
  report(1, "mean capture-window position error, circular targets <= 1 m/s, +-5 deg roll",
         n >= 45 && mean_err <= 0.06,
         "mean=" + fmt(mean_err) + " m over " + std::to_string(n) + " trials, bound 0.06 m");
}

void criterion_2() {
  bool all_pass = true;
  std::string detail;
  for (double speed : kSpeedSweep) {
    Scenario sc = circular_scenario(speed, 5.0);
    CampaignSpec spec;
    spec.n_trials = 50;
    spec.controllers = {ControllerKind::ShrinkingHorizon};
    spec.master_seed = 2000 + static_cast<std::uint64_t>(speed * 100);
    spec.roll_range_deg = {{0.0, 5.0}};  // calm to +-5 deg
    spec.max_threads = 4;
    const CampaignReport rep = run_campaign(sc, spec);
    const double rate = rep.aggregates[0].success_rate;
    all_pass = all_pass && rate >= 0.95;
    detail += fmt(speed) + " m/s: " + fmt(100.0 * rate) + "%  ";
  }
  report(2, "intercept success >= 95% at each speed in {0.25, 0.5, 0.75, 1.0} m/s", all_pass,
         detail + "bound 95%");
}

void criterion_3() {
  Scenario sc = circular_scenario(0.5, 5.0);
  CampaignSpec spec;
  spec.n_trials = 25;
  spec.controllers = {ControllerKind::ShrinkingHorizon};
  spec.master_seed = 3003;
  spec.max_threads = 4;
  const CampaignReport rep = run_campaign(sc, spec);
  double worst = 0.0;
  int n = 0;
  for (const auto& t : rep.aggregates[0].trials) {
    if (t.metrics_applicable) {
      worst = std::max(worst, t.max_ori_error_deg);
      ++n;
    }
  }
  report(3, "max end-effector orientation error during capture windows under +-5 deg roll",
         n >= 20 && worst <= 5.0, "max=" + fmt(worst) + " deg over " + std::to_string(n) +
                                      " trials, bound 5 deg");
}

void criterion_4() {
  Scenario sc = circular_scenario(0.5, 6.5);
  CampaignSpec spec;
  spec.n_trials = 40;
  spec.controllers = {ControllerKind::ShrinkingHorizon};
  spec.master_seed = 4004;
  spec.roll_range_deg = {{5.0, 8.0}};
  spec.max_threads = 4;
  const CampaignReport rep = run_campaign(sc, spec);
  const auto& agg = rep.aggregates[0];
  double sum_sq = 0.0;
  int n = 0;
  for (const auto& t : agg.trials) {
    if (t.metrics_applicable) {
      sum_sq += t.rms_pos_error_m * t.rms_pos_error_m;
      ++n;
    }
  }
  const double rms = n > 0 ? std::sqrt(sum_sq / n) : 1e9;
  report(4, "40-trial campaign at +-5-8 deg tilt: success and capture-window RMS",
         agg.success_rate >= 0.90 && rms <= 0.12,
         "success=" + fmt(100.0 * agg.success_rate) + "% (bound 90%), rms=" + fmt(rms) +
             " m (bound 0.12 m)");
}

void criterion_5() {
  Scenario sc = circular_scenario(0.5, 4.0);
  CampaignSpec spec;
  spec.n_trials = 50;
  spec.controllers = {ControllerKind::SimpleFollowing, ControllerKind::ShrinkingHorizon};
  spec.master_seed = 5005;
  spec.max_threads = 4;
  const CampaignReport rep = run_campaign(sc, spec);
  double ttc_red = -1e9, rms_red = -1e9;
  for (const auto& delta : rep.deltas) {
    if (delta.controller == ControllerKind::ShrinkingHorizon) {
      ttc_red = delta.time_to_capture_reduction_pct;
      rms_red = delta.rms_error_reduction_pct;
    }
  }
  report(5, "shrinking-horizon vs simple-following paired deltas (medians, 50 seeds)",
         ttc_red >= 10.0 && rms_red >= 20.0,
         "time-to-capture -" + fmt(ttc_red) + "% (bound 10%), rms -" + fmt(rms_red) +
             "% (bound 20%)");
}

void criterion_6() {
  const Config cfg = Config::defaults();
  const Scenario& sc = cfg.scenario;
  const DiscreteModel discrete = build_discrete_model(0.05);
  Rng rng(606);
  std::vector<double> times_ms;
  for (int rep = 0; rep < 100; ++rep) {
    JointState z0;
    for (int i = 0; i < 7; ++i) {
      z0.q(i) = sc.q_home(i) + rng.uniform(-0.3, 0.3);
      z0.q_dot(i) = rng.uniform(-0.5, 0.5);
    }
    SeaStateConfig sea_cfg;
    sea_cfg.roll_amplitude_rad = 5.0 * M_PI / 180.0;
    sea_cfg.seed = 900 + static_cast<std::uint64_t>(rep);
    const SeaState sea(sea_cfg);
    const Pose6 ee = forward_kinematics(sc.arm, z0.q, Pose6{});
    std::vector<Pose6> target(21), base(21);
    const Eigen::Vector3d offset(rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25),
                                 rng.uniform(-0.15, 0.15));
    for (int k = 0; k <= 20; ++k) {
      target[static_cast<std::size_t>(k)].position = ee.position + offset;
      base[static_cast<std::size_t>(k)] = base_transform(sea.base_pose_at(1.0 + 0.05 * k));
    }
    const HorizonPlan plan = solve_horizon(z0, target, base, sc.arm, discrete, sc.weights, 20,
                                           std::nullopt, sc.solver);
    times_ms.push_back(plan.solve_time_s * 1e3);
  }
  std::sort(times_ms.begin(), times_ms.end());
  const double p95 = times_ms[static_cast<std::size_t>(0.95 * (times_ms.size() - 1))];
  report(6, "p95 solve time at h=20, dt=0.05 on one core", p95 <= 40.0,
         "p95=" + fmt(p95) + " ms (bound 40 ms), median=" + fmt(times_ms[times_ms.size() / 2]) +
             " ms");
}

void criterion_7() {
  UavParams params;
  PdGains gains;
  UavState truth;
  truth.position = Eigen::Vector3d(0.0, 0.0, 1.0);
  const Eigen::Vector3d ref = truth.position;
  Rng rng(707);
  const double dt = 0.01;
  double sum_sq = 0.0;
  int n = 0;
  for (int i = 0; i < static_cast<int>(60.0 / dt); ++i) {
    UavState measured = truth;
    for (int k = 0; k < 3; ++k) measured.position(k) += 0.01 * rng.gaussian();
    truth = integrate_uav(truth, cascaded_pd(measured, ref, 0.0, gains, params, dt), params, dt);
    sum_sq += truth.position.head<2>().squaredNorm();
    ++n;
  }
  const double rms = std::sqrt(sum_sq / n);
  report(7, "closed-loop hover drift with 1 cm measurement noise over 60 s", rms < 0.06,
         "horizontal rms=" + fmt(rms) + " m (bound 0.06 m)");
}

// --- criterion 8: property suites -------------------------------------------

bool prop_eskf_psd_fuzz(std::string& detail) {
  TargetMotionModel model;
  ErrorFilterState st =
      ErrorFilterState::create(model, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
  Rng rng(808);
  for (int i = 0; i < 10000; ++i) {
    st = predict(st, rng.uniform(0.001, 0.1));
    if (rng.uniform01() < 0.7) {
      Measurement z;
      z.stamp_s = st.stamp_s;
      z.position = st.position + Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
      st = update(st, z).state;
    }
    if ((st.covariance - st.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
      detail = "covariance asymmetry at cycle " + std::to_string(i);
      return false;
    }
    const double eig_min =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(st.covariance).eigenvalues().minCoeff();
    if (eig_min < -1e-10) {
      detail = "negative eigenvalue at cycle " + std::to_string(i);
      return false;
    }
  }
  detail = "10000 cycles PSD";
  return true;
}

bool prop_nees(std::string& detail) {
  const int runs = 500;
  const int steps = 120;
  const double dt = 0.02;
  Rng rng(31415);
  double nees_sum = 0.0;
  for (int run = 0; run < runs; ++run) {
    TargetMotionModel model;
    model.accel_noise_density = 0.4;
    model.attitude_rw_density = 0.02;
    ErrorFilterState st = ErrorFilterState::create(model, Eigen::Vector3d::Zero(),
                                                   Eigen::Vector3d::Zero(), 0.05, 0.2, 0.05);
    Eigen::Vector3d p_true(0.05 * rng.gaussian(), 0.05 * rng.gaussian(), 0.05 * rng.gaussian());
    Eigen::Vector3d v_true(0.2 * rng.gaussian(), 0.2 * rng.gaussian(), 0.2 * rng.gaussian());
    UnitQuaternion q_true = UnitQuaternion::from_rotation_vector(
        0.05 * Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian()));
    const Eigen::MatrixXd chol =
        Eigen::LLT<Eigen::MatrixXd>(process_noise(model, dt) +
                                    1e-15 * Eigen::MatrixXd::Identity(9, 9))
            .matrixL();
    for (int k = 1; k <= steps; ++k) {
      Eigen::VectorXd w(9);
      for (int i = 0; i < 9; ++i) w(i) = rng.gaussian();
      const Eigen::VectorXd noise = chol * w;
      p_true += v_true * dt + noise.segment<3>(0);
      v_true += noise.segment<3>(3);
      q_true = q_true * UnitQuaternion::from_rotation_vector(noise.segment<3>(6));
      st = predict(st, dt);
      Measurement z;
      z.stamp_s = k * dt;
      z.position =
          p_true + 0.005 * Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
      z.orientation = q_true * UnitQuaternion::from_rotation_vector(
                                   0.0087 * Eigen::Vector3d(rng.gaussian(), rng.gaussian(),
                                                            rng.gaussian()));
      st = update(st, z).state;
    }
    Eigen::VectorXd err(9);
    err.segment<3>(0) = p_true - st.position;
    err.segment<3>(3) = v_true - st.velocity;
    err.segment<3>(6) = (st.orientation.inverse() * q_true).to_rotation_vector();
    nees_sum += err.dot(st.covariance.ldlt().solve(err));
  }
  const double avg = nees_sum / runs;
  // Wilson-Hilferty bounds for chi2(9*500)/500: ~[8.48, 9.53]
  detail = "avg NEES=" + fmt(avg) + " (band [8.48, 9.53], dof 9, 500 runs)";
  return avg >= 8.48 && avg <= 9.53;
}

bool prop_fk_jacobian(std::string& detail) {
  const ArmModel model = ArmModel::standard_seven_dof();
  Rng rng(101);
  BasePose bp;
  bp.roll_rad = 0.06;
  const Pose6 base = base_transform(bp);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Vector7d q;
    for (int i = 0; i < 7; ++i) {
      q(i) = rng.uniform(0.6 * model.q_min_rad(i), 0.6 * model.q_max_rad(i));
    }
    const auto jac = geometric_jacobian(model, q, base);
    for (int col = 0; col < 7; ++col) {
      Vector7d qp = q, qm = q;
      qp(col) += h;
      qm(col) -= h;
      const Pose6 fp = forward_kinematics(model, qp, base);
      const Pose6 fm = forward_kinematics(model, qm, base);
      worst = std::max(worst, ((fp.position - fm.position) / (2 * h) - jac.block<3, 1>(0, col))
                                  .cwiseAbs()
                                  .maxCoeff());
      worst = std::max(
          worst,
          ((fp.orientation * fm.orientation.inverse()).to_rotation_vector() / (2 * h) -
           jac.block<3, 1>(3, col))
              .cwiseAbs()
              .maxCoeff());
    }
  }
  detail = "200 configs, worst column error " + fmt(worst) + " (bound 1e-5)";
  return worst <= 1e-5;
}

bool prop_discrete_exact(std::string& detail) {
  const DiscreteModel m = build_discrete_model(0.05);
  Vector7d q0, qd0, u;
  for (int i = 0; i < 7; ++i) {
    q0(i) = 0.15 * (i - 3);
    qd0(i) = 0.04 * i;
    u(i) = 0.07 * (3 - i);
  }
  JointState z;
  z.q = q0;
  z.q_dot = qd0;
  double worst = 0.0;
  for (int k = 1; k <= 100; ++k) {
    z = m.step(z, u);
    const double t = 0.05 * k;
    worst = std::max(worst, (z.q - (q0 + qd0 * t + 0.5 * u * t * t)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (z.q_dot - (qd0 + u * t)).cwiseAbs().maxCoeff());
  }
  detail = "closed-form deviation " + fmt(worst) + " (machine precision bound 1e-11)";
  return worst <= 1e-11;
}

bool prop_audit_and_kkt(std::string& detail) {
  Scenario sc = circular_scenario(0.75, 5.0);
  sc.duration_s = 12.0;
  sc.seed = 777;
  const TrialRecord rec = run_trial(sc);
  int feasible_ticks = 0;
  for (const auto& row : rec.rows) {
    if (row.plan_feasible) {
      ++feasible_ticks;
      if (!row.audit_ok) {
        detail = "audit failure at t=" + fmt(row.t_s);
        return false;
      }
      if (row.kkt_residual > 1e-6) {
        detail = "KKT residual " + fmt(row.kkt_residual) + " at t=" + fmt(row.t_s);
        return false;
      }
    }
  }
  detail = "constraint audit and KKT <= 1e-6 on " + std::to_string(feasible_ticks) +
           " feasible plan ticks";
  return feasible_ticks > 0;
}

bool prop_determinism(std::string& detail) {
  Scenario sc = circular_scenario(0.5, 5.0);
  sc.duration_s = 6.0;
  sc.seed = 4242;
  const std::string a = trial_to_jsonl(run_trial(sc), false);
  const std::string b = trial_to_jsonl(run_trial(sc), false);
  if (a != b) {
    detail = "trial repeat differs";
    return false;
  }
  CampaignSpec spec;
  spec.n_trials = 4;
  spec.controllers = {ControllerKind::ShrinkingHorizon};
  spec.master_seed = 11;
  spec.max_threads = 1;
  const std::string serial = campaign_to_csv(run_campaign(sc, spec));
  spec.max_threads = 4;
  const std::string parallel = campaign_to_csv(run_campaign(sc, spec));
  if (serial != parallel) {
    detail = "parallel campaign differs from serial";
    return false;
  }
  detail = "trial repeat and serial/parallel campaign byte-identical";
  return true;
}

bool prop_monotone_roll(std::string& detail) {
  const int n = 10;
  std::vector<int> successes;
  std::ostringstream os;
  for (double roll : {0.0, 5.0, 8.0, 12.0}) {
    Scenario sc = circular_scenario(0.5, roll);
    sc.duration_s = 15.0;
    CampaignSpec spec;
    spec.n_trials = n;
    spec.controllers = {ControllerKind::ShrinkingHorizon};
    spec.master_seed = 888;
    spec.max_threads = 4;
    const CampaignReport rep = run_campaign(sc, spec);
    successes.push_back(rep.aggregates[0].n_success);
    os << roll << " deg: " << rep.aggregates[0].n_success << "/" << n << "  ";
  }
  detail = os.str() + "(inversions beyond +-1 trial flag a bug)";
  for (std::size_t i = 1; i < successes.size(); ++i) {
    if (successes[i] > successes[i - 1] + 1) return false;
  }
  return true;
}

void criterion_8() {
  struct Prop {
    const char* name;
    bool (*fn)(std::string&);
  };
  const Prop props[] = {
      {"ESKF covariance PSD fuzz", prop_eskf_psd_fuzz},
      {"NEES consistency band", prop_nees},
      {"FK/Jacobian finite differences", prop_fk_jacobian},
      {"discrete-model exactness", prop_discrete_exact},
      {"constraint audit + KKT residuals", prop_audit_and_kkt},
      {"seeded determinism incl. parallel", prop_determinism},
      {"monotone roll-sweep degradation", prop_monotone_roll},
  };
  for (const auto& prop : props) {
    std::string detail;
    const bool pass = prop.fn(detail);
    report(8, prop.name, pass, detail);
  }
}

void criterion_9() {
  const auto results = oracle::run_all_cases();
  int failures = 0;
  for (const auto& r : results) {
    if (!r.pass) {
      ++failures;
      std::cout << "        oracle disagreement: " << r.name << " max error "
                << r.max_abs_error << " tolerance " << r.tolerance << "\n";
    }
  }
  report(9, "oracle fixtures match library outputs",
         failures == 0, std::to_string(results.size()) + " cases, " + std::to_string(failures) +
                            " disagreements");
}

}  // namespace

int main(int argc, char** argv) {
  int which = 0;
  for (int i = 1; i + 1 < argc + 1; ++i) {
    if (i < argc && std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      which = std::atoi(argv[i + 1]);
    }
  }
  const auto want = [&](int n) { return which == 0 || which == n; };
  if (want(1)) criterion_1();
  if (want(2)) criterion_2();
  if (want(3)) criterion_3();
  if (want(4)) criterion_4();
  if (want(5)) criterion_5();
  if (want(6)) criterion_6();
  if (want(7)) criterion_7();
  if (want(8)) criterion_8();
  if (want(9)) criterion_9();
  return g_failures;
}
