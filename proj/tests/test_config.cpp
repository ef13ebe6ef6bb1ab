#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wavecatch/config.hpp"
#include "wavecatch/errors.hpp"

using namespace wavecatch;
using nlohmann::json;

TEST_CASE("defaults survive a dump/parse/dump round trip byte-identically") {
  const Config defaults = Config::defaults();
  const json dumped = dump_config(defaults);
  const std::string once = dumped.dump(2);
  const Config reparsed = parse_config(dumped);
  const std::string twice = dump_config(reparsed).dump(2);
  CHECK(once == twice);
}

TEST_CASE("unknown keys are rejected with their path") {
  json j = dump_config(Config::defaults());
  j["sea_state"]["unknown_thing"] = 1.0;
  try {
    parse_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sea_state.unknown_thing") != std::string::npos);
  }
}

TEST_CASE("missing blocks are named") {
  json j = dump_config(Config::defaults());
  j.erase("controller");
  try {
    parse_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("controller") != std::string::npos);
  }
}

TEST_CASE("values flow through to the scenario") {
  json j = dump_config(Config::defaults());
  j["sea_state"]["roll_amplitude_deg"] = 8.0;
  j["controller"]["kind"] = "fixed_horizon";
  j["scenario"]["dt_s"] = 0.025;
  j["scenario"]["target"] = {{"kind", "random"}, {"volatility", 0.5}};
  const Config cfg = parse_config(j);
  CHECK(cfg.scenario.sea.roll_amplitude_rad == doctest::Approx(8.0 * M_PI / 180.0));
  CHECK(cfg.scenario.controller == ControllerKind::FixedHorizon);
  CHECK(cfg.scenario.dt_s == doctest::Approx(0.025));
  REQUIRE(std::holds_alternative<TargetRandom>(cfg.scenario.target));
  CHECK(std::get<TargetRandom>(cfg.scenario.target).volatility == doctest::Approx(0.5));
}

TEST_CASE("module invariants are validated at load") {
  json j = dump_config(Config::defaults());
  j["scenario"]["dt_s"] = 0.2;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = dump_config(Config::defaults());
  j["sea_state"]["roll_amplitude_deg"] = 45.0;  // above the sanity bound
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = dump_config(Config::defaults());
  j["arm"]["qd_max_rad_s"] = {1, 1, 1, 1, 1, 1};  // wrong arity
  CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("--set overrides reach nested keys") {
  json j = dump_config(Config::defaults());
  apply_override(j, "scenario.seed=77");
  apply_override(j, "controller.kind=simple_following");
  apply_override(j, "scenario.target.speed_mps=0.75");
  const Config cfg = parse_config(j);
  CHECK(cfg.scenario.seed == 77);
  CHECK(cfg.scenario.controller == ControllerKind::SimpleFollowing);
  CHECK(std::get<TargetCircular>(cfg.scenario.target).speed_mps == doctest::Approx(0.75));
  CHECK_THROWS_AS(apply_override(j, "no_equals_sign"), ConfigError);
}

TEST_CASE("campaign block parses controllers and sweep") {
  json j = dump_config(Config::defaults());
  j["campaign"]["n_trials"] = 12;
  j["campaign"]["controllers"] = {"shrinking_horizon", "simple_following"};
  j["campaign"]["roll_sweep_deg"] = {5.0, 8.0};
  const Config cfg = parse_config(j);
  CHECK(cfg.campaign.n_trials == 12);
  REQUIRE(cfg.campaign.controllers.size() == 2);
  CHECK(cfg.campaign.controllers[1] == ControllerKind::SimpleFollowing);
  REQUIRE(cfg.campaign.roll_range_deg.has_value());
  CHECK(cfg.campaign.roll_range_deg->second == doctest::Approx(8.0));
}
