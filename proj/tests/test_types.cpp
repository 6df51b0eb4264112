#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "m2msim/config_json.hpp"
#include "m2msim/types.hpp"
#include "support/test_helpers.hpp"

using namespace m2msim;

namespace {

SimConfig reference_config() {
  SimConfig cfg;
  cfg.sensors = staggered_sensors(50, ms_to_ticks(50.0), 0.0068);
  cfg.service = {100.0, 100.0, 200.0};
  cfg.utility = testsupport::default_utility();
  cfg.horizon = ms_to_ticks(40000.0);
  cfg.seed = 123456789ULL;
  cfg.replications = 20;
  return cfg;
}

bool has_code(const std::vector<ValidationIssue>& issues, Errc code) {
  for (const auto& i : issues)
    if (i.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("reference configuration validates cleanly") {
  const SimConfig cfg = reference_config();
  REQUIRE(validate_config(cfg).empty());
  CHECK(cfg.sensors.size() == 50);
  CHECK_THAT(cfg.lambda_pu(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(cfg.lambda_ed(), Catch::Matchers::WithinAbs(0.34, 1e-12));
}

TEST_CASE("aggregate rates equal an independent summation exactly") {
  const SimConfig cfg = reference_config();
  double lp = 0.0, le = 0.0;
  for (const auto& s : cfg.sensors) {
    lp += 1.0 / ticks_to_ms(s.pu_period);
    le += s.ed_rate;
  }
  CHECK(lp == cfg.lambda_pu());
  CHECK(le == cfg.lambda_ed());
}

TEST_CASE("policy threshold must lie strictly inside (0, l_d)") {
  const UtilityParams u = testsupport::default_utility();
  auto at_deadline = validate_policy(PolicySpec::proposed(ms_to_ticks(10.0)), u);
  REQUIRE(has_code(at_deadline, Errc::LT_OUT_OF_RANGE));
  CHECK(at_deadline.front().field == "policy.lt");
  CHECK(has_code(validate_policy(PolicySpec::proposed(0), u), Errc::LT_OUT_OF_RANGE));
  CHECK(validate_policy(PolicySpec::proposed(ms_to_ticks(4.0)), u).empty());
  CHECK(validate_policy(PolicySpec::fcfs(), u).empty());
}

TEST_CASE("validation names each violated invariant") {
  SimConfig cfg = reference_config();
  cfg.sensors.clear();
  CHECK(has_code(validate_config(cfg), Errc::EMPTY_SENSOR_SET));

  cfg = reference_config();
  cfg.sensors[3].pu_period = 0;
  auto issues = validate_config(cfg);
  REQUIRE(has_code(issues, Errc::NON_POSITIVE_PERIOD));
  CHECK(issues.front().field == "sensors[3].pu_period");

  cfg = reference_config();
  cfg.sensors[0].pu_phase = cfg.sensors[0].pu_period;
  CHECK(has_code(validate_config(cfg), Errc::PHASE_GE_PERIOD));

  cfg = reference_config();
  cfg.sensors[1].ed_rate = -0.1;
  CHECK(has_code(validate_config(cfg), Errc::NEGATIVE_RATE));

  cfg = reference_config();
  cfg.sensors[1].ed_rate = std::nan("");
  CHECK(has_code(validate_config(cfg), Errc::NON_FINITE_VALUE));

  cfg = reference_config();
  cfg.horizon = 0;
  CHECK(!validate_config(cfg).empty());
}

TEST_CASE("staggered phases spread one period over the sensor set") {
  const auto sensors = staggered_sensors(4, ms_to_ticks(50.0), 0.01);
  REQUIRE(sensors.size() == 4);
  CHECK(sensors[0].pu_phase == 0);
  CHECK(sensors[1].pu_phase == ms_to_ticks(12.5));
  CHECK(sensors[3].pu_phase == ms_to_ticks(37.5));
  const auto synced = staggered_sensors(4, ms_to_ticks(50.0), 0.01, true);
  for (const auto& s : synced) CHECK(s.pu_phase == 0);
}

TEST_CASE("config JSON round-trips and rejects unknown fields") {
  const SimConfig cfg = reference_config();
  const nlohmann::json j = config_to_json(cfg);
  const SimConfig back = config_from_json(j);
  CHECK(back.seed == cfg.seed);
  CHECK(back.horizon == cfg.horizon);
  CHECK(back.replications == cfg.replications);
  REQUIRE(back.sensors.size() == cfg.sensors.size());
  for (std::size_t i = 0; i < cfg.sensors.size(); ++i) {
    CHECK(back.sensors[i].pu_period == cfg.sensors[i].pu_period);
    CHECK(back.sensors[i].pu_phase == cfg.sensors[i].pu_phase);
    CHECK(back.sensors[i].ed_rate == cfg.sensors[i].ed_rate);
  }
  CHECK(back.utility.l_d == cfg.utility.l_d);

  nlohmann::json bad = j;
  bad["horizonn"] = 1.0;
  CHECK_THROWS_AS(config_from_json(bad), SimError);

  nlohmann::json bad_sensor = j;
  bad_sensor["sensors"][0]["color"] = "red";
  CHECK_THROWS_AS(config_from_json(bad_sensor), SimError);
}

TEST_CASE("tick formatting and parsing are exact inverses") {
  Xoshiro256pp rng(7);
  for (int i = 0; i < 2000; ++i) {
    const tick_t t = static_cast<tick_t>(rng.next() % 4'000'000'000'000ULL);
    bool ok = false;
    CHECK(parse_ms(format_ms(t), &ok) == t);
    CHECK(ok);
  }
  CHECK(format_ms(ms_to_ticks(10.0) + kEpsilonTick) == "10.000001000");
}
