#include <doctest.h>

#include <stdexcept>

#include "btsim/config.hpp"

using namespace btsim;

TEST_CASE("config: defaults validate") {
  ScenarioConfig cfg;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config: invariant violations throw with the offending key") {
  ScenarioConfig cfg;
  cfg.max_outgoing = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.max_outgoing = cfg.max_peer_set + 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.recontact_threshold = cfg.max_peer_set + 5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.tracker_return_count = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.nat_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.lifetime_law = UniformMinutes{20.0, 10.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.arrival_law = ExponentialSlots{/*amplitude=*/-1.0, 0.7, 10.0, 4};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config: scenario text round trip") {
  ScenarioConfig cfg;
  cfg.max_peer_set = 100;
  cfg.max_outgoing = 50;
  cfg.nat_fraction = 0.3;
  cfg.pex_enabled = true;
  cfg.arrival_law = ExponentialSlots{511.0, 0.7, 10.0, 6};
  cfg.lifetime_law = UniformWindow{minutes(60.0), minutes(120.0)};
  cfg.seed = 99;

  const std::string text = to_scenario_text(cfg);
  const ScenarioConfig parsed = parse_scenario_text(text);
  CHECK(to_scenario_text(parsed) == text);
  CHECK(parsed.max_peer_set == 100);
  CHECK(parsed.pex_enabled);
  CHECK(std::get<UniformWindow>(parsed.lifetime_law).end_s ==
        doctest::Approx(7200.0));
}

TEST_CASE("config: parser accepts comments and rejects junk") {
  const char* good = R"(
# flagship setup
[scenario]
max_peer_set = 80   # inline comment
seed = 7

[arrivals]
law = explicit
times_s = 1.0, 2.0, 3.5
)";
  const ScenarioConfig cfg = parse_scenario_text(good);
  CHECK(cfg.seed == 7);
  CHECK(std::get<ExplicitSchedule>(cfg.arrival_law).times_s.size() == 3);

  CHECK_THROWS(parse_scenario_text("[scenario]\nmax_peer_set 80\n"));
  CHECK_THROWS(parse_scenario_text("[scenario]\nnot_a_key = 1\n"));
  CHECK_THROWS(parse_scenario_text("[nope]\nmax_peer_set = 1\n"));
  CHECK_THROWS(parse_scenario_text("[scenario]\nmax_peer_set = abc\n"));
}

TEST_CASE("config: dotted overrides") {
  ScenarioConfig cfg;
  apply_override(cfg, "scenario.max_peer_set", "200");
  apply_override(cfg, "max_outgoing", "100");  // bare keys hit [scenario]
  apply_override(cfg, "arrivals.amplitude", "3000");
  apply_override(cfg, "lifetimes.hi_min", "30");
  CHECK(cfg.max_peer_set == 200);
  CHECK(cfg.max_outgoing == 100);
  CHECK(std::get<ExponentialSlots>(cfg.arrival_law).amplitude == 3000.0);
  CHECK(std::get<UniformMinutes>(cfg.lifetime_law).hi_min == 30.0);
  CHECK_THROWS_AS(apply_override(cfg, "scenario.bogus", "1"),
                  std::invalid_argument);
}
