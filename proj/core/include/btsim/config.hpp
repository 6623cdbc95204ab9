#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "btsim/units.hpp"

namespace btsim {

// Arrival workload: per-slot counts decay exponentially (ceil of the closed
// form, see slot_arrival_counts), instants are spread uniformly within each
// slot. The alternative is a fully explicit schedule.
struct ExponentialSlots {
  double amplitude = 1000.0;
  double rate = 0.7;
  double slot_minutes = 10.0;
  int num_slots = 4;
};

struct ExplicitSchedule {
  std::vector<double> times_s;
};

using ArrivalLaw = std::variant<ExponentialSlots, ExplicitSchedule>;

// Lifetime laws: a per-peer duration drawn relative to arrival, or an
// absolute departure window shared by all peers (clamped to >= arrival).
struct UniformMinutes {
  double lo_min = 10.0;
  double hi_min = 20.0;
};

struct UniformWindow {
  double start_s = 0.0;
  double end_s = 0.0;
};

using LifetimeLaw = std::variant<UniformMinutes, UniformWindow>;

struct ScenarioConfig {
  // Protocol knobs.
  int max_peer_set = 80;          // hard cap on a peer's neighbor count
  int max_outgoing = 40;          // cap on connections a peer may initiate
  int tracker_return_count = 50;  // addresses returned per tracker request
  int recontact_threshold = 20;   // neighbor count that triggers re-contact
  double recontact_min_interval_s = 300.0;
  bool announce_enabled = true;
  double announce_interval_s = minutes(30.0);
  double announce_expiry_lo_s = minutes(30.0);
  double announce_expiry_hi_s = minutes(45.0);
  double nat_fraction = 0.0;
  bool pex_enabled = false;
  double pex_period_s = minutes(1.0);
  // Sensitivity switch: by default a connection attempt to a NATed peer
  // (reachable only through PEX discovery) fails, since NATed peers cannot
  // accept unsolicited inbound connections.
  bool allow_nated_pex_targets = false;

  // Workload.
  ArrivalLaw arrival_law = ExponentialSlots{};
  LifetimeLaw lifetime_law = UniformMinutes{};

  // Run control.
  std::uint64_t seed = 1;
  int runs = 10;
  double snapshot_interval_s = 60.0;

  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

// Reads a scenario from a key/value file with [scenario] / [arrivals] /
// [lifetimes] sections; unknown keys are an error. Missing keys keep their
// defaults. Throws std::runtime_error / std::invalid_argument on bad input.
ScenarioConfig load_scenario_file(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text);

// Applies one "section.key=value" override (same keys as the file format).
void apply_override(ScenarioConfig& cfg, const std::string& dotted_key,
                    const std::string& value);

// Full round-trippable rendering in the scenario file format; used both for
// config echo in CSV headers and for writing scenario files.
std::string to_scenario_text(const ScenarioConfig& cfg);

}  // namespace btsim
