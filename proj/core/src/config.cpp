#include "btsim/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace btsim {

namespace {

void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail("config key '" + key + "': expected a number, got '" + v + "'");
  }
  return 0;  // unreachable
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    fail("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return 0;  // unreachable
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail("config key '" + key + "': expected a boolean, got '" + v + "'");
  return false;  // unreachable
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

// Mutable views of the law variants; setting a key for a law of the other
// kind switches the variant to that kind first (defaults filled in).
ExponentialSlots& as_exponential(ScenarioConfig& cfg) {
  if (!std::holds_alternative<ExponentialSlots>(cfg.arrival_law)) {
    cfg.arrival_law = ExponentialSlots{};
  }
  return std::get<ExponentialSlots>(cfg.arrival_law);
}

ExplicitSchedule& as_explicit(ScenarioConfig& cfg) {
  if (!std::holds_alternative<ExplicitSchedule>(cfg.arrival_law)) {
    cfg.arrival_law = ExplicitSchedule{};
  }
  return std::get<ExplicitSchedule>(cfg.arrival_law);
}

UniformMinutes& as_uniform_minutes(ScenarioConfig& cfg) {
  if (!std::holds_alternative<UniformMinutes>(cfg.lifetime_law)) {
    cfg.lifetime_law = UniformMinutes{};
  }
  return std::get<UniformMinutes>(cfg.lifetime_law);
}

UniformWindow& as_uniform_window(ScenarioConfig& cfg) {
  if (!std::holds_alternative<UniformWindow>(cfg.lifetime_law)) {
    cfg.lifetime_law = UniformWindow{};
  }
  return std::get<UniformWindow>(cfg.lifetime_law);
}

void set_key(ScenarioConfig& cfg, const std::string& section,
             const std::string& key, const std::string& value) {
  const std::string dotted = section + "." + key;
  if (section == "scenario") {
    if (key == "max_peer_set") {
      cfg.max_peer_set = static_cast<int>(parse_int(dotted, value));
    } else if (key == "max_outgoing") {
      cfg.max_outgoing = static_cast<int>(parse_int(dotted, value));
    } else if (key == "tracker_return_count") {
      cfg.tracker_return_count = static_cast<int>(parse_int(dotted, value));
    } else if (key == "recontact_threshold") {
      cfg.recontact_threshold = static_cast<int>(parse_int(dotted, value));
    } else if (key == "recontact_min_interval_s") {
      cfg.recontact_min_interval_s = parse_double(dotted, value);
    } else if (key == "announce_enabled") {
      cfg.announce_enabled = parse_bool(dotted, value);
    } else if (key == "announce_interval_min") {
      cfg.announce_interval_s = minutes(parse_double(dotted, value));
    } else if (key == "announce_expiry_lo_min") {
      cfg.announce_expiry_lo_s = minutes(parse_double(dotted, value));
    } else if (key == "announce_expiry_hi_min") {
      cfg.announce_expiry_hi_s = minutes(parse_double(dotted, value));
    } else if (key == "nat_fraction") {
      cfg.nat_fraction = parse_double(dotted, value);
    } else if (key == "pex_enabled") {
      cfg.pex_enabled = parse_bool(dotted, value);
    } else if (key == "pex_period_min") {
      cfg.pex_period_s = minutes(parse_double(dotted, value));
    } else if (key == "allow_nated_pex_targets") {
      cfg.allow_nated_pex_targets = parse_bool(dotted, value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(dotted, value));
    } else if (key == "runs") {
      cfg.runs = static_cast<int>(parse_int(dotted, value));
    } else if (key == "snapshot_interval_s") {
      cfg.snapshot_interval_s = parse_double(dotted, value);
    } else {
      fail("unknown config key '" + dotted + "'");
    }
  } else if (section == "arrivals") {
    if (key == "law") {
      if (value == "exponential_slots") {
        as_exponential(cfg);
      } else if (value == "explicit") {
        as_explicit(cfg);
      } else {
        fail("arrivals.law: unknown law '" + value + "'");
      }
    } else if (key == "amplitude") {
      as_exponential(cfg).amplitude = parse_double(dotted, value);
    } else if (key == "rate") {
      as_exponential(cfg).rate = parse_double(dotted, value);
    } else if (key == "slot_minutes") {
      as_exponential(cfg).slot_minutes = parse_double(dotted, value);
    } else if (key == "num_slots") {
      as_exponential(cfg).num_slots = static_cast<int>(parse_int(dotted, value));
    } else if (key == "times_s") {
      as_explicit(cfg).times_s = parse_double_list(dotted, value);
    } else {
      fail("unknown config key '" + dotted + "'");
    }
  } else if (section == "lifetimes") {
    if (key == "law") {
      if (value == "uniform_minutes") {
        as_uniform_minutes(cfg);
      } else if (value == "uniform_window") {
        as_uniform_window(cfg);
      } else {
        fail("lifetimes.law: unknown law '" + value + "'");
      }
    } else if (key == "lo_min") {
      as_uniform_minutes(cfg).lo_min = parse_double(dotted, value);
    } else if (key == "hi_min") {
      as_uniform_minutes(cfg).hi_min = parse_double(dotted, value);
    } else if (key == "window_start_min") {
      as_uniform_window(cfg).start_s = minutes(parse_double(dotted, value));
    } else if (key == "window_end_min") {
      as_uniform_window(cfg).end_s = minutes(parse_double(dotted, value));
    } else {
      fail("unknown config key '" + dotted + "'");
    }
  } else {
    fail("unknown config section '" + section + "'");
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  if (max_peer_set <= 0) fail("max_peer_set must be positive");
  if (max_outgoing <= 0 || max_outgoing > max_peer_set) {
    fail("max_outgoing must satisfy 0 < max_outgoing <= max_peer_set");
  }
  if (recontact_threshold <= 0 || recontact_threshold > max_peer_set) {
    fail("recontact_threshold must satisfy 0 < threshold <= max_peer_set");
  }
  if (tracker_return_count <= 0) fail("tracker_return_count must be positive");
  if (nat_fraction < 0.0 || nat_fraction > 1.0) {
    fail("nat_fraction must be in [0, 1]");
  }
  if (recontact_min_interval_s < 0.0) {
    fail("recontact_min_interval_s must be nonnegative");
  }
  if (announce_interval_s <= 0.0) fail("announce_interval_min must be positive");
  if (announce_expiry_lo_s > announce_expiry_hi_s) {
    fail("announce expiry range must satisfy lo <= hi");
  }
  if (pex_period_s <= 0.0) fail("pex_period_min must be positive");
  if (snapshot_interval_s <= 0.0) fail("snapshot_interval_s must be positive");
  if (runs <= 0) fail("runs must be positive");

  if (const auto* e = std::get_if<ExponentialSlots>(&arrival_law)) {
    if (e->amplitude <= 0.0) fail("arrivals.amplitude must be positive");
    if (e->rate <= 0.0) fail("arrivals.rate must be positive");
    if (e->num_slots < 1) fail("arrivals.num_slots must be >= 1");
    if (e->slot_minutes <= 0.0) fail("arrivals.slot_minutes must be positive");
  } else {
    const auto& times = std::get<ExplicitSchedule>(arrival_law).times_s;
    for (double t : times) {
      if (t < 0.0) fail("arrivals.times_s must be nonnegative");
    }
  }

  if (const auto* u = std::get_if<UniformMinutes>(&lifetime_law)) {
    if (u->lo_min < 0.0 || u->lo_min > u->hi_min) {
      fail("lifetimes must satisfy 0 <= lo_min <= hi_min");
    }
  } else {
    const auto& w = std::get<UniformWindow>(lifetime_law);
    if (w.start_s > w.end_s) {
      fail("lifetime window must satisfy window_start <= window_end");
    }
  }
}

ScenarioConfig parse_scenario_text(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section = "scenario";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::runtime_error("scenario file line " + std::to_string(lineno) +
                                 ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("scenario file line " + std::to_string(lineno) +
                               ": expected key = value");
    }
    set_key(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario_text(ss.str());
}

void apply_override(ScenarioConfig& cfg, const std::string& dotted_key,
                    const std::string& value) {
  std::size_t dot = dotted_key.find('.');
  if (dot == std::string::npos) {
    set_key(cfg, "scenario", dotted_key, value);
  } else {
    set_key(cfg, dotted_key.substr(0, dot), dotted_key.substr(dot + 1), value);
  }
}

std::string to_scenario_text(const ScenarioConfig& cfg) {
  std::ostringstream o;
  o.precision(17);
  o << "[scenario]\n";
  o << "max_peer_set = " << cfg.max_peer_set << "\n";
  o << "max_outgoing = " << cfg.max_outgoing << "\n";
  o << "tracker_return_count = " << cfg.tracker_return_count << "\n";
  o << "recontact_threshold = " << cfg.recontact_threshold << "\n";
  o << "recontact_min_interval_s = " << cfg.recontact_min_interval_s << "\n";
  o << "announce_enabled = " << (cfg.announce_enabled ? "true" : "false") << "\n";
  o << "announce_interval_min = " << cfg.announce_interval_s / kSecondsPerMinute << "\n";
  o << "announce_expiry_lo_min = " << cfg.announce_expiry_lo_s / kSecondsPerMinute << "\n";
  o << "announce_expiry_hi_min = " << cfg.announce_expiry_hi_s / kSecondsPerMinute << "\n";
  o << "nat_fraction = " << cfg.nat_fraction << "\n";
  o << "pex_enabled = " << (cfg.pex_enabled ? "true" : "false") << "\n";
  o << "pex_period_min = " << cfg.pex_period_s / kSecondsPerMinute << "\n";
  o << "allow_nated_pex_targets = " << (cfg.allow_nated_pex_targets ? "true" : "false") << "\n";
  o << "seed = " << cfg.seed << "\n";
  o << "runs = " << cfg.runs << "\n";
  o << "snapshot_interval_s = " << cfg.snapshot_interval_s << "\n";
  o << "[arrivals]\n";
  if (const auto* e = std::get_if<ExponentialSlots>(&cfg.arrival_law)) {
    o << "law = exponential_slots\n";
    o << "amplitude = " << e->amplitude << "\n";
    o << "rate = " << e->rate << "\n";
    o << "slot_minutes = " << e->slot_minutes << "\n";
    o << "num_slots = " << e->num_slots << "\n";
  } else {
    const auto& x = std::get<ExplicitSchedule>(cfg.arrival_law);
    o << "law = explicit\n";
    o << "times_s = ";
    for (std::size_t i = 0; i < x.times_s.size(); ++i) {
      if (i) o << ", ";
      o << x.times_s[i];
    }
    o << "\n";
  }
  o << "[lifetimes]\n";
  if (const auto* u = std::get_if<UniformMinutes>(&cfg.lifetime_law)) {
    o << "law = uniform_minutes\n";
    o << "lo_min = " << u->lo_min << "\n";
    o << "hi_min = " << u->hi_min << "\n";
  } else {
    const auto& w = std::get<UniformWindow>(cfg.lifetime_law);
    o << "law = uniform_window\n";
    o << "window_start_min = " << w.start_s / kSecondsPerMinute << "\n";
    o << "window_end_min = " << w.end_s / kSecondsPerMinute << "\n";
  }
  return o.str();
}

}  // namespace btsim
