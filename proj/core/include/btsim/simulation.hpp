#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "btsim/config.hpp"
#include "btsim/event_queue.hpp"
#include "btsim/overlay_graph.hpp"
#include "btsim/peer.hpp"
#include "btsim/rng.hpp"
#include "btsim/tracker.hpp"
#include "btsim/workload.hpp"

namespace btsim {

struct EdgeLogEntry {
  double t = 0.0;
  std::int32_t a = -1;  // a < b
  std::int32_t b = -1;
  bool added = true;
};

struct PeerLogEntry {
  double t = 0.0;
  std::int32_t peer = -1;
  bool arrived = true;
};

struct TrackerLogEntry {
  double t = 0.0;
  std::int32_t requester = -1;
  std::vector<std::int32_t> returned;
};

struct SnapshotSeries {
  std::vector<double> times;
  std::vector<OverlayGraph> graphs;

  std::size_t size() const { return times.size(); }
};

struct SimulationResult {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  std::int32_t num_peers_ever = 0;
  std::vector<double> arrival_s;    // planned arrival per peer
  std::vector<double> departure_s;  // processed departure; +inf if never
  std::vector<std::uint8_t> nated;
  SnapshotSeries snapshots;
  std::vector<EdgeLogEntry> edge_log;
  std::vector<PeerLogEntry> peer_log;
  std::vector<TrackerLogEntry> tracker_log;
  double end_time_s = 0.0;

  // Reconstructs the overlay at an arbitrary instant by replaying the event
  // log (state after all events with time <= t). Requires the run to have
  // kept its event log; throws std::out_of_range for t beyond the horizon.
  OverlayGraph snapshot_at(double t) const;
};

struct RunOptions {
  double stop_time_s = std::numeric_limits<double>::infinity();
  bool keep_tracker_log = true;
  // Full structural invariant sweep after every event; test use only.
  bool paranoid_checks = false;
  double expiry_sweep_period_s = 300.0;
};

// The deterministic single-run engine. A run is strictly single threaded;
// independent runs each own their full state and rng.
class Simulation {
 public:
  // Workload-driven mode: arrivals and lifetimes come from the config laws.
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed);

  // Manual mode for protocol-level tests: no scheduled workload, peers are
  // created through spawn_peer() with indices 0..capacity-1 in call order.
  static Simulation manual(const ScenarioConfig& cfg, std::uint64_t seed,
                           std::int32_t capacity);

  // Runs the event loop to quiescence (or options.stop_time_s) and returns
  // the snapshot series plus the event logs.
  SimulationResult run(const RunOptions& options = {});

  // --- protocol operations ------------------------------------------------
  // Arrival handling for an already-initialized peer: tracker round trip,
  // candidate storage, immediate connection fill.
  void join(std::int32_t peer, double t);
  // One connection attempt; preconditions (distinct alive endpoints, no
  // edge, initiator has budget and room) are the caller's contract.
  bool try_connect(std::int32_t initiator, std::int32_t target, double t);
  // Consumes candidates (tracker list first, then PEX) until the outgoing
  // budget or peer set fills or candidates run out.
  void fill_connections(std::int32_t peer, double t);
  // Edge teardown plus replacement attempt and re-contact evaluation.
  void handle_neighbor_departure(std::int32_t peer, std::int32_t departed,
                                 double t);
  // Two-gate re-contact policy: below threshold and past the min interval.
  bool maybe_recontact_tracker(std::int32_t peer, double t);
  // Symmetric neighbor-list gossip over one edge, then both sides may open
  // connections (tracker candidates keep strict priority).
  void pex_exchange(std::int32_t a, std::int32_t b, double t);

  // --- manual stepping ------------------------------------------------------
  // contact_tracker=false registers the peer but skips the tracker round
  // trip and fill, leaving it connectionless (scenario-test scaffolding).
  std::int32_t spawn_peer(double t, bool is_nated, bool contact_tracker = true);
  void depart_peer(std::int32_t peer, double t);

  // --- state access ---------------------------------------------------------
  PeerState& peer(std::int32_t i) { return peers_[static_cast<std::size_t>(i)]; }
  const PeerState& peer(std::int32_t i) const {
    return peers_[static_cast<std::size_t>(i)];
  }
  Tracker& tracker() { return tracker_; }
  Rng& rng() { return rng_; }
  std::int32_t universe() const {
    return static_cast<std::int32_t>(peers_.size());
  }
  const ScenarioConfig& config() const { return cfg_; }
  OverlayGraph graph_snapshot() const;
  std::int32_t alive_count() const { return alive_count_; }

  // Throws std::logic_error on the first violated structural invariant
  // (edge symmetry, caps, initiator subset, liveness, tracker consistency).
  void check_invariants() const;

 private:
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed, bool manual,
             std::int32_t capacity);

  void handle_arrival(std::int32_t peer, double t);
  void handle_departure(std::int32_t peer, double t);
  void add_edge(std::int32_t initiator, std::int32_t target, double t);
  void remove_edge(std::int32_t a, std::int32_t b, double t);
  void store_tracker_response(std::int32_t peer,
                              const std::vector<std::int32_t>& returned);
  void request_from_tracker(std::int32_t peer, double t);
  void schedule_recontact_if_needed(std::int32_t peer, double t);
  void schedule_pex_exchange(std::int32_t a, std::int32_t b, double when);
  static std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  ScenarioConfig cfg_;
  std::uint64_t seed_;
  Rng rng_;
  Tracker tracker_;
  EventQueue queue_;
  std::vector<PeerState> peers_;
  std::vector<double> planned_arrivals_;
  std::int32_t next_manual_index_ = 0;
  bool manual_mode_ = false;
  std::int32_t alive_count_ = 0;
  std::int32_t pending_arrivals_ = 0;
  // Next due time per live edge; stale gossip events are dropped on fire.
  std::unordered_map<std::uint64_t, double> pex_next_due_;

  bool log_edges_ = true;
  bool log_tracker_ = true;
  std::vector<EdgeLogEntry> edge_log_;
  std::vector<PeerLogEntry> peer_log_;
  std::vector<TrackerLogEntry> tracker_log_;
};

// Convenience wrappers over Simulation::run.
SimulationResult run_scenario(const ScenarioConfig& cfg, std::uint64_t seed,
                              const RunOptions& options = {});
SimulationResult run_scenario(const ScenarioConfig& cfg);

// Per-peer protocol state at a snapshot instant:
// index, nated, degree, outgoing_initiated, tracker/PEX candidate counts.
void dump_peer_state_csv(const Simulation& sim, std::ostream& out);

}  // namespace btsim
