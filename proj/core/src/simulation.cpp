#include "btsim/simulation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace btsim {

OverlayGraph SimulationResult::snapshot_at(double t) const {
  if (t > end_time_s) {
    throw std::out_of_range("snapshot_at: t beyond the simulated horizon");
  }
  OverlayGraph g;
  g.num_peers_ever = num_peers_ever;
  g.alive.assign(static_cast<std::size_t>(num_peers_ever), 0);
  for (std::int32_t i = 0; i < num_peers_ever; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    if (arrival_s[idx] <= t && departure_s[idx] > t) g.alive[idx] = 1;
  }
  // Replay in log order; add/remove entries for one edge alternate, so the
  // open set is whatever survives the prefix.
  std::unordered_map<std::uint64_t, bool> open;
  for (const EdgeLogEntry& e : edge_log) {
    if (e.t > t) break;
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.a)) << 32) |
        static_cast<std::uint32_t>(e.b);
    if (e.added) {
      open.emplace(key, true);
    } else {
      open.erase(key);
    }
  }
  g.edges.reserve(open.size());
  for (const auto& [key, _] : open) {
    g.edges.emplace_back(static_cast<std::int32_t>(key >> 32),
                         static_cast<std::int32_t>(key & 0xffffffffu));
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed)
    : Simulation(cfg, seed, false, 0) {}

Simulation Simulation::manual(const ScenarioConfig& cfg, std::uint64_t seed,
                              std::int32_t capacity) {
  return Simulation(cfg, seed, true, capacity);
}

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed,
                       bool manual, std::int32_t capacity)
    : cfg_(cfg),
      seed_(seed),
      rng_(seed),
      tracker_(cfg.tracker_return_count, cfg.announce_expiry_lo_s,
               cfg.announce_expiry_hi_s),
      manual_mode_(manual) {
  cfg_.validate();
  if (manual) {
    peers_.resize(static_cast<std::size_t>(capacity));
  } else {
    planned_arrivals_ = schedule_arrivals(cfg_.arrival_law, rng_);
    peers_.resize(planned_arrivals_.size());
    pending_arrivals_ = static_cast<std::int32_t>(planned_arrivals_.size());
    for (std::size_t i = 0; i < planned_arrivals_.size(); ++i) {
      queue_.push({planned_arrivals_[i], EventKind::PeerArrives,
                   static_cast<std::int32_t>(i), -1});
    }
  }
}

SimulationResult Simulation::run(const RunOptions& options) {
  if (manual_mode_) {
    throw std::logic_error("run() is not available in manual mode");
  }
  log_tracker_ = options.keep_tracker_log;

  SimulationResult result;
  result.config = cfg_;
  result.seed = seed_;
  result.num_peers_ever = universe();
  result.arrival_s = planned_arrivals_;
  result.departure_s.assign(peers_.size(),
                            std::numeric_limits<double>::infinity());
  result.nated.assign(peers_.size(), 0);

  if (cfg_.announce_enabled && !queue_.empty()) {
    queue_.push({queue_.top().time + options.expiry_sweep_period_s,
                 EventKind::TrackerExpirySweep, -1, -1});
  }

  double next_snapshot = 0.0;
  double now = 0.0;
  bool processed_any = false;
  while (!queue_.empty()) {
    const Event ev = queue_.pop();
    if (ev.time > options.stop_time_s) {
      now = options.stop_time_s;
      break;
    }
    while (next_snapshot < ev.time) {
      if (processed_any) {
        result.snapshots.times.push_back(next_snapshot);
        result.snapshots.graphs.push_back(graph_snapshot());
      }
      next_snapshot += cfg_.snapshot_interval_s;
    }
    now = ev.time;
    processed_any = true;
#ifdef BTSIM_TRACE_EVENTS
    {
      static long btsim_event_count = 0;
      if (++btsim_event_count % 100000 == 0) {
        std::fprintf(stderr, "[trace] %ld events, t=%.3f kind=%d subject=%d queue=%zu\n",
                     btsim_event_count, ev.time, static_cast<int>(ev.kind),
                     ev.subject, queue_.size());
      }
    }
#endif
    switch (ev.kind) {
      case EventKind::PeerArrives:
        handle_arrival(ev.subject, ev.time);
        break;
      case EventKind::PeerDeparts:
        handle_departure(ev.subject, ev.time);
        result.departure_s[static_cast<std::size_t>(ev.subject)] = ev.time;
        break;
      case EventKind::AnnounceDue: {
        const PeerState& p = peer(ev.subject);
        if (p.alive && tracker_.is_registered(ev.subject)) {
          tracker_.announce(ev.subject, ev.time);
          queue_.push({ev.time + cfg_.announce_interval_s,
                       EventKind::AnnounceDue, ev.subject, -1});
        }
        break;
      }
      case EventKind::TrackerExpirySweep:
        tracker_.expire_stale(ev.time);
        if (pending_arrivals_ > 0 || tracker_.size() > 0) {
          queue_.push({ev.time + options.expiry_sweep_period_s,
                       EventKind::TrackerExpirySweep, -1, -1});
        }
        break;
      case EventKind::PexGossipDue: {
        auto it = pex_next_due_.find(edge_key(ev.subject, ev.partner));
        if (it == pex_next_due_.end() || it->second != ev.time) break;
        if (!peer(ev.subject).alive || !peer(ev.partner).alive ||
            !peer(ev.subject).is_neighbor(ev.partner)) {
          pex_next_due_.erase(it);
          break;
        }
        pex_exchange(ev.subject, ev.partner, ev.time);
        if (peer(ev.subject).is_neighbor(ev.partner)) {
          it->second = ev.time + cfg_.pex_period_s;
          queue_.push({it->second, EventKind::PexGossipDue, ev.subject,
                       ev.partner});
        }
        break;
      }
      case EventKind::RecontactEligible: {
        PeerState& p = peer(ev.subject);
        p.recontact_pending = false;
        if (!p.alive) break;
        maybe_recontact_tracker(ev.subject, ev.time);
        schedule_recontact_if_needed(ev.subject, ev.time);
        break;
      }
    }
    if (options.paranoid_checks) check_invariants();
  }

  result.end_time_s = now;
  while (processed_any && next_snapshot <= now) {
    result.snapshots.times.push_back(next_snapshot);
    result.snapshots.graphs.push_back(graph_snapshot());
    next_snapshot += cfg_.snapshot_interval_s;
  }
  for (std::size_t i = 0; i < peers_.size(); ++i) {
    result.nated[i] = peers_[i].is_nated ? 1 : 0;
  }
  result.edge_log = std::move(edge_log_);
  if (log_tracker_) result.tracker_log = std::move(tracker_log_);
  // Peer log mirrors arrivals/departures that actually happened.
  for (std::size_t i = 0; i < peers_.size(); ++i) {
    if (peers_[i].index < 0) continue;  // arrival never processed
    result.peer_log.push_back(
        {peers_[i].arrival_s, static_cast<std::int32_t>(i), true});
    if (!peers_[i].alive) {
      result.peer_log.push_back(
          {peers_[i].departure_s, static_cast<std::int32_t>(i), false});
    }
  }
  std::sort(result.peer_log.begin(), result.peer_log.end(),
            [](const PeerLogEntry& a, const PeerLogEntry& b) {
              return a.t < b.t || (a.t == b.t && a.peer < b.peer);
            });
  return result;
}

void Simulation::handle_arrival(std::int32_t idx, double t) {
  --pending_arrivals_;
  PeerState& p = peer(idx);
  const bool nated = rng_.bernoulli(cfg_.nat_fraction);
  p.init(idx, universe(), nated, t);
  ++alive_count_;
  const double departure =
      std::max(t, draw_lifetime(cfg_.lifetime_law, t, rng_));
  p.departure_s = departure;
  queue_.push({departure, EventKind::PeerDeparts, idx, -1});
  if (cfg_.announce_enabled) {
    queue_.push({t + cfg_.announce_interval_s, EventKind::AnnounceDue, idx, -1});
  }
  join(idx, t);
}

void Simulation::join(std::int32_t idx, double t) {
  PeerState& p = peer(idx);
  // The tracker answers from the peers that exist before this registration.
  const std::vector<std::int32_t> returned = tracker_.request_peers(idx, rng_);
  tracker_.register_peer(idx, p.is_nated, t, rng_);
  p.last_tracker_request_s = t;
  p.ever_contacted_tracker = true;
  if (log_tracker_) tracker_log_.push_back({t, idx, returned});
  store_tracker_response(idx, returned);
  fill_connections(idx, t);
  schedule_recontact_if_needed(idx, t);
}

void Simulation::store_tracker_response(
    std::int32_t idx, const std::vector<std::int32_t>& returned) {
  PeerState& p = peer(idx);
  for (std::int32_t k : returned) {
    if (p.knows(k)) continue;  // already a neighbor or pending candidate
    p.tracker_candidates.push_back(k);
    p.mark_known(k);
  }
}

bool Simulation::try_connect(std::int32_t initiator, std::int32_t target,
                             double t) {
  PeerState& from = peer(initiator);
  PeerState& to = peer(target);
  assert(initiator != target);
  assert(from.alive && to.alive);
  assert(!from.is_neighbor(target));
  assert(from.outgoing_initiated() < cfg_.max_outgoing);
  assert(from.degree() < cfg_.max_peer_set);
  if (to.is_nated && !cfg_.allow_nated_pex_targets) {
    return false;  // NATed peers cannot accept unsolicited connections
  }
  if (to.degree() >= cfg_.max_peer_set) {
    return false;
  }
  add_edge(initiator, target, t);
  return true;
}

void Simulation::add_edge(std::int32_t initiator, std::int32_t target,
                          double t) {
  peer(initiator).add_neighbor(target, true);
  peer(target).add_neighbor(initiator, false);
  const std::int32_t a = std::min(initiator, target);
  const std::int32_t b = std::max(initiator, target);
  if (log_edges_) edge_log_.push_back({t, a, b, true});
  if (cfg_.pex_enabled) {
    // First exchange fires immediately after the edge appears, then the
    // per-edge timer repeats it every period.
    schedule_pex_exchange(a, b, t);
  }
}

void Simulation::remove_edge(std::int32_t a, std::int32_t b, double t) {
  peer(a).remove_neighbor(b);
  peer(b).remove_neighbor(a);
  const std::int32_t lo = std::min(a, b);
  const std::int32_t hi = std::max(a, b);
  if (log_edges_) edge_log_.push_back({t, lo, hi, false});
  if (cfg_.pex_enabled) pex_next_due_.erase(edge_key(lo, hi));
}

void Simulation::schedule_pex_exchange(std::int32_t a, std::int32_t b,
                                       double when) {
  pex_next_due_[edge_key(a, b)] = when;
  queue_.push({when, EventKind::PexGossipDue, a, b});
}

void Simulation::fill_connections(std::int32_t idx, double t) {
  PeerState& p = peer(idx);
  while (p.outgoing_initiated() < cfg_.max_outgoing &&
         p.degree() < cfg_.max_peer_set) {
    std::int32_t k;
    if (!p.tracker_candidates.empty()) {
      k = p.tracker_candidates.pop_front();
    } else if (cfg_.pex_enabled && !p.pex_candidates.empty()) {
      k = p.pex_candidates.pop_front();
    } else {
      break;
    }
    p.refresh_known(k);
    if (!peer(k).alive || p.is_neighbor(k)) continue;
    try_connect(idx, k, t);  // the candidate is consumed either way
  }
}

void Simulation::handle_neighbor_departure(std::int32_t idx,
                                           std::int32_t departed, double t) {
  PeerState& p = peer(idx);
  assert(p.is_neighbor(departed));
  remove_edge(idx, departed, t);
  if (p.outgoing_initiated() < cfg_.max_outgoing) {
    fill_connections(idx, t);
  }
  maybe_recontact_tracker(idx, t);
  schedule_recontact_if_needed(idx, t);
}

bool Simulation::maybe_recontact_tracker(std::int32_t idx, double t) {
  PeerState& p = peer(idx);
  if (p.degree() >= cfg_.recontact_threshold) return false;
  // Same expression the scheduler uses for the eligibility instant, so an
  // event firing exactly then is never gated out by rounding.
  if (t < p.last_tracker_request_s + cfg_.recontact_min_interval_s) {
    return false;
  }
  request_from_tracker(idx, t);
  return true;
}

void Simulation::request_from_tracker(std::int32_t idx, double t) {
  PeerState& p = peer(idx);
  // A long-silent peer may have been expired; contacting the tracker
  // re-registers it (only reachable with announces disabled).
  if (!tracker_.is_registered(idx)) {
    tracker_.register_peer(idx, p.is_nated, t, rng_);
  }
  const std::vector<std::int32_t> returned = tracker_.request_peers(idx, rng_);
  p.last_tracker_request_s = t;
  if (log_tracker_) tracker_log_.push_back({t, idx, returned});
  store_tracker_response(idx, returned);
  fill_connections(idx, t);
}

void Simulation::schedule_recontact_if_needed(std::int32_t idx, double t) {
  PeerState& p = peer(idx);
  if (!p.alive || p.recontact_pending) return;
  if (p.degree() >= cfg_.recontact_threshold) return;
  const double when =
      std::max(t, p.last_tracker_request_s + cfg_.recontact_min_interval_s);
  p.recontact_pending = true;
  queue_.push({when, EventKind::RecontactEligible, idx, -1});
}

void Simulation::pex_exchange(std::int32_t a, std::int32_t b, double t) {
  PeerState& pa = peer(a);
  PeerState& pb = peer(b);
  assert(cfg_.pex_enabled);
  assert(pa.alive && pb.alive && pa.is_neighbor(b));
  // Both lists are snapshotted before any insertion so the exchange is
  // symmetric regardless of processing order.
  const std::vector<std::int32_t> from_a = pa.neighbors;
  const std::vector<std::int32_t> from_b = pb.neighbors;
  for (std::int32_t k : from_b) {
    if (pa.pex_candidate_ok(k)) {
      pa.pex_candidates.push_back(k);
      pa.mark_known(k);
    }
  }
  for (std::int32_t k : from_a) {
    if (pb.pex_candidate_ok(k)) {
      pb.pex_candidates.push_back(k);
      pb.mark_known(k);
    }
  }
  fill_connections(a, t);
  fill_connections(b, t);
}

std::int32_t Simulation::spawn_peer(double t, bool is_nated,
                                    bool contact_tracker) {
  if (!manual_mode_) {
    throw std::logic_error("spawn_peer requires manual mode");
  }
  if (next_manual_index_ >= universe()) {
    throw std::logic_error("spawn_peer: capacity exhausted");
  }
  const std::int32_t idx = next_manual_index_++;
  PeerState& p = peer(idx);
  p.init(idx, universe(), is_nated, t);
  p.departure_s = std::numeric_limits<double>::infinity();
  ++alive_count_;
  if (contact_tracker) {
    join(idx, t);
  } else {
    tracker_.register_peer(idx, is_nated, t, rng_);
  }
  return idx;
}

void Simulation::depart_peer(std::int32_t idx, double t) {
  handle_departure(idx, t);
}

void Simulation::handle_departure(std::int32_t idx, double t) {
  PeerState& p = peer(idx);
  assert(p.alive);
  p.alive = false;
  p.departure_s = t;
  --alive_count_;
  if (tracker_.is_registered(idx)) tracker_.deregister(idx);
  p.tracker_candidates.clear();
  p.pex_candidates.clear();
  const std::vector<std::int32_t> lost = p.neighbors;
  for (std::int32_t nb : lost) {
    handle_neighbor_departure(nb, idx, t);
  }
}

OverlayGraph Simulation::graph_snapshot() const {
  OverlayGraph g;
  g.num_peers_ever = universe();
  g.alive.assign(peers_.size(), 0);
  for (std::size_t i = 0; i < peers_.size(); ++i) {
    if (peers_[i].alive) g.alive[i] = 1;
  }
  for (std::size_t i = 0; i < peers_.size(); ++i) {
    for (std::int32_t q : peers_[i].neighbors) {
      if (q > static_cast<std::int32_t>(i)) {
        g.edges.emplace_back(static_cast<std::int32_t>(i), q);
      }
    }
  }
  return g;
}

void Simulation::check_invariants() const {
  std::size_t degree_sum = 0;
  std::size_t edge_count = 0;
  for (std::size_t i = 0; i < peers_.size(); ++i) {
    const PeerState& p = peers_[i];
    if (p.index < 0) continue;  // never arrived
    if (p.degree() > cfg_.max_peer_set) {
      throw std::logic_error("peer " + std::to_string(i) + " over peer set cap");
    }
    if (p.outgoing_initiated() > cfg_.max_outgoing) {
      throw std::logic_error("peer " + std::to_string(i) + " over outgoing cap");
    }
    if (!p.alive && p.degree() != 0) {
      throw std::logic_error("departed peer " + std::to_string(i) +
                             " still has neighbors");
    }
    for (std::int32_t q : p.initiated_to) {
      if (!p.is_neighbor(q)) {
        throw std::logic_error("initiated_to not a subset of neighbors");
      }
    }
    for (std::int32_t q : p.neighbors) {
      const PeerState& other = peers_[static_cast<std::size_t>(q)];
      if (!other.alive) {
        throw std::logic_error("edge to departed peer " + std::to_string(q));
      }
      if (!other.is_neighbor(static_cast<std::int32_t>(i))) {
        throw std::logic_error("asymmetric edge " + std::to_string(i) + "-" +
                               std::to_string(q));
      }
      ++degree_sum;
      if (q > static_cast<std::int32_t>(i)) ++edge_count;
    }
    // With announces on, registration tracks liveness exactly.
    if (p.alive && cfg_.announce_enabled && !tracker_.is_registered(p.index)) {
      throw std::logic_error("alive peer " + std::to_string(i) +
                             " not registered");
    }
  }
  if (degree_sum != 2 * edge_count) {
    throw std::logic_error("degree sum does not equal twice the edge count");
  }
  if (tracker_.size() >
      static_cast<std::size_t>(alive_count_)) {
    throw std::logic_error("tracker holds more peers than are alive");
  }
}

SimulationResult run_scenario(const ScenarioConfig& cfg, std::uint64_t seed,
                              const RunOptions& options) {
  Simulation sim(cfg, seed);
  return sim.run(options);
}

SimulationResult run_scenario(const ScenarioConfig& cfg) {
  return run_scenario(cfg, cfg.seed);
}

void dump_peer_state_csv(const Simulation& sim, std::ostream& out) {
  out << "index,nated,degree,outgoing_initiated,tracker_candidates,"
         "pex_candidates\n";
  for (std::int32_t i = 0; i < sim.universe(); ++i) {
    const PeerState& p = sim.peer(i);
    if (p.index < 0 || !p.alive) continue;
    out << i << ',' << (p.is_nated ? 1 : 0) << ',' << p.degree() << ','
        << p.outgoing_initiated() << ',' << p.tracker_candidates.size() << ','
        << p.pex_candidates.size() << '\n';
  }
}

}  // namespace btsim
