#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "btsim/rng.hpp"

namespace btsim {

// The central rendezvous point. Registered peers are split into a NATed and
// a non-NATed list; peer-list responses are drawn from the non-NATed list
// only, even when that makes the response empty.
class Tracker {
 public:
  Tracker(int return_count, double expiry_lo_s, double expiry_hi_s);

  // Adds the peer to the matching list and stamps its first announce. The
  // per-peer expiry threshold is drawn once here, from U[lo, hi].
  // Throws std::logic_error on duplicate registration.
  void register_peer(std::int32_t peer, bool is_nated, double t, Rng& rng);

  // Uniform sample without replacement from the non-NATed list minus the
  // requester, of size min(return_count, available). An empty response is
  // valid. The requester itself need not be registered yet.
  std::vector<std::int32_t> request_peers(std::int32_t requester, Rng& rng);

  // Keep-alive report. Throws std::logic_error for an unregistered peer.
  void announce(std::int32_t peer, double t);

  // Drops every peer whose silence exceeds its own expiry threshold and
  // returns them in ascending order.
  std::vector<std::int32_t> expire_stale(double t);

  // Removes a departed peer. Throws std::logic_error if unknown.
  void deregister(std::int32_t peer);

  bool is_registered(std::int32_t peer) const;
  double last_announce(std::int32_t peer) const;
  std::size_t size() const { return nated_.size() + not_nated_.size(); }
  const std::vector<std::int32_t>& nated_list() const { return nated_; }
  const std::vector<std::int32_t>& not_nated_list() const { return not_nated_; }

  // Debug dump: peer index, nated flag, registration time, last announce.
  void dump_csv(std::ostream& out) const;

 private:
  struct Entry {
    double registered_at = 0.0;
    double last_announce = 0.0;
    double expiry_after = 0.0;  // silence tolerated before expiry
    bool nated = false;
    bool registered = false;
  };

  Entry& entry(std::int32_t peer);
  void erase_from_list(std::int32_t peer, bool nated);

  int return_count_;
  double expiry_lo_s_;
  double expiry_hi_s_;
  std::vector<std::int32_t> nated_;      // ascending
  std::vector<std::int32_t> not_nated_;  // ascending
  std::vector<Entry> entries_;           // indexed by peer
};

}  // namespace btsim
