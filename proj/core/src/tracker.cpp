#include "btsim/tracker.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace btsim {

namespace {

void insert_sorted(std::vector<std::int32_t>& v, std::int32_t x) {
  v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

}  // namespace

Tracker::Tracker(int return_count, double expiry_lo_s, double expiry_hi_s)
    : return_count_(return_count),
      expiry_lo_s_(expiry_lo_s),
      expiry_hi_s_(expiry_hi_s) {}

Tracker::Entry& Tracker::entry(std::int32_t peer) {
  if (peer < 0) throw std::logic_error("tracker: negative peer index");
  if (entries_.size() <= static_cast<std::size_t>(peer)) {
    entries_.resize(static_cast<std::size_t>(peer) + 1);
  }
  return entries_[static_cast<std::size_t>(peer)];
}

void Tracker::register_peer(std::int32_t peer, bool is_nated, double t,
                            Rng& rng) {
  Entry& e = entry(peer);
  if (e.registered) {
    throw std::logic_error("tracker: duplicate registration of peer " +
                           std::to_string(peer));
  }
  e.registered = true;
  e.nated = is_nated;
  e.registered_at = t;
  e.last_announce = t;
  e.expiry_after = rng.uniform(expiry_lo_s_, expiry_hi_s_);
  insert_sorted(is_nated ? nated_ : not_nated_, peer);
}

std::vector<std::int32_t> Tracker::request_peers(std::int32_t requester,
                                                 Rng& rng) {
  std::vector<std::int32_t> pool;
  pool.reserve(not_nated_.size());
  for (std::int32_t p : not_nated_) {
    if (p != requester) pool.push_back(p);
  }
  return rng.sample(std::move(pool),
                    static_cast<std::size_t>(return_count_));
}

void Tracker::announce(std::int32_t peer, double t) {
  if (!is_registered(peer)) {
    throw std::logic_error("tracker: announce from unregistered peer " +
                           std::to_string(peer));
  }
  entry(peer).last_announce = t;
}

std::vector<std::int32_t> Tracker::expire_stale(double t) {
  std::vector<std::int32_t> expired;
  for (const auto* list : {&nated_, &not_nated_}) {
    for (std::int32_t p : *list) {
      const Entry& e = entries_[static_cast<std::size_t>(p)];
      if (t - e.last_announce > e.expiry_after) expired.push_back(p);
    }
  }
  std::sort(expired.begin(), expired.end());
  for (std::int32_t p : expired) deregister(p);
  return expired;
}

void Tracker::deregister(std::int32_t peer) {
  if (!is_registered(peer)) {
    throw std::logic_error("tracker: deregister of unknown peer " +
                           std::to_string(peer));
  }
  Entry& e = entry(peer);
  e.registered = false;
  erase_from_list(peer, e.nated);
}

void Tracker::erase_from_list(std::int32_t peer, bool nated) {
  std::vector<std::int32_t>& v = nated ? nated_ : not_nated_;
  auto it = std::lower_bound(v.begin(), v.end(), peer);
  v.erase(it);
}

bool Tracker::is_registered(std::int32_t peer) const {
  return peer >= 0 && static_cast<std::size_t>(peer) < entries_.size() &&
         entries_[static_cast<std::size_t>(peer)].registered;
}

double Tracker::last_announce(std::int32_t peer) const {
  if (!is_registered(peer)) {
    throw std::logic_error("tracker: last_announce of unknown peer");
  }
  return entries_[static_cast<std::size_t>(peer)].last_announce;
}

void Tracker::dump_csv(std::ostream& out) const {
  out << "peer,nated,registered_at,last_announce\n";
  for (const auto* list : {&not_nated_, &nated_}) {
    for (std::int32_t p : *list) {
      const Entry& e = entries_[static_cast<std::size_t>(p)];
      out << p << ',' << (e.nated ? 1 : 0) << ',' << e.registered_at << ','
          << e.last_announce << '\n';
    }
  }
}

}  // namespace btsim
