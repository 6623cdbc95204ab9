#pragma once

#include <cstdint>
#include <vector>

namespace btsim {

// Discovery candidates in consumption order. Entries are appended at the
// back and consumed from the front; discard() exists for the rare removal
// of a not-yet-consumed entry.
class CandidateList {
 public:
  bool empty() const { return head_ == items_.size(); }
  std::size_t size() const { return items_.size() - head_; }

  void push_back(std::int32_t k) { items_.push_back(k); }

  std::int32_t pop_front() { return items_[head_++]; }

  bool contains(std::int32_t k) const {
    for (std::size_t i = head_; i < items_.size(); ++i) {
      if (items_[i] == k) return true;
    }
    return false;
  }

  bool discard(std::int32_t k) {
    for (std::size_t i = head_; i < items_.size(); ++i) {
      if (items_[i] == k) {
        items_.erase(items_.begin() + static_cast<std::ptrdiff_t>(i));
        return true;
      }
    }
    return false;
  }

  void clear() {
    items_.clear();
    head_ = 0;
  }

 private:
  std::vector<std::int32_t> items_;
  std::size_t head_ = 0;
};

// Per-peer protocol state. The containers are maintained by the simulation;
// this type only guarantees the local bookkeeping (sorted neighbor set,
// initiator subset, known-peer bitmap).
struct PeerState {
  std::int32_t index = -1;
  bool is_nated = false;
  bool alive = false;
  double arrival_s = 0.0;
  double departure_s = 0.0;
  double last_tracker_request_s = 0.0;
  bool ever_contacted_tracker = false;
  bool recontact_pending = false;  // a RecontactEligible event is in flight

  std::vector<std::int32_t> neighbors;     // ascending
  std::vector<std::int32_t> initiated_to;  // ascending, subset of neighbors
  CandidateList tracker_candidates;        // discovered via the tracker
  CandidateList pex_candidates;            // discovered via gossip

  // Bitmap over all peer indices: self, current neighbors and every pending
  // candidate. A gossiped index is worth storing iff it is not set here.
  std::vector<std::uint64_t> known;

  void init(std::int32_t idx, std::int32_t universe, bool nated, double t);

  int degree() const { return static_cast<int>(neighbors.size()); }
  int outgoing_initiated() const { return static_cast<int>(initiated_to.size()); }

  bool is_neighbor(std::int32_t k) const;
  bool did_initiate(std::int32_t k) const;
  void add_neighbor(std::int32_t k, bool initiated);
  void remove_neighbor(std::int32_t k);

  bool knows(std::int32_t k) const {
    return (known[static_cast<std::size_t>(k) >> 6] >>
            (static_cast<std::size_t>(k) & 63)) & 1u;
  }
  void mark_known(std::int32_t k) {
    known[static_cast<std::size_t>(k) >> 6] |=
        std::uint64_t{1} << (static_cast<std::size_t>(k) & 63);
  }
  void unmark_known(std::int32_t k) {
    known[static_cast<std::size_t>(k) >> 6] &=
        ~(std::uint64_t{1} << (static_cast<std::size_t>(k) & 63));
  }
  // Drops the known bit unless k is still reachable through another source.
  void refresh_known(std::int32_t k);

  // True iff k is a new face: not self, not a neighbor, and in neither
  // candidate list. Gate for inserting gossiped indices into pex_candidates.
  bool pex_candidate_ok(std::int32_t k) const { return !knows(k); }
};

}  // namespace btsim
