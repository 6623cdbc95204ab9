#pragma once

#include <cstdint>
#include <queue>
#include <tuple>
#include <vector>

namespace btsim {

// Enumerator order doubles as the tie-break rank for simultaneous events:
// departures < arrivals < announces < expiry sweeps < PEX gossip < recontact.
enum class EventKind : std::uint8_t {
  PeerDeparts = 0,
  PeerArrives,
  AnnounceDue,
  TrackerExpirySweep,
  PexGossipDue,
  RecontactEligible,
};

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::PeerArrives;
  std::int32_t subject = -1;  // peer index; -1 for global events
  std::int32_t partner = -1;  // second endpoint for per-edge events

  friend bool operator>(const Event& a, const Event& b) {
    return std::tie(a.time, a.kind, a.subject, a.partner) >
           std::tie(b.time, b.kind, b.subject, b.partner);
  }
};

// Min-heap over the (time, kind rank, subject, partner) total order, so runs
// with equal seeds replay the exact same event sequence.
class EventQueue {
 public:
  void push(const Event& e) { heap_.push(e); }
  const Event& top() const { return heap_.top(); }
  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
  }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  std::priority_queue<Event, std::vector<Event>, std::greater<>> heap_;
};

}  // namespace btsim
