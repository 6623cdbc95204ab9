#include <doctest.h>

#include "btsim/event_queue.hpp"

using namespace btsim;

TEST_CASE("events: queue orders by time, kind rank, then peer index") {
  EventQueue q;
  q.push({10.0, EventKind::PexGossipDue, 3, 7});
  q.push({10.0, EventKind::PeerArrives, 5, -1});
  q.push({10.0, EventKind::PeerDeparts, 9, -1});
  q.push({10.0, EventKind::PeerArrives, 2, -1});
  q.push({5.0, EventKind::RecontactEligible, 1, -1});
  q.push({10.0, EventKind::AnnounceDue, 0, -1});

  CHECK(q.pop().kind == EventKind::RecontactEligible);  // earliest time
  Event e = q.pop();
  CHECK(e.kind == EventKind::PeerDeparts);  // departures first at equal time
  e = q.pop();
  CHECK(e.kind == EventKind::PeerArrives);
  CHECK(e.subject == 2);  // lower index first within a kind
  e = q.pop();
  CHECK(e.subject == 5);
  CHECK(q.pop().kind == EventKind::AnnounceDue);
  CHECK(q.pop().kind == EventKind::PexGossipDue);
  CHECK(q.empty());
}

TEST_CASE("events: per-edge events tie-break on the partner endpoint") {
  EventQueue q;
  q.push({1.0, EventKind::PexGossipDue, 4, 9});
  q.push({1.0, EventKind::PexGossipDue, 4, 6});
  CHECK(q.pop().partner == 6);
  CHECK(q.pop().partner == 9);
}
