#include <doctest.h>

#include <algorithm>
#include <set>

#include "btsim/tracker.hpp"
#include "btsim/units.hpp"

using namespace btsim;

namespace {

Tracker make_tracker(int sigma = 50) {
  return Tracker(sigma, minutes(30.0), minutes(45.0));
}

}  // namespace

TEST_CASE("tracker: registration lands in the matching list") {
  Tracker t = make_tracker();
  Rng rng(1);
  t.register_peer(0, false, 0.0, rng);
  CHECK(t.not_nated_list() == std::vector<std::int32_t>{0});
  CHECK(t.nated_list().empty());

  t.register_peer(1, true, 1.0, rng);
  CHECK(t.nated_list() == std::vector<std::int32_t>{1});
  CHECK(t.size() == 2);

  CHECK_THROWS(t.register_peer(0, false, 2.0, rng));  // duplicate
}

TEST_CASE("tracker: responses are non-NATed, deduplicated, capped, requester-free") {
  Tracker t = make_tracker(50);
  Rng rng(2);
  for (std::int32_t p = 0; p < 1000; ++p) {
    t.register_peer(p, p >= 700, static_cast<double>(p), rng);  // 300 NATed
  }
  for (int rep = 0; rep < 200; ++rep) {
    const std::int32_t requester = static_cast<std::int32_t>(rep * 3);
    const std::vector<std::int32_t> resp = t.request_peers(requester, rng);
    REQUIRE(resp.size() == 50);
    std::set<std::int32_t> uniq(resp.begin(), resp.end());
    CHECK(uniq.size() == resp.size());
    for (std::int32_t p : resp) {
      CHECK(p != requester);
      CHECK(p < 700);  // never a NATed peer
    }
  }
}

TEST_CASE("tracker: response size is min(sigma, available)") {
  Tracker t = make_tracker(50);
  Rng rng(3);
  // Only the requester registered: empty response.
  t.register_peer(7, false, 0.0, rng);
  CHECK(t.request_peers(7, rng).empty());

  // 30 other non-NATed peers exist: exactly 30 returned.
  for (std::int32_t p = 0; p < 30; ++p) t.register_peer(p, false, 0.0, rng);
  CHECK(t.request_peers(7, rng).size() == 30);

  // NATed registrations never widen the response.
  for (std::int32_t p = 100; p < 140; ++p) t.register_peer(p, true, 0.0, rng);
  CHECK(t.request_peers(7, rng).size() == 30);
}

TEST_CASE("tracker: response sampling is roughly uniform") {
  Tracker t = make_tracker(10);
  Rng rng(4);
  for (std::int32_t p = 0; p < 100; ++p) t.register_peer(p, false, 0.0, rng);
  std::vector<int> hits(100, 0);
  const int reps = 20000;
  for (int rep = 0; rep < reps; ++rep) {
    for (std::int32_t p : t.request_peers(-1, rng)) {
      ++hits[static_cast<std::size_t>(p)];
    }
  }
  for (int h : hits) {  // each expected in 10% of responses
    CHECK(h > 1600);
    CHECK(h < 2400);
  }
}

TEST_CASE("tracker: announce bookkeeping") {
  Tracker t = make_tracker();
  Rng rng(5);
  t.register_peer(0, false, 0.0, rng);
  t.announce(0, 100.0);
  CHECK(t.last_announce(0) == 100.0);
  CHECK_THROWS(t.announce(1, 100.0));  // unknown peer

  t.deregister(0);
  CHECK_THROWS(t.announce(0, 200.0));  // departed peer
}

TEST_CASE("tracker: expiry thresholds") {
  Tracker t = make_tracker();
  Rng rng(6);
  for (std::int32_t p = 0; p < 50; ++p) t.register_peer(p, p % 2, 0.0, rng);

  // Nothing is stale half an hour minus epsilon in.
  CHECK(t.expire_stale(minutes(29.9)).empty());
  CHECK(t.size() == 50);

  // Past 45 minutes of silence everyone has exceeded their threshold.
  const std::vector<std::int32_t> gone = t.expire_stale(minutes(46.0));
  CHECK(gone.size() == 50);
  CHECK(t.size() == 0);
  CHECK(std::is_sorted(gone.begin(), gone.end()));
}

TEST_CASE("tracker: 37 minutes of silence expires at the threshold rate") {
  // Threshold ~ U[30,45], so P(expired at 37 min) = 7/15.
  Rng rng(7);
  int expired = 0;
  const int n = 3000;
  Tracker t = make_tracker();
  for (std::int32_t p = 0; p < n; ++p) t.register_peer(p, false, 0.0, rng);
  expired = static_cast<int>(t.expire_stale(minutes(37.0)).size());
  const double freq = static_cast<double>(expired) / n;
  CHECK(freq == doctest::Approx(7.0 / 15.0).epsilon(0.09));
}

TEST_CASE("tracker: deregister restores the lists") {
  Tracker t = make_tracker();
  Rng rng(8);
  t.register_peer(3, true, 0.0, rng);
  t.register_peer(4, false, 0.0, rng);
  t.deregister(3);
  t.deregister(4);
  CHECK(t.nated_list().empty());
  CHECK(t.not_nated_list().empty());
  CHECK_THROWS(t.deregister(3));  // double deregistration
}
