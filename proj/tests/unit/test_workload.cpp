#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "btsim/workload.hpp"

using namespace btsim;

TEST_CASE("workload: slot counts match the closed form exactly") {
  // Flagship torrent: 1000 * exp(-0.7 * (i-1)), ceil'd per slot.
  const std::vector<long> flagship =
      slot_arrival_counts(ExponentialSlots{1000.0, 0.7, 10.0, 4});
  CHECK(flagship == std::vector<long>{1000, 497, 247, 123});
  long total = 0;
  for (long c : flagship) total += c;
  CHECK(total == 1867);

  // Scaled amplitudes reproduce the two larger reference torrents.
  const std::vector<long> mid =
      slot_arrival_counts(ExponentialSlots{3000.0, 0.7, 10.0, 4});
  CHECK(std::accumulate(mid.begin(), mid.end(), 0L) == 5598);
  const std::vector<long> big =
      slot_arrival_counts(ExponentialSlots{5000.0, 0.7, 10.0, 4});
  CHECK(std::accumulate(big.begin(), big.end(), 0L) == 9329);

  // Single-peer degenerate law.
  CHECK(slot_arrival_counts(ExponentialSlots{1.0, 0.9, 10.0, 1}) ==
        std::vector<long>{1});

  // The six-slot PEX workload sums to exactly 1000.
  const std::vector<long> pex =
      slot_arrival_counts(ExponentialSlots{509.7, 0.7, 10.0, 6});
  CHECK(std::accumulate(pex.begin(), pex.end(), 0L) == 1000);
}

TEST_CASE("workload: arrival schedule is sorted, slot-exact, seed independent in counts") {
  const ExponentialSlots law{1000.0, 0.7, 10.0, 4};
  const std::vector<long> expected = slot_arrival_counts(law);
  for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    Rng rng(seed);
    const std::vector<double> times = schedule_arrivals(law, rng);
    REQUIRE(times.size() == 1867);
    CHECK(std::is_sorted(times.begin(), times.end()));
    for (int slot = 0; slot < 4; ++slot) {
      const double lo = slot * 600.0;
      const double hi = lo + 600.0;
      const long count = std::count_if(
          times.begin(), times.end(),
          [&](double t) { return t >= lo && t < hi; });
      CHECK(count == expected[static_cast<std::size_t>(slot)]);
    }
  }
}

TEST_CASE("workload: explicit schedules come back sorted") {
  Rng rng(5);
  const ExplicitSchedule sched{{30.0, 10.0, 20.0}};
  CHECK(schedule_arrivals(sched, rng) ==
        std::vector<double>{10.0, 20.0, 30.0});
  CHECK(schedule_arrivals(ExplicitSchedule{}, rng).empty());
}

TEST_CASE("workload: lifetime draws") {
  Rng rng(17);

  // Degenerate uniform: exactly 15 minutes.
  CHECK(draw_lifetime(UniformMinutes{15.0, 15.0}, 0.0, rng) ==
        doctest::Approx(900.0));

  // Default law: departure - arrival always within [600 s, 1200 s].
  for (int i = 0; i < 5000; ++i) {
    const double arrival = i * 0.37;
    const double d = draw_lifetime(UniformMinutes{10.0, 20.0}, arrival, rng);
    REQUIRE(d - arrival >= 600.0);
    REQUIRE(d - arrival <= 1200.0);
  }

  // Departure window: absolute, clamped to the arrival instant.
  const UniformWindow window{minutes(60.0), minutes(120.0)};
  for (int i = 0; i < 5000; ++i) {
    const double d = draw_lifetime(window, minutes(30.0), rng);
    REQUIRE(d >= minutes(60.0));
    REQUIRE(d <= minutes(120.0));
  }
  CHECK(draw_lifetime(UniformWindow{0.0, 50.0}, 100.0, rng) ==
        doctest::Approx(100.0));
}
