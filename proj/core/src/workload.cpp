#include "btsim/workload.hpp"

#include <algorithm>
#include <cmath>

namespace btsim {

std::vector<long> slot_arrival_counts(const ExponentialSlots& law) {
  std::vector<long> counts;
  counts.reserve(static_cast<std::size_t>(law.num_slots));
  for (int i = 1; i <= law.num_slots; ++i) {
    double expected = law.amplitude * std::exp(-law.rate * (i - 1));
    counts.push_back(static_cast<long>(std::ceil(expected)));
  }
  return counts;
}

std::vector<double> schedule_arrivals(const ArrivalLaw& law, Rng& rng) {
  if (const auto* x = std::get_if<ExplicitSchedule>(&law)) {
    std::vector<double> times = x->times_s;
    std::sort(times.begin(), times.end());
    return times;
  }
  const auto& e = std::get<ExponentialSlots>(law);
  const double slot_s = minutes(e.slot_minutes);
  std::vector<double> times;
  std::vector<long> counts = slot_arrival_counts(e);
  for (int i = 0; i < e.num_slots; ++i) {
    const double start = i * slot_s;
    std::size_t first = times.size();
    for (long k = 0; k < counts[static_cast<std::size_t>(i)]; ++k) {
      times.push_back(start + rng.uniform01() * slot_s);
    }
    std::sort(times.begin() + static_cast<std::ptrdiff_t>(first), times.end());
  }
  return times;
}

double draw_lifetime(const LifetimeLaw& law, double arrival_s, Rng& rng) {
  if (const auto* u = std::get_if<UniformMinutes>(&law)) {
    return arrival_s + rng.uniform(minutes(u->lo_min), minutes(u->hi_min));
  }
  const auto& w = std::get<UniformWindow>(law);
  return std::max(arrival_s, rng.uniform(w.start_s, w.end_s));
}

}  // namespace btsim
