#pragma once

#include <vector>

#include "btsim/config.hpp"
#include "btsim/rng.hpp"

namespace btsim {

// Exact per-slot arrival counts: ceil(amplitude * exp(-rate * (i - 1))) for
// 1-based slot i <= num_slots, zero afterwards. Seed independent.
std::vector<long> slot_arrival_counts(const ExponentialSlots& law);

// All arrival instants in nondecreasing order (seconds). Slot counts are the
// exact closed form above; only the placement within a slot consumes rng.
std::vector<double> schedule_arrivals(const ArrivalLaw& law, Rng& rng);

// Departure instant for a peer arriving at arrival_s. UniformMinutes adds a
// duration drawn from U[lo, hi]; UniformWindow draws an absolute departure
// from U[start, end] clamped to >= arrival.
double draw_lifetime(const LifetimeLaw& law, double arrival_s, Rng& rng);

}  // namespace btsim
