#pragma once

namespace btsim {

// Simulated time is carried everywhere as real-valued seconds.
inline constexpr double kSecondsPerMinute = 60.0;

constexpr double minutes(double m) { return m * kSecondsPerMinute; }

}  // namespace btsim
