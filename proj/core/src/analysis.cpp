#include "btsim/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace btsim {

namespace {

// Direct summation of the harmonic tail until the target is reached; exact
// for the magnitudes involved (long double keeps the comparison far away
// from the accumulated rounding error).
long long smallest_tail_length(long long n_start, long double target) {
  if (target <= 0.0L) return 0;
  long double sum = 0.0L;
  long long k = 0;
  while (sum < target) {
    ++k;
    sum += 1.0L / static_cast<long double>(n_start + k);
  }
  return k;
}

}  // namespace

long long arrivals_to_fill(long long n_start) {
  if (n_start < 1) throw std::invalid_argument("n_start must be >= 1");
  return smallest_tail_length(n_start, 1.0L);
}

double arrivals_to_fill_approx(long long n_start) {
  if (n_start < 1) throw std::invalid_argument("n_start must be >= 1");
  return (std::exp(1.0) - 1.0) * static_cast<double>(n_start);
}

long long arrivals_to_fill_general(const ConvergenceQuery& q) {
  if (q.n_start < 1) throw std::invalid_argument("n_start must be >= 1");
  if (q.max_outgoing <= 0 || q.max_outgoing > q.max_peer_set) {
    throw std::invalid_argument(
        "query must satisfy 0 < max_outgoing <= max_peer_set");
  }
  const long double ratio = static_cast<long double>(q.max_peer_set) /
                            static_cast<long double>(q.max_outgoing);
  return smallest_tail_length(q.n_start, ratio - 1.0L);
}

long long mesh_service_time(long long num_peers) {
  if (num_peers < 1 || (num_peers & (num_peers - 1)) != 0) {
    throw std::invalid_argument(
        "mesh_service_time requires a power-of-two peer count");
  }
  long long k = 0;
  while ((1LL << k) < num_peers) ++k;
  return k;
}

long long chain_service_time(const ServiceModel& model) {
  if (model.n_clusters < 1 || model.cluster_log_size < 0) {
    throw std::invalid_argument("invalid service model");
  }
  return model.n_clusters + model.cluster_log_size;
}

}  // namespace btsim
