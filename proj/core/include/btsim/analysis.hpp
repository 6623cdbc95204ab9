#pragma once

#include <cstdint>

namespace btsim {

struct ConvergenceQuery {
  long long n_start = 0;  // torrent size when the peer arrives
  int max_peer_set = 80;
  int max_outgoing = 40;
};

// A chain of n_clusters fully-meshed clusters of 2^cluster_log_size peers;
// adjacent clusters are bridged by one connection per peer. Service times
// are expressed in multiples of T = content size / per-peer rate.
struct ServiceModel {
  long long n_clusters = 1;
  int cluster_log_size = 0;
};

// Smallest K with sum_{n = n_start+1}^{n_start+K} 1/n >= 1: the number of
// later arrivals a peer must wait for to accumulate its missing incoming
// connections, in the half-outgoing default configuration.
long long arrivals_to_fill(long long n_start);

// Linear approximation (e - 1) * n_start of the same quantity.
double arrivals_to_fill_approx(long long n_start);

// General form: smallest K with 1 + sum_{n = n_start+1}^{n_start+K} 1/n >=
// max_peer_set / max_outgoing. Zero when the ratio is 1 (no missing
// connections); reduces to arrivals_to_fill when the ratio is 2.
long long arrivals_to_fill_general(const ConvergenceQuery& q);

// One-connection-at-a-time replication on a full mesh: after k*T units,
// 2^k peers hold the file. num_peers must be a power of two; anything else
// throws std::invalid_argument (model domain).
long long mesh_service_time(long long num_peers);

// Chain-of-clusters service time, n_clusters + cluster_log_size (in T).
long long chain_service_time(const ServiceModel& model);

}  // namespace btsim
