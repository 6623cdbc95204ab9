#pragma once

#include <cstdint>
#include <vector>

#include "btsim/overlay_graph.hpp"
#include "btsim/rng.hpp"

namespace btsim {

// Per-instant values of the four overlay metrics. diameter == 0 encodes a
// partitioned (or empty) overlay.
struct MetricsSample {
  double t = 0.0;
  double avg_peer_set = 0.0;
  int diameter = 0;
  std::vector<std::int32_t> partition_sizes;  // descending
  std::int32_t alive = 0;
};

// 2|edges| / alive; 0 for an empty graph.
double average_peer_set_size(const OverlayGraph& g);

// (arrival index, degree) for every alive peer, ascending by index.
std::vector<std::pair<std::int32_t, std::int32_t>> degree_by_arrival(
    const OverlayGraph& g);

// Longest shortest path seen from min(sample_size, alive) uniformly sampled
// BFS sources against all reachable peers. Returns 0 when the graph is
// empty or splits into more than one partition.
int diameter_estimate(const OverlayGraph& g, std::size_t sample_size,
                      Rng& rng);

// Connected-component sizes over alive peers, descending.
std::vector<std::int32_t> partitions(const OverlayGraph& g);

// Component label per peer (-1 for departed) plus sizes indexed by label.
struct ComponentCensus {
  std::vector<std::int32_t> label;
  std::vector<std::int32_t> sizes;  // unsorted, indexed by label
};
ComponentCensus component_census(const OverlayGraph& g);

// Number of peers removed by attack/churn at the given fraction; both the
// implementations and the invariant tests share this rounding.
std::int32_t removal_count(double fraction, std::int32_t alive);

// Static percolation: drops the ceil(fraction * alive) highest-degree alive
// peers (ties broken by earlier arrival) with all incident edges. No repair
// dynamics run afterwards.
OverlayGraph attack(const OverlayGraph& g, double fraction);

// Same removal size, peers chosen uniformly at random.
OverlayGraph churn(const OverlayGraph& g, double fraction, Rng& rng);

// Edges with exactly one endpoint among the first head_size arrivals.
long long bottleneck_count(const OverlayGraph& g, std::int32_t head_size);

// Edges with both endpoints among the first head_size arrivals.
long long head_internal_count(const OverlayGraph& g, std::int32_t head_size);

// Stable edge-list export, sorted lexicographically by (min, max).
std::vector<Edge> connectivity_matrix(const OverlayGraph& g);

// Evaluates everything at once for a snapshot series entry.
MetricsSample measure(const OverlayGraph& g, double t,
                      std::size_t diameter_sample, Rng& rng);

}  // namespace btsim
