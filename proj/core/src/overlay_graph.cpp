#include "btsim/overlay_graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace btsim {

std::int32_t OverlayGraph::alive_count() const {
  return static_cast<std::int32_t>(
      std::count(alive.begin(), alive.end(), std::uint8_t{1}));
}

std::vector<std::int32_t> OverlayGraph::degrees() const {
  std::vector<std::int32_t> deg(static_cast<std::size_t>(num_peers_ever), 0);
  for (const Edge& e : edges) {
    ++deg[static_cast<std::size_t>(e.first)];
    ++deg[static_cast<std::size_t>(e.second)];
  }
  return deg;
}

Adjacency Adjacency::build(const OverlayGraph& g) {
  Adjacency adj;
  const std::size_t n = static_cast<std::size_t>(g.num_peers_ever);
  adj.offsets.assign(n + 1, 0);
  for (const Edge& e : g.edges) {
    ++adj.offsets[static_cast<std::size_t>(e.first) + 1];
    ++adj.offsets[static_cast<std::size_t>(e.second) + 1];
  }
  for (std::size_t i = 1; i <= n; ++i) adj.offsets[i] += adj.offsets[i - 1];
  adj.targets.resize(static_cast<std::size_t>(adj.offsets[n]));
  std::vector<std::int32_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
  for (const Edge& e : g.edges) {
    adj.targets[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.first)]++)] = e.second;
    adj.targets[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.second)]++)] = e.first;
  }
  return adj;
}

void check_graph(const OverlayGraph& g, int max_peer_set) {
  if (g.alive.size() != static_cast<std::size_t>(g.num_peers_ever)) {
    throw std::logic_error("overlay graph: alive vector size mismatch");
  }
  std::set<Edge> seen;
  for (const Edge& e : g.edges) {
    if (e.first >= e.second) {
      throw std::logic_error("overlay graph: edge not normalized or self-edge");
    }
    if (e.first < 0 || e.second >= g.num_peers_ever) {
      throw std::logic_error("overlay graph: edge endpoint out of range");
    }
    if (!g.alive[static_cast<std::size_t>(e.first)] ||
        !g.alive[static_cast<std::size_t>(e.second)]) {
      throw std::logic_error("overlay graph: edge touches a departed peer");
    }
    if (!seen.insert(e).second) {
      throw std::logic_error("overlay graph: duplicate edge");
    }
  }
  for (std::int32_t i = 0; i < g.num_peers_ever; ++i) {
    std::int32_t d = 0;
    for (const Edge& e : g.edges) {
      d += (e.first == i) + (e.second == i);
    }
    if (d > max_peer_set) {
      throw std::logic_error("overlay graph: peer " + std::to_string(i) +
                             " exceeds the peer set cap");
    }
  }
}

}  // namespace btsim
