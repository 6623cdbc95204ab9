#include "btsim/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace btsim {

double average_peer_set_size(const OverlayGraph& g) {
  const std::int32_t alive = g.alive_count();
  if (alive == 0) return 0.0;
  return 2.0 * static_cast<double>(g.edges.size()) / alive;
}

std::vector<std::pair<std::int32_t, std::int32_t>> degree_by_arrival(
    const OverlayGraph& g) {
  const std::vector<std::int32_t> deg = g.degrees();
  std::vector<std::pair<std::int32_t, std::int32_t>> out;
  for (std::int32_t i = 0; i < g.num_peers_ever; ++i) {
    if (g.alive[static_cast<std::size_t>(i)]) {
      out.emplace_back(i, deg[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

ComponentCensus component_census(const OverlayGraph& g) {
  ComponentCensus census;
  census.label.assign(static_cast<std::size_t>(g.num_peers_ever), -1);
  const Adjacency adj = Adjacency::build(g);
  std::vector<std::int32_t> stack;
  for (std::int32_t start = 0; start < g.num_peers_ever; ++start) {
    if (!g.alive[static_cast<std::size_t>(start)] ||
        census.label[static_cast<std::size_t>(start)] != -1) {
      continue;
    }
    const std::int32_t id = static_cast<std::int32_t>(census.sizes.size());
    census.sizes.push_back(0);
    census.label[static_cast<std::size_t>(start)] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::int32_t v = stack.back();
      stack.pop_back();
      ++census.sizes[static_cast<std::size_t>(id)];
      for (std::int32_t e = adj.offsets[static_cast<std::size_t>(v)];
           e < adj.offsets[static_cast<std::size_t>(v) + 1]; ++e) {
        const std::int32_t w = adj.targets[static_cast<std::size_t>(e)];
        if (census.label[static_cast<std::size_t>(w)] == -1) {
          census.label[static_cast<std::size_t>(w)] = id;
          stack.push_back(w);
        }
      }
    }
  }
  return census;
}

std::vector<std::int32_t> partitions(const OverlayGraph& g) {
  std::vector<std::int32_t> sizes = component_census(g).sizes;
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

int diameter_estimate(const OverlayGraph& g, std::size_t sample_size,
                      Rng& rng) {
  std::vector<std::int32_t> alive_peers;
  for (std::int32_t i = 0; i < g.num_peers_ever; ++i) {
    if (g.alive[static_cast<std::size_t>(i)]) alive_peers.push_back(i);
  }
  if (alive_peers.empty()) return 0;

  const Adjacency adj = Adjacency::build(g);
  const std::size_t n = static_cast<std::size_t>(g.num_peers_ever);
  std::vector<std::int32_t> dist(n);
  std::vector<std::int32_t> queue(n);

  // One full BFS decides connectivity; a partitioned overlay reports 0.
  auto bfs = [&](std::int32_t source) {
    std::fill(dist.begin(), dist.end(), -1);
    std::size_t head = 0, tail = 0;
    dist[static_cast<std::size_t>(source)] = 0;
    queue[tail++] = source;
    std::int32_t ecc = 0;
    std::size_t reached = 0;
    while (head < tail) {
      const std::int32_t v = queue[head++];
      ++reached;
      const std::int32_t dv = dist[static_cast<std::size_t>(v)];
      ecc = std::max(ecc, dv);
      for (std::int32_t e = adj.offsets[static_cast<std::size_t>(v)];
           e < adj.offsets[static_cast<std::size_t>(v) + 1]; ++e) {
        const std::int32_t w = adj.targets[static_cast<std::size_t>(e)];
        if (dist[static_cast<std::size_t>(w)] == -1) {
          dist[static_cast<std::size_t>(w)] = dv + 1;
          queue[tail++] = w;
        }
      }
    }
    return std::pair<std::int32_t, std::size_t>{ecc, reached};
  };

  auto [ecc0, reached0] = bfs(alive_peers.front());
  if (reached0 != alive_peers.size()) return 0;

  const std::size_t sources = std::min(sample_size, alive_peers.size());
  std::vector<std::int32_t> sampled = rng.sample(alive_peers, sources);
  std::int32_t best = ecc0;
  for (std::int32_t s : sampled) {
    best = std::max(best, bfs(s).first);
  }
  return best;
}

std::int32_t removal_count(double fraction, std::int32_t alive) {
  assert(fraction >= 0.0 && fraction <= 1.0);
  // ceil, guarded against binary-float overshoot (0.1 * 1000 > 100).
  const double raw = fraction * alive;
  auto count = static_cast<std::int32_t>(std::ceil(raw - 1e-9));
  return std::clamp(count, 0, alive);
}

namespace {

OverlayGraph remove_peers(const OverlayGraph& g,
                          const std::vector<std::int32_t>& victims) {
  OverlayGraph out;
  out.num_peers_ever = g.num_peers_ever;
  out.alive = g.alive;
  for (std::int32_t v : victims) out.alive[static_cast<std::size_t>(v)] = 0;
  out.edges.reserve(g.edges.size());
  for (const Edge& e : g.edges) {
    if (out.alive[static_cast<std::size_t>(e.first)] &&
        out.alive[static_cast<std::size_t>(e.second)]) {
      out.edges.push_back(e);
    }
  }
  return out;
}

}  // namespace

OverlayGraph attack(const OverlayGraph& g, double fraction) {
  std::vector<std::int32_t> alive_peers;
  for (std::int32_t i = 0; i < g.num_peers_ever; ++i) {
    if (g.alive[static_cast<std::size_t>(i)]) alive_peers.push_back(i);
  }
  const std::vector<std::int32_t> deg = g.degrees();
  std::stable_sort(alive_peers.begin(), alive_peers.end(),
                   [&](std::int32_t a, std::int32_t b) {
                     const std::int32_t da = deg[static_cast<std::size_t>(a)];
                     const std::int32_t db = deg[static_cast<std::size_t>(b)];
                     if (da != db) return da > db;
                     return a < b;  // ties: earlier arrival goes first
                   });
  const std::int32_t k =
      removal_count(fraction, static_cast<std::int32_t>(alive_peers.size()));
  alive_peers.resize(static_cast<std::size_t>(k));
  return remove_peers(g, alive_peers);
}

OverlayGraph churn(const OverlayGraph& g, double fraction, Rng& rng) {
  std::vector<std::int32_t> alive_peers;
  for (std::int32_t i = 0; i < g.num_peers_ever; ++i) {
    if (g.alive[static_cast<std::size_t>(i)]) alive_peers.push_back(i);
  }
  const std::int32_t k =
      removal_count(fraction, static_cast<std::int32_t>(alive_peers.size()));
  const std::vector<std::int32_t> victims =
      rng.sample(std::move(alive_peers), static_cast<std::size_t>(k));
  return remove_peers(g, victims);
}

long long bottleneck_count(const OverlayGraph& g, std::int32_t head_size) {
  long long count = 0;
  for (const Edge& e : g.edges) {
    count += (e.first < head_size) != (e.second < head_size);
  }
  return count;
}

long long head_internal_count(const OverlayGraph& g, std::int32_t head_size) {
  long long count = 0;
  for (const Edge& e : g.edges) {
    count += (e.first < head_size) && (e.second < head_size);
  }
  return count;
}

std::vector<Edge> connectivity_matrix(const OverlayGraph& g) {
  std::vector<Edge> edges = g.edges;
  std::sort(edges.begin(), edges.end());
  return edges;
}

MetricsSample measure(const OverlayGraph& g, double t,
                      std::size_t diameter_sample, Rng& rng) {
  MetricsSample m;
  m.t = t;
  m.alive = g.alive_count();
  m.avg_peer_set = average_peer_set_size(g);
  m.partition_sizes = partitions(g);
  m.diameter = diameter_estimate(g, diameter_sample, rng);
  return m;
}

}  // namespace btsim
