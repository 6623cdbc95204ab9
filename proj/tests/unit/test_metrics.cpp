#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "btsim/metrics.hpp"

using namespace btsim;

namespace {

OverlayGraph complete_graph(std::int32_t n) {
  OverlayGraph g;
  g.num_peers_ever = n;
  g.alive.assign(static_cast<std::size_t>(n), 1);
  for (std::int32_t i = 0; i < n; ++i) {
    for (std::int32_t j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
  }
  return g;
}

OverlayGraph path_graph(std::int32_t n) {
  OverlayGraph g;
  g.num_peers_ever = n;
  g.alive.assign(static_cast<std::size_t>(n), 1);
  for (std::int32_t i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  return g;
}

OverlayGraph random_connected_ish(std::int32_t n, double p, Rng& rng) {
  OverlayGraph g;
  g.num_peers_ever = n;
  g.alive.assign(static_cast<std::size_t>(n), 1);
  for (std::int32_t i = 0; i < n; ++i) {
    for (std::int32_t j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) g.edges.emplace_back(i, j);
    }
  }
  return g;
}

// Exact diameter by all-pairs BFS; 0 when disconnected or empty.
int exact_diameter(const OverlayGraph& g) {
  std::vector<std::int32_t> alive;
  for (std::int32_t i = 0; i < g.num_peers_ever; ++i) {
    if (g.alive[static_cast<std::size_t>(i)]) alive.push_back(i);
  }
  if (alive.empty()) return 0;
  const Adjacency adj = Adjacency::build(g);
  int best = 0;
  for (std::int32_t s : alive) {
    std::vector<int> dist(static_cast<std::size_t>(g.num_peers_ever), -1);
    std::vector<std::int32_t> q{s};
    dist[static_cast<std::size_t>(s)] = 0;
    std::size_t head = 0, reached = 0;
    while (head < q.size()) {
      const std::int32_t v = q[head++];
      ++reached;
      best = std::max(best, dist[static_cast<std::size_t>(v)]);
      for (std::int32_t e = adj.offsets[static_cast<std::size_t>(v)];
           e < adj.offsets[static_cast<std::size_t>(v) + 1]; ++e) {
        const std::int32_t w = adj.targets[static_cast<std::size_t>(e)];
        if (dist[static_cast<std::size_t>(w)] < 0) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
          q.push_back(w);
        }
      }
    }
    if (reached != alive.size()) return 0;
  }
  return best;
}

}  // namespace

TEST_CASE("average_peer_set_size basics") {
  OverlayGraph empty;
  CHECK(average_peer_set_size(empty) == 0.0);
  CHECK(average_peer_set_size(complete_graph(7)) == doctest::Approx(6.0));
}

TEST_CASE("average equals the mean of degree_by_arrival") {
  Rng rng(5);
  const OverlayGraph g = random_connected_ish(60, 0.1, rng);
  const auto degrees = degree_by_arrival(g);
  double sum = 0.0;
  for (const auto& [id, d] : degrees) sum += d;
  CHECK(average_peer_set_size(g) ==
        doctest::Approx(sum / static_cast<double>(degrees.size())));
}

TEST_CASE("degree_by_arrival on a star") {
  OverlayGraph g;
  g.num_peers_ever = 5;
  g.alive.assign(5, 1);
  for (std::int32_t i = 1; i < 5; ++i) g.edges.emplace_back(0, i);
  const auto degrees = degree_by_arrival(g);
  CHECK(degrees.front() == std::pair<std::int32_t, std::int32_t>{0, 4});
  for (std::size_t i = 1; i < degrees.size(); ++i) {
    CHECK(degrees[i].second == 1);
  }
}

TEST_CASE("diameter_estimate on canonical graphs") {
  Rng rng(1);
  CHECK(diameter_estimate(complete_graph(10), 1000, rng) == 1);
  CHECK(diameter_estimate(path_graph(3), 1000, rng) == 2);

  OverlayGraph two = complete_graph(6);
  two.edges.erase(std::remove_if(two.edges.begin(), two.edges.end(),
                                 [](const Edge& e) {
                                   return (e.first < 3) != (e.second < 3);
                                 }),
                  two.edges.end());
  CHECK(diameter_estimate(two, 1000, rng) == 0);  // partitioned convention

  OverlayGraph empty;
  CHECK(diameter_estimate(empty, 1000, rng) == 0);
}

TEST_CASE("sampled diameter equals the exact one with full sampling (<=200 nodes)") {
  Rng rng(99);
  for (int rep = 0; rep < 25; ++rep) {
    const std::int32_t n = 20 + static_cast<std::int32_t>(rng.below(181));
    const double p = 0.02 + 0.2 * rng.uniform01();
    const OverlayGraph g = random_connected_ish(n, p, rng);
    Rng sample_rng(rep);
    CHECK(diameter_estimate(g, 1000, sample_rng) == exact_diameter(g));
  }
}

TEST_CASE("partitions census") {
  CHECK(partitions(complete_graph(9)) == std::vector<std::int32_t>{9});

  OverlayGraph two = complete_graph(6);
  two.edges.erase(std::remove_if(two.edges.begin(), two.edges.end(),
                                 [](const Edge& e) {
                                   return (e.first < 4) != (e.second < 4);
                                 }),
                  two.edges.end());
  CHECK(partitions(two) == std::vector<std::int32_t>{4, 2});
}

TEST_CASE("partition sizes always sum to the alive count") {
  Rng rng(123);
  for (int rep = 0; rep < 20; ++rep) {
    OverlayGraph g = random_connected_ish(80, 0.02, rng);
    for (std::size_t i = 0; i < g.alive.size(); i += 7) g.alive[i] = 0;
    g.edges.erase(std::remove_if(g.edges.begin(), g.edges.end(),
                                 [&](const Edge& e) {
                                   return !g.alive[static_cast<std::size_t>(
                                              e.first)] ||
                                          !g.alive[static_cast<std::size_t>(
                                              e.second)];
                                 }),
                  g.edges.end());
    const std::vector<std::int32_t> parts = partitions(g);
    CHECK(std::accumulate(parts.begin(), parts.end(), 0) == g.alive_count());
    CHECK(std::is_sorted(parts.rbegin(), parts.rend()));
  }
}

TEST_CASE("attack: boundary fractions and exact removal counts") {
  const OverlayGraph g = complete_graph(10);
  const OverlayGraph untouched = attack(g, 0.0);
  CHECK(untouched.alive_count() == 10);
  CHECK(untouched.edges.size() == g.edges.size());

  const OverlayGraph wiped = attack(g, 1.0);
  CHECK(wiped.alive_count() == 0);
  CHECK(wiped.edges.empty());

  Rng rng(6);
  for (int rep = 0; rep < 15; ++rep) {
    const OverlayGraph r = random_connected_ish(90, 0.05, rng);
    const double f = rng.uniform01();
    const std::int32_t expected =
        r.alive_count() - removal_count(f, r.alive_count());
    CHECK(attack(r, f).alive_count() == expected);
    Rng churn_rng(rep);
    CHECK(churn(r, f, churn_rng).alive_count() == expected);
  }
  // Binary-float guard: 10% of 1000 removes exactly 100.
  CHECK(removal_count(0.1, 1000) == 100);
  CHECK(removal_count(0.8, 1000) == 800);
}

TEST_CASE("attack targets the highest degrees, earliest arrivals first on ties") {
  // Star plus isolated-ish tail: the hub goes first.
  OverlayGraph g;
  g.num_peers_ever = 6;
  g.alive.assign(6, 1);
  for (std::int32_t i = 1; i < 5; ++i) g.edges.emplace_back(0, i);
  g.edges.emplace_back(4, 5);
  const OverlayGraph after = attack(g, 0.17);  // removes ceil(1.02) = 2
  CHECK_FALSE(after.alive[0]);  // hub, degree 4
  CHECK_FALSE(after.alive[4]);  // degree 2
  CHECK(after.alive_count() == 4);

  // All-equal degrees: earlier arrivals are removed first.
  OverlayGraph pairs;
  pairs.num_peers_ever = 4;
  pairs.alive.assign(4, 1);
  pairs.edges = {{0, 1}, {2, 3}};
  const OverlayGraph a = attack(pairs, 0.25);
  CHECK_FALSE(a.alive[0]);
  CHECK(a.alive[1]);
  CHECK(a.alive[2]);
  CHECK(a.alive[3]);
}

TEST_CASE("churn with fraction 0 is the identity") {
  Rng rng(9);
  const OverlayGraph g = random_connected_ish(40, 0.2, rng);
  const OverlayGraph same = churn(g, 0.0, rng);
  CHECK(same.alive == g.alive);
  CHECK(same.edges == g.edges);
}

TEST_CASE("bottleneck and intra-head counts") {
  OverlayGraph g;
  g.num_peers_ever = 6;
  g.alive.assign(6, 1);
  g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 5}, {1, 3}};
  CHECK(bottleneck_count(g, 0) == 0);
  CHECK(bottleneck_count(g, 3) == 3);      // 2-3, 0-5, 1-3
  CHECK(head_internal_count(g, 3) == 2);   // 0-1, 1-2
  CHECK(bottleneck_count(g, 6) == 0);
}

TEST_CASE("connectivity_matrix is sorted and stable") {
  OverlayGraph g;
  g.num_peers_ever = 3;
  g.alive.assign(3, 1);
  g.edges = {{1, 2}, {0, 2}, {0, 1}};
  CHECK(connectivity_matrix(g) ==
        std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});
  OverlayGraph empty;
  CHECK(connectivity_matrix(empty).empty());
}

TEST_CASE("measure bundles the four metrics") {
  Rng rng(31);
  const OverlayGraph g = complete_graph(8);
  const MetricsSample m = measure(g, 120.0, 1000, rng);
  CHECK(m.t == 120.0);
  CHECK(m.alive == 8);
  CHECK(m.avg_peer_set == doctest::Approx(7.0));
  CHECK(m.diameter == 1);
  CHECK(m.partition_sizes == std::vector<std::int32_t>{8});
}
