#include <doctest.h>

#include "btsim/overlay_graph.hpp"

using namespace btsim;

namespace {

OverlayGraph triangle() {
  OverlayGraph g;
  g.num_peers_ever = 3;
  g.alive = {1, 1, 1};
  g.edges = {{0, 1}, {0, 2}, {1, 2}};
  return g;
}

}  // namespace

TEST_CASE("overlay graph: counters and degrees") {
  OverlayGraph g = triangle();
  CHECK(g.alive_count() == 3);
  CHECK(g.degrees() == std::vector<std::int32_t>{2, 2, 2});

  g.alive.push_back(0);
  g.num_peers_ever = 4;
  CHECK(g.alive_count() == 3);
  CHECK(g.degrees().size() == 4);
}

TEST_CASE("overlay graph: adjacency round trip") {
  const OverlayGraph g = triangle();
  const Adjacency adj = Adjacency::build(g);
  REQUIRE(adj.offsets.size() == 4);
  CHECK(adj.targets.size() == 6);
  for (std::int32_t v = 0; v < 3; ++v) {
    CHECK(adj.offsets[static_cast<std::size_t>(v) + 1] -
              adj.offsets[static_cast<std::size_t>(v)] ==
          2);
  }
}

TEST_CASE("overlay graph: structural check catches violations") {
  OverlayGraph g = triangle();
  CHECK_NOTHROW(check_graph(g, 2));
  CHECK_THROWS(check_graph(g, 1));  // cap exceeded

  g = triangle();
  g.edges.push_back({1, 2});  // duplicate
  CHECK_THROWS(check_graph(g, 5));

  g = triangle();
  g.alive[2] = 0;  // edge to a departed peer
  CHECK_THROWS(check_graph(g, 5));

  g = triangle();
  g.edges[0] = {1, 1};  // self edge
  CHECK_THROWS(check_graph(g, 5));
}
