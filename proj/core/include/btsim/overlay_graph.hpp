#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace btsim {

using Edge = std::pair<std::int32_t, std::int32_t>;  // normalized first < second

// Immutable overlay snapshot: peers are identified by arrival index, the
// edge set holds the open connections between alive peers. All metrics
// consume this type.
struct OverlayGraph {
  std::int32_t num_peers_ever = 0;
  std::vector<std::uint8_t> alive;  // indexed by arrival order
  std::vector<Edge> edges;

  std::int32_t alive_count() const;
  std::vector<std::int32_t> degrees() const;
};

// Compressed adjacency built once per snapshot for traversals.
struct Adjacency {
  std::vector<std::int32_t> offsets;  // size num_peers_ever + 1
  std::vector<std::int32_t> targets;  // size 2 * |edges|

  static Adjacency build(const OverlayGraph& g);
};

// Structural invariants: no self/duplicate edges, edges touch alive peers
// only, and every degree respects the peer set cap that produced the
// snapshot. Throws std::logic_error naming the first violation.
void check_graph(const OverlayGraph& g, int max_peer_set);

}  // namespace btsim
