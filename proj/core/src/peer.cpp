#include "btsim/peer.hpp"

#include <algorithm>
#include <cassert>

namespace btsim {

namespace {

bool sorted_contains(const std::vector<std::int32_t>& v, std::int32_t k) {
  return std::binary_search(v.begin(), v.end(), k);
}

void sorted_insert(std::vector<std::int32_t>& v, std::int32_t k) {
  v.insert(std::lower_bound(v.begin(), v.end(), k), k);
}

void sorted_erase(std::vector<std::int32_t>& v, std::int32_t k) {
  auto it = std::lower_bound(v.begin(), v.end(), k);
  assert(it != v.end() && *it == k);
  v.erase(it);
}

}  // namespace

void PeerState::init(std::int32_t idx, std::int32_t universe, bool nated,
                     double t) {
  index = idx;
  is_nated = nated;
  alive = true;
  arrival_s = t;
  last_tracker_request_s = t;
  known.assign((static_cast<std::size_t>(universe) + 63) / 64, 0);
  mark_known(idx);
}

bool PeerState::is_neighbor(std::int32_t k) const {
  return sorted_contains(neighbors, k);
}

bool PeerState::did_initiate(std::int32_t k) const {
  return sorted_contains(initiated_to, k);
}

void PeerState::add_neighbor(std::int32_t k, bool initiated) {
  assert(!is_neighbor(k) && k != index);
  sorted_insert(neighbors, k);
  if (initiated) sorted_insert(initiated_to, k);
  mark_known(k);
}

void PeerState::remove_neighbor(std::int32_t k) {
  sorted_erase(neighbors, k);
  if (did_initiate(k)) sorted_erase(initiated_to, k);
  refresh_known(k);
}

void PeerState::refresh_known(std::int32_t k) {
  if (k == index || is_neighbor(k) || tracker_candidates.contains(k) ||
      pex_candidates.contains(k)) {
    mark_known(k);
  } else {
    unmark_known(k);
  }
}

}  // namespace btsim
