#include "btsim/exchange.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace btsim {

namespace {

constexpr double kBitsEpsilon = 1e-6;

bool test_bit(const std::vector<std::uint64_t>& bits, int i) {
  return (bits[static_cast<std::size_t>(i) >> 6] >>
          (static_cast<std::size_t>(i) & 63)) & 1u;
}

void set_bit(std::vector<std::uint64_t>& bits, int i) {
  bits[static_cast<std::size_t>(i) >> 6] |= std::uint64_t{1}
                                            << (static_cast<std::size_t>(i) & 63);
}

}  // namespace

void ExchangeConfig::validate() const {
  if (num_peers < 2) throw std::invalid_argument("num_peers must be >= 2");
  if (target_peer_set < 1 || target_peer_set >= num_peers) {
    throw std::invalid_argument("target_peer_set must be in [1, num_peers)");
  }
  if (num_pieces < 1) throw std::invalid_argument("num_pieces must be >= 1");
  if (file_size_bytes <= 0) throw std::invalid_argument("file size must be positive");
  if (upload_lo_bps > upload_hi_bps || upload_lo_bps <= 0.0) {
    throw std::invalid_argument("upload range must satisfy 0 < lo <= hi");
  }
  if (download_capacity_bps <= 0.0) {
    throw std::invalid_argument("download capacity must be positive");
  }
  if (regular_slots < 0 || optimistic_slots < 0 ||
      regular_slots + optimistic_slots < 1) {
    throw std::invalid_argument("at least one unchoke slot is required");
  }
  if (round_seconds <= 0.0) throw std::invalid_argument("round_seconds must be positive");
  if (rounds_limit < 1) throw std::invalid_argument("rounds_limit must be >= 1");
}

OverlayGraph random_overlay(std::int32_t n, std::int32_t target_degree,
                            Rng& rng) {
  if (target_degree < 1 || n <= target_degree) {
    throw std::invalid_argument(
        "random_overlay requires n > target_degree >= 1");
  }
  std::vector<std::vector<std::int32_t>> adj(static_cast<std::size_t>(n));
  std::vector<std::int32_t> deg(static_cast<std::size_t>(n), 0);
  // Peers whose degree is still below the cap, with O(1) removal.
  std::vector<std::int32_t> open(static_cast<std::size_t>(n));
  std::vector<std::int32_t> open_pos(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) {
    open[static_cast<std::size_t>(i)] = i;
    open_pos[static_cast<std::size_t>(i)] = i;
  }
  auto close_peer = [&](std::int32_t p) {
    const std::int32_t pos = open_pos[static_cast<std::size_t>(p)];
    const std::int32_t last = open.back();
    open[static_cast<std::size_t>(pos)] = last;
    open_pos[static_cast<std::size_t>(last)] = pos;
    open.pop_back();
    open_pos[static_cast<std::size_t>(p)] = -1;
  };
  auto connected = [&](std::int32_t a, std::int32_t b) {
    const auto& v = adj[static_cast<std::size_t>(a)];
    return std::find(v.begin(), v.end(), b) != v.end();
  };

  OverlayGraph g;
  g.num_peers_ever = n;
  g.alive.assign(static_cast<std::size_t>(n), 1);
  for (std::int32_t i = 0; i < n; ++i) {
    while (deg[static_cast<std::size_t>(i)] < target_degree) {
      if (open_pos[static_cast<std::size_t>(i)] == -1) break;  // i hit the cap
      // Rejection sampling over open peers is fast until the tail, where we
      // fall back to materializing the exact eligible set.
      std::int32_t partner = -1;
      if (open.size() >
          static_cast<std::size_t>(deg[static_cast<std::size_t>(i)]) + 1) {
        for (int tries = 0; tries < 32 && partner < 0; ++tries) {
          const std::int32_t cand =
              open[static_cast<std::size_t>(rng.below(open.size()))];
          if (cand != i && !connected(i, cand)) partner = cand;
        }
      }
      if (partner < 0) {
        std::vector<std::int32_t> eligible;
        for (std::int32_t cand : open) {
          if (cand != i && !connected(i, cand)) eligible.push_back(cand);
        }
        if (eligible.empty()) break;  // no eligible partner remains
        std::sort(eligible.begin(), eligible.end());
        partner = eligible[static_cast<std::size_t>(rng.below(eligible.size()))];
      }
      adj[static_cast<std::size_t>(i)].push_back(partner);
      adj[static_cast<std::size_t>(partner)].push_back(i);
      g.edges.emplace_back(std::min(i, partner), std::max(i, partner));
      if (++deg[static_cast<std::size_t>(i)] == target_degree) close_peer(i);
      if (++deg[static_cast<std::size_t>(partner)] == target_degree) {
        close_peer(partner);
      }
    }
  }
  return g;
}

Swarm::Swarm(const ExchangeConfig& cfg, OverlayGraph overlay, Rng& rng)
    : cfg_(cfg), overlay_(std::move(overlay)), adj_(Adjacency::build(overlay_)) {
  cfg_.validate();
  const std::size_t n = static_cast<std::size_t>(overlay_.num_peers_ever);
  const std::size_t words = (static_cast<std::size_t>(cfg_.num_pieces) + 63) / 64;
  have_.assign(n, std::vector<std::uint64_t>(words, 0));
  have_count_.assign(n, 0);
  completion_round_.assign(n, -1);
  upload_bps_.resize(n);
  download_bps_.assign(n, cfg_.download_capacity_bps);
  unchoked_.assign(n, {});
  seed_rotation_.assign(n, 0);
  received_prev_.resize(n);
  received_cur_.resize(n);
  partial_.assign(n, {});
  neighbor_have_.assign(
      n, std::vector<std::int32_t>(static_cast<std::size_t>(cfg_.num_pieces), 0));
  total_received_bits_.assign(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    upload_bps_[p] = rng.uniform(cfg_.upload_lo_bps, cfg_.upload_hi_bps);
    const std::size_t d = static_cast<std::size_t>(
        adj_.offsets[p + 1] - adj_.offsets[p]);
    received_prev_[p].assign(d, 0.0);
    received_cur_[p].assign(d, 0.0);
  }
  source_ = static_cast<std::int32_t>(rng.below(n));
  for (int piece = 0; piece < cfg_.num_pieces; ++piece) {
    set_bit(have_[static_cast<std::size_t>(source_)], piece);
  }
  have_count_[static_cast<std::size_t>(source_)] = cfg_.num_pieces;
  completion_round_[static_cast<std::size_t>(source_)] = 0;
  ++complete_peers_;
  for (std::int32_t e = adj_.offsets[static_cast<std::size_t>(source_)];
       e < adj_.offsets[static_cast<std::size_t>(source_) + 1]; ++e) {
    const std::int32_t nb = adj_.targets[static_cast<std::size_t>(e)];
    for (int piece = 0; piece < cfg_.num_pieces; ++piece) {
      ++neighbor_have_[static_cast<std::size_t>(nb)][static_cast<std::size_t>(piece)];
    }
  }
}

bool Swarm::has_piece(std::int32_t peer, int piece) const {
  return test_bit(have_[static_cast<std::size_t>(peer)], piece);
}

bool Swarm::interested(std::int32_t downloader, std::int32_t uploader) const {
  const auto& up = have_[static_cast<std::size_t>(uploader)];
  const auto& down = have_[static_cast<std::size_t>(downloader)];
  for (std::size_t w = 0; w < up.size(); ++w) {
    if (up[w] & ~down[w]) return true;
  }
  return false;
}

std::size_t Swarm::slot_of(std::int32_t peer, std::int32_t neighbor) const {
  const std::size_t begin =
      static_cast<std::size_t>(adj_.offsets[static_cast<std::size_t>(peer)]);
  const std::size_t end =
      static_cast<std::size_t>(adj_.offsets[static_cast<std::size_t>(peer) + 1]);
  for (std::size_t e = begin; e < end; ++e) {
    if (adj_.targets[e] == neighbor) return e - begin;
  }
  assert(false);
  return 0;
}

void Swarm::rechoke(std::int32_t peer, Rng& rng) {
  const std::size_t p = static_cast<std::size_t>(peer);
  auto& out = unchoked_[p];
  out.clear();
  const std::int32_t begin = adj_.offsets[p];
  const std::int32_t end = adj_.offsets[p + 1];
  const std::int32_t deg = end - begin;
  if (deg == 0) return;
  const int total_slots = cfg_.regular_slots + cfg_.optimistic_slots;

  if (have_count_[p] == cfg_.num_pieces) {
    // Seed state: fair rotation over interested neighbors.
    std::int32_t cursor = seed_rotation_[p];
    for (std::int32_t step = 0;
         step < deg && static_cast<int>(out.size()) < total_slots; ++step) {
      const std::int32_t nb =
          adj_.targets[static_cast<std::size_t>(begin + (cursor + step) % deg)];
      if (interested(nb, peer)) out.push_back(nb);
    }
    seed_rotation_[p] = (cursor + 1) % deg;
    return;
  }

  // Regular unchokes: fastest uploaders of the previous round, ties broken
  // by arrival index.
  std::vector<std::pair<double, std::int32_t>> rated;
  rated.reserve(static_cast<std::size_t>(deg));
  for (std::int32_t e = begin; e < end; ++e) {
    const std::int32_t nb = adj_.targets[static_cast<std::size_t>(e)];
    rated.emplace_back(received_prev_[p][static_cast<std::size_t>(e - begin)], nb);
  }
  std::sort(rated.begin(), rated.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  const int regulars = std::min<int>(cfg_.regular_slots, deg);
  for (int i = 0; i < regulars; ++i) out.push_back(rated[static_cast<std::size_t>(i)].second);

  // Optimistic unchokes: uniform among the remaining interested neighbors.
  for (int o = 0; o < cfg_.optimistic_slots; ++o) {
    std::vector<std::int32_t> pool;
    for (std::int32_t e = begin; e < end; ++e) {
      const std::int32_t nb = adj_.targets[static_cast<std::size_t>(e)];
      if (std::find(out.begin(), out.end(), nb) == out.end() &&
          interested(nb, peer)) {
        pool.push_back(nb);
      }
    }
    if (pool.empty()) break;
    out.push_back(pool[static_cast<std::size_t>(rng.below(pool.size()))]);
  }
}

std::optional<int> Swarm::select_piece(
    std::int32_t uploader, std::int32_t downloader, Rng& rng,
    const std::vector<std::uint64_t>* claimed) const {
  const auto& up = have_[static_cast<std::size_t>(uploader)];
  const auto& down = have_[static_cast<std::size_t>(downloader)];
  const auto& rarity = neighbor_have_[static_cast<std::size_t>(downloader)];
  std::int32_t best_count = INT32_MAX;
  std::vector<int> ties;
  for (std::size_t w = 0; w < up.size(); ++w) {
    std::uint64_t candidates = up[w] & ~down[w];
    if (claimed) candidates &= ~(*claimed)[w];
    while (candidates) {
      const int piece = static_cast<int>(w * 64) + std::countr_zero(candidates);
      candidates &= candidates - 1;
      const std::int32_t c = rarity[static_cast<std::size_t>(piece)];
      if (c < best_count) {
        best_count = c;
        ties.clear();
        ties.push_back(piece);
      } else if (c == best_count) {
        ties.push_back(piece);
      }
    }
  }
  if (ties.empty()) return std::nullopt;
  return ties[static_cast<std::size_t>(rng.below(ties.size()))];
}

void Swarm::complete_piece(std::int32_t peer, int piece) {
  const std::size_t p = static_cast<std::size_t>(peer);
  set_bit(have_[p], piece);
  if (++have_count_[p] == cfg_.num_pieces) {
    completion_round_[p] = round_;
    ++complete_peers_;
  }
  for (std::int32_t e = adj_.offsets[p]; e < adj_.offsets[p + 1]; ++e) {
    ++neighbor_have_[static_cast<std::size_t>(
        adj_.targets[static_cast<std::size_t>(e)])][static_cast<std::size_t>(piece)];
  }
}

void Swarm::step_round(Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(num_peers());
  for (std::size_t p = 0; p < n; ++p) {
    rechoke(static_cast<std::int32_t>(p), rng);
  }

  // Pick one piece per unchoke edge; a piece already being served to the
  // downloader this round is not picked twice.
  struct Link {
    std::int32_t up, down;
    int piece;
    double offer = 0.0;
  };
  std::vector<Link> links;
  const std::size_t words = have_[0].size();
  std::vector<std::vector<std::uint64_t>> claimed(
      n, std::vector<std::uint64_t>(words, 0));
  std::vector<int> active(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<std::int32_t> targets = unchoked_[p];
    std::sort(targets.begin(), targets.end());
    for (std::int32_t d : targets) {
      const auto piece = select_piece(static_cast<std::int32_t>(p), d, rng,
                                      &claimed[static_cast<std::size_t>(d)]);
      if (!piece) continue;
      set_bit(claimed[static_cast<std::size_t>(d)], *piece);
      links.push_back({static_cast<std::int32_t>(p), d, *piece});
      ++active[p];
    }
  }

  // Uploader capacity splits equally over its active unchokes; downloader
  // intake is capped by scaling all inbound offers proportionally.
  std::vector<double> inbound(n, 0.0);
  for (Link& l : links) {
    l.offer = upload_bps_[static_cast<std::size_t>(l.up)] * cfg_.round_seconds /
              active[static_cast<std::size_t>(l.up)];
    inbound[static_cast<std::size_t>(l.down)] += l.offer;
  }
  std::vector<double> scale(n, 1.0);
  std::vector<double> sent(n, 0.0);
  std::vector<double> received(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    const double cap = download_bps_[p] * cfg_.round_seconds;
    if (inbound[p] > cap) scale[p] = cap / inbound[p];
  }

  const double piece_bits = cfg_.piece_size_bits();
  std::vector<std::pair<std::int32_t, int>> completed;
  for (const Link& l : links) {
    auto& progress = partial_[static_cast<std::size_t>(l.down)];
    auto it = std::find_if(progress.begin(), progress.end(),
                           [&](const auto& pr) { return pr.first == l.piece; });
    if (it == progress.end()) {
      progress.emplace_back(l.piece, 0.0);
      it = progress.end() - 1;
    }
    const double remaining = piece_bits - it->second;
    const double bits =
        std::min(l.offer * scale[static_cast<std::size_t>(l.down)], remaining);
    it->second += bits;
    sent[static_cast<std::size_t>(l.up)] += bits;
    received[static_cast<std::size_t>(l.down)] += bits;
    total_received_bits_[static_cast<std::size_t>(l.down)] += bits;
    received_cur_[static_cast<std::size_t>(l.down)]
                 [slot_of(l.down, l.up)] += bits;
    if (it->second >= piece_bits - kBitsEpsilon) {
      completed.emplace_back(l.down, l.piece);
      progress.erase(it);
    }
  }

  // Pieces become sharable only at the end of the round.
  for (const auto& [peer, piece] : completed) {
    complete_piece(peer, piece);
  }

  for (std::size_t p = 0; p < n; ++p) {
    const double up_cap = upload_bps_[p] * cfg_.round_seconds;
    const double down_cap = download_bps_[p] * cfg_.round_seconds;
    max_up_util_ = std::max(max_up_util_, sent[p] / up_cap);
    max_down_util_ = std::max(max_down_util_, received[p] / down_cap);
    std::swap(received_prev_[p], received_cur_[p]);
    std::fill(received_cur_[p].begin(), received_cur_[p].end(), 0.0);
  }
  ++round_;
}

void Swarm::grant_piece(std::int32_t peer, int piece) {
  if (!has_piece(peer, piece)) complete_piece(peer, piece);
}

void Swarm::set_upload_bps(std::int32_t peer, double bps) {
  upload_bps_[static_cast<std::size_t>(peer)] = bps;
}

double Swarm::received_prev_round_bits(std::int32_t peer,
                                       std::int32_t from) const {
  return received_prev_[static_cast<std::size_t>(peer)][slot_of(peer, from)];
}

ExchangeResult run_exchange(const ExchangeConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  OverlayGraph overlay = random_overlay(cfg.num_peers, cfg.target_peer_set, rng);
  Swarm swarm(cfg, std::move(overlay), rng);

  ExchangeResult result;
  result.source = swarm.source();
  while (!swarm.all_complete() && swarm.round() < cfg.rounds_limit) {
    swarm.step_round(rng);
    if (cfg.record_series) {
      std::vector<std::uint16_t> row(static_cast<std::size_t>(cfg.num_peers));
      for (std::int32_t p = 0; p < cfg.num_peers; ++p) {
        row[static_cast<std::size_t>(p)] =
            static_cast<std::uint16_t>(swarm.pieces_held(p));
      }
      result.pieces_series.push_back(std::move(row));
    }
  }
  result.rounds = swarm.round();
  result.all_complete = swarm.all_complete();
  result.completion_round.resize(static_cast<std::size_t>(cfg.num_peers));
  double sum = 0.0;
  long counted = 0;
  for (std::int32_t p = 0; p < cfg.num_peers; ++p) {
    const long r = swarm.completion_round(p);
    result.completion_round[static_cast<std::size_t>(p)] = r;
    if (p != swarm.source() && r >= 0) {
      sum += (static_cast<double>(r) + 1.0) * cfg.round_seconds;
      ++counted;
    }
  }
  result.mean_completion_s = counted > 0 ? sum / counted : 0.0;
  result.max_upload_utilization = swarm.max_upload_utilization();
  result.max_download_utilization = swarm.max_download_utilization();
  return result;
}

}  // namespace btsim
