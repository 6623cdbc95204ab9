#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "btsim/overlay_graph.hpp"
#include "btsim/rng.hpp"

namespace btsim {

struct ExchangeConfig {
  int num_peers = 1000;
  int target_peer_set = 50;
  long long file_size_bytes = 100LL * 1000 * 1000;  // 100 MB
  int num_pieces = 100;
  double download_capacity_bps = 1'000'000.0;  // 1 Mbit/s
  double upload_lo_bps = 160'000.0;            // uniform per-peer draw
  double upload_hi_bps = 350'000.0;
  int regular_slots = 3;
  int optimistic_slots = 1;
  double round_seconds = 10.0;
  long rounds_limit = 100000;
  bool record_series = false;  // per-round per-peer piece counts

  double piece_size_bits() const {
    return static_cast<double>(file_size_bytes) * 8.0 / num_pieces;
  }
  void validate() const;  // throws std::invalid_argument
};

// Sequential random overlay from the piece-exchange experiment: peers are
// processed in index order and draw random distinct partners until they
// reach target_degree or no eligible partner (degree below the cap) is
// left. Throws std::invalid_argument when n <= target_degree.
OverlayGraph random_overlay(std::int32_t n, std::int32_t target_degree,
                            Rng& rng);

// Round-based swarm over a fixed overlay. One peer starts as the source
// with every piece; everybody else starts empty.
class Swarm {
 public:
  Swarm(const ExchangeConfig& cfg, OverlayGraph overlay, Rng& rng);

  // Re-evaluates the unchoke set of one peer: the regular slots go to the
  // neighbors with the highest data receiving rates over the previous round
  // (ties by arrival index), plus optimistic unchokes drawn uniformly from
  // the remaining interested neighbors. Completed peers rotate their slots
  // round-robin over interested neighbors instead.
  void rechoke(std::int32_t peer, Rng& rng);

  // Local rarest first among the pieces uploader has and downloader lacks;
  // ties are broken uniformly at random. Pieces already being served to the
  // downloader in the current round can be excluded via claimed.
  std::optional<int> select_piece(std::int32_t uploader,
                                  std::int32_t downloader, Rng& rng,
                                  const std::vector<std::uint64_t>* claimed =
                                      nullptr) const;

  // One 10-second round: rechoke everybody, pick pieces per unchoke edge,
  // move capacity-limited piece data, flip completed bits at round end.
  void step_round(Rng& rng);

  bool all_complete() const { return complete_peers_ == num_peers(); }
  std::int32_t num_peers() const { return overlay_.num_peers_ever; }
  std::int32_t source() const { return source_; }
  int round() const { return round_; }
  int pieces_held(std::int32_t peer) const {
    return have_count_[static_cast<std::size_t>(peer)];
  }
  long completion_round(std::int32_t peer) const {
    return completion_round_[static_cast<std::size_t>(peer)];
  }
  bool has_piece(std::int32_t peer, int piece) const;
  const std::vector<std::int32_t>& unchoked(std::int32_t peer) const {
    return unchoked_[static_cast<std::size_t>(peer)];
  }
  double upload_bps(std::int32_t peer) const {
    return upload_bps_[static_cast<std::size_t>(peer)];
  }
  const OverlayGraph& overlay() const { return overlay_; }
  double max_upload_utilization() const { return max_up_util_; }
  double max_download_utilization() const { return max_down_util_; }
  double total_received_bits(std::int32_t peer) const {
    return total_received_bits_[static_cast<std::size_t>(peer)];
  }

  // Test hooks.
  void grant_piece(std::int32_t peer, int piece);
  void set_upload_bps(std::int32_t peer, double bps);
  double received_prev_round_bits(std::int32_t peer, std::int32_t from) const;

 private:
  bool interested(std::int32_t downloader, std::int32_t uploader) const;
  std::size_t slot_of(std::int32_t peer, std::int32_t neighbor) const;
  void complete_piece(std::int32_t peer, int piece);

  ExchangeConfig cfg_;
  OverlayGraph overlay_;
  Adjacency adj_;
  std::int32_t source_ = -1;
  int round_ = 0;
  std::int32_t complete_peers_ = 0;

  std::vector<std::vector<std::uint64_t>> have_;
  std::vector<int> have_count_;
  std::vector<long> completion_round_;  // -1 while incomplete
  std::vector<double> upload_bps_;
  std::vector<double> download_bps_;
  std::vector<std::vector<std::int32_t>> unchoked_;
  std::vector<std::int32_t> seed_rotation_;  // round-robin cursor per peer
  // Bits received per (peer, adjacency slot), previous and current round.
  std::vector<std::vector<double>> received_prev_;
  std::vector<std::vector<double>> received_cur_;
  // Partial piece progress in bits, sparse per peer.
  std::vector<std::vector<std::pair<int, double>>> partial_;
  // Replication count of each piece within a peer's neighbor set.
  std::vector<std::vector<std::int32_t>> neighbor_have_;
  std::vector<double> total_received_bits_;
  double max_up_util_ = 0.0;
  double max_down_util_ = 0.0;
};

struct ExchangeResult {
  int rounds = 0;
  bool all_complete = false;
  std::int32_t source = -1;
  std::vector<long> completion_round;
  double mean_completion_s = 0.0;  // over completed leechers
  double max_upload_utilization = 0.0;
  double max_download_utilization = 0.0;
  std::vector<std::vector<std::uint16_t>> pieces_series;  // if recorded
};

ExchangeResult run_exchange(const ExchangeConfig& cfg, std::uint64_t seed);

}  // namespace btsim
