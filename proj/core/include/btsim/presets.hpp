#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "btsim/config.hpp"
#include "btsim/exchange.hpp"
#include "btsim/metrics.hpp"
#include "btsim/simulation.hpp"

namespace btsim {

// Fixed published seed set; every reference CSV in the repository is
// reproducible from (preset, seed) with these.
inline constexpr std::array<std::uint64_t, 10> kDefaultSeeds = {
    101, 102, 103, 104, 105, 106, 107, 108, 109, 110};

std::vector<std::uint64_t> default_seeds();

// ---------------------------------------------------------------------------
// Named experiment configurations.
// ---------------------------------------------------------------------------

// Flagship torrent: 1867 peers over four 10-minute slots, peer set cap 80,
// 40 outgoing, 50 returned, re-contact threshold 20, no NAT, no PEX.
ScenarioConfig initial_scenario_config();

// Same protocol parameters with a scaled arrival amplitude (1000 -> 1867
// peers, 3000 -> 5598, 5000 -> 9329).
ScenarioConfig torrent_size_config(double amplitude);

// Peer-set sweep point: outgoing cap delta/2, tracker return count
// (delta + outgoing)/2, threshold 20.
ScenarioConfig maxps_config(int delta);

// Outgoing-connections sweep point at peer set cap 80.
ScenarioConfig maxoc_config(int max_outgoing);

// NAT sweep point on the flagship torrent.
ScenarioConfig nat_config(double nat_fraction);

// PEX torrent: 1000 peers arriving over six slots within the first hour,
// departures uniform over the second hour, gossip period one minute.
ScenarioConfig pex_config();

// Piece-exchange experiment at a given overlay peer set size.
ExchangeConfig exchange_config(int target_peer_set);

// ---------------------------------------------------------------------------
// Per-run reduction shared by the presets, the CLI and the acceptance suite.
// ---------------------------------------------------------------------------

struct SeriesPoint {
  double t = 0.0;
  double avg_peer_set = 0.0;
  int diameter = -1;  // -1: not computed; 0: partitioned
  int n_partitions = 0;
  std::int32_t largest_partition = 0;
  std::int32_t alive = 0;
};

struct StatsOptions {
  double stop_time_s = std::numeric_limits<double>::infinity();
  double probe_time_s = 600.0;  // snapshot the analyses focus on
  int head_size = 80;
  std::size_t diameter_sample = 1000;
  int diameter_stride = 1;             // 0 disables series diameters
  std::int32_t diameter_min_alive = 2; // skip snapshots below this
  bool keep_probe_graph = false;
};

struct RunStats {
  std::uint64_t seed = 0;
  std::vector<SeriesPoint> series;
  std::int32_t peak_alive = 0;
  double probe_t = 0.0;
  std::int32_t probe_alive = 0;
  std::vector<std::int32_t> probe_degree;  // -1 for departed peers
  long long probe_bottleneck = 0;          // head boundary edges
  long long probe_intra_head = 0;          // edges inside the head
  int probe_diameter = -1;
  std::vector<std::int32_t> probe_partitions;  // descending sizes
  OverlayGraph probe_graph;                    // when requested
};

RunStats reduce_run(const SimulationResult& result, const StatsOptions& opt);
RunStats run_and_reduce(const ScenarioConfig& cfg, std::uint64_t seed,
                        const StatsOptions& opt);

// ---------------------------------------------------------------------------
// Robustness harness: static percolation sweeps over one snapshot.
// ---------------------------------------------------------------------------

struct RobustnessRow {
  std::string mode;  // "attack" | "churn"
  double fraction = 0.0;
  int n_partitions = 0;
  std::int32_t largest = 0;
};

// Both modes over all fractions; churn removal uses the given seed.
std::vector<RobustnessRow> robustness_rows(const OverlayGraph& snapshot,
                                           const std::vector<double>& fractions,
                                           std::uint64_t seed);

std::vector<double> default_robustness_fractions();

// ---------------------------------------------------------------------------
// Presets and figure exports.
// ---------------------------------------------------------------------------

struct PresetOptions {
  std::vector<std::uint64_t> seeds = default_seeds();
  std::size_t diameter_sample = 1000;
  int threads = 0;  // 0: hardware concurrency
  double snapshot_interval_s = 60.0;
};

struct PresetOutput {
  std::string dir;
  std::vector<std::string> files;  // relative to dir
};

const std::vector<std::string>& preset_names();

// Runs every seed of the named preset and writes one CSV per figure plus a
// manifest.json into out_dir/<preset>/. Unknown names throw
// std::invalid_argument listing the valid presets.
PresetOutput run_preset(const std::string& name, const std::string& out_dir,
                        const PresetOptions& options = {});

// Figure ids of a preset (the CSV file stems it produces).
std::vector<std::string> figure_ids(const std::string& preset);

// Materializes the preset and returns the path of the requested figure's
// CSV. Throws std::invalid_argument for unknown figure ids.
std::string export_figure(const std::string& preset, const std::string& figure,
                          const std::string& out_dir,
                          const PresetOptions& options = {});

// Maps n elements over a pool of worker threads (n_threads <= 0 picks the
// hardware concurrency); results are produced in index order.
void parallel_for_index(std::size_t n, int n_threads,
                        const std::function<void(std::size_t)>& fn);

// Mean/min/max helper for per-seed aggregation.
struct Agg {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};
Agg aggregate(const std::vector<double>& values);

}  // namespace btsim
