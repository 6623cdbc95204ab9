#include "btsim/presets.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "btsim/analysis.hpp"
#include "btsim/csv.hpp"

namespace btsim {

namespace fs = std::filesystem;

std::vector<std::uint64_t> default_seeds() {
  return {kDefaultSeeds.begin(), kDefaultSeeds.end()};
}

// ---------------------------------------------------------------------------
// Experiment configurations.
// ---------------------------------------------------------------------------

ScenarioConfig initial_scenario_config() {
  ScenarioConfig cfg;
  cfg.max_peer_set = 80;
  cfg.max_outgoing = 40;
  cfg.tracker_return_count = 50;
  cfg.recontact_threshold = 20;
  cfg.arrival_law = ExponentialSlots{1000.0, 0.7, 10.0, 4};
  // The 10..30 minute range reproduces the reference torrent: a 70-minute
  // torrent lifetime and a simultaneous-population peak near 1250.
  cfg.lifetime_law = UniformMinutes{10.0, 30.0};
  return cfg;
}

ScenarioConfig torrent_size_config(double amplitude) {
  ScenarioConfig cfg = initial_scenario_config();
  cfg.arrival_law = ExponentialSlots{amplitude, 0.7, 10.0, 4};
  return cfg;
}

ScenarioConfig maxps_config(int delta) {
  ScenarioConfig cfg = initial_scenario_config();
  cfg.max_peer_set = delta;
  cfg.max_outgoing = delta / 2;
  cfg.tracker_return_count = (delta + delta / 2) / 2;
  cfg.recontact_threshold = std::min(20, delta);
  return cfg;
}

ScenarioConfig maxoc_config(int max_outgoing) {
  ScenarioConfig cfg = initial_scenario_config();
  cfg.max_outgoing = max_outgoing;
  cfg.tracker_return_count = (cfg.max_peer_set + max_outgoing + 1) / 2;
  return cfg;
}

ScenarioConfig nat_config(double nat_fraction) {
  ScenarioConfig cfg = initial_scenario_config();
  cfg.nat_fraction = nat_fraction;
  return cfg;
}

ScenarioConfig pex_config() {
  ScenarioConfig cfg = initial_scenario_config();
  cfg.pex_enabled = true;
  // Six slots whose ceil'd counts sum to exactly 1000 peers over the hour.
  cfg.arrival_law = ExponentialSlots{509.7, 0.7, 10.0, 6};
  cfg.lifetime_law = UniformWindow{minutes(60.0), minutes(120.0)};
  return cfg;
}

ExchangeConfig exchange_config(int target_peer_set) {
  ExchangeConfig cfg;
  cfg.target_peer_set = target_peer_set;
  return cfg;
}

// ---------------------------------------------------------------------------
// Reductions.
// ---------------------------------------------------------------------------

RunStats reduce_run(const SimulationResult& result, const StatsOptions& opt) {
  RunStats stats;
  stats.seed = result.seed;
  Rng metrics_rng(Rng::mix(result.seed, 0xD1A));
  stats.series.reserve(result.snapshots.size());
  for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
    const OverlayGraph& g = result.snapshots.graphs[i];
    SeriesPoint pt;
    pt.t = result.snapshots.times[i];
    pt.alive = g.alive_count();
    pt.avg_peer_set = average_peer_set_size(g);
    const std::vector<std::int32_t> parts = partitions(g);
    pt.n_partitions = static_cast<int>(parts.size());
    pt.largest_partition = parts.empty() ? 0 : parts.front();
    if (opt.diameter_stride > 0 &&
        i % static_cast<std::size_t>(opt.diameter_stride) == 0 &&
        pt.alive >= opt.diameter_min_alive) {
      pt.diameter = diameter_estimate(g, opt.diameter_sample, metrics_rng);
    }
    stats.peak_alive = std::max(stats.peak_alive, pt.alive);
    stats.series.push_back(std::move(pt));
  }

  if (opt.probe_time_s <= result.end_time_s) {
    OverlayGraph probe = result.snapshot_at(opt.probe_time_s);
    stats.probe_t = opt.probe_time_s;
    stats.probe_alive = probe.alive_count();
    const std::vector<std::int32_t> deg = probe.degrees();
    stats.probe_degree.assign(static_cast<std::size_t>(probe.num_peers_ever),
                              -1);
    for (std::int32_t i = 0; i < probe.num_peers_ever; ++i) {
      if (probe.alive[static_cast<std::size_t>(i)]) {
        stats.probe_degree[static_cast<std::size_t>(i)] =
            deg[static_cast<std::size_t>(i)];
      }
    }
    stats.probe_bottleneck = bottleneck_count(probe, opt.head_size);
    stats.probe_intra_head = head_internal_count(probe, opt.head_size);
    stats.probe_partitions = partitions(probe);
    stats.probe_diameter =
        diameter_estimate(probe, opt.diameter_sample, metrics_rng);
    if (opt.keep_probe_graph) stats.probe_graph = std::move(probe);
  }
  return stats;
}

RunStats run_and_reduce(const ScenarioConfig& cfg, std::uint64_t seed,
                        const StatsOptions& opt) {
  RunOptions run_opt;
  run_opt.stop_time_s = opt.stop_time_s;
  run_opt.keep_tracker_log = false;
  SimulationResult result = run_scenario(cfg, seed, run_opt);
  return reduce_run(result, opt);
}

std::vector<RobustnessRow> robustness_rows(const OverlayGraph& snapshot,
                                           const std::vector<double>& fractions,
                                           std::uint64_t seed) {
  std::vector<RobustnessRow> rows;
  Rng churn_rng(Rng::mix(seed, 0xC0FFEE));
  for (double f : fractions) {
    const std::vector<std::int32_t> pa = partitions(attack(snapshot, f));
    rows.push_back({"attack", f, static_cast<int>(pa.size()),
                    pa.empty() ? 0 : pa.front()});
  }
  for (double f : fractions) {
    const std::vector<std::int32_t> pc =
        partitions(churn(snapshot, f, churn_rng));
    rows.push_back({"churn", f, static_cast<int>(pc.size()),
                    pc.empty() ? 0 : pc.front()});
  }
  return rows;
}

std::vector<double> default_robustness_fractions() {
  std::vector<double> fractions;
  for (int i = 1; i <= 19; ++i) fractions.push_back(i * 0.05);
  return fractions;
}

// ---------------------------------------------------------------------------
// Worker pool.
// ---------------------------------------------------------------------------

void parallel_for_index(std::size_t n, int n_threads,
                        const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = n_threads > 0
                            ? static_cast<std::size_t>(n_threads)
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

Agg aggregate(const std::vector<double>& values) {
  Agg a;
  if (values.empty()) return a;
  a.min = a.max = values.front();
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    a.min = std::min(a.min, v);
    a.max = std::max(a.max, v);
  }
  a.mean = sum / static_cast<double>(values.size());
  return a;
}

// ---------------------------------------------------------------------------
// Preset machinery.
// ---------------------------------------------------------------------------

namespace {

const char* kPresetList[] = {
    "initial-scenario", "torrent-size-sweep", "maxps-sweep", "maxoc-sweep",
    "nat-sweep",        "pex-1000",           "exchange-sweep",
    "convergence-table"};

SeriesPoint padded_point(double t) {
  SeriesPoint pt;
  pt.t = t;
  pt.diameter = 0;  // an ended torrent counts as empty/partitioned
  return pt;
}

// Per-time-index aggregation across seeds; shorter runs are padded with the
// empty-torrent point.
struct SeriesTable {
  std::vector<double> t;
  std::vector<Agg> avg, alive, n_partitions, largest;
  std::vector<Agg> diameter;
  std::vector<int> diameter_n;  // how many seeds had a computed diameter
};

SeriesTable aggregate_series(const std::vector<RunStats>& runs,
                             double interval_s) {
  SeriesTable table;
  std::size_t len = 0;
  for (const RunStats& r : runs) len = std::max(len, r.series.size());
  for (std::size_t i = 0; i < len; ++i) {
    const double t = static_cast<double>(i) * interval_s;
    std::vector<double> avg, alive, nparts, largest, diam;
    for (const RunStats& r : runs) {
      const SeriesPoint pt =
          i < r.series.size() ? r.series[i] : padded_point(t);
      avg.push_back(pt.avg_peer_set);
      alive.push_back(pt.alive);
      nparts.push_back(pt.n_partitions);
      largest.push_back(pt.largest_partition);
      if (pt.diameter >= 0) diam.push_back(pt.diameter);
    }
    table.t.push_back(t);
    table.avg.push_back(aggregate(avg));
    table.alive.push_back(aggregate(alive));
    table.n_partitions.push_back(aggregate(nparts));
    table.largest.push_back(aggregate(largest));
    table.diameter.push_back(aggregate(diam));
    table.diameter_n.push_back(static_cast<int>(diam.size()));
  }
  return table;
}

std::string fmt_seed_list(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(seeds[i]);
  }
  return out;
}

// Every output embeds the resolved scenario and the seed list, so each row
// is reproducible from (preset, seed) alone.
void stamp(CsvWriter& csv, const std::string& preset,
           const std::vector<std::uint64_t>& seeds,
           const std::string& config_text) {
  csv.comment("preset: " + preset);
  csv.comment("seeds: " + fmt_seed_list(seeds));
  std::size_t begin = 0;
  while (begin < config_text.size()) {
    std::size_t end = config_text.find('\n', begin);
    if (end == std::string::npos) end = config_text.size();
    csv.comment("config: " + config_text.substr(begin, end - begin));
    begin = end + 1;
  }
}

class PresetWriter {
 public:
  PresetWriter(const std::string& preset, const std::string& out_dir,
               const PresetOptions& options)
      : preset_(preset), options_(options) {
    dir_ = (fs::path(out_dir) / preset).string();
    fs::create_directories(dir_);
  }

  CsvWriter open(const std::string& figure,
                 const std::string& config_text = "") {
    const std::string file = figure + ".csv";
    files_.push_back(file);
    CsvWriter csv((fs::path(dir_) / file).string());
    stamp(csv, preset_, options_.seeds, config_text);
    return csv;
  }

  void write_manifest(const std::string& config_text) {
    nlohmann::json manifest;
    manifest["preset"] = preset_;
    manifest["seeds"] = options_.seeds;
    manifest["files"] = files_;
    manifest["config"] = config_text;
    std::ofstream out(fs::path(dir_) / "manifest.json");
    out << manifest.dump(2) << "\n";
    files_.push_back("manifest.json");
  }

  PresetOutput output() const { return {dir_, files_}; }

 private:
  std::string preset_;
  PresetOptions options_;
  std::string dir_;
  std::vector<std::string> files_;
};

std::vector<RunStats> run_seeds(const ScenarioConfig& base,
                                const StatsOptions& stats_opt,
                                const PresetOptions& options) {
  ScenarioConfig cfg = base;
  cfg.snapshot_interval_s = options.snapshot_interval_s;
  cfg.runs = static_cast<int>(options.seeds.size());
  StatsOptions opt = stats_opt;
  opt.diameter_sample = options.diameter_sample;
  std::vector<RunStats> runs(options.seeds.size());
  parallel_for_index(options.seeds.size(), options.threads,
                     [&](std::size_t i) {
                       runs[i] = run_and_reduce(cfg, options.seeds[i], opt);
                     });
  return runs;
}

void write_timeseries(CsvWriter& csv, const SeriesTable& table) {
  csv.header({"t", "avg_peer_set_mean", "avg_peer_set_min", "avg_peer_set_max",
              "diameter_mean", "diameter_min", "diameter_max",
              "n_partitions_mean", "n_partitions_min", "n_partitions_max",
              "alive_mean", "alive_min", "alive_max"});
  for (std::size_t i = 0; i < table.t.size(); ++i) {
    std::vector<std::string> cells;
    cells.push_back(CsvWriter::num(table.t[i]));
    cells.push_back(CsvWriter::num(table.avg[i].mean));
    cells.push_back(CsvWriter::num(table.avg[i].min));
    cells.push_back(CsvWriter::num(table.avg[i].max));
    if (table.diameter_n[i] > 0) {
      cells.push_back(CsvWriter::num(table.diameter[i].mean));
      cells.push_back(CsvWriter::num(table.diameter[i].min));
      cells.push_back(CsvWriter::num(table.diameter[i].max));
    } else {
      cells.insert(cells.end(), {"", "", ""});
    }
    cells.push_back(CsvWriter::num(table.n_partitions[i].mean));
    cells.push_back(CsvWriter::num(table.n_partitions[i].min));
    cells.push_back(CsvWriter::num(table.n_partitions[i].max));
    cells.push_back(CsvWriter::num(table.alive[i].mean));
    cells.push_back(CsvWriter::num(table.alive[i].min));
    cells.push_back(CsvWriter::num(table.alive[i].max));
    csv.row(cells);
  }
}

void write_arrival_process(CsvWriter& csv, const SeriesTable& table) {
  csv.header({"t", "alive_mean", "alive_min", "alive_max"});
  for (std::size_t i = 0; i < table.t.size(); ++i) {
    csv.row({CsvWriter::num(table.t[i]), CsvWriter::num(table.alive[i].mean),
             CsvWriter::num(table.alive[i].min),
             CsvWriter::num(table.alive[i].max)});
  }
}

void write_degree_by_id(CsvWriter& csv, const std::vector<RunStats>& runs) {
  csv.header({"peer_id", "seeds_alive", "degree_mean", "degree_min",
              "degree_max"});
  std::size_t n = 0;
  for (const RunStats& r : runs) n = std::max(n, r.probe_degree.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> deg;
    for (const RunStats& r : runs) {
      if (i < r.probe_degree.size() && r.probe_degree[i] >= 0) {
        deg.push_back(r.probe_degree[i]);
      }
    }
    if (deg.empty()) continue;
    const Agg a = aggregate(deg);
    csv.row({CsvWriter::num(static_cast<long long>(i)),
             CsvWriter::num(static_cast<long long>(deg.size())),
             CsvWriter::num(a.mean), CsvWriter::num(a.min),
             CsvWriter::num(a.max)});
  }
}

void write_connectivity_matrix(CsvWriter& csv, const OverlayGraph& g,
                               std::uint64_t seed) {
  csv.comment("single run, seed " + std::to_string(seed));
  csv.header({"i", "j"});
  for (const Edge& e : connectivity_matrix(g)) {
    csv.row({CsvWriter::num(static_cast<long long>(e.first)),
             CsvWriter::num(static_cast<long long>(e.second))});
  }
}

void write_robustness(CsvWriter& csv, const std::vector<RunStats>& runs,
                      const std::vector<std::uint64_t>& seeds,
                      const std::vector<double>& fractions) {
  csv.header({"mode", "fraction", "n_partitions_mean", "n_partitions_min",
              "n_partitions_max", "largest_mean", "largest_min",
              "largest_max"});
  std::vector<std::vector<RobustnessRow>> per_seed(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    per_seed[i] = robustness_rows(runs[i].probe_graph, fractions, seeds[i]);
  }
  if (per_seed.empty()) return;
  for (std::size_t row = 0; row < per_seed.front().size(); ++row) {
    std::vector<double> nparts, largest;
    for (const auto& rows : per_seed) {
      nparts.push_back(rows[row].n_partitions);
      largest.push_back(rows[row].largest);
    }
    const Agg an = aggregate(nparts);
    const Agg al = aggregate(largest);
    csv.row({per_seed.front()[row].mode,
             CsvWriter::num(per_seed.front()[row].fraction),
             CsvWriter::num(an.mean), CsvWriter::num(an.min),
             CsvWriter::num(an.max), CsvWriter::num(al.mean),
             CsvWriter::num(al.min), CsvWriter::num(al.max)});
  }
}

// --- presets ---------------------------------------------------------------

PresetOutput preset_initial_scenario(const std::string& out_dir,
                                     const PresetOptions& options) {
  const ScenarioConfig cfg = initial_scenario_config();
  StatsOptions opt;
  opt.keep_probe_graph = true;
  const std::vector<RunStats> runs = run_seeds(cfg, opt, options);
  const SeriesTable table =
      aggregate_series(runs, options.snapshot_interval_s);
  const std::string text = to_scenario_text(cfg);

  PresetWriter w("initial-scenario", out_dir, options);
  {
    CsvWriter csv = w.open("metrics_timeseries", text);
    write_timeseries(csv, table);
  }
  {
    CsvWriter csv = w.open("arrival_process", text);
    write_arrival_process(csv, table);
  }
  {
    CsvWriter csv = w.open("degree_by_id", text);
    csv.comment("probe at t = 600 s");
    write_degree_by_id(csv, runs);
  }
  {
    CsvWriter csv = w.open("connectivity_matrix", text);
    write_connectivity_matrix(csv, runs.front().probe_graph,
                              options.seeds.front());
  }
  {
    CsvWriter csv = w.open("bottleneck", text);
    csv.header({"seed", "head_size", "boundary_edges", "intra_head_edges"});
    for (std::size_t i = 0; i < runs.size(); ++i) {
      csv.row({CsvWriter::num(static_cast<long long>(options.seeds[i])),
               CsvWriter::num(opt.head_size),
               CsvWriter::num(runs[i].probe_bottleneck),
               CsvWriter::num(runs[i].probe_intra_head)});
    }
  }
  {
    CsvWriter csv = w.open("robustness", text);
    csv.comment("static percolation on the t = 600 s snapshot");
    write_robustness(csv, runs, options.seeds, default_robustness_fractions());
  }
  w.write_manifest(text);
  return w.output();
}

PresetOutput preset_torrent_size_sweep(const std::string& out_dir,
                                       const PresetOptions& options) {
  const double amplitudes[] = {1000.0, 3000.0, 5000.0};
  PresetWriter w("torrent-size-sweep", out_dir, options);
  CsvWriter summary = w.open("size_summary");
  summary.header({"amplitude", "total_peers", "peak_alive_mean",
                  "peak_alive_min", "peak_alive_max", "avg_peer_set_mean",
                  "avg_peer_set_min", "avg_peer_set_max", "diameter_mean",
                  "diameter_min", "diameter_max"});
  CsvWriter series = w.open("size_timeseries");
  series.header({"total_peers", "t", "avg_peer_set_mean", "diameter_mean",
                 "alive_mean"});
  CsvWriter robust = w.open("size_robustness");
  robust.header({"total_peers", "mode", "fraction", "n_partitions_mean",
                 "largest_mean"});
  for (double amplitude : amplitudes) {
    const ScenarioConfig cfg = torrent_size_config(amplitude);
    StatsOptions opt;
    opt.diameter_stride = 5;
    opt.diameter_min_alive = 200;
    opt.keep_probe_graph = true;
    const std::vector<RunStats> runs = run_seeds(cfg, opt, options);
    long long total = 0;
    for (long c : slot_arrival_counts(std::get<ExponentialSlots>(cfg.arrival_law))) {
      total += c;
    }
    std::vector<double> peaks, avgs, diams;
    for (const RunStats& r : runs) {
      peaks.push_back(r.peak_alive);
      avgs.push_back(average_peer_set_size(r.probe_graph));
      diams.push_back(r.probe_diameter);
    }
    const Agg ap = aggregate(peaks);
    const Agg aa = aggregate(avgs);
    const Agg ad = aggregate(diams);
    summary.row({CsvWriter::num(amplitude), CsvWriter::num(total),
                 CsvWriter::num(ap.mean), CsvWriter::num(ap.min),
                 CsvWriter::num(ap.max), CsvWriter::num(aa.mean),
                 CsvWriter::num(aa.min), CsvWriter::num(aa.max),
                 CsvWriter::num(ad.mean), CsvWriter::num(ad.min),
                 CsvWriter::num(ad.max)});
    const SeriesTable table =
        aggregate_series(runs, options.snapshot_interval_s);
    for (std::size_t i = 0; i < table.t.size(); ++i) {
      series.row({CsvWriter::num(total), CsvWriter::num(table.t[i]),
                  CsvWriter::num(table.avg[i].mean),
                  table.diameter_n[i] > 0
                      ? CsvWriter::num(table.diameter[i].mean)
                      : std::string{},
                  CsvWriter::num(table.alive[i].mean)});
    }
    const std::vector<double> fractions = default_robustness_fractions();
    std::vector<std::vector<RobustnessRow>> per_seed(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
      per_seed[i] =
          robustness_rows(runs[i].probe_graph, fractions, options.seeds[i]);
    }
    for (std::size_t row = 0; row < per_seed.front().size(); ++row) {
      std::vector<double> nparts, largest;
      for (const auto& rows : per_seed) {
        nparts.push_back(rows[row].n_partitions);
        largest.push_back(rows[row].largest);
      }
      robust.row({CsvWriter::num(total), per_seed.front()[row].mode,
                  CsvWriter::num(per_seed.front()[row].fraction),
                  CsvWriter::num(aggregate(nparts).mean),
                  CsvWriter::num(aggregate(largest).mean)});
    }
  }
  w.write_manifest(to_scenario_text(initial_scenario_config()));
  return w.output();
}

PresetOutput preset_maxps_sweep(const std::string& out_dir,
                                const PresetOptions& options) {
  PresetWriter w("maxps-sweep", out_dir, options);
  CsvWriter summary = w.open("maxps_summary");
  summary.comment("probe at t = 600 s; outgoing cap = delta/2, "
                  "tracker return = 3*delta/4");
  summary.header({"max_peer_set", "avg_peer_set_mean", "avg_peer_set_min",
                  "avg_peer_set_max", "diameter_mean", "diameter_min",
                  "diameter_max", "n_partitions_mean"});
  for (int delta = 20; delta <= 200; delta += 20) {
    const ScenarioConfig cfg = maxps_config(delta);
    StatsOptions opt;
    opt.stop_time_s = 660.0;
    opt.diameter_stride = 0;
    opt.keep_probe_graph = true;
    const std::vector<RunStats> runs = run_seeds(cfg, opt, options);
    std::vector<double> avgs, diams, nparts;
    for (const RunStats& r : runs) {
      avgs.push_back(average_peer_set_size(r.probe_graph));
      diams.push_back(r.probe_diameter);
      nparts.push_back(static_cast<double>(r.probe_partitions.size()));
    }
    const Agg aa = aggregate(avgs);
    const Agg ad = aggregate(diams);
    summary.row({CsvWriter::num(delta), CsvWriter::num(aa.mean),
                 CsvWriter::num(aa.min), CsvWriter::num(aa.max),
                 CsvWriter::num(ad.mean), CsvWriter::num(ad.min),
                 CsvWriter::num(ad.max),
                 CsvWriter::num(aggregate(nparts).mean)});
  }
  w.write_manifest(to_scenario_text(maxps_config(80)));
  return w.output();
}

PresetOutput preset_maxoc_sweep(const std::string& out_dir,
                                const PresetOptions& options) {
  PresetWriter w("maxoc-sweep", out_dir, options);
  CsvWriter summary = w.open("maxoc_summary");
  summary.comment("probe at t = 600 s; peer set cap 80");
  summary.header({"max_outgoing", "avg_peer_set_mean", "avg_peer_set_min",
                  "avg_peer_set_max", "diameter_mean", "n_partitions_mean",
                  "boundary_edges_mean", "intra_head_edges_mean"});
  CsvWriter detail = w.open("maxoc_detail");
  detail.header({"max_outgoing", "seed", "avg_peer_set", "diameter",
                 "n_partitions", "boundary_edges", "intra_head_edges",
                 "head_share_in_one_component"});
  for (int o = 5; o <= 80; o += 5) {
    const ScenarioConfig cfg = maxoc_config(o);
    StatsOptions opt;
    opt.stop_time_s = 660.0;
    opt.diameter_stride = 0;
    opt.keep_probe_graph = true;
    const std::vector<RunStats> runs = run_seeds(cfg, opt, options);
    std::vector<double> avgs, diams, nparts, cross, intra;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const RunStats& r = runs[i];
      const double avg = average_peer_set_size(r.probe_graph);
      avgs.push_back(avg);
      diams.push_back(r.probe_diameter);
      nparts.push_back(static_cast<double>(r.probe_partitions.size()));
      cross.push_back(static_cast<double>(r.probe_bottleneck));
      intra.push_back(static_cast<double>(r.probe_intra_head));
      // Share of the first `head_size` arrivals that sit together in one
      // component.
      const ComponentCensus census = component_census(r.probe_graph);
      std::vector<int> count(census.sizes.size(), 0);
      int head_alive = 0;
      for (std::int32_t p = 0; p < opt.head_size &&
                               p < r.probe_graph.num_peers_ever;
           ++p) {
        const std::int32_t label = census.label[static_cast<std::size_t>(p)];
        if (label >= 0) {
          ++head_alive;
          ++count[static_cast<std::size_t>(label)];
        }
      }
      const int best =
          count.empty() ? 0 : *std::max_element(count.begin(), count.end());
      detail.row({CsvWriter::num(o),
                  CsvWriter::num(static_cast<long long>(options.seeds[i])),
                  CsvWriter::num(avg), CsvWriter::num(r.probe_diameter),
                  CsvWriter::num(static_cast<long long>(
                      r.probe_partitions.size())),
                  CsvWriter::num(r.probe_bottleneck),
                  CsvWriter::num(r.probe_intra_head),
                  CsvWriter::num(head_alive > 0
                                     ? static_cast<double>(best) / head_alive
                                     : 0.0)});
    }
    summary.row({CsvWriter::num(o), CsvWriter::num(aggregate(avgs).mean),
                 CsvWriter::num(aggregate(avgs).min),
                 CsvWriter::num(aggregate(avgs).max),
                 CsvWriter::num(aggregate(diams).mean),
                 CsvWriter::num(aggregate(nparts).mean),
                 CsvWriter::num(aggregate(cross).mean),
                 CsvWriter::num(aggregate(intra).mean)});
  }
  w.write_manifest(to_scenario_text(maxoc_config(40)));
  return w.output();
}

PresetOutput preset_nat_sweep(const std::string& out_dir,
                              const PresetOptions& options) {
  PresetWriter w("nat-sweep", out_dir, options);
  CsvWriter summary = w.open("nat_summary");
  summary.comment("probe at t = 600 s");
  summary.header({"nat_fraction", "avg_peer_set_mean", "avg_peer_set_min",
                  "avg_peer_set_max", "diameter_mean", "diameter_min",
                  "diameter_max", "n_partitions_mean"});
  CsvWriter robust = w.open("nat_robustness");
  robust.header({"nat_fraction", "mode", "fraction", "n_partitions_mean",
                 "n_partitions_min", "n_partitions_max", "largest_mean"});
  const std::vector<double> robustness_levels = {0.0, 0.3, 0.5};
  for (int pct = 0; pct <= 90; pct += 10) {
    const double nat = pct / 100.0;
    const ScenarioConfig cfg = nat_config(nat);
    StatsOptions opt;
    opt.stop_time_s = 660.0;
    opt.diameter_stride = 0;
    opt.keep_probe_graph = true;
    const std::vector<RunStats> runs = run_seeds(cfg, opt, options);
    std::vector<double> avgs, diams, nparts;
    for (const RunStats& r : runs) {
      avgs.push_back(average_peer_set_size(r.probe_graph));
      diams.push_back(r.probe_diameter);
      nparts.push_back(static_cast<double>(r.probe_partitions.size()));
    }
    const Agg aa = aggregate(avgs);
    const Agg ad = aggregate(diams);
    summary.row({CsvWriter::num(nat), CsvWriter::num(aa.mean),
                 CsvWriter::num(aa.min), CsvWriter::num(aa.max),
                 CsvWriter::num(ad.mean), CsvWriter::num(ad.min),
                 CsvWriter::num(ad.max),
                 CsvWriter::num(aggregate(nparts).mean)});
    if (std::find(robustness_levels.begin(), robustness_levels.end(), nat) !=
        robustness_levels.end()) {
      const std::vector<double> fractions = default_robustness_fractions();
      std::vector<std::vector<RobustnessRow>> per_seed(runs.size());
      for (std::size_t i = 0; i < runs.size(); ++i) {
        per_seed[i] =
            robustness_rows(runs[i].probe_graph, fractions, options.seeds[i]);
      }
      for (std::size_t row = 0; row < per_seed.front().size(); ++row) {
        std::vector<double> np, lg;
        for (const auto& rows : per_seed) {
          np.push_back(rows[row].n_partitions);
          lg.push_back(rows[row].largest);
        }
        const Agg an = aggregate(np);
        robust.row({CsvWriter::num(nat), per_seed.front()[row].mode,
                    CsvWriter::num(per_seed.front()[row].fraction),
                    CsvWriter::num(an.mean), CsvWriter::num(an.min),
                    CsvWriter::num(an.max),
                    CsvWriter::num(aggregate(lg).mean)});
      }
    }
  }
  w.write_manifest(to_scenario_text(nat_config(0.5)));
  return w.output();
}

PresetOutput preset_pex_1000(const std::string& out_dir,
                             const PresetOptions& options) {
  const ScenarioConfig cfg = pex_config();
  StatsOptions opt;
  opt.probe_time_s = minutes(59.0);  // just before departures begin
  opt.keep_probe_graph = true;
  const std::vector<RunStats> runs = run_seeds(cfg, opt, options);
  const SeriesTable table =
      aggregate_series(runs, options.snapshot_interval_s);
  const std::string text = to_scenario_text(cfg);

  PresetWriter w("pex-1000", out_dir, options);
  {
    CsvWriter csv = w.open("pex_timeseries", text);
    write_timeseries(csv, table);
  }
  {
    CsvWriter csv = w.open("pex_degree_by_id", text);
    csv.comment("probe at t = 3540 s");
    write_degree_by_id(csv, runs);
  }
  {
    CsvWriter csv = w.open("pex_connectivity_matrix", text);
    write_connectivity_matrix(csv, runs.front().probe_graph,
                              options.seeds.front());
  }
  {
    CsvWriter csv = w.open("pex_robustness", text);
    csv.comment("static percolation on the t = 3540 s snapshot");
    write_robustness(csv, runs, options.seeds, default_robustness_fractions());
  }
  w.write_manifest(text);
  return w.output();
}

PresetOutput preset_exchange_sweep(const std::string& out_dir,
                                   const PresetOptions& options) {
  const int peer_sets[] = {50, 100, 150};
  PresetWriter w("exchange-sweep", out_dir, options);
  CsvWriter summary = w.open("exchange_summary");
  summary.header({"target_peer_set", "seed", "mean_completion_s", "rounds",
                  "all_complete"});
  CsvWriter curves = w.open("exchange_curves");
  curves.comment("pieces held, averaged over peers, first seed only");
  curves.header({"target_peer_set", "round", "mean_pieces"});

  std::vector<double> mean_by_config;
  for (int ps : peer_sets) {
    ExchangeConfig cfg = exchange_config(ps);
    std::vector<ExchangeResult> results(options.seeds.size());
    parallel_for_index(options.seeds.size(), options.threads,
                       [&](std::size_t i) {
                         ExchangeConfig run_cfg = cfg;
                         run_cfg.record_series = (i == 0);
                         results[i] = run_exchange(run_cfg, options.seeds[i]);
                       });
    std::vector<double> means;
    for (std::size_t i = 0; i < results.size(); ++i) {
      means.push_back(results[i].mean_completion_s);
      summary.row({CsvWriter::num(ps),
                   CsvWriter::num(static_cast<long long>(options.seeds[i])),
                   CsvWriter::num(results[i].mean_completion_s),
                   CsvWriter::num(results[i].rounds),
                   results[i].all_complete ? "1" : "0"});
    }
    mean_by_config.push_back(aggregate(means).mean);
    const auto& series = results.front().pieces_series;
    for (std::size_t r = 0; r < series.size(); r += 10) {
      double sum = 0.0;
      for (std::uint16_t v : series[r]) sum += v;
      curves.row({CsvWriter::num(ps), CsvWriter::num(static_cast<long long>(r)),
                  CsvWriter::num(sum / static_cast<double>(series[r].size()))});
    }
  }
  CsvWriter improvements = w.open("exchange_improvements");
  improvements.header(
      {"from_peer_set", "to_peer_set", "improvement_pct_of_mean"});
  for (std::size_t i = 0; i + 1 < mean_by_config.size(); ++i) {
    const double impr = 100.0 * (mean_by_config[i] - mean_by_config[i + 1]) /
                        mean_by_config[i];
    improvements.row({CsvWriter::num(peer_sets[i]),
                      CsvWriter::num(peer_sets[i + 1]),
                      CsvWriter::num(impr)});
  }
  w.write_manifest("");
  return w.output();
}

PresetOutput preset_convergence_table(const std::string& out_dir,
                                      const PresetOptions& options) {
  PresetWriter w("convergence-table", out_dir, options);
  CsvWriter csv = w.open("convergence_table");
  csv.header({"n_start", "k_exact", "k_approx", "rel_error_pct"});
  std::vector<long long> grid = {100, 1000, 10000};
  for (double x = 2.0; x <= 5.0; x += 0.25) {
    const long long n = static_cast<long long>(std::llround(std::pow(10.0, x)));
    if (std::find(grid.begin(), grid.end(), n) == grid.end()) grid.push_back(n);
  }
  std::sort(grid.begin(), grid.end());
  for (long long n : grid) {
    const long long k = arrivals_to_fill(n);
    const double approx = arrivals_to_fill_approx(n);
    const double err = 100.0 * (static_cast<double>(k) - approx) /
                       static_cast<double>(k);
    csv.row({CsvWriter::num(n), CsvWriter::num(k), CsvWriter::num(approx),
             CsvWriter::num(err)});
  }
  w.write_manifest("");
  return w.output();
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names(std::begin(kPresetList),
                                              std::end(kPresetList));
  return names;
}

PresetOutput run_preset(const std::string& name, const std::string& out_dir,
                        const PresetOptions& options) {
  if (options.seeds.empty()) {
    throw std::invalid_argument("preset needs at least one seed");
  }
  if (name == "initial-scenario") return preset_initial_scenario(out_dir, options);
  if (name == "torrent-size-sweep") return preset_torrent_size_sweep(out_dir, options);
  if (name == "maxps-sweep") return preset_maxps_sweep(out_dir, options);
  if (name == "maxoc-sweep") return preset_maxoc_sweep(out_dir, options);
  if (name == "nat-sweep") return preset_nat_sweep(out_dir, options);
  if (name == "pex-1000") return preset_pex_1000(out_dir, options);
  if (name == "exchange-sweep") return preset_exchange_sweep(out_dir, options);
  if (name == "convergence-table") return preset_convergence_table(out_dir, options);
  std::string msg = "unknown preset '" + name + "'; available:";
  for (const std::string& p : preset_names()) msg += " " + p;
  throw std::invalid_argument(msg);
}

std::vector<std::string> figure_ids(const std::string& preset) {
  static const std::unordered_map<std::string, std::vector<std::string>> map = {
      {"initial-scenario",
       {"metrics_timeseries", "arrival_process", "degree_by_id",
        "connectivity_matrix", "bottleneck", "robustness"}},
      {"torrent-size-sweep",
       {"size_summary", "size_timeseries", "size_robustness"}},
      {"maxps-sweep", {"maxps_summary"}},
      {"maxoc-sweep", {"maxoc_summary", "maxoc_detail"}},
      {"nat-sweep", {"nat_summary", "nat_robustness"}},
      {"pex-1000",
       {"pex_timeseries", "pex_degree_by_id", "pex_connectivity_matrix",
        "pex_robustness"}},
      {"exchange-sweep",
       {"exchange_summary", "exchange_curves", "exchange_improvements"}},
      {"convergence-table", {"convergence_table"}},
  };
  auto it = map.find(preset);
  if (it == map.end()) {
    std::string msg = "unknown preset '" + preset + "'; available:";
    for (const std::string& p : preset_names()) msg += " " + p;
    throw std::invalid_argument(msg);
  }
  return it->second;
}

std::string export_figure(const std::string& preset, const std::string& figure,
                          const std::string& out_dir,
                          const PresetOptions& options) {
  const std::vector<std::string> ids = figure_ids(preset);
  if (std::find(ids.begin(), ids.end(), figure) == ids.end()) {
    std::string msg = "unknown figure '" + figure + "' for preset '" + preset +
                      "'; available:";
    for (const std::string& f : ids) msg += " " + f;
    throw std::invalid_argument(msg);
  }
  const PresetOutput out = run_preset(preset, out_dir, options);
  return (fs::path(out.dir) / (figure + ".csv")).string();
}

}  // namespace btsim
