#include <doctest.h>

#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>

#include "btsim/csv.hpp"
#include "btsim/presets.hpp"

using namespace btsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("btsim-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter;
};
int TempDir::counter = 0;

}  // namespace

TEST_CASE("csv: metadata comments precede the header, numbers are compact") {
  TempDir tmp;
  const fs::path file = tmp.path / "out.csv";
  {
    CsvWriter csv(file.string());
    csv.comment("hello");
    csv.header({"a", "b"});
    csv.row({CsvWriter::num(1.5), CsvWriter::num(42LL)});
    csv.row({CsvWriter::num(2.0), CsvWriter::num(0.333333333)});
  }
  const std::string text = slurp(file);
  CHECK(text == "# hello\na,b\n1.5,42\n2,0.333333\n");
}

TEST_CASE("aggregate: mean between min and max") {
  const Agg a = aggregate({3.0, 1.0, 2.0});
  CHECK(a.min == 1.0);
  CHECK(a.max == 3.0);
  CHECK(a.mean == doctest::Approx(2.0));
  const Agg empty = aggregate({});
  CHECK(empty.mean == 0.0);
}

TEST_CASE("default experiment configurations validate") {
  CHECK_NOTHROW(initial_scenario_config().validate());
  CHECK_NOTHROW(torrent_size_config(3000.0).validate());
  CHECK_NOTHROW(maxps_config(20).validate());
  CHECK_NOTHROW(maxps_config(200).validate());
  for (int o = 5; o <= 80; o += 5) CHECK_NOTHROW(maxoc_config(o).validate());
  CHECK_NOTHROW(nat_config(0.9).validate());
  CHECK_NOTHROW(pex_config().validate());
  CHECK_NOTHROW(exchange_config(150).validate());

  // Derived tracker return counts follow the sweep rules.
  CHECK(maxps_config(40).max_outgoing == 20);
  CHECK(maxps_config(40).tracker_return_count == 30);
  CHECK(maxoc_config(5).tracker_return_count == 43);   // (80+5)/2 rounded up
  CHECK(maxoc_config(40).tracker_return_count == 60);
}

TEST_CASE("robustness rows: fraction zero keeps a connected graph whole") {
  OverlayGraph g;
  g.num_peers_ever = 6;
  g.alive.assign(6, 1);
  for (std::int32_t i = 0; i + 1 < 6; ++i) g.edges.emplace_back(i, i + 1);
  const std::vector<RobustnessRow> rows = robustness_rows(g, {0.0, 0.5}, 42);
  REQUIRE(rows.size() == 4);
  for (const RobustnessRow& r : rows) {
    if (r.fraction == 0.0) {
      CHECK(r.n_partitions == 1);
      CHECK(r.largest == 6);
    } else {
      CHECK(r.largest <= 3);
    }
  }
}

TEST_CASE("parallel_for_index covers every index exactly once") {
  std::vector<int> hits(257, 0);
  parallel_for_index(hits.size(), 4,
                     [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("preset registry: names and unknown-name diagnostics") {
  CHECK(preset_names().size() == 8);
  CHECK_THROWS_WITH_AS(run_preset("nope", "/tmp"),
                       doctest::Contains("unknown preset"),
                       std::invalid_argument);
  CHECK_THROWS_AS((void)figure_ids("nope"), std::invalid_argument);
  CHECK_THROWS_AS(
      (void)export_figure("convergence-table", "bogus", "/tmp"),
      std::invalid_argument);
}

TEST_CASE("convergence-table preset reproduces the reference rows") {
  TempDir tmp;
  const PresetOutput out = run_preset("convergence-table", tmp.path.string());
  REQUIRE(out.files.size() >= 1);
  const std::string text = slurp(fs::path(out.dir) / "convergence_table.csv");
  CHECK(text.find("\n100,173,") != std::string::npos);
  CHECK(text.find("\n1000,1720,") != std::string::npos);
  CHECK(text.find("\n10000,17184,") != std::string::npos);
  CHECK(text.find("# preset: convergence-table") != std::string::npos);
  CHECK(text.find("# seeds: 101,") != std::string::npos);
  CHECK(fs::exists(fs::path(out.dir) / "manifest.json"));
}

TEST_CASE("run_and_reduce: probe statistics line up with the series") {
  ScenarioConfig cfg;
  cfg.arrival_law = ExponentialSlots{40.0, 0.7, 5.0, 2};
  cfg.lifetime_law = UniformMinutes{5.0, 10.0};
  StatsOptions opt;
  opt.probe_time_s = 300.0;
  opt.head_size = 10;
  opt.keep_probe_graph = true;
  const RunStats stats = run_and_reduce(cfg, 77, opt);
  REQUIRE(!stats.series.empty());
  CHECK(stats.peak_alive > 0);
  CHECK(stats.probe_alive == stats.probe_graph.alive_count());
  // Series point at the probe time agrees with the replayed snapshot.
  for (const SeriesPoint& pt : stats.series) {
    if (pt.t == 300.0) {
      CHECK(pt.alive == stats.probe_alive);
    }
  }
  CHECK(stats.probe_degree.size() ==
        static_cast<std::size_t>(stats.probe_graph.num_peers_ever));
}
