#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "prefchoice/experiments.hpp"

using namespace prefchoice;
namespace fs = std::filesystem;

namespace {

// Single-type trajectory with max degree given by `top(n)` on a geometric
// schedule; the other columns are filled consistently but are irrelevant.
template <typename F>
Trajectory Synthetic(const ModelParams& params, std::vector<std::int64_t> ns,
                     F top) {
  Trajectory t;
  t.params = params;
  for (std::int64_t n : ns) {
    CheckpointRow row;
    row.n = n;
    row.total_degree = 6 * n;
    row.max_degree = {top(n)};
    row.leader = {0};
    row.degree_sum = {6 * n};
    row.count = {n};
    row.leadership_changes = {0};
    t.rows.push_back(row);
  }
  return t;
}

Trajectory WithLeaders(std::vector<std::int64_t> leaders,
                       std::vector<std::int64_t> counters) {
  Trajectory t;
  t.params = NewParams(1, 1, 2, 1, 0.0, {1.0});
  for (std::size_t i = 0; i < leaders.size(); ++i) {
    CheckpointRow row;
    row.n = 100 * static_cast<std::int64_t>(i + 1);
    row.total_degree = 4 * row.n;
    row.max_degree = {10};
    row.leader = {leaders[i]};
    row.degree_sum = {4 * row.n};
    row.count = {row.n};
    row.leadership_changes = {counters[i]};
    t.rows.push_back(row);
  }
  return t;
}

fs::path TempDir(const char* name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("subcritical slope on a synthetic power law") {
  ModelParams p = NewParams(1, 1, 2, 1, 0.0, {1.0});
  std::vector<std::int64_t> ns = ExpandSchedule(GeometricSchedule{}, 1000000);
  Trajectory t = Synthetic(p, ns, [](std::int64_t n) {
    return static_cast<std::int64_t>(std::floor(std::pow(double(n), 0.75)));
  });
  RegimeEstimate e = EstimateRegimeStatistic(t, ClassifyRegime(p));
  CHECK(e.regime == Regime::kSubcritical);
  CHECK(std::abs(e.statistic_by_type[0] - 0.75) < 0.01);
}

TEST_CASE("supercritical and critical statistics") {
  ModelParams super = NewParams(1, 2, 3, 1, 0.0, {1.0});
  std::vector<std::int64_t> ns = ExpandSchedule(GeometricSchedule{}, 100000);
  Trajectory t = Synthetic(super, ns, [](std::int64_t n) { return n / 2; });
  RegimeEstimate e = EstimateRegimeStatistic(t, ClassifyRegime(super));
  CHECK(std::abs(e.statistic_by_type[0] - 0.5) < 1e-6);

  ModelParams crit = NewParams(1, 1, 3, 1, 0.0, {1.0});
  Trajectory c = Synthetic(crit, ns, [](std::int64_t n) { return n / 10; });
  RegimeEstimate ce = EstimateRegimeStatistic(c, ClassifyRegime(crit));
  CHECK(ce.statistic_by_type[0] == doctest::Approx(0.1 * std::log(1e5)));
}

TEST_CASE("too few checkpoints") {
  ModelParams p = NewParams(1, 1, 2, 1, 0.0, {1.0});
  Trajectory t = Synthetic(p, {1000, 10000, 100000}, [](std::int64_t n) { return n; });
  try {
    EstimateRegimeStatistic(t, ClassifyRegime(p));
    FAIL("estimated from three checkpoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientData);
  }
  // Enough rows overall but only two in the final decade.
  Trajectory sparse = Synthetic(p, {10, 100, 1000, 10000, 50000, 100000},
                                [](std::int64_t n) { return n; });
  CHECK_THROWS_AS(EstimateRegimeStatistic(sparse, ClassifyRegime(p)), Error);
}

TEST_CASE("ensemble aggregates") {
  std::vector<RegimeEstimate> est;
  for (double v : {0.7, 0.9, 0.8, 0.75, 0.85}) {
    est.push_back({Regime::kSubcritical, {v}});
  }
  EnsembleAggregate agg = AggregateEstimates(est);
  CHECK(agg.median[0] == doctest::Approx(0.8));
  CHECK(agg.min[0] == doctest::Approx(0.7));
  CHECK(agg.max[0] == doctest::Approx(0.9));
  est.pop_back();
  CHECK_THROWS_AS(AggregateEstimates(est), Error);
  CHECK(Median({3.0, 1.0, 2.0, 10.0}) == doctest::Approx(2.5));
}

TEST_CASE("hub report") {
  std::vector<HubStats> constant =
      HubReport(WithLeaders({0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0}));
  CHECK(constant[0].changes == 0);
  CHECK(!constant[0].last_change_n);

  // Leader moves at rows 2 and 5 (1-based).
  std::vector<HubStats> two =
      HubReport(WithLeaders({0, 3, 3, 3, 7, 7}, {0, 1, 1, 1, 2, 2}));
  CHECK(two[0].changes == 2);
  CHECK(two[0].last_change_n == 500);

  // Leader column alone is enough.
  std::vector<HubStats> column =
      HubReport(WithLeaders({0, 3, 3, 3, 7, 7}, {0, 0, 0, 0, 0, 0}));
  CHECK(column[0].changes == 2);

  // Several changes between rows are visible only through the counter.
  std::vector<HubStats> burst =
      HubReport(WithLeaders({0, 0, 4, 4}, {2, 2, 5, 5}));
  CHECK(burst[0].changes == 5);
  CHECK(burst[0].last_change_n == 300);
}

TEST_CASE("rows account for every vertex") {
  RunConfig c;
  c.params = NewParams(1, 2, 3, 3, 0.5, {0.2, 0.3, 0.5});
  c.n_steps = 5000;
  c.seed = 1;
  for (const CheckpointRow& row : Run(c).rows) {
    std::int64_t total = 0;
    for (std::int64_t x : row.count) total += x;
    CHECK(total == row.n);
  }
  c.checkpoints = std::vector<std::int64_t>{5000};
  CHECK(Run(c).rows.size() == 1);
  c.n_steps = 1000000;
  c.checkpoints = GeometricSchedule{1000, 2.0};
  CHECK(ExpandSchedule(c.checkpoints, c.n_steps).size() == 11);
}

TEST_CASE("CSV round trip is lossless") {
  for (double beta : {0.0, 0.3, -0.7}) {
    RunConfig c;
    c.params = NewParams(2, 1, 3, 2, beta, {0.4, 0.6});
    c.n_steps = 30000;
    c.seed = 12;
    Trajectory t = Run(c);
    std::string csv = TrajectoryToCsv(t);
    CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
    Trajectory back = TrajectoryFromCsv(csv, c.params, c.seed);
    CHECK(back == t);
    CHECK(TrajectoryToCsv(back) == csv);
  }
  ModelParams p = NewParams(1, 1, 2, 1, 0.0, {1.0});
  CHECK_THROWS_AS(TrajectoryFromCsv("bad,header\n", p, 0), Error);
  CHECK_THROWS_AS(TrajectoryFromCsv(std::string(kCsvHeader) + "\n1,1,2\n", p, 0),
                  Error);
}

TEST_CASE("CSV layout") {
  RunConfig c;
  c.params = NewParams(1, 1, 2, 2, 0.0, {0.3, 0.7});
  c.n_steps = 1000;
  c.seed = 3;
  std::string csv = TrajectoryToCsv(Run(c));
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  // Header plus two rows per checkpoint (100, 178, 316, 562, 1000).
  CHECK(lines == 1 + 2 * 5);
}

TEST_CASE("summary JSON") {
  RunConfig c;
  c.params = NewParams(1, 2, 3, 2, 0.0, {0.3, 0.7});
  c.n_steps = 10000;
  c.seed = DeriveSeed(5, 0, 0);
  Trajectory t = Run(c);
  std::string text = SummaryJson(t, {5, 0, 0});
  nlohmann::json doc = nlohmann::json::parse(text);
  for (const char* key : {"params", "seed", "regime", "rho", "x_star",
                          "predicted", "estimated", "hub"}) {
    CHECK(doc.contains(key));
  }
  CHECK(doc["regime"] == "supercritical");
  CHECK(doc["seed"].get<std::uint64_t>() == c.seed);
  CHECK(doc["predicted"].size() == 2);
  CHECK(doc["predicted"][0].get<double>() ==
        doctest::Approx(0.3 * 3 * (3 - std::sqrt(7.0))));
  CHECK(doc["estimated"].size() == 2);
  CHECK(doc["hub"].size() == 2);
  CHECK(ParamsFromSummaryJson(text) == c.params);
  CHECK_THROWS_AS(ParamsFromSummaryJson("{}"), Error);
}

TEST_CASE("atomic file writes") {
  fs::path dir = TempDir("prefchoice_atomic");
  WriteFileAtomic(dir / "a.txt", "hello\n");
  CHECK(ReadFile(dir / "a.txt") == "hello\n");
  WriteFileAtomic(dir / "a.txt", "again\n");
  CHECK(ReadFile(dir / "a.txt") == "again\n");
  CHECK(!fs::exists(dir / "a.txt.tmp"));
  try {
    WriteFileAtomic(dir / "missing" / "a.txt", "x");
    FAIL("wrote into a missing directory");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
  CHECK_THROWS_AS(ReadFile(dir / "nope"), Error);
  fs::remove_all(dir);
}

TEST_CASE("sweeps") {
  SweepSpec spec;
  spec.grid = {NewParams(1, 1, 2, 1, 0.0, {1.0}), NewParams(1, 2, 2, 1, 0.0, {1.0}),
               NewParams(1, 1, 3, 1, 0.0, {1.0}), NewParams(1, 2, 3, 1, 0.0, {1.0})};
  spec.seeds_per_cell = 5;
  spec.root_seed = 77;
  spec.n_steps = 3000;

  SweepResult serial = Sweep(spec, 1);
  SweepResult parallel = Sweep(spec, 4);
  REQUIRE(serial.runs.size() == 20);
  REQUIRE(parallel.runs.size() == 20);
  for (std::size_t i = 0; i < serial.runs.size(); ++i) {
    REQUIRE(serial.runs[i].trajectory);
    CHECK(*serial.runs[i].trajectory == *parallel.runs[i].trajectory);
    CHECK(serial.runs[i].seed ==
          DeriveSeed(77, serial.runs[i].id.cell, serial.runs[i].id.replicate));
  }
  std::string summary = SweepSummaryJson(serial);
  CHECK(summary == SweepSummaryJson(parallel));
  nlohmann::json doc = nlohmann::json::parse(summary);
  CHECK(doc["runs"].size() == 20);
  CHECK(doc["cells"].size() == 4);
  CHECK(!doc["cells"][3]["aggregate"].is_null());
  CHECK(doc["cells"][3]["aggregate"]["seeds"] == 5);

  // A one-cell sweep reproduces the direct run with the derived seed.
  SweepSpec one = spec;
  one.grid.resize(1);
  one.seeds_per_cell = 1;
  SweepResult single = Sweep(one, 2);
  RunConfig direct{one.grid[0], one.n_steps, DeriveSeed(77, 0, 0), one.checkpoints};
  CHECK(*single.runs[0].trajectory == Run(direct));

  // A failing run is reported without disturbing the others.
  SweepSpec broken = spec;
  broken.grid[1].d = 1;
  broken.seeds_per_cell = 1;
  SweepResult partial = Sweep(broken, 3);
  CHECK(partial.runs[0].trajectory);
  CHECK(!partial.runs[1].trajectory);
  CHECK(!partial.runs[1].error.empty());
  CHECK(partial.runs[2].trajectory);

  fs::path dir = TempDir("prefchoice_sweep");
  WriteSweep(serial, dir);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    (void)entry;
    ++files;
  }
  CHECK(files == 20 * 2 + 1);
  CHECK(ReadFile(dir / "run_c2_r4.csv") ==
        TrajectoryToCsv(*serial.runs[2 * 5 + 4].trajectory));
  fs::remove_all(dir);
  CHECK_THROWS_AS(WriteSweep(serial, dir), Error);
}
