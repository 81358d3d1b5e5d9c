#include "prefchoice/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace prefchoice {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Estimators

double LogLogSlope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    double lx = std::log(x[i]);
    double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) {
    throw Error(ErrorCode::kInsufficientData, "need two positive points");
  }
  auto c = static_cast<double>(count);
  double denom = c * sxx - sx * sx;
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::kInsufficientData, "degenerate log-log fit");
  }
  return (c * sxy - sx * sy) / denom;
}

RegimeEstimate EstimateRegimeStatistic(const Trajectory& trajectory,
                                       const TheorySummary& theory) {
  const auto& rows = trajectory.rows;
  if (rows.size() < kMinCheckpoints) {
    throw Error(ErrorCode::kInsufficientData,
                "need at least " + std::to_string(kMinCheckpoints) +
                    " checkpoints, got " + std::to_string(rows.size()));
  }
  RegimeEstimate est;
  est.regime = theory.regime;
  const CheckpointRow& last = rows.back();
  std::size_t nt = last.max_degree.size();
  auto n = static_cast<double>(last.n);
  for (std::size_t t = 0; t < nt; ++t) {
    auto top = static_cast<double>(last.max_degree[t]);
    switch (theory.regime) {
      case Regime::kSupercritical:
        est.statistic_by_type.push_back(top / n);
        break;
      case Regime::kCritical:
        est.statistic_by_type.push_back(top * std::log(n) / n);
        break;
      case Regime::kSubcritical: {
        std::vector<double> xs, ys;
        for (const auto& row : rows) {
          if (row.n * 10 < last.n || row.max_degree[t] <= 0) continue;
          xs.push_back(static_cast<double>(row.n));
          ys.push_back(static_cast<double>(row.max_degree[t]));
        }
        if (xs.size() < kMinCheckpoints) {
          throw Error(ErrorCode::kInsufficientData,
                      "slope fit needs " + std::to_string(kMinCheckpoints) +
                          " checkpoints in the final decade");
        }
        est.statistic_by_type.push_back(LogLogSlope(xs, ys));
        break;
      }
    }
  }
  return est;
}

double Median(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInsufficientData, "median of nothing");
  }
  std::sort(values.begin(), values.end());
  std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

EnsembleAggregate AggregateEstimates(std::span<const RegimeEstimate> estimates) {
  if (estimates.size() < kMinSeeds) {
    throw Error(ErrorCode::kInsufficientData,
                "aggregates need at least " + std::to_string(kMinSeeds) +
                    " seeds");
  }
  EnsembleAggregate agg;
  agg.regime = estimates.front().regime;
  std::size_t nt = estimates.front().statistic_by_type.size();
  for (std::size_t t = 0; t < nt; ++t) {
    std::vector<double> values;
    for (const auto& e : estimates) values.push_back(e.statistic_by_type.at(t));
    agg.median.push_back(Median(values));
    agg.min.push_back(*std::min_element(values.begin(), values.end()));
    agg.max.push_back(*std::max_element(values.begin(), values.end()));
  }
  return agg;
}

std::vector<HubStats> HubReport(const Trajectory& trajectory) {
  const auto& rows = trajectory.rows;
  if (rows.empty()) return {};
  std::size_t nt = rows.front().leader.size();
  std::vector<HubStats> out(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t r = 1; r < rows.size(); ++r) {
      std::int64_t by_counter = rows[r].leadership_changes[t] -
                                rows[r - 1].leadership_changes[t];
      bool moved = rows[r].leader[t] != rows[r - 1].leader[t] &&
                   rows[r - 1].leader[t] != kNoLeader;
      std::int64_t changes = std::max<std::int64_t>(by_counter, moved ? 1 : 0);
      if (changes > 0) {
        out[t].changes += changes;
        out[t].last_change_n = rows[r].n;
      }
    }
    // Changes before the first checkpoint are only visible in the counter.
    std::int64_t early = rows.front().leadership_changes[t];
    if (early > 0) {
      out[t].changes += early;
      if (!out[t].last_change_n) out[t].last_change_n = rows.front().n;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string TrajectoryToCsv(const Trajectory& trajectory) {
  std::string out(kCsvHeader);
  out += '\n';
  char buf[256];
  double beta = trajectory.params.beta;
  for (const auto& row : trajectory.rows) {
    for (std::size_t t = 0; t < row.max_degree.size(); ++t) {
      std::int64_t leader = row.leader[t] == kNoLeader ? 0 : row.leader[t] + 1;
      std::snprintf(buf, sizeof(buf),
                    "%" PRId64 ",%zu,%" PRId64 ",%" PRId64 ",%.12g,%" PRId64
                    ",%" PRId64 ",%" PRId64 "\n",
                    row.n, t + 1, row.max_degree[t], leader,
                    row.type_weight(t, beta), row.count[t],
                    row.leadership_changes[t], row.total_degree);
      out += buf;
    }
  }
  return out;
}

namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::int64_t ParseInt(std::string_view s) {
  std::string tmp(s);
  char* end = nullptr;
  errno = 0;
  long long v = std::strtoll(tmp.c_str(), &end, 10);
  if (tmp.empty() || *end != '\0' || errno != 0) {
    throw Error(ErrorCode::kInvalidConfig, "bad integer field '" + tmp + "'");
  }
  return v;
}

double ParseDouble(std::string_view s) {
  std::string tmp(s);
  char* end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || *end != '\0') {
    throw Error(ErrorCode::kInvalidConfig, "bad real field '" + tmp + "'");
  }
  return v;
}

}  // namespace

Trajectory TrajectoryFromCsv(std::string_view csv, const ModelParams& params,
                             std::uint64_t seed) {
  Trajectory traj;
  traj.params = params;
  traj.seed = seed;
  auto nt = static_cast<std::size_t>(params.num_types);

  std::size_t pos = 0;
  bool header = true;
  CheckpointRow row;
  std::size_t expected_type = 0;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    std::string_view line = csv.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? csv.size() : eol + 1;
    if (header) {
      if (line != kCsvHeader) {
        throw Error(ErrorCode::kInvalidConfig, "unexpected CSV header");
      }
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto f = SplitFields(line);
    if (f.size() != 8) {
      throw Error(ErrorCode::kInvalidConfig, "expected 8 CSV fields");
    }
    std::int64_t n = ParseInt(f[0]);
    auto type = static_cast<std::size_t>(ParseInt(f[1]));
    if (type != expected_type + 1) {
      throw Error(ErrorCode::kInvalidConfig, "CSV rows out of type order");
    }
    if (expected_type == 0) {
      row = CheckpointRow{};
      row.n = n;
      row.total_degree = ParseInt(f[7]);
    } else if (n != row.n) {
      throw Error(ErrorCode::kInvalidConfig, "incomplete checkpoint in CSV");
    }
    std::int64_t count = ParseInt(f[5]);
    double weight = ParseDouble(f[4]);
    std::int64_t leader = ParseInt(f[3]);
    row.max_degree.push_back(ParseInt(f[2]));
    row.leader.push_back(leader == 0 ? kNoLeader : leader - 1);
    row.count.push_back(count);
    row.degree_sum.push_back(static_cast<std::int64_t>(
        std::llround(weight - params.beta * static_cast<double>(count))));
    row.leadership_changes.push_back(ParseInt(f[6]));
    if (++expected_type == nt) {
      traj.rows.push_back(std::move(row));
      expected_type = 0;
    }
  }
  if (header || expected_type != 0) {
    throw Error(ErrorCode::kInvalidConfig, "truncated trajectory CSV");
  }
  return traj;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json ParamsToJson(const ModelParams& p) {
  return json{{"m", p.m},
              {"k", p.k},
              {"d", p.d},
              {"T", p.num_types},
              {"beta", p.beta},
              {"p", p.type_probs},
              {"self_loops", p.initial_self_loops},
              {"edge_weighting", EdgeStepWeightingName(p.edge_step_weighting)}};
}

json PredictedJson(const TheorySummary& th, std::size_t nt) {
  json out = json::array();
  for (std::size_t t = 0; t < nt; ++t) {
    switch (th.regime) {
      case Regime::kSupercritical:
        out.push_back((*th.condensate_fraction_by_type)[t]);
        break;
      case Regime::kCritical:
        out.push_back((*th.critical_constant_by_type)[t]);
        break;
      case Regime::kSubcritical:
        out.push_back(*th.subcritical_exponent);
        break;
    }
  }
  return out;
}

json SummaryObject(const Trajectory& traj, const RunIdentity& id) {
  TheorySummary th = ClassifyRegime(traj.params);
  auto nt = static_cast<std::size_t>(traj.params.num_types);
  json estimated = json::array();
  try {
    RegimeEstimate est = EstimateRegimeStatistic(traj, th);
    for (double v : est.statistic_by_type) estimated.push_back(v);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientData) throw;
    for (std::size_t t = 0; t < nt; ++t) estimated.push_back(nullptr);
  }
  json hub = json::array();
  for (const HubStats& h : HubReport(traj)) {
    hub.push_back({{"changes", h.changes},
                   {"last_change",
                    h.last_change_n ? json(*h.last_change_n) : json(nullptr)}});
  }
  return json{{"params", ParamsToJson(traj.params)},
              {"seed", traj.seed},
              {"root_seed", id.root_seed},
              {"cell", id.cell},
              {"replicate", id.replicate},
              {"build", traj.build_tag},
              {"n", traj.rows.empty() ? 0 : traj.rows.back().n},
              {"regime", RegimeName(th.regime)},
              {"rho", th.rho},
              {"x_star", th.x_star ? json(*th.x_star) : json(nullptr)},
              {"predicted", PredictedJson(th, nt)},
              {"estimated", estimated},
              {"hub", hub}};
}

}  // namespace

std::string SummaryJson(const Trajectory& trajectory, const RunIdentity& id) {
  return SummaryObject(trajectory, id).dump(2) + "\n";
}

ModelParams ParamsFromSummaryJson(std::string_view text) {
  try {
    json doc = json::parse(text);
    const json& p = doc.at("params");
    ParamOptions opts;
    opts.initial_self_loops = p.at("self_loops").get<std::int64_t>();
    opts.edge_step_weighting = p.at("edge_weighting").get<std::string>() == "pre"
                                   ? EdgeStepWeighting::kPreVertex
                                   : EdgeStepWeighting::kPostVertex;
    return NewParams(p.at("m").get<std::int64_t>(), p.at("k").get<std::int64_t>(),
                     p.at("d").get<std::int64_t>(), p.at("T").get<std::int64_t>(),
                     p.at("beta").get<double>(),
                     p.at("p").get<std::vector<double>>(), opts);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("malformed summary JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Files

void WriteFileAtomic(const std::filesystem::path& path, std::string_view data) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    }
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename into " + path.string());
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Sweeps

SweepResult Sweep(const SweepSpec& spec, unsigned parallelism) {
  if (spec.seeds_per_cell < 1) {
    throw Error(ErrorCode::kInvalidConfig, "need at least one seed per cell");
  }
  SweepResult result;
  result.spec = spec;
  for (std::size_t c = 0; c < spec.grid.size(); ++c) {
    for (std::int64_t r = 0; r < spec.seeds_per_cell; ++r) {
      SweepRun run;
      run.id = {spec.root_seed, c, static_cast<std::uint64_t>(r)};
      run.seed = DeriveSeed(spec.root_seed, c, static_cast<std::uint64_t>(r));
      result.runs.push_back(std::move(run));
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.runs.size(); i = next++) {
      SweepRun& run = result.runs[i];
      try {
        RunConfig cfg{spec.grid[run.id.cell], spec.n_steps, run.seed,
                      spec.checkpoints};
        run.trajectory = Run(cfg);
      } catch (const std::exception& e) {
        run.error = e.what();
      }
    }
  };
  unsigned threads = std::max(1u, parallelism);
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, result.runs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

std::string SweepSummaryJson(const SweepResult& result) {
  json runs = json::array();
  for (const SweepRun& run : result.runs) {
    if (run.trajectory) {
      runs.push_back(SummaryObject(*run.trajectory, run.id));
    } else {
      runs.push_back({{"root_seed", run.id.root_seed},
                      {"cell", run.id.cell},
                      {"replicate", run.id.replicate},
                      {"seed", run.seed},
                      {"error", run.error}});
    }
  }
  json cells = json::array();
  for (std::size_t c = 0; c < result.spec.grid.size(); ++c) {
    const ModelParams& params = result.spec.grid[c];
    json cell{{"cell", c}, {"params", ParamsToJson(params)}};
    try {
      TheorySummary th = ClassifyRegime(params);
      cell["regime"] = RegimeName(th.regime);
      cell["rho"] = th.rho;
      cell["predicted"] =
          PredictedJson(th, static_cast<std::size_t>(params.num_types));
      std::vector<RegimeEstimate> estimates;
      for (const SweepRun& run : result.runs) {
        if (run.id.cell != c || !run.trajectory) continue;
        try {
          estimates.push_back(EstimateRegimeStatistic(*run.trajectory, th));
        } catch (const Error&) {
        }
      }
      if (estimates.size() >= kMinSeeds) {
        EnsembleAggregate agg = AggregateEstimates(estimates);
        cell["aggregate"] = {{"seeds", estimates.size()},
                             {"median", agg.median},
                             {"min", agg.min},
                             {"max", agg.max}};
      } else {
        cell["aggregate"] = nullptr;
      }
    } catch (const Error& e) {
      cell["error"] = e.what();
    }
    cells.push_back(std::move(cell));
  }
  return json{{"runs", runs}, {"cells", cells}}.dump(2) + "\n";
}

std::string RunFileStem(const RunIdentity& id) {
  return "run_c" + std::to_string(id.cell) + "_r" + std::to_string(id.replicate);
}

void WriteSweep(const SweepResult& result, const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "output directory " + dir.string() +
                                    " does not exist");
  }
  for (const SweepRun& run : result.runs) {
    if (!run.trajectory) continue;
    std::string stem = RunFileStem(run.id);
    WriteFileAtomic(dir / (stem + ".csv"), TrajectoryToCsv(*run.trajectory));
    WriteFileAtomic(dir / (stem + ".json"),
                    SummaryJson(*run.trajectory, run.id));
  }
  WriteFileAtomic(dir / "summary.json", SweepSummaryJson(result));
}

}  // namespace prefchoice
