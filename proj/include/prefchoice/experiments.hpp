#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prefchoice/process.hpp"
#include "prefchoice/theory.hpp"
#include "prefchoice/trajectory.hpp"

namespace prefchoice {

// ---------------------------------------------------------------------------
// Estimators

// Per-type statistic matching the regime:
//   subcritical   - least-squares slope of log M_i(n) on log n over the
//                   checkpoints in the final decade [n_final / 10, n_final]
//   critical      - M_i(n) ln n / n at the final checkpoint
//   supercritical - M_i(n) / n at the final checkpoint
struct RegimeEstimate {
  Regime regime = Regime::kSubcritical;
  std::vector<double> statistic_by_type;
};

inline constexpr std::size_t kMinCheckpoints = 5;
inline constexpr std::size_t kMinSeeds = 5;

// kInsufficientData if the trajectory has fewer than kMinCheckpoints rows (or
// fewer than kMinCheckpoints usable rows in the final decade when fitting a
// slope).
RegimeEstimate EstimateRegimeStatistic(const Trajectory& trajectory,
                                       const TheorySummary& theory);

// Least-squares slope of log(y) on log(x) over the pairs with x, y > 0.
double LogLogSlope(std::span<const double> x, std::span<const double> y);

struct EnsembleAggregate {
  Regime regime = Regime::kSubcritical;
  std::vector<double> median;
  std::vector<double> min;
  std::vector<double> max;
};

// Median / min / max across seeds. kInsufficientData below kMinSeeds.
EnsembleAggregate AggregateEstimates(std::span<const RegimeEstimate> estimates);

double Median(std::vector<double> values);

struct HubStats {
  std::int64_t changes = 0;
  // n of the first checkpoint at which the last change had happened.
  std::optional<std::int64_t> last_change_n;
};

// Leadership changes per type, read from the cumulative counter column and
// the leader column (whichever shows more changes between two rows).
std::vector<HubStats> HubReport(const Trajectory& trajectory);

// ---------------------------------------------------------------------------
// Serialization

inline constexpr std::string_view kCsvHeader =
    "n,type,max_degree,leader_id,D_i,N_i,leadership_changes,total_degree";

// One line per (checkpoint, type). Types and vertex ids are 1-based; a type
// with no vertex yet has leader_id 0. D_i carries 12 significant digits.
std::string TrajectoryToCsv(const Trajectory& trajectory);
// Inverse of TrajectoryToCsv; params and seed come from the caller (or the
// summary document). kInvalidConfig on malformed input.
Trajectory TrajectoryFromCsv(std::string_view csv, const ModelParams& params,
                             std::uint64_t seed);

struct RunIdentity {
  std::uint64_t root_seed = 0;
  std::uint64_t cell = 0;
  std::uint64_t replicate = 0;
};

// JSON object with params, seed, regime, rho, x_star, predicted, estimated
// and hub, one entry per type in the last three.
std::string SummaryJson(const Trajectory& trajectory, const RunIdentity& id);

ModelParams ParamsFromSummaryJson(std::string_view json);

// Writes via a sibling temporary file and rename. kIo on failure.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);
std::string ReadFile(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
  std::vector<ModelParams> grid;
  std::int64_t seeds_per_cell = 1;
  std::uint64_t root_seed = 0;
  std::int64_t n_steps = 1;
  CheckpointSchedule checkpoints = GeometricSchedule{};
};

struct SweepRun {
  RunIdentity id;
  std::uint64_t seed = 0;  // DeriveSeed(root, cell, replicate)
  std::optional<Trajectory> trajectory;
  std::string error;  // set when the run failed
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRun> runs;  // cell-major, replicate-minor
};

// Runs every (cell, replicate) with up to `parallelism` threads. Results do
// not depend on `parallelism` or scheduling.
SweepResult Sweep(const SweepSpec& spec, unsigned parallelism);

// {"runs": [per-run summaries], "cells": [per-cell aggregates]}.
std::string SweepSummaryJson(const SweepResult& result);

// run_c<cell>_r<replicate>.csv / .json per run plus summary.json.
void WriteSweep(const SweepResult& result, const std::filesystem::path& dir);

std::string RunFileStem(const RunIdentity& id);

}  // namespace prefchoice
