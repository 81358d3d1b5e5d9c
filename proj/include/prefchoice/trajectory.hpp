#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prefchoice/graph_state.hpp"
#include "prefchoice/params.hpp"

namespace prefchoice {

// Build identifier stamped into every trajectory.
inline constexpr const char* kBuildTag = "prefchoice-1.0.0";

// Snapshot of the GraphState aggregates at one value of n.
struct CheckpointRow {
  std::int64_t n = 0;
  std::int64_t total_degree = 0;
  std::vector<std::int64_t> max_degree;
  std::vector<std::int64_t> leader;  // 0-based vertex id or kNoLeader
  std::vector<std::int64_t> degree_sum;
  std::vector<std::int64_t> count;
  std::vector<std::int64_t> leadership_changes;

  double type_weight(std::size_t t, double beta) const {
    return static_cast<double>(degree_sum[t]) +
           beta * static_cast<double>(count[t]);
  }

  bool operator==(const CheckpointRow&) const = default;
};

struct Trajectory {
  ModelParams params;
  std::uint64_t seed = 0;
  std::string build_tag = kBuildTag;
  std::vector<CheckpointRow> rows;

  bool operator==(const Trajectory&) const = default;
};

CheckpointRow RecordRow(const GraphState& state);

}  // namespace prefchoice
