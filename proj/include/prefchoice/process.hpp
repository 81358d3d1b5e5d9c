#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "prefchoice/graph_state.hpp"
#include "prefchoice/params.hpp"
#include "prefchoice/rng.hpp"
#include "prefchoice/trajectory.hpp"
#include "prefchoice/weight_index.hpp"

namespace prefchoice {

struct StepOutcome {
  VertexId new_vertex = 0;
  TypeId new_vertex_type = 0;
  std::vector<VertexId> vertex_step_targets;
  // (w, u): uniform source and chosen target of each edge-step pair.
  std::vector<std::pair<VertexId, VertexId>> edge_step_pairs;
  // Number of pairs whose pool fell back to "any type".
  std::int64_t fallback_pairs = 0;
};

// Index holding every vertex of `state` with its current degree.
WeightIndex BuildIndex(const GraphState& state);

// One full step: new vertex, m vertex-step edges, k edge-step pairs, then
// aggregate and leader refresh. `out` is reused to avoid per-step allocation.
void DoStep(GraphState& state, WeightIndex& index, const ModelParams& params,
            Rng& rng, StepOutcome& out);
StepOutcome DoStep(GraphState& state, WeightIndex& index,
                   const ModelParams& params, Rng& rng);

// Exact one-step conditional expectations, by enumeration over the new
// vertex's type, every vertex-step target tuple, every source w and every
// d-tuple of the sample. Independent of WeightIndex.
struct OracleResult {
  std::vector<double> delta_weight_by_type;      // E[D_i(n+1) - D_i(n)]
  std::vector<double> delta_max_degree_by_type;  // E[M_i(n+1) - M_i(n)]
};

inline constexpr double kOracleBudget = 1e7;

// Throws kTooLargeForOracle if the enumeration would exceed kOracleBudget
// elementary outcomes.
OracleResult ExpectationOracle(const GraphState& state,
                               const ModelParams& params);

struct GeometricSchedule {
  std::int64_t start = 100;
  double factor = 1.7782794100389228;  // 10^(1/4)
};
using CheckpointSchedule =
    std::variant<GeometricSchedule, std::vector<std::int64_t>>;

// Sorted, de-duplicated checkpoint values in [1, n_steps]; n_steps itself is
// always included.
std::vector<std::int64_t> ExpandSchedule(const CheckpointSchedule& schedule,
                                         std::int64_t n_steps);

struct RunConfig {
  ModelParams params;
  std::int64_t n_steps = 1;  // final number of vertices
  std::uint64_t seed = 0;
  CheckpointSchedule checkpoints = GeometricSchedule{};
};

void Validate(const RunConfig& config);

// Runs the process from G_1 to n_steps vertices, recording a row at every
// checkpoint. Deterministic in (build, config).
Trajectory Run(const RunConfig& config);

}  // namespace prefchoice
