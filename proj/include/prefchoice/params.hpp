#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prefchoice/error.hpp"

namespace prefchoice {

using VertexId = std::uint32_t;
using TypeId = std::uint32_t;

// Which snapshot the edge-step sample is drawn against.
//   kPostVertex: the pool contains the new vertex and weights include the
//                vertex-step edges of the current step.
//   kPreVertex:  pool and weights are those of G_n; the uniform source may
//                still be the new vertex.
enum class EdgeStepWeighting { kPostVertex, kPreVertex };

struct ParamOptions {
  // Number of self-loops on v1. Defaults to m.
  std::optional<std::int64_t> initial_self_loops;
  EdgeStepWeighting edge_step_weighting = EdgeStepWeighting::kPostVertex;
};

struct ModelParams {
  std::int64_t m = 1;  // edges per vertex step
  std::int64_t k = 1;  // pairs per edge step
  std::int64_t d = 2;  // sample size of the choice
  std::int64_t num_types = 1;
  double beta = 0.0;
  std::vector<double> type_probs{1.0};
  std::int64_t initial_self_loops = 1;
  EdgeStepWeighting edge_step_weighting = EdgeStepWeighting::kPostVertex;

  // 2m + 2k + beta: growth rate of the total weight per step.
  double total_weight_rate() const {
    return static_cast<double>(2 * m + 2 * k) + beta;
  }

  bool operator==(const ModelParams&) const = default;
};

// Validates and builds a parameter set. Throws Error with one of
// kBetaOutOfRange, kBadSampleSize, kBadProbs, kBadCounts, kBadSelfLoops.
ModelParams NewParams(std::int64_t m, std::int64_t k, std::int64_t d,
                      std::int64_t num_types, double beta,
                      std::vector<double> type_probs,
                      const ParamOptions& options = {});

// Re-runs the validation of NewParams on an existing value.
void Validate(const ModelParams& params);

const char* EdgeStepWeightingName(EdgeStepWeighting weighting);

}  // namespace prefchoice
