#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prefchoice/params.hpp"
#include "prefchoice/rng.hpp"

namespace prefchoice {

inline constexpr std::int64_t kNoLeader = -1;

// Degrees and types of every vertex plus exact per-type aggregates.
//
// Weights D_i are not stored: they are derived as degree_sum + beta * count
// so that long runs accumulate no floating-point error.
struct GraphState {
  std::int64_t n = 0;
  double beta = 0.0;
  std::vector<std::int64_t> degrees;
  std::vector<TypeId> types;

  std::vector<std::int64_t> degree_sum_by_type;
  std::vector<std::int64_t> count_by_type;
  std::vector<std::int64_t> max_degree_by_type;
  std::vector<std::int64_t> leader_by_type;
  std::vector<std::int64_t> leadership_changes_by_type;
  // Value of n right after the most recent leadership change; 0 if none.
  std::vector<std::int64_t> last_change_by_type;
  std::int64_t total_degree = 0;

  std::size_t num_types() const { return count_by_type.size(); }

  // D_i(n) = sum over type-i vertices of (deg + beta).
  double type_weight(TypeId t) const {
    return static_cast<double>(degree_sum_by_type[t]) +
           beta * static_cast<double>(count_by_type[t]);
  }
  // D(n) = total_degree + beta * n.
  double total_weight() const {
    return static_cast<double>(total_degree) + beta * static_cast<double>(n);
  }

  // Appends a vertex of type t with the given degree. Does not touch the
  // leader bookkeeping; call RefreshLeaders with the new vertex afterwards.
  VertexId AddVertex(TypeId t, std::int64_t degree = 0);
  void AddDegree(VertexId v, std::int64_t delta);

  // Re-establishes max_degree_by_type / leader_by_type after a batch of
  // degree increases restricted to `touched`. A change is counted only when
  // the previous leader is no longer among the maximum-degree vertices.
  void RefreshLeaders(std::span<const VertexId> touched);
};

// G_1: one vertex with 2 * initial_self_loops degree, type drawn from
// type_probs.
GraphState InitialState(const ModelParams& params, Rng& rng);

// Arbitrary state from explicit degrees and (0-based) types. Leaders are the
// lowest-id maximum-degree vertex of each type; no changes are recorded.
GraphState StateFromDegrees(const ModelParams& params,
                            std::span<const std::int64_t> degrees,
                            std::span<const TypeId> types);

// Draws a type from the categorical distribution type_probs. Consumes no
// randomness when there is a single type.
TypeId DrawType(const ModelParams& params, Rng& rng);

// Aggregates recomputed from scratch, for consistency checks.
struct Aggregates {
  std::vector<std::int64_t> degree_sum_by_type;
  std::vector<std::int64_t> count_by_type;
  std::vector<std::int64_t> max_degree_by_type;
  std::int64_t total_degree = 0;

  bool operator==(const Aggregates&) const = default;
};

Aggregates Rescan(const GraphState& state);
Aggregates IncrementalAggregates(const GraphState& state);

}  // namespace prefchoice
