#include "prefchoice/graph_state.hpp"

#include <algorithm>

namespace prefchoice {

VertexId GraphState::AddVertex(TypeId t, std::int64_t degree) {
  auto id = static_cast<VertexId>(degrees.size());
  degrees.push_back(degree);
  types.push_back(t);
  degree_sum_by_type[t] += degree;
  count_by_type[t] += 1;
  total_degree += degree;
  n += 1;
  return id;
}

void GraphState::AddDegree(VertexId v, std::int64_t delta) {
  degrees[v] += delta;
  degree_sum_by_type[types[v]] += delta;
  total_degree += delta;
}

void GraphState::RefreshLeaders(std::span<const VertexId> touched) {
  // Touched lists hold at most 1 + m + 2k entries, so quadratic scans are fine.
  for (std::size_t i = 0; i < touched.size(); ++i) {
    VertexId v = touched[i];
    TypeId t = types[v];
    bool vacant = leader_by_type[t] == kNoLeader;
    if (!vacant && degrees[v] <= max_degree_by_type[t]) continue;
    std::int64_t new_max = std::max(degrees[v], max_degree_by_type[t]);
    for (VertexId u : touched) {
      if (types[u] == t) new_max = std::max(new_max, degrees[u]);
    }
    max_degree_by_type[t] = new_max;
    std::int64_t old = leader_by_type[t];
    if (old != kNoLeader && degrees[static_cast<VertexId>(old)] == new_max) {
      continue;
    }
    std::int64_t best = kNoLeader;
    for (VertexId u : touched) {
      if (types[u] == t && degrees[u] == new_max &&
          (best == kNoLeader || u < best)) {
        best = u;
      }
    }
    leader_by_type[t] = best;
    if (old != kNoLeader) {
      leadership_changes_by_type[t] += 1;
      last_change_by_type[t] = n;
    }
  }
}

namespace {

GraphState EmptyState(const ModelParams& params) {
  GraphState s;
  auto nt = static_cast<std::size_t>(params.num_types);
  s.beta = params.beta;
  s.degree_sum_by_type.assign(nt, 0);
  s.count_by_type.assign(nt, 0);
  s.max_degree_by_type.assign(nt, 0);
  s.leader_by_type.assign(nt, kNoLeader);
  s.leadership_changes_by_type.assign(nt, 0);
  s.last_change_by_type.assign(nt, 0);
  return s;
}

}  // namespace

TypeId DrawType(const ModelParams& params, Rng& rng) {
  if (params.num_types == 1) return 0;
  double u = Uniform01(rng);
  double acc = 0.0;
  for (std::size_t t = 0; t + 1 < params.type_probs.size(); ++t) {
    acc += params.type_probs[t];
    if (u < acc) return static_cast<TypeId>(t);
  }
  return static_cast<TypeId>(params.type_probs.size() - 1);
}

GraphState InitialState(const ModelParams& params, Rng& rng) {
  GraphState s = EmptyState(params);
  TypeId t = DrawType(params, rng);
  VertexId v = s.AddVertex(t, 2 * params.initial_self_loops);
  s.RefreshLeaders(std::span<const VertexId>(&v, 1));
  return s;
}

GraphState StateFromDegrees(const ModelParams& params,
                            std::span<const std::int64_t> degrees,
                            std::span<const TypeId> types) {
  if (degrees.size() != types.size() || degrees.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "degrees and types must be non-empty and of equal length");
  }
  GraphState s = EmptyState(params);
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (types[i] >= s.num_types()) {
      throw Error(ErrorCode::kInvalidConfig, "type id out of range");
    }
    if (degrees[i] < 0) {
      throw Error(ErrorCode::kInvalidConfig, "negative degree");
    }
    s.AddVertex(types[i], degrees[i]);
  }
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    TypeId t = types[i];
    if (s.leader_by_type[t] == kNoLeader || degrees[i] > s.max_degree_by_type[t]) {
      s.leader_by_type[t] = static_cast<std::int64_t>(i);
      s.max_degree_by_type[t] = degrees[i];
    }
  }
  return s;
}

Aggregates Rescan(const GraphState& state) {
  Aggregates a;
  std::size_t nt = state.num_types();
  a.degree_sum_by_type.assign(nt, 0);
  a.count_by_type.assign(nt, 0);
  a.max_degree_by_type.assign(nt, 0);
  for (std::size_t v = 0; v < state.degrees.size(); ++v) {
    TypeId t = state.types[v];
    a.degree_sum_by_type[t] += state.degrees[v];
    a.count_by_type[t] += 1;
    a.max_degree_by_type[t] = std::max(a.max_degree_by_type[t], state.degrees[v]);
    a.total_degree += state.degrees[v];
  }
  return a;
}

Aggregates IncrementalAggregates(const GraphState& state) {
  return Aggregates{state.degree_sum_by_type, state.count_by_type,
                    state.max_degree_by_type, state.total_degree};
}

}  // namespace prefchoice
