#include "prefchoice/process.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace prefchoice {

WeightIndex BuildIndex(const GraphState& state) {
  WeightIndex index(state.num_types(), state.beta);
  for (std::size_t v = 0; v < state.degrees.size(); ++v) {
    index.InsertVertex(static_cast<VertexId>(v), state.types[v],
                       state.degrees[v]);
  }
  return index;
}

namespace {

// Picks the sample member of largest degree; ties go uniformly to one of the
// distinct tied vertices.
VertexId ChooseMax(std::span<const VertexId> sample,
                   const std::vector<std::int64_t>& degrees, Rng& rng,
                   std::vector<VertexId>& tied) {
  tied.clear();
  std::int64_t best = -1;
  for (VertexId y : sample) {
    std::int64_t deg = degrees[y];
    if (deg > best) {
      best = deg;
      tied.clear();
      tied.push_back(y);
    } else if (deg == best &&
               std::find(tied.begin(), tied.end(), y) == tied.end()) {
      tied.push_back(y);
    }
  }
  if (tied.size() == 1) return tied.front();
  return tied[UniformBelow(rng, tied.size())];
}

std::pair<VertexId, VertexId> DrawPair(const GraphState& state,
                                       const WeightIndex& index,
                                       const ModelParams& params,
                                       VertexId new_vertex, Rng& rng,
                                       std::int64_t& fallbacks) {
  thread_local std::vector<VertexId> sample;
  thread_local std::vector<VertexId> tied;

  VertexId w = params.edge_step_weighting == EdgeStepWeighting::kPostVertex
                   ? index.SampleUniform(rng)
                   : static_cast<VertexId>(UniformBelow(
                         rng, static_cast<std::uint64_t>(state.n)));
  TypeId t = state.types[w];
  bool indexed = index.Contains(w);
  std::int64_t same_type = index.type_count(t) - (indexed ? 1 : 0);
  auto others = static_cast<std::int64_t>(index.size()) - (indexed ? 1 : 0);

  if (same_type == 0) {
    ++fallbacks;
    // Only reachable under kPreVertex with n = 1: G_n minus w is empty and
    // the new vertex is the one remaining candidate.
    if (others == 0) return {w, new_vertex};
  }
  sample.clear();
  for (std::int64_t j = 0; j < params.d; ++j) {
    sample.push_back(same_type > 0 ? index.SampleTypeExcluding(t, w, rng)
                                   : index.SampleGlobalExcluding(w, rng));
  }
  return {w, ChooseMax(sample, state.degrees, rng, tied)};
}

void ApplyVertexStep(GraphState& state, WeightIndex& index,
                     const StepOutcome& out) {
  for (VertexId target : out.vertex_step_targets) {
    state.AddDegree(target, 1);
    index.AddWeight(target, 1);
  }
  state.AddDegree(out.new_vertex,
                  static_cast<std::int64_t>(out.vertex_step_targets.size()));
  index.InsertVertex(out.new_vertex, out.new_vertex_type,
                     state.degrees[out.new_vertex]);
}

}  // namespace

void DoStep(GraphState& state, WeightIndex& index, const ModelParams& params,
            Rng& rng, StepOutcome& out) {
  out.vertex_step_targets.clear();
  out.edge_step_pairs.clear();
  out.fallback_pairs = 0;

  out.new_vertex_type = DrawType(params, rng);
  for (std::int64_t j = 0; j < params.m; ++j) {
    out.vertex_step_targets.push_back(index.SampleGlobal(rng));
  }
  out.new_vertex = state.AddVertex(out.new_vertex_type, 0);

  bool post = params.edge_step_weighting == EdgeStepWeighting::kPostVertex;
  if (post) ApplyVertexStep(state, index, out);
  for (std::int64_t i = 0; i < params.k; ++i) {
    out.edge_step_pairs.push_back(DrawPair(state, index, params,
                                           out.new_vertex, rng,
                                           out.fallback_pairs));
  }
  if (!post) ApplyVertexStep(state, index, out);

  for (auto [w, u] : out.edge_step_pairs) {
    state.AddDegree(w, 1);
    state.AddDegree(u, 1);
    index.AddWeight(w, 1);
    index.AddWeight(u, 1);
  }

  thread_local std::vector<VertexId> touched;
  touched.assign(out.vertex_step_targets.begin(), out.vertex_step_targets.end());
  touched.push_back(out.new_vertex);
  for (auto [w, u] : out.edge_step_pairs) {
    touched.push_back(w);
    touched.push_back(u);
  }
  state.RefreshLeaders(touched);
}

StepOutcome DoStep(GraphState& state, WeightIndex& index,
                   const ModelParams& params, Rng& rng) {
  StepOutcome out;
  DoStep(state, index, params, rng, out);
  return out;
}

// ---------------------------------------------------------------------------
// Expectation oracle

namespace {

// Odometer over tuples of length `len` with entries in [0, base).
bool NextTuple(std::vector<std::size_t>& digits, std::size_t base) {
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (++digits[i] < base) return true;
    digits[i] = 0;
  }
  return false;
}

struct PairProb {
  VertexId w;
  VertexId u;
  double p;
};

// Distribution of one edge-step pair given the sampling snapshot.
std::vector<PairProb> PairDistribution(const std::vector<std::int64_t>& degs,
                                       const std::vector<TypeId>& types,
                                       std::size_t pool_size, double beta,
                                       std::int64_t d) {
  std::size_t total = types.size();  // n + 1 vertices, the new one last
  std::vector<double> table(total * total, 0.0);
  double pw = 1.0 / static_cast<double>(total);
  for (std::size_t w = 0; w < total; ++w) {
    std::vector<std::size_t> cand;
    for (std::size_t y = 0; y < pool_size; ++y) {
      if (y != w && types[y] == types[w]) cand.push_back(y);
    }
    if (cand.empty()) {
      for (std::size_t y = 0; y < pool_size; ++y) {
        if (y != w) cand.push_back(y);
      }
    }
    if (cand.empty()) {
      table[w * total + (total - 1)] += pw;
      continue;
    }
    double wsum = 0.0;
    for (std::size_t y : cand) wsum += static_cast<double>(degs[y]) + beta;
    std::vector<std::size_t> digits(static_cast<std::size_t>(d), 0);
    do {
      double p = pw;
      std::int64_t best = -1;
      std::vector<std::size_t> argmax;
      for (std::size_t digit : digits) {
        std::size_t y = cand[digit];
        p *= (static_cast<double>(degs[y]) + beta) / wsum;
        if (degs[y] > best) {
          best = degs[y];
          argmax.assign(1, y);
        } else if (degs[y] == best &&
                   std::find(argmax.begin(), argmax.end(), y) == argmax.end()) {
          argmax.push_back(y);
        }
      }
      for (std::size_t y : argmax) {
        table[w * total + y] += p / static_cast<double>(argmax.size());
      }
    } while (NextTuple(digits, cand.size()));
  }
  std::vector<PairProb> out;
  for (std::size_t w = 0; w < total; ++w) {
    for (std::size_t u = 0; u < total; ++u) {
      double p = table[w * total + u];
      if (p > 0.0) {
        out.push_back({static_cast<VertexId>(w), static_cast<VertexId>(u), p});
      }
    }
  }
  return out;
}

}  // namespace

OracleResult ExpectationOracle(const GraphState& state,
                               const ModelParams& params) {
  auto n = static_cast<std::size_t>(state.n);
  std::size_t num_types = state.num_types();
  double nd = static_cast<double>(n);
  double cost = static_cast<double>(num_types) *
                std::pow(nd, static_cast<double>(params.m)) *
                ((nd + 1) * std::pow(nd + 1, static_cast<double>(params.d)) +
                 std::pow(nd + 1, 2.0 * static_cast<double>(params.k))) *
                (nd + 1);
  if (cost > kOracleBudget) {
    throw Error(ErrorCode::kTooLargeForOracle,
                "enumeration needs ~" + std::to_string(cost) +
                    " outcomes, budget is 1e7");
  }
  double beta = state.beta;
  bool post = params.edge_step_weighting == EdgeStepWeighting::kPostVertex;

  std::vector<double> base_weight(num_types);
  for (std::size_t t = 0; t < num_types; ++t) {
    base_weight[t] = state.type_weight(static_cast<TypeId>(t));
  }
  double total_weight = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    total_weight += static_cast<double>(state.degrees[v]) + beta;
  }

  OracleResult result;
  result.delta_weight_by_type.assign(num_types, 0.0);
  result.delta_max_degree_by_type.assign(num_types, 0.0);

  std::vector<TypeId> types(state.types.begin(), state.types.end());
  types.push_back(0);
  for (std::size_t t_new = 0; t_new < num_types; ++t_new) {
    double p_type = params.type_probs[t_new];
    types.back() = static_cast<TypeId>(t_new);

    std::vector<std::size_t> targets(static_cast<std::size_t>(params.m), 0);
    do {
      double p_targets = 1.0;
      std::vector<std::int64_t> pre(state.degrees.begin(), state.degrees.end());
      pre.push_back(0);
      std::vector<std::int64_t> after_vertex = pre;
      for (std::size_t target : targets) {
        p_targets *= (static_cast<double>(state.degrees[target]) + beta) /
                     total_weight;
        after_vertex[target] += 1;
        after_vertex[n] += 1;
      }
      std::vector<PairProb> pairs =
          post ? PairDistribution(after_vertex, types, n + 1, beta, params.d)
               : PairDistribution(pre, types, n, beta, params.d);

      std::vector<std::size_t> choice(static_cast<std::size_t>(params.k), 0);
      do {
        double p = p_type * p_targets;
        std::vector<std::int64_t> final_deg = after_vertex;
        for (std::size_t c : choice) {
          p *= pairs[c].p;
          final_deg[pairs[c].w] += 1;
          final_deg[pairs[c].u] += 1;
        }
        if (p == 0.0) continue;
        std::vector<double> weight(num_types, 0.0);
        std::vector<std::int64_t> max_deg(num_types, 0);
        for (std::size_t v = 0; v <= n; ++v) {
          weight[types[v]] += static_cast<double>(final_deg[v]) + beta;
          max_deg[types[v]] = std::max(max_deg[types[v]], final_deg[v]);
        }
        for (std::size_t t = 0; t < num_types; ++t) {
          result.delta_weight_by_type[t] += p * (weight[t] - base_weight[t]);
          result.delta_max_degree_by_type[t] +=
              p * static_cast<double>(max_deg[t] - state.max_degree_by_type[t]);
        }
      } while (NextTuple(choice, pairs.size()));
    } while (NextTuple(targets, n));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Runs

std::vector<std::int64_t> ExpandSchedule(const CheckpointSchedule& schedule,
                                         std::int64_t n_steps) {
  std::vector<std::int64_t> out;
  if (const auto* geo = std::get_if<GeometricSchedule>(&schedule)) {
    if (geo->start < 1 || !(geo->factor > 1.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "geometric schedule needs start >= 1 and factor > 1");
    }
    for (int j = 0;; ++j) {
      double v = static_cast<double>(geo->start) * std::pow(geo->factor, j);
      if (v > static_cast<double>(n_steps) + 0.5) break;
      auto rounded = static_cast<std::int64_t>(std::llround(v));
      if (rounded > n_steps) break;
      if (out.empty() || rounded > out.back()) out.push_back(rounded);
    }
  } else {
    out = std::get<std::vector<std::int64_t>>(schedule);
    for (std::int64_t v : out) {
      if (v < 1 || v > n_steps) {
        throw Error(ErrorCode::kInvalidConfig,
                    "checkpoint " + std::to_string(v) + " outside [1, " +
                        std::to_string(n_steps) + "]");
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  if (out.empty() || out.back() != n_steps) out.push_back(n_steps);
  return out;
}

void Validate(const RunConfig& config) {
  Validate(config.params);
  if (config.n_steps < 1) {
    throw Error(ErrorCode::kInvalidConfig, "n_steps must be at least 1");
  }
  if (config.n_steps > static_cast<std::int64_t>(UINT32_MAX)) {
    throw Error(ErrorCode::kInvalidConfig, "n_steps exceeds 2^32 - 1");
  }
  ExpandSchedule(config.checkpoints, config.n_steps);
}

Trajectory Run(const RunConfig& config) {
  Validate(config);
  const ModelParams& params = config.params;
  Rng rng(config.seed);
  GraphState state = InitialState(params, rng);
  WeightIndex index = BuildIndex(state);
  std::vector<std::int64_t> checkpoints =
      ExpandSchedule(config.checkpoints, config.n_steps);

  Trajectory traj;
  traj.params = params;
  traj.seed = config.seed;
  traj.rows.reserve(checkpoints.size());
  state.degrees.reserve(static_cast<std::size_t>(config.n_steps));
  state.types.reserve(static_cast<std::size_t>(config.n_steps));

  std::size_t next = 0;
  StepOutcome out;
  while (true) {
    if (next < checkpoints.size() && checkpoints[next] == state.n) {
      traj.rows.push_back(RecordRow(state));
      ++next;
    }
    if (state.n >= config.n_steps) break;
    DoStep(state, index, params, rng, out);
  }
  return traj;
}

CheckpointRow RecordRow(const GraphState& state) {
  CheckpointRow row;
  row.n = state.n;
  row.total_degree = state.total_degree;
  row.max_degree = state.max_degree_by_type;
  row.leader = state.leader_by_type;
  row.degree_sum = state.degree_sum_by_type;
  row.count = state.count_by_type;
  row.leadership_changes = state.leadership_changes_by_type;
  return row;
}

}  // namespace prefchoice
