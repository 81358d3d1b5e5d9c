#include <cmath>
#include <vector>

#include "doctest.h"
#include "prefchoice/process.hpp"

using namespace prefchoice;

namespace {

struct Moments {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Moments Summarize(const std::vector<double>& xs) {
  double sum = 0.0, sq = 0.0;
  for (double x : xs) {
    sum += x;
    sq += x * x;
  }
  double n = static_cast<double>(xs.size());
  double mean = sum / n;
  double var = std::max(0.0, sq / n - mean * mean) * n / (n - 1);
  return {mean, std::sqrt(var / n)};
}

// Replays one step from `state` many times and compares the per-type mean
// increments of D_i and M_i with the enumeration.
void CheckAgainstOracle(const GraphState& state, const ModelParams& params,
                        int replays, std::uint64_t seed) {
  OracleResult oracle = ExpectationOracle(state, params);
  WeightIndex base_index = BuildIndex(state);
  std::size_t nt = state.num_types();
  std::vector<std::vector<double>> dw(nt), dm(nt);
  Rng rng(seed);
  StepOutcome out;
  for (int r = 0; r < replays; ++r) {
    GraphState s = state;
    WeightIndex index = base_index;
    DoStep(s, index, params, rng, out);
    for (std::size_t t = 0; t < nt; ++t) {
      auto type = static_cast<TypeId>(t);
      dw[t].push_back(s.type_weight(type) - state.type_weight(type));
      dm[t].push_back(static_cast<double>(s.max_degree_by_type[t] -
                                          state.max_degree_by_type[t]));
    }
  }
  for (std::size_t t = 0; t < nt; ++t) {
    Moments w = Summarize(dw[t]);
    Moments m = Summarize(dm[t]);
    CHECK(std::abs(w.mean - oracle.delta_weight_by_type[t]) <=
          3 * w.stderr_ + 1e-9);
    CHECK(std::abs(m.mean - oracle.delta_max_degree_by_type[t]) <=
          3 * m.stderr_ + 1e-9);
  }
}

GraphState RandomSmallState(Rng& rng, const ModelParams& params,
                            std::size_t n) {
  std::vector<std::int64_t> degs;
  std::vector<TypeId> types;
  for (std::size_t v = 0; v < n; ++v) {
    degs.push_back(1 + static_cast<std::int64_t>(UniformBelow(rng, 6)));
    types.push_back(static_cast<TypeId>(
        UniformBelow(rng, static_cast<std::uint64_t>(params.num_types))));
  }
  return StateFromDegrees(params, degs, types);
}

}  // namespace

TEST_CASE("first step from G1 has a single possible vertex-step target") {
  ModelParams p = NewParams(1, 3, 2, 1, 0.0, {1.0});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    GraphState s = InitialState(p, rng);
    WeightIndex index = BuildIndex(s);
    StepOutcome out = DoStep(s, index, p, rng);
    REQUIRE(out.vertex_step_targets == std::vector<VertexId>{0});
    CHECK(out.new_vertex == 1);
    for (auto [w, u] : out.edge_step_pairs) {
      // Exclusion leaves exactly the other vertex.
      CHECK(u == 1 - w);
    }
    CHECK(out.fallback_pairs == 0);
    CHECK(s.total_degree == 2 + 2 * (1 + 3));
  }
}

TEST_CASE("pre-vertex weighting from G1 uses the new vertex as last resort") {
  ParamOptions opt;
  opt.edge_step_weighting = EdgeStepWeighting::kPreVertex;
  ModelParams p = NewParams(1, 2, 2, 1, 0.0, {1.0}, opt);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    GraphState s = InitialState(p, rng);
    WeightIndex index = BuildIndex(s);
    StepOutcome out = DoStep(s, index, p, rng);
    for (auto [w, u] : out.edge_step_pairs) CHECK(u == 1 - w);
  }
}

TEST_CASE("step invariants along runs") {
  struct Case {
    ModelParams params;
    bool single_type;
  };
  ParamOptions pre;
  pre.edge_step_weighting = EdgeStepWeighting::kPreVertex;
  std::vector<Case> cases{
      {NewParams(1, 2, 3, 1, 0.0, {1.0}), true},
      {NewParams(2, 1, 2, 1, -0.5, {1.0}, pre), true},
      {NewParams(1, 1, 3, 2, 0.0, {0.3, 0.7}), false},
      {NewParams(3, 2, 4, 3, 1.5, {0.2, 0.2, 0.6}, pre), false},
  };
  for (const Case& c : cases) {
    const ModelParams& p = c.params;
    Rng rng(17);
    GraphState s = InitialState(p, rng);
    WeightIndex index = BuildIndex(s);
    StepOutcome out;
    for (int step = 0; step < 20000; ++step) {
      std::int64_t before_total = s.total_degree;
      std::int64_t n_before = s.n;
      std::vector<std::int64_t> max_before = s.max_degree_by_type;
      DoStep(s, index, p, rng, out);

      REQUIRE(s.n == n_before + 1);
      REQUIRE(s.total_degree - before_total == 2 * (p.m + p.k));
      REQUIRE(s.total_degree == 2 * p.initial_self_loops + 2 * (p.m + p.k) * (s.n - 1));
      for (VertexId v : out.vertex_step_targets) {
        REQUIRE(static_cast<std::int64_t>(v) < n_before);
      }
      for (auto [w, u] : out.edge_step_pairs) REQUIRE(w != u);
      if (c.single_type) REQUIRE(out.fallback_pairs == 0);
      for (std::size_t t = 0; t < s.num_types(); ++t) {
        std::int64_t jump = s.max_degree_by_type[t] - max_before[t];
        REQUIRE(jump >= 0);
        // A type's first vertex can start at degree m + 2k.
        REQUIRE(jump <= p.m + 2 * p.k);
      }
    }
    CHECK(Rescan(s) == IncrementalAggregates(s));
  }
}

TEST_CASE("oracle with no edge step reduces to the vertex-step drift") {
  ModelParams p = NewParams(2, 1, 2, 2, 0.5, {0.4, 0.6});
  p.k = 0;  // bypasses validation on purpose; the oracle handles it
  std::vector<std::int64_t> degs{3, 1, 2, 5};
  std::vector<TypeId> types{0, 1, 1, 0};
  GraphState s = StateFromDegrees(p, degs, types);
  OracleResult r = ExpectationOracle(s, p);
  double total = s.total_weight();
  for (TypeId t = 0; t < 2; ++t) {
    double expected = p.m * s.type_weight(t) / total +
                      p.type_probs[t] * (p.m + p.beta);
    CHECK(r.delta_weight_by_type[t] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("two-vertex choice probability follows the complement rule") {
  // Single type, vertices of degree 5 and 2. Under pre-vertex weighting and
  // with the uniform source being the new vertex, the pool is {v0, v1} and the
  // larger vertex wins iff it appears in the sample.
  ParamOptions pre;
  pre.edge_step_weighting = EdgeStepWeighting::kPreVertex;
  ModelParams p = NewParams(1, 1, 2, 1, 0.0, {1.0}, pre);
  std::vector<std::int64_t> degs{5, 2};
  std::vector<TypeId> types{0, 0};
  GraphState s = StateFromDegrees(p, degs, types);

  double w_max = 5.0, total = 7.0;
  double p_in_sample = 1.0 - std::pow(1.0 - w_max / total, 2.0);
  // Direct enumeration of the ordered 2-tuples.
  double enumerated = 0.0;
  double weights[2] = {5.0, 2.0};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      if (a == 0 || b == 0) enumerated += weights[a] / total * weights[b] / total;
    }
  }
  CHECK(enumerated == doctest::Approx(p_in_sample).epsilon(1e-14));

  // Monte Carlo of the new vertex's edge-step partner through DoStep.
  Rng rng(8);
  WeightIndex base = BuildIndex(s);
  int from_new = 0, chose_max = 0;
  StepOutcome out;
  for (int r = 0; r < 200000; ++r) {
    GraphState g = s;
    WeightIndex index = base;
    DoStep(g, index, p, rng, out);
    auto [w, u] = out.edge_step_pairs.front();
    if (w != 2) continue;
    ++from_new;
    if (u == 0) ++chose_max;
  }
  double frac = static_cast<double>(chose_max) / from_new;
  double se = std::sqrt(p_in_sample * (1 - p_in_sample) / from_new);
  CHECK(std::abs(frac - p_in_sample) < 4 * se);
}

TEST_CASE("fixed five-vertex state matches the oracle") {
  ModelParams p = NewParams(1, 1, 2, 2, 0.0, {0.5, 0.5});
  std::vector<std::int64_t> degs{4, 1, 2, 3, 1};
  std::vector<TypeId> types{0, 0, 1, 1, 0};
  GraphState s = StateFromDegrees(p, degs, types);
  CheckAgainstOracle(s, p, 1000000, 123);
}

TEST_CASE("random small states match the oracle") {
  Rng pick(4242);
  for (int i = 0; i < 24; ++i) {
    std::int64_t nt = 1 + static_cast<std::int64_t>(UniformBelow(pick, 2));
    std::vector<double> probs =
        nt == 1 ? std::vector<double>{1.0} : std::vector<double>{0.35, 0.65};
    ParamOptions opt;
    opt.edge_step_weighting = UniformBelow(pick, 2)
                                  ? EdgeStepWeighting::kPreVertex
                                  : EdgeStepWeighting::kPostVertex;
    double betas[3] = {0.0, 0.5, -0.5};
    ModelParams p = NewParams(1 + static_cast<std::int64_t>(UniformBelow(pick, 2)),
                              1 + static_cast<std::int64_t>(UniformBelow(pick, 2)),
                              2 + static_cast<std::int64_t>(UniformBelow(pick, 2)),
                              nt, betas[UniformBelow(pick, 3)], probs, opt);
    std::size_t n = 1 + UniformBelow(pick, 6);
    GraphState s = RandomSmallState(pick, p, n);
    CAPTURE(i);
    CheckAgainstOracle(s, p, 100000, 1000 + static_cast<std::uint64_t>(i));
  }
}

TEST_CASE("oracle refuses large states") {
  ModelParams p = NewParams(2, 2, 3, 1, 0.0, {1.0});
  std::vector<std::int64_t> degs(40, 2);
  std::vector<TypeId> types(40, 0);
  GraphState s = StateFromDegrees(p, degs, types);
  try {
    ExpectationOracle(s, p);
    FAIL("oracle accepted a large state");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooLargeForOracle);
  }
}

TEST_CASE("checkpoint schedules") {
  std::vector<std::int64_t> geo = ExpandSchedule(GeometricSchedule{1000, 10.0}, 1000000);
  CHECK(geo == std::vector<std::int64_t>{1000, 10000, 100000, 1000000});

  std::vector<std::int64_t> quarter = ExpandSchedule(GeometricSchedule{}, 1000);
  CHECK(quarter == std::vector<std::int64_t>{100, 178, 316, 562, 1000});

  std::vector<std::int64_t> gamma2 = ExpandSchedule(GeometricSchedule{1000, 2.0}, 1000000);
  CHECK(gamma2.size() == 11);
  CHECK(gamma2.front() == 1000);
  CHECK(gamma2[9] == 512000);
  CHECK(gamma2.back() == 1000000);

  CheckpointSchedule list = std::vector<std::int64_t>{50, 10, 50, 20};
  CHECK(ExpandSchedule(list, 60) == std::vector<std::int64_t>{10, 20, 50, 60});
  CHECK(ExpandSchedule(GeometricSchedule{}, 50) == std::vector<std::int64_t>{50});

  CHECK_THROWS_AS(ExpandSchedule(CheckpointSchedule{std::vector<std::int64_t>{0}}, 10),
                  Error);
  CHECK_THROWS_AS(ExpandSchedule(CheckpointSchedule{std::vector<std::int64_t>{11}}, 10),
                  Error);
  CHECK_THROWS_AS(ExpandSchedule(GeometricSchedule{100, 1.0}, 10), Error);
}

TEST_CASE("runs are deterministic and record the requested rows") {
  RunConfig c;
  c.params = NewParams(1, 2, 3, 2, 0.0, {0.3, 0.7});
  c.n_steps = 20000;
  c.seed = 99;
  Trajectory a = Run(c);
  Trajectory b = Run(c);
  CHECK(a == b);
  REQUIRE(a.rows.size() == 11);
  CHECK(a.rows.back().n == 20000);
  CHECK(a.build_tag == std::string(kBuildTag));

  c.seed = 100;
  CHECK(!(Run(c) == a));

  RunConfig one;
  one.params = NewParams(2, 1, 2, 1, 0.0, {1.0});
  one.n_steps = 1;
  Trajectory t = Run(one);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].n == 1);
  CHECK(t.rows[0].total_degree == 4);
  CHECK(t.rows[0].max_degree[0] == 4);

  RunConfig bad = one;
  bad.n_steps = 0;
  CHECK_THROWS_AS(Run(bad), Error);
}

TEST_CASE("total weight tracks its linear growth over a long run") {
  RunConfig c;
  c.params = NewParams(1, 2, 3, 1, 0.0, {1.0});
  c.n_steps = 1000000;
  c.seed = 5;
  c.checkpoints = std::vector<std::int64_t>{1000000};
  Trajectory t = Run(c);
  const CheckpointRow& last = t.rows.back();
  double ratio = last.type_weight(0, 0.0) /
                 (c.params.total_weight_rate() * static_cast<double>(last.n));
  CHECK(std::abs(ratio - 1.0) < 0.01);
}
