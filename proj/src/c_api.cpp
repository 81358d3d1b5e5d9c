#include "prefchoice.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "json.hpp"
#include "prefchoice/experiments.hpp"
#include "prefchoice/process.hpp"
#include "prefchoice/theory.hpp"

struct pc_params {
  prefchoice::ModelParams value;
};

// Either owns its trajectory (single runs) or borrows one from a sweep.
struct pc_trajectory {
  std::optional<prefchoice::Trajectory> owned;
  const prefchoice::Trajectory* borrowed = nullptr;

  const prefchoice::Trajectory& get() const {
    return borrowed ? *borrowed : *owned;
  }
};

struct pc_sweep {
  prefchoice::SweepResult value;
  std::vector<pc_trajectory> views;
};

namespace {

thread_local std::string g_last_error;

pc_status ToStatus(prefchoice::ErrorCode code) {
  using prefchoice::ErrorCode;
  switch (code) {
    case ErrorCode::kBetaOutOfRange: return PC_ERR_BETA_OUT_OF_RANGE;
    case ErrorCode::kBadSampleSize: return PC_ERR_BAD_SAMPLE_SIZE;
    case ErrorCode::kBadProbs: return PC_ERR_BAD_PROBS;
    case ErrorCode::kBadCounts: return PC_ERR_BAD_COUNTS;
    case ErrorCode::kBadSelfLoops: return PC_ERR_BAD_SELF_LOOPS;
    case ErrorCode::kNotSupercritical: return PC_ERR_NOT_SUPERCRITICAL;
    case ErrorCode::kNotCritical: return PC_ERR_NOT_CRITICAL;
    case ErrorCode::kDomainError: return PC_ERR_DOMAIN;
    case ErrorCode::kInsufficientData: return PC_ERR_INSUFFICIENT_DATA;
    case ErrorCode::kIo: return PC_ERR_IO;
    case ErrorCode::kInvalidConfig: return PC_ERR_INVALID_ARGUMENT;
    default: return PC_ERR_INTERNAL;
  }
}

pc_status Fail(pc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
pc_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return PC_OK;
  } catch (const prefchoice::Error& e) {
    return Fail(ToStatus(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(PC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(PC_ERR_INTERNAL, e.what());
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

prefchoice::CheckpointSchedule ToSchedule(const pc_schedule_desc* desc) {
  if (!desc) return prefchoice::GeometricSchedule{};
  if (desc->use_list) {
    if (desc->num_points > 0 && !desc->points) {
      throw prefchoice::Error(prefchoice::ErrorCode::kInvalidConfig,
                              "schedule points pointer is NULL");
    }
    return std::vector<std::int64_t>(desc->points,
                                     desc->points + desc->num_points);
  }
  return prefchoice::GeometricSchedule{desc->start, desc->factor};
}

#define PC_REQUIRE(cond, what)                                   \
  do {                                                           \
    if (!(cond)) return Fail(PC_ERR_INVALID_ARGUMENT, (what));   \
  } while (0)

}  // namespace

extern "C" {

const char* pc_version(void) { return prefchoice::kBuildTag; }

const char* pc_status_name(pc_status status) {
  switch (status) {
    case PC_OK: return "ok";
    case PC_ERR_BETA_OUT_OF_RANGE: return "beta out of range";
    case PC_ERR_BAD_SAMPLE_SIZE: return "bad sample size";
    case PC_ERR_BAD_PROBS: return "bad type probabilities";
    case PC_ERR_BAD_COUNTS: return "bad counts";
    case PC_ERR_BAD_SELF_LOOPS: return "bad self-loop count";
    case PC_ERR_NOT_SUPERCRITICAL: return "not supercritical";
    case PC_ERR_NOT_CRITICAL: return "not critical";
    case PC_ERR_DOMAIN: return "domain error";
    case PC_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case PC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PC_ERR_IO: return "i/o error";
    case PC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pc_last_error(void) { return g_last_error.c_str(); }

void pc_string_free(char* s) { std::free(s); }

pc_status pc_params_create(const pc_params_desc* desc, pc_params** out) {
  PC_REQUIRE(desc && out, "NULL argument");
  PC_REQUIRE(desc->num_type_probs == 0 || desc->type_probs,
             "type_probs is NULL");
  *out = nullptr;
  return Guard([&] {
    prefchoice::ParamOptions opts;
    if (desc->initial_self_loops >= 0) {
      opts.initial_self_loops = desc->initial_self_loops;
    }
    opts.edge_step_weighting =
        desc->edge_weighting == PC_EDGE_WEIGHTING_PRE_VERTEX
            ? prefchoice::EdgeStepWeighting::kPreVertex
            : prefchoice::EdgeStepWeighting::kPostVertex;
    std::vector<double> probs(desc->type_probs,
                              desc->type_probs + desc->num_type_probs);
    auto params = prefchoice::NewParams(desc->m, desc->k, desc->d,
                                        desc->num_types, desc->beta,
                                        std::move(probs), opts);
    *out = new pc_params{std::move(params)};
  });
}

void pc_params_destroy(pc_params* params) { delete params; }

int64_t pc_params_num_types(const pc_params* params) {
  return params ? params->value.num_types : 0;
}

pc_status pc_theory_classify(const pc_params* params, pc_theory_summary* out) {
  PC_REQUIRE(params && out, "NULL argument");
  return Guard([&] {
    auto s = prefchoice::ClassifyRegime(params->value);
    double nan = std::numeric_limits<double>::quiet_NaN();
    out->regime = static_cast<pc_regime>(s.regime);
    out->rho = s.rho;
    out->x_star = s.x_star.value_or(nan);
    out->subcritical_exponent = s.subcritical_exponent.value_or(nan);
  });
}

pc_status pc_theory_f(const pc_params* params, double x, double* out) {
  PC_REQUIRE(params && out, "NULL argument");
  return Guard([&] { *out = prefchoice::FEval(x, params->value); });
}

pc_status pc_theory_fixed_point(const pc_params* params, double* out) {
  PC_REQUIRE(params && out, "NULL argument");
  return Guard([&] { *out = prefchoice::SolveFixedPoint(params->value); });
}

pc_status pc_theory_critical_constant(const pc_params* params,
                                      size_t type_index, double* out) {
  PC_REQUIRE(params && out, "NULL argument");
  return Guard(
      [&] { *out = prefchoice::CriticalConstant(params->value, type_index); });
}

pc_status pc_theory_mean_field(const pc_params* params, size_t type_index,
                               int64_t n0, double y0, int64_t n_max,
                               double* y_out) {
  PC_REQUIRE(params && y_out, "NULL argument");
  return Guard([&] {
    auto traj = prefchoice::MeanFieldTrajectory(params->value, type_index, n0,
                                                y0, n_max, n_max);
    *y_out = traj.back().y;
  });
}

pc_status pc_theory_json(const pc_params* params, char** out_json) {
  PC_REQUIRE(params && out_json, "NULL argument");
  *out_json = nullptr;
  return Guard([&] {
    const auto& p = params->value;
    auto s = prefchoice::ClassifyRegime(p);
    nlohmann::json doc{
        {"params",
         {{"m", p.m}, {"k", p.k}, {"d", p.d}, {"T", p.num_types},
          {"beta", p.beta}, {"p", p.type_probs}}},
        {"regime", prefchoice::RegimeName(s.regime)},
        {"rho", s.rho},
        {"x_star", s.x_star ? nlohmann::json(*s.x_star) : nlohmann::json()},
        {"exponent", s.subcritical_exponent
                         ? nlohmann::json(*s.subcritical_exponent)
                         : nlohmann::json()},
        {"critical_constant", s.critical_constant_by_type
                                  ? nlohmann::json(*s.critical_constant_by_type)
                                  : nlohmann::json()},
        {"condensate_fraction",
         s.condensate_fraction_by_type
             ? nlohmann::json(*s.condensate_fraction_by_type)
             : nlohmann::json()}};
    *out_json = CopyString(doc.dump(2));
  });
}

uint64_t pc_derive_seed(uint64_t root, uint64_t cell, uint64_t replicate) {
  return prefchoice::DeriveSeed(root, cell, replicate);
}

pc_status pc_simulate(const pc_params* params, int64_t n_steps, uint64_t seed,
                      const pc_schedule_desc* schedule, pc_trajectory** out) {
  PC_REQUIRE(params && out, "NULL argument");
  *out = nullptr;
  return Guard([&] {
    prefchoice::RunConfig cfg{params->value, n_steps, seed,
                              ToSchedule(schedule)};
    auto traj = std::make_unique<pc_trajectory>();
    traj->owned = prefchoice::Run(cfg);
    *out = traj.release();
  });
}

void pc_trajectory_destroy(pc_trajectory* trajectory) { delete trajectory; }

size_t pc_trajectory_num_rows(const pc_trajectory* trajectory) {
  return trajectory ? trajectory->get().rows.size() : 0;
}

pc_status pc_trajectory_row(const pc_trajectory* trajectory, size_t row,
                            size_t type_index, pc_row_view* out) {
  PC_REQUIRE(trajectory && out, "NULL argument");
  const auto& t = trajectory->get();
  PC_REQUIRE(row < t.rows.size(), "row index out of range");
  const auto& r = t.rows[row];
  PC_REQUIRE(type_index < r.max_degree.size(), "type index out of range");
  out->n = r.n;
  out->total_degree = r.total_degree;
  out->max_degree = r.max_degree[type_index];
  out->leader = r.leader[type_index];
  out->type_weight = r.type_weight(type_index, t.params.beta);
  out->type_count = r.count[type_index];
  out->leadership_changes = r.leadership_changes[type_index];
  return PC_OK;
}

pc_status pc_trajectory_write_csv(const pc_trajectory* trajectory,
                                  const char* path) {
  PC_REQUIRE(trajectory && path, "NULL argument");
  return Guard([&] {
    prefchoice::WriteFileAtomic(path,
                                prefchoice::TrajectoryToCsv(trajectory->get()));
  });
}

pc_status pc_trajectory_summary_json(const pc_trajectory* trajectory,
                                     uint64_t root_seed, uint64_t cell,
                                     uint64_t replicate, char** out_json) {
  PC_REQUIRE(trajectory && out_json, "NULL argument");
  *out_json = nullptr;
  return Guard([&] {
    *out_json = CopyString(prefchoice::SummaryJson(
        trajectory->get(), {root_seed, cell, replicate}));
  });
}

pc_status pc_trajectory_write_summary(const pc_trajectory* trajectory,
                                      uint64_t root_seed, uint64_t cell,
                                      uint64_t replicate, const char* path) {
  PC_REQUIRE(trajectory && path, "NULL argument");
  return Guard([&] {
    prefchoice::WriteFileAtomic(
        path, prefchoice::SummaryJson(trajectory->get(),
                                      {root_seed, cell, replicate}));
  });
}

pc_status pc_sweep_run(const pc_params* const* grid, size_t grid_size,
                       int64_t seeds_per_cell, uint64_t root_seed,
                       int64_t n_steps, const pc_schedule_desc* schedule,
                       unsigned parallelism, pc_sweep** out) {
  PC_REQUIRE(out && (grid || grid_size == 0), "NULL argument");
  *out = nullptr;
  return Guard([&] {
    prefchoice::SweepSpec spec;
    for (size_t i = 0; i < grid_size; ++i) {
      if (!grid[i]) {
        throw prefchoice::Error(prefchoice::ErrorCode::kInvalidConfig,
                                "NULL grid entry");
      }
      spec.grid.push_back(grid[i]->value);
    }
    spec.seeds_per_cell = seeds_per_cell;
    spec.root_seed = root_seed;
    spec.n_steps = n_steps;
    spec.checkpoints = ToSchedule(schedule);
    // Reject bad configurations up front instead of once per run.
    for (const auto& p : spec.grid) {
      prefchoice::Validate(
          prefchoice::RunConfig{p, n_steps, 0, spec.checkpoints});
    }
    auto sweep = std::make_unique<pc_sweep>();
    sweep->value = prefchoice::Sweep(spec, parallelism);
    for (const auto& run : sweep->value.runs) {
      pc_trajectory view;
      view.borrowed = run.trajectory ? &*run.trajectory : nullptr;
      sweep->views.push_back(std::move(view));
    }
    *out = sweep.release();
  });
}

void pc_sweep_destroy(pc_sweep* sweep) { delete sweep; }

size_t pc_sweep_num_runs(const pc_sweep* sweep) {
  return sweep ? sweep->value.runs.size() : 0;
}

const pc_trajectory* pc_sweep_trajectory(const pc_sweep* sweep, size_t run) {
  if (!sweep || run >= sweep->views.size() || !sweep->views[run].borrowed) {
    return nullptr;
  }
  return &sweep->views[run];
}

pc_status pc_sweep_summary_json(const pc_sweep* sweep, char** out_json) {
  PC_REQUIRE(sweep && out_json, "NULL argument");
  *out_json = nullptr;
  return Guard([&] {
    *out_json = CopyString(prefchoice::SweepSummaryJson(sweep->value));
  });
}

pc_status pc_sweep_write(const pc_sweep* sweep, const char* dir) {
  PC_REQUIRE(sweep && dir, "NULL argument");
  return Guard([&] { prefchoice::WriteSweep(sweep->value, dir); });
}

}  // extern "C"
