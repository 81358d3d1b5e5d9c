// prefchoice command-line tool. Talks to the library only through the C API.
//
//   prefchoice theory   --m 1 --k 2 --d 3 --beta 0
//   prefchoice simulate --m 1 --k 2 --d 3 --n 1000000 --seed 7 --out runs/
//   prefchoice sweep    --m 1 --k 1,2 --d 2,3 --seeds 5 --jobs 4 --out sweep/
//
// Every flag may also come from a flat key = value file given with --config;
// flags on the command line win over the file.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "prefchoice.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct Options {
  std::vector<std::int64_t> m{1};
  std::vector<std::int64_t> k{1};
  std::vector<std::int64_t> d{2};
  std::int64_t num_types = 1;
  std::vector<double> beta{0.0};
  std::vector<double> p;
  std::int64_t n = 1000;
  std::uint64_t seed = 0;
  std::string checkpoints = "geometric";
  std::string out = ".";
  std::string edge_weighting = "post";
  std::int64_t self_loops = -1;
  std::int64_t seeds = 1;
  unsigned jobs = 0;
};

struct ParamsDeleter {
  void operator()(pc_params* p) const { pc_params_destroy(p); }
};
struct TrajectoryDeleter {
  void operator()(pc_trajectory* t) const { pc_trajectory_destroy(t); }
};
struct SweepDeleter {
  void operator()(pc_sweep* s) const { pc_sweep_destroy(s); }
};
using ParamsPtr = std::unique_ptr<pc_params, ParamsDeleter>;
using TrajectoryPtr = std::unique_ptr<pc_trajectory, TrajectoryDeleter>;
using SweepPtr = std::unique_ptr<pc_sweep, SweepDeleter>;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

int ExitCodeFor(pc_status status) {
  return status == PC_ERR_IO ? kExitIo : kExitValidation;
}

void Check(pc_status status) {
  if (status != PC_OK) throw CliError(ExitCodeFor(status), pc_last_error());
}

ParamsPtr MakeParams(const Options& o, std::int64_t m, std::int64_t k,
                     std::int64_t d, double beta) {
  std::vector<double> probs = o.p;
  if (probs.empty()) {
    if (o.num_types != 1) {
      throw CliError(kExitValidation, "--p is required when --T > 1");
    }
    probs = {1.0};
  }
  if (o.edge_weighting != "post" && o.edge_weighting != "pre") {
    throw CliError(kExitValidation, "--edge-weighting must be post or pre");
  }
  pc_params_desc desc{};
  desc.m = m;
  desc.k = k;
  desc.d = d;
  desc.num_types = o.num_types;
  desc.beta = beta;
  desc.type_probs = probs.data();
  desc.num_type_probs = probs.size();
  desc.initial_self_loops = o.self_loops;
  desc.edge_weighting = o.edge_weighting == "pre" ? PC_EDGE_WEIGHTING_PRE_VERTEX
                                                  : PC_EDGE_WEIGHTING_POST_VERTEX;
  pc_params* raw = nullptr;
  Check(pc_params_create(&desc, &raw));
  return ParamsPtr(raw);
}

template <typename T>
T Single(const std::vector<T>& values, const char* flag) {
  if (values.size() != 1) {
    throw CliError(kExitValidation,
                   std::string(flag) + " takes a single value here");
  }
  return values.front();
}

ParamsPtr SingleParams(const Options& o) {
  return MakeParams(o, Single(o.m, "--m"), Single(o.k, "--k"),
                    Single(o.d, "--d"), Single(o.beta, "--beta"));
}

// "geometric", "geometric:START:FACTOR" or a comma-separated list of n.
struct Schedule {
  pc_schedule_desc desc{};
  std::vector<std::int64_t> points;
};

Schedule ParseSchedule(const std::string& text) {
  Schedule s;
  s.desc.start = 100;
  s.desc.factor = std::pow(10.0, 0.25);
  if (text == "geometric") return s;
  if (text.rfind("geometric:", 0) == 0) {
    std::istringstream in(text.substr(10));
    char sep = 0;
    if (!(in >> s.desc.start >> sep >> s.desc.factor) || sep != ':' ||
        !in.eof()) {
      throw CliError(kExitValidation,
                     "--checkpoints geometric:START:FACTOR is malformed");
    }
    return s;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      s.points.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CliError(kExitValidation, "--checkpoints: bad value '" + item + "'");
    }
  }
  s.desc.use_list = 1;
  s.desc.points = s.points.data();
  s.desc.num_points = s.points.size();
  return s;
}

std::filesystem::path RequireDir(const std::string& out) {
  std::filesystem::path dir(out);
  if (!std::filesystem::is_directory(dir)) {
    throw CliError(kExitIo, "output directory '" + out + "' does not exist");
  }
  return dir;
}

int CmdTheory(const Options& o) {
  ParamsPtr params = SingleParams(o);
  char* json = nullptr;
  Check(pc_theory_json(params.get(), &json));
  std::cout << json << "\n";
  pc_string_free(json);
  return kExitOk;
}

int CmdSimulate(const Options& o) {
  ParamsPtr params = SingleParams(o);
  Schedule schedule = ParseSchedule(o.checkpoints);
  std::filesystem::path dir = RequireDir(o.out);
  std::uint64_t run_seed = pc_derive_seed(o.seed, 0, 0);
  pc_trajectory* raw = nullptr;
  Check(pc_simulate(params.get(), o.n, run_seed, &schedule.desc, &raw));
  TrajectoryPtr traj(raw);
  std::string csv = (dir / "trajectory.csv").string();
  std::string summary = (dir / "summary.json").string();
  Check(pc_trajectory_write_csv(traj.get(), csv.c_str()));
  Check(pc_trajectory_write_summary(traj.get(), o.seed, 0, 0, summary.c_str()));
  std::cerr << "wrote " << csv << " and " << summary << "\n";
  return kExitOk;
}

int CmdSweep(const Options& o) {
  std::vector<ParamsPtr> grid;
  for (std::int64_t m : o.m) {
    for (std::int64_t k : o.k) {
      for (std::int64_t d : o.d) {
        for (double beta : o.beta) grid.push_back(MakeParams(o, m, k, d, beta));
      }
    }
  }
  std::vector<const pc_params*> handles;
  for (const auto& p : grid) handles.push_back(p.get());
  Schedule schedule = ParseSchedule(o.checkpoints);
  std::filesystem::path dir = RequireDir(o.out);
  unsigned jobs = o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency());

  pc_sweep* raw = nullptr;
  Check(pc_sweep_run(handles.data(), handles.size(), o.seeds, o.seed, o.n,
                     &schedule.desc, jobs, &raw));
  SweepPtr sweep(raw);
  Check(pc_sweep_write(sweep.get(), dir.string().c_str()));
  std::size_t failed = 0;
  for (std::size_t i = 0; i < pc_sweep_num_runs(sweep.get()); ++i) {
    if (!pc_sweep_trajectory(sweep.get(), i)) ++failed;
  }
  std::cerr << "sweep: " << pc_sweep_num_runs(sweep.get()) << " runs on "
            << jobs << " threads, " << failed << " failed; summary in "
            << (dir / "summary.json").string() << "\n";
  return failed ? kExitValidation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Typed preferential attachment with a choice-based edge step"};
  app.set_config("--config", "", "flat key = value file; flags override it");
  app.require_subcommand(1);

  Options o;
  app.add_option("--m", o.m, "edges per vertex step (sweep: list)")->delimiter(',');
  app.add_option("--k", o.k, "pairs per edge step (sweep: list)")->delimiter(',');
  app.add_option("--d", o.d, "choice sample size (sweep: list)")->delimiter(',');
  app.add_option("--T", o.num_types, "number of vertex types");
  app.add_option("--beta", o.beta, "weight offset, > -1 (sweep: list)")
      ->delimiter(',');
  app.add_option("--p", o.p, "type probabilities, comma separated")
      ->delimiter(',');
  app.add_option("--n", o.n, "final number of vertices");
  app.add_option("--seed", o.seed, "root seed");
  app.add_option("--checkpoints", o.checkpoints,
                 "geometric | geometric:START:FACTOR | comma list of n");
  app.add_option("--out", o.out, "existing output directory");
  app.add_option("--edge-weighting", o.edge_weighting, "post | pre");
  app.add_option("--self-loops", o.self_loops,
                 "self-loops on the first vertex (default m)");
  app.add_option("--seeds", o.seeds, "replicates per grid cell (sweep)");
  app.add_option("--jobs", o.jobs, "parallel runs (sweep; default: cores)");

  auto* theory = app.add_subcommand("theory", "print the asymptotic prediction");
  auto* simulate = app.add_subcommand("simulate", "run one trajectory");
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid x seeds");
  for (auto* sub : {theory, simulate, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (theory->parsed()) return CmdTheory(o);
    if (simulate->parsed()) return CmdSimulate(o);
    return CmdSweep(o);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
