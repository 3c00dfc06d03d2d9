#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gadkit/config.hpp"
#include "gadkit/decomposition.hpp"

/// Experiment recipes behind the `gadkit` CLI. Each recipe computes its
/// records and summary in memory (execute) and run() writes them to disk.
namespace gadkit::experiments {

std::string_view tool_version();

/// Frozen sweep.csv columns, followed by the per-step `error` column.
inline constexpr const char* kSweepHeader =
    "m,norm_A,norm_pinv_TM,norm_M_TU,alias_error,bias_error,nescience_error,risk_all,"
    "risk_prediction_only,rank_TM,new_col_independent,lambda,error";

std::uint64_t splitmix64(std::uint64_t x);

/// Every random stream of a run derives from one master seed.
struct SeedPlan {
  std::uint64_t master = 0;
  std::string source = "default";  // cli, config, env or default
  std::uint64_t features = 0;
  std::uint64_t ordering = 0;
  std::uint64_t design = 0;
  std::uint64_t theta = 0;
  std::uint64_t monte_carlo = 0;
  std::uint64_t comparison = 0;  // randomized counterpart runs
};

SeedPlan derive_seeds(std::uint64_t master, std::string source);

struct RunOverrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool full_scale = false;
};

/// Seed priority: --seed, then `run.seed`, then GADKIT_SEED, then 0.
SeedPlan resolve_seeds(const RunConfig& config, const RunOverrides& overrides);

/// Applies output dir, thread count and the full-scale dimensions
/// (n = 1000, budget and m_max = 6000 for sweep and ridge_sweep runs), then
/// revalidates.
RunConfig apply_overrides(RunConfig config, const RunOverrides& overrides);

struct ExtraFile {
  std::string name;
  std::string content;
};

struct RunOutput {
  std::vector<decomposition::SweepRecord> records;  // sweep.csv, in order
  nlohmann::ordered_json summary;
  nlohmann::ordered_json design_info;
  std::vector<ExtraFile> extra_files;
  std::size_t failed_steps = 0;
};

RunOutput execute(const RunConfig& config, const SeedPlan& seeds);

/// Writes sweep.csv, meta.json, summary.json and the extra files into the
/// output directory. Returns the process exit status.
int run(const RunConfig& config, const RunOverrides& overrides = {});

std::string format_double(double value);
std::string sweep_csv(const std::vector<decomposition::SweepRecord>& records);

/// Start of every plateau strictly above both neighbors (relative tolerance
/// `rel_tol`). End points never count. Non-finite values split the series.
std::vector<std::size_t> local_maxima(const std::vector<double>& values, double rel_tol = 1e-9);

/// True when no step rises by more than `rel_tol` times the series maximum.
bool nonincreasing(const std::vector<double>& values, double rel_tol = 1e-9);
bool nondecreasing(const std::vector<double>& values, double rel_tol = 1e-9);

nlohmann::ordered_json config_to_json(const RunConfig& config);

}  // namespace gadkit::experiments
