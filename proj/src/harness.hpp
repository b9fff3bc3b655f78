#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agents.hpp"
#include "core.hpp"
#include "env.hpp"
#include "posterior.hpp"

namespace duelbench {

inline constexpr const char* version_string = "0.1.0";

enum class algo_kind { fgts, maxinp, maxpairucb, colstim, vacdb };

std::string_view to_string(algo_kind algo);
algo_kind algo_from_string(std::string_view name);
std::string_view to_string(feature_convention conv);
feature_convention convention_from_string(std::string_view name);

struct experiment_config {
  algo_kind algo = algo_kind::fgts;
  long rounds = 2500;  // T
  int dim = 10;        // d
  int num_arms = 32;   // K
  int runs = 10;
  std::uint64_t master_seed = 1;

  // exploration weight mu = alpha / sqrt(T); mu_override wins when set
  double alpha = 0.1;
  std::optional<double> mu_override;
  double eta = 1.0;

  // baseline knobs
  double beta = 1.0;
  double lambda = 0.001;
  double perturbation = 1.0;
  int vacdb_layers = 12;

  sgld_config sgld;
  prior_spec prior;
  double param_bound = 1.0;  // reward range bound B used by the theory preset

  feature_convention convention = feature_convention::raw_pm1;
  bool resample_arms = false;
  int threads = 0;  // 0 = hardware concurrency
  std::string out_path;

  void validate() const;
  double resolved_mu() const;
};

// named defaults: "experiment" (eta 1, mu = alpha/sqrt(T)) or "theory"
// (eta 1/4, mu = 1/(10 e^B sqrt(T)))
void apply_preset(experiment_config& cfg, std::string_view name);

struct run_outcome {
  regret_trace trace;
  bool failed = false;
  std::string error;
  std::uint64_t instance_checksum = 0;
};

struct run_set {
  std::vector<run_outcome> runs;
  long rounds = 0;
};

run_outcome run_single(const experiment_config& cfg, int run_index);
run_set run_experiment(const experiment_config& cfg);

struct aggregate_trace {
  std::vector<double> mean_cumulative;
  std::vector<double> std_cumulative;
  int runs_used = 0;

  double final_mean() const {
    return mean_cumulative.empty() ? 0.0 : mean_cumulative.back();
  }
  double final_std() const {
    return std_cumulative.empty() ? 0.0 : std_cumulative.back();
  }
};

// mean and sample standard deviation of cumulative regret per round over
// the successful runs; throws aggregation_error if none succeeded or the
// traces disagree in length
aggregate_trace aggregate(const std::vector<regret_trace>& traces);
aggregate_trace aggregate(const run_set& set);

// header round,mean_cum_regret,std_cum_regret; %.17g values; LF endings.
// Refuses empty aggregates before touching the filesystem.
void emit_csv(const aggregate_trace& agg, const std::string& path);

void write_manifest(const experiment_config& cfg, const run_set& set,
                    const std::string& path);

std::unique_ptr<agent> make_agent(const experiment_config& cfg,
                                  const action_space& space, int run_index);

// ---------------------------------------------------------------------------
// exploration-weight sweep

struct sweep_entry {
  double alpha;
  run_set runs;
  aggregate_trace agg;
};

// Re-runs the base config at each alpha with the same master seed, so every
// alpha sees identical instances and preference noise.  When base.out_path
// is set, writes one CSV per alpha ("<stem>_alpha<v><ext>"), a summary CSV
// ("<stem>_summary<ext>") and a manifest ("<out>.manifest").
std::vector<sweep_entry> ablation_sweep(const experiment_config& base,
                                        const std::vector<double>& alphas);

std::string sweep_alpha_path(const std::string& out, double alpha);
std::string sweep_summary_path(const std::string& out);
void write_sweep_summary(const std::vector<sweep_entry>& entries,
                         const std::string& path);

}  // namespace duelbench
