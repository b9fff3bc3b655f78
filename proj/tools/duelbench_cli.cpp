// Command-line front end.  Talks to the library exclusively through the
// public C interface.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "duelbench.h"

namespace {

struct options {
  std::string algo = "fgts";
  long long rounds = 2500;
  long long dim = 10;
  long long arms = 32;
  long long runs = 10;
  long long seed = 1;
  long long threads = 0;
  long long sgld_steps = 100;
  long long vacdb_layers = 12;
  double alpha = 0.1;
  double mu = 0.0;
  double eta = 1.0;
  double beta = 1.0;
  double lambda = 0.001;
  double perturbation = 1.0;
  double bound = 1.0;
  double sgld_step0 = 0.005;
  double sgld_decay = 0.99;
  double prior_scale = 1.0;
  std::string preset;
  std::string convention = "raw";
  std::string prior = "gaussian";
  std::string out;
  bool no_warm_start = false;
  bool resample_arms = false;
};

void add_common(CLI::App* cmd, options& opt) {
  cmd->add_option("--algo", opt.algo,
                  "algorithm: fgts, maxinp, maxpairucb, colstim, vacdb");
  cmd->add_option("--T,--rounds", opt.rounds, "rounds per run");
  cmd->add_option("--d,--dim", opt.dim, "feature dimension");
  cmd->add_option("--K,--arms", opt.arms, "arms per round");
  cmd->add_option("--runs", opt.runs, "independent runs");
  cmd->add_option("--seed", opt.seed, "master seed");
  cmd->add_option("--threads", opt.threads, "worker threads (0 = auto)");
  cmd->add_option("--alpha", opt.alpha,
                  "exploration weight: mu = alpha / sqrt(T)");
  cmd->add_option("--mu", opt.mu, "exploration weight mu (overrides alpha)");
  cmd->add_option("--eta", opt.eta, "likelihood temperature");
  cmd->add_option("--beta", opt.beta, "baseline optimism width");
  cmd->add_option("--lambda", opt.lambda, "ridge / covariance prior weight");
  cmd->add_option("--c,--perturbation", opt.perturbation,
                  "colstim perturbation scale");
  cmd->add_option("--bound", opt.bound, "reward bound B (theory preset)");
  cmd->add_option("--sgld-steps", opt.sgld_steps, "langevin steps per sample");
  cmd->add_option("--sgld-step0", opt.sgld_step0, "langevin step at round 1");
  cmd->add_option("--sgld-decay", opt.sgld_decay, "langevin step decay");
  cmd->add_option("--prior-scale", opt.prior_scale,
                  "gaussian std-dev / ball radius");
  cmd->add_option("--preset", opt.preset, "named defaults: experiment, theory");
  cmd->add_option("--convention", opt.convention, "features: raw or unit");
  cmd->add_option("--prior", opt.prior, "prior: gaussian or ball");
  cmd->add_option("--out", opt.out, "output CSV path");
  cmd->add_flag("--no-warm-start", opt.no_warm_start,
                "restart each langevin sample from zero");
  cmd->add_flag("--resample-arms", opt.resample_arms,
                "redraw the arm set every round");
  cmd->add_option("--vacdb-layers", opt.vacdb_layers,
                  "vacdb elimination layers");
}

[[noreturn]] void die(db_status status, const char* what) {
  std::fprintf(stderr, "error: %s: %s (%s)\n", what, db_last_error(),
               db_status_name(status));
  std::exit(1);
}

void check(db_status status, const char* what) {
  if (status != DB_OK) die(status, what);
}

using config_ptr = std::unique_ptr<db_config, decltype(&db_config_free)>;

// Preset first, explicit flags afterwards so they win.
config_ptr build_config(const CLI::App* cmd, const options& opt) {
  config_ptr cfg(db_config_new(), db_config_free);
  if (!cfg) {
    std::fprintf(stderr, "error: out of memory\n");
    std::exit(1);
  }
  auto given = [&](const char* name) { return cmd->count(name) > 0; };

  check(db_config_set_int(cfg.get(), "rounds", opt.rounds), "--T");
  check(db_config_set_int(cfg.get(), "dim", opt.dim), "--d");
  check(db_config_set_int(cfg.get(), "arms", opt.arms), "--K");
  check(db_config_set_int(cfg.get(), "runs", opt.runs), "--runs");
  check(db_config_set_int(cfg.get(), "seed", opt.seed), "--seed");
  check(db_config_set_int(cfg.get(), "threads", opt.threads), "--threads");
  check(db_config_set_real(cfg.get(), "bound", opt.bound), "--bound");
  check(db_config_set_string(cfg.get(), "algo", opt.algo.c_str()), "--algo");
  check(db_config_set_string(cfg.get(), "convention", opt.convention.c_str()),
        "--convention");

  if (!opt.preset.empty())
    check(db_config_set_string(cfg.get(), "preset", opt.preset.c_str()),
          "--preset");

  if (given("--alpha"))
    check(db_config_set_real(cfg.get(), "alpha", opt.alpha), "--alpha");
  if (given("--mu")) check(db_config_set_real(cfg.get(), "mu", opt.mu), "--mu");
  if (given("--eta"))
    check(db_config_set_real(cfg.get(), "eta", opt.eta), "--eta");
  if (given("--beta"))
    check(db_config_set_real(cfg.get(), "beta", opt.beta), "--beta");
  if (given("--lambda"))
    check(db_config_set_real(cfg.get(), "lambda", opt.lambda), "--lambda");
  if (given("--c"))
    check(db_config_set_real(cfg.get(), "perturbation", opt.perturbation),
          "--c");
  if (given("--sgld-steps"))
    check(db_config_set_int(cfg.get(), "sgld_steps", opt.sgld_steps),
          "--sgld-steps");
  if (given("--sgld-step0"))
    check(db_config_set_real(cfg.get(), "sgld_step0", opt.sgld_step0),
          "--sgld-step0");
  if (given("--sgld-decay"))
    check(db_config_set_real(cfg.get(), "sgld_decay", opt.sgld_decay),
          "--sgld-decay");
  if (given("--prior-scale"))
    check(db_config_set_real(cfg.get(), "prior_scale", opt.prior_scale),
          "--prior-scale");
  if (given("--prior"))
    check(db_config_set_string(cfg.get(), "prior", opt.prior.c_str()),
          "--prior");
  if (given("--vacdb-layers"))
    check(db_config_set_int(cfg.get(), "vacdb_layers", opt.vacdb_layers),
          "--vacdb-layers");
  if (opt.no_warm_start)
    check(db_config_set_int(cfg.get(), "warm_start", 0), "--no-warm-start");
  if (opt.resample_arms)
    check(db_config_set_int(cfg.get(), "resample_arms", 1),
          "--resample-arms");
  if (!opt.out.empty())
    check(db_config_set_string(cfg.get(), "out", opt.out.c_str()), "--out");
  return cfg;
}

void report_failures(const db_result* result) {
  int runs = db_result_runs(result);
  for (int r = 0; r < runs; ++r)
    if (db_result_run_failed(result, r) == 1)
      std::fprintf(stderr, "warning: run %d failed: %s\n", r,
                   db_result_run_error(result, r));
}

int run_bench(const CLI::App* cmd, const options& opt) {
  config_ptr cfg = build_config(cmd, opt);
  db_result* result = nullptr;
  db_status status = db_run(cfg.get(), &result);
  if (status != DB_OK) die(status, "bench");
  std::unique_ptr<db_result, decltype(&db_result_free)> owned(
      result, db_result_free);

  report_failures(result);
  std::printf("algo=%s d=%lld K=%lld T=%lld runs=%d/%d seed=%lld\n",
              opt.algo.c_str(), opt.dim, opt.arms, opt.rounds,
              db_result_runs_used(result), db_result_runs(result), opt.seed);
  std::printf("final mean cumulative regret = %.6g (std %.6g)\n",
              db_result_final_mean(result), db_result_final_std(result));

  if (!opt.out.empty()) {
    check(db_result_write_csv(result, opt.out.c_str()), "write csv");
    std::string manifest = opt.out + ".manifest";
    check(db_result_write_manifest(result, manifest.c_str()),
          "write manifest");
    std::printf("wrote %s\n", opt.out.c_str());
    std::printf("wrote %s\n", manifest.c_str());
  }
  return 0;
}

int run_sweep(const CLI::App* cmd, const options& opt,
              const std::vector<double>& alphas) {
  config_ptr cfg = build_config(cmd, opt);
  db_sweep* sweep = nullptr;
  db_status status =
      db_run_sweep(cfg.get(), alphas.data(), alphas.size(), &sweep);
  if (status != DB_OK) die(status, "sweep");
  std::unique_ptr<db_sweep, decltype(&db_sweep_free)> owned(sweep,
                                                            db_sweep_free);

  std::printf("%-12s %-22s %-22s\n", "alpha", "final_mean_cum_regret",
              "final_std_cum_regret");
  for (size_t i = 0; i < db_sweep_count(sweep); ++i) {
    const db_result* result = db_sweep_result(sweep, i);
    report_failures(result);
    std::printf("%-12g %-22.10g %-22.10g\n", db_sweep_alpha(sweep, i),
                db_result_final_mean(result), db_result_final_std(result));
  }
  if (!opt.out.empty()) std::printf("wrote per-alpha CSVs next to %s\n",
                                    opt.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dueling-bandit simulation laboratory"};
  app.require_subcommand(1);
  std::string version = db_version();
  app.set_version_flag("--version", version);

  options bench_opt;
  CLI::App* bench = app.add_subcommand("bench", "run one algorithm");
  add_common(bench, bench_opt);

  options sweep_opt;
  std::vector<double> alphas{0.0, 0.01, 0.1, 1.0};
  CLI::App* sweep =
      app.add_subcommand("sweep", "re-run across exploration weights");
  add_common(sweep, sweep_opt);
  sweep->add_option("--alphas", alphas, "alpha values")->delimiter(',');

  bool quick = false;
  CLI::App* validate =
      app.add_subcommand("validate", "run the built-in self checks");
  validate->add_flag("--quick", quick, "reduced sample counts");

  CLI11_PARSE(app, argc, argv);

  if (bench->parsed()) return run_bench(bench, bench_opt);
  if (sweep->parsed()) return run_sweep(sweep, sweep_opt, alphas);

  char* report = nullptr;
  int failures = db_validate(quick ? 1 : 0, &report);
  if (failures < 0) {
    std::fprintf(stderr, "error: validation aborted: %s\n", db_last_error());
    return 1;
  }
  if (report != nullptr) {
    std::fputs(report, stdout);
    db_string_free(report);
  }
  std::printf("%s (%d failure%s)\n", failures == 0 ? "all checks passed"
                                                   : "CHECKS FAILED",
              failures, failures == 1 ? "" : "s");
  return failures;
}
