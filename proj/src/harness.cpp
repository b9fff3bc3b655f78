#include "harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <thread>

namespace duelbench {

std::string_view to_string(algo_kind algo) {
  switch (algo) {
    case algo_kind::fgts: return "fgts";
    case algo_kind::maxinp: return "maxinp";
    case algo_kind::maxpairucb: return "maxpairucb";
    case algo_kind::colstim: return "colstim";
    case algo_kind::vacdb: return "vacdb";
  }
  throw invalid_config_error("to_string: bad algo_kind");
}

algo_kind algo_from_string(std::string_view name) {
  if (name == "fgts") return algo_kind::fgts;
  if (name == "maxinp") return algo_kind::maxinp;
  if (name == "maxpairucb") return algo_kind::maxpairucb;
  if (name == "colstim") return algo_kind::colstim;
  if (name == "vacdb") return algo_kind::vacdb;
  throw invalid_config_error("unknown algorithm '" + std::string(name) +
                             "' (expected fgts, maxinp, maxpairucb, colstim "
                             "or vacdb)");
}

std::string_view to_string(feature_convention conv) {
  return conv == feature_convention::raw_pm1 ? "raw" : "unit";
}

feature_convention convention_from_string(std::string_view name) {
  if (name == "raw" || name == "raw_pm1") return feature_convention::raw_pm1;
  if (name == "unit" || name == "unit_normalized")
    return feature_convention::unit_normalized;
  throw invalid_config_error("unknown feature convention '" +
                             std::string(name) + "' (expected raw or unit)");
}

void experiment_config::validate() const {
  if (rounds < 1) throw invalid_config_error("config: rounds must be >= 1");
  if (dim < 1) throw invalid_config_error("config: dim must be >= 1");
  if (num_arms < 1) throw invalid_config_error("config: arms must be >= 1");
  if (runs < 1) throw invalid_config_error("config: runs must be >= 1");
  if (!(alpha >= 0.0)) throw invalid_config_error("config: alpha must be >= 0");
  if (mu_override && !(*mu_override >= 0.0))
    throw invalid_config_error("config: mu must be >= 0");
  if (!(eta > 0.0)) throw invalid_config_error("config: eta must be > 0");
  if (!(beta >= 0.0)) throw invalid_config_error("config: beta must be >= 0");
  if (!(lambda > 0.0)) throw invalid_config_error("config: lambda must be > 0");
  if (!(perturbation >= 0.0))
    throw invalid_config_error("config: perturbation must be >= 0");
  if (vacdb_layers < 1)
    throw invalid_config_error("config: vacdb layers must be >= 1");
  if (threads < 0) throw invalid_config_error("config: threads must be >= 0");
  if (!(param_bound > 0.0))
    throw invalid_config_error("config: param bound must be > 0");
  sgld.validate();
  prior.validate();
}

double experiment_config::resolved_mu() const {
  if (mu_override) return *mu_override;
  return alpha / std::sqrt(static_cast<double>(rounds));
}

void apply_preset(experiment_config& cfg, std::string_view name) {
  if (name == "experiment") {
    cfg.eta = 1.0;
    cfg.mu_override.reset();
    cfg.sgld = sgld_config{};
    cfg.prior = prior_spec{};
    return;
  }
  if (name == "theory") {
    cfg.eta = 0.25;
    cfg.mu_override =
        1.0 / (10.0 * std::exp(cfg.param_bound) *
               std::sqrt(static_cast<double>(cfg.rounds)));
    cfg.sgld = sgld_config{};
    cfg.prior = prior_spec{};
    return;
  }
  throw invalid_config_error("unknown preset '" + std::string(name) +
                             "' (expected experiment or theory)");
}

std::unique_ptr<agent> make_agent(const experiment_config& cfg,
                                  const action_space& space, int run_index) {
  std::uint64_t run = static_cast<std::uint64_t>(run_index);
  switch (cfg.algo) {
    case algo_kind::fgts: {
      fgts_config fc;
      fc.eta = cfg.eta;
      fc.mu = cfg.resolved_mu();
      fc.sgld = cfg.sgld;
      fc.prior = cfg.prior;
      return std::make_unique<fgts_agent>(
          space, fc, derive_seed(cfg.master_seed, run, stream_tag::chain1),
          derive_seed(cfg.master_seed, run, stream_tag::chain2));
    }
    case algo_kind::maxinp:
      return std::make_unique<maxinp_agent>(
          space, baseline_config{cfg.beta, cfg.lambda, cfg.perturbation,
                                 cfg.vacdb_layers});
    case algo_kind::maxpairucb:
      return std::make_unique<maxpairucb_agent>(
          space, baseline_config{cfg.beta, cfg.lambda, cfg.perturbation,
                                 cfg.vacdb_layers});
    case algo_kind::colstim:
      return std::make_unique<colstim_agent>(
          space,
          baseline_config{cfg.beta, cfg.lambda, cfg.perturbation,
                          cfg.vacdb_layers},
          derive_seed(cfg.master_seed, run, stream_tag::agent));
    case algo_kind::vacdb:
      return std::make_unique<vacdb_agent>(
          space, baseline_config{cfg.beta, cfg.lambda, cfg.perturbation,
                                 cfg.vacdb_layers});
  }
  throw invalid_config_error("make_agent: bad algo_kind");
}

namespace {

std::uint64_t fnv1a_doubles(std::uint64_t h, const double* p, long n) {
  for (long i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &p[i], sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::uint64_t instance_checksum(const bandit_instance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a_doubles(h, inst.theta_star.data(), inst.theta_star.size());
  const Eigen::MatrixXd& arms = inst.space.base();
  for (long r = 0; r < arms.rows(); ++r)
    for (long c = 0; c < arms.cols(); ++c) {
      double v = arms(r, c);
      h = fnv1a_doubles(h, &v, 1);
    }
  return h;
}

}  // namespace

run_outcome run_single(const experiment_config& cfg, int run_index) {
  cfg.validate();
  run_outcome out;
  try {
    std::uint64_t run = static_cast<std::uint64_t>(run_index);
    bandit_instance inst = generate_instance(
        derive_seed(cfg.master_seed, run, stream_tag::instance), cfg.dim,
        cfg.num_arms, cfg.convention, cfg.resample_arms);
    out.instance_checksum = instance_checksum(inst);
    rng_stream pref_rng(
        derive_seed(cfg.master_seed, run, stream_tag::preference));
    std::unique_ptr<agent> player = make_agent(cfg, inst.space, run_index);

    for (long t = 1; t <= cfg.rounds; ++t) {
      auto [a1, a2] = player->select(t);
      Eigen::MatrixXd round_arms;
      const Eigen::MatrixXd* arms = &inst.space.base();
      if (cfg.resample_arms) {
        round_arms = inst.space.at(t);
        arms = &round_arms;
      }
      int y = sample_preference(pref_rng, inst.theta_star, *arms, a1, a2);
      out.trace.append(per_round_regret(inst.theta_star, *arms, a1, a2));
      player->update(dueling_record{t, a1, a2, y});
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

run_set run_experiment(const experiment_config& cfg) {
  cfg.validate();
  run_set set;
  set.rounds = cfg.rounds;
  set.runs.resize(static_cast<std::size_t>(cfg.runs));

  unsigned want = cfg.threads > 0
                      ? static_cast<unsigned>(cfg.threads)
                      : std::max(1u, std::thread::hardware_concurrency());
  unsigned workers =
      std::min<unsigned>(want, static_cast<unsigned>(cfg.runs));

  if (workers <= 1) {
    for (int r = 0; r < cfg.runs; ++r)
      set.runs[static_cast<std::size_t>(r)] = run_single(cfg, r);
    return set;
  }

  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= cfg.runs) return;
      set.runs[static_cast<std::size_t>(r)] = run_single(cfg, r);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  return set;
}

aggregate_trace aggregate(const std::vector<regret_trace>& traces) {
  if (traces.empty())
    throw aggregation_error("aggregate: no traces");
  const std::size_t rounds = traces[0].cumulative.size();
  if (rounds == 0) throw aggregation_error("aggregate: empty traces");
  for (const regret_trace& tr : traces)
    if (tr.cumulative.size() != rounds)
      throw aggregation_error("aggregate: traces differ in length");

  aggregate_trace agg;
  agg.runs_used = static_cast<int>(traces.size());
  agg.mean_cumulative.resize(rounds);
  agg.std_cumulative.resize(rounds);
  const double n = static_cast<double>(traces.size());
  for (std::size_t t = 0; t < rounds; ++t) {
    double mean = 0.0;
    for (const regret_trace& tr : traces) mean += tr.cumulative[t];
    mean /= n;
    double ss = 0.0;
    for (const regret_trace& tr : traces) {
      double dev = tr.cumulative[t] - mean;
      ss += dev * dev;
    }
    agg.mean_cumulative[t] = mean;
    agg.std_cumulative[t] = n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  return agg;
}

aggregate_trace aggregate(const run_set& set) {
  std::vector<regret_trace> ok;
  for (const run_outcome& run : set.runs)
    if (!run.failed) ok.push_back(run.trace);
  if (ok.empty())
    throw aggregation_error("aggregate: every run failed" +
                            (set.runs.empty() || set.runs[0].error.empty()
                                 ? std::string()
                                 : " (first: " + set.runs[0].error + ")"));
  return aggregate(ok);
}

void emit_csv(const aggregate_trace& agg, const std::string& path) {
  if (agg.mean_cumulative.empty())
    throw aggregation_error("emit_csv: refusing to write an empty aggregate");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("emit_csv: cannot open '" + path + "'");
  out << "round,mean_cum_regret,std_cum_regret\n";
  char line[128];
  for (std::size_t t = 0; t < agg.mean_cumulative.size(); ++t) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", t + 1,
                  agg.mean_cumulative[t], agg.std_cumulative[t]);
    out << line;
  }
  if (!out) throw io_error("emit_csv: write to '" + path + "' failed");
}

void write_manifest(const experiment_config& cfg, const run_set& set,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("write_manifest: cannot open '" + path + "'");
  char buf[160];
  out << "version = " << version_string << "\n";
  out << "algo = " << to_string(cfg.algo) << "\n";
  out << "rounds = " << cfg.rounds << "\n";
  out << "dim = " << cfg.dim << "\n";
  out << "arms = " << cfg.num_arms << "\n";
  out << "runs = " << cfg.runs << "\n";
  out << "master_seed = " << cfg.master_seed << "\n";
  std::snprintf(buf, sizeof buf, "alpha = %.17g\n", cfg.alpha);
  out << buf;
  std::snprintf(buf, sizeof buf, "mu = %.17g\n", cfg.resolved_mu());
  out << buf;
  std::snprintf(buf, sizeof buf, "eta = %.17g\n", cfg.eta);
  out << buf;
  std::snprintf(buf, sizeof buf, "beta = %.17g\n", cfg.beta);
  out << buf;
  std::snprintf(buf, sizeof buf, "lambda = %.17g\n", cfg.lambda);
  out << buf;
  std::snprintf(buf, sizeof buf, "perturbation = %.17g\n", cfg.perturbation);
  out << buf;
  out << "vacdb_layers = " << cfg.vacdb_layers << "\n";
  std::snprintf(buf, sizeof buf, "sgld_step0 = %.17g\n", cfg.sgld.step0);
  out << buf;
  std::snprintf(buf, sizeof buf, "sgld_decay = %.17g\n", cfg.sgld.decay);
  out << buf;
  out << "sgld_inner_steps = " << cfg.sgld.inner_steps << "\n";
  out << "sgld_warm_start = " << (cfg.sgld.warm_start ? 1 : 0) << "\n";
  out << "prior = "
      << (cfg.prior.kind == prior_spec::kind_t::gaussian ? "gaussian" : "ball")
      << "\n";
  std::snprintf(buf, sizeof buf, "prior_scale = %.17g\n", cfg.prior.scale);
  out << buf;
  std::snprintf(buf, sizeof buf, "param_bound = %.17g\n", cfg.param_bound);
  out << buf;
  out << "convention = " << to_string(cfg.convention) << "\n";
  out << "resample_arms = " << (cfg.resample_arms ? 1 : 0) << "\n";

  for (std::size_t r = 0; r < set.runs.size(); ++r) {
    const run_outcome& run = set.runs[r];
    out << "run" << r << "_seed = "
        << derive_seed(cfg.master_seed, r, stream_tag::instance) << "\n";
    out << "run" << r << "_instance_checksum = " << run.instance_checksum
        << "\n";
    out << "run" << r << "_status = " << (run.failed ? "failed" : "ok")
        << "\n";
    if (run.failed) {
      std::string msg = run.error;
      for (char& ch : msg)
        if (ch == '\n') ch = ' ';
      out << "run" << r << "_error = " << msg << "\n";
    } else {
      std::snprintf(buf, sizeof buf, "run%zu_final_cum_regret = %.17g\n", r,
                    run.trace.final_cumulative());
      out << buf;
    }
  }
  if (!out)
    throw io_error("write_manifest: write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------

namespace {

std::string splice_suffix(const std::string& out, const std::string& tag) {
  std::size_t slash = out.find_last_of('/');
  std::size_t dot = out.find_last_of('.');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash))
    return out + tag;
  return out.substr(0, dot) + tag + out.substr(dot);
}

std::string format_alpha(double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

}  // namespace

std::string sweep_alpha_path(const std::string& out, double alpha) {
  return splice_suffix(out, "_alpha" + format_alpha(alpha));
}

std::string sweep_summary_path(const std::string& out) {
  return splice_suffix(out, "_summary");
}

void write_sweep_summary(const std::vector<sweep_entry>& entries,
                         const std::string& path) {
  if (entries.empty())
    throw aggregation_error("write_sweep_summary: no entries");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("write_sweep_summary: cannot open '" + path + "'");
  out << "alpha,final_mean_cum_regret,final_std_cum_regret\n";
  char line[128];
  for (const sweep_entry& e : entries) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", e.alpha,
                  e.agg.final_mean(), e.agg.final_std());
    out << line;
  }
  if (!out)
    throw io_error("write_sweep_summary: write to '" + path + "' failed");
}

std::vector<sweep_entry> ablation_sweep(const experiment_config& base,
                                        const std::vector<double>& alphas) {
  base.validate();
  if (alphas.empty())
    throw invalid_config_error("ablation_sweep: no alpha values");
  for (double a : alphas)
    if (!(a >= 0.0))
      throw invalid_config_error("ablation_sweep: alpha must be >= 0");

  std::vector<sweep_entry> entries;
  entries.reserve(alphas.size());
  for (double a : alphas) {
    experiment_config cfg = base;
    cfg.alpha = a;
    cfg.mu_override.reset();
    cfg.out_path.clear();
    sweep_entry entry;
    entry.alpha = a;
    entry.runs = run_experiment(cfg);
    entry.agg = aggregate(entry.runs);
    entries.push_back(std::move(entry));
  }

  if (!base.out_path.empty()) {
    for (const sweep_entry& e : entries)
      emit_csv(e.agg, sweep_alpha_path(base.out_path, e.alpha));
    write_sweep_summary(entries, sweep_summary_path(base.out_path));
    write_manifest(base, entries.back().runs, base.out_path + ".manifest");
  }
  return entries;
}

}  // namespace duelbench
