#include "duelbench.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "harness.hpp"
#include "validate.hpp"

struct db_config {
  duelbench::experiment_config cfg;
};

struct db_result {
  duelbench::experiment_config cfg;
  duelbench::run_set set;
  duelbench::aggregate_trace agg;
};

struct db_sweep {
  std::vector<double> alphas;
  std::vector<db_result> results;
};

namespace {

thread_local std::string t_last_error;

db_status fail(db_status status, const std::string& message) {
  t_last_error = message;
  return status;
}

db_status from_exception() {
  try {
    throw;
  } catch (const duelbench::invalid_config_error& e) {
    return fail(DB_ERR_INVALID_CONFIG, e.what());
  } catch (const duelbench::dimension_error& e) {
    return fail(DB_ERR_INVALID_CONFIG, e.what());
  } catch (const duelbench::sequencing_error& e) {
    return fail(DB_ERR_SEQUENCING, e.what());
  } catch (const duelbench::divergence_error& e) {
    return fail(DB_ERR_SAMPLER_DIVERGED, e.what());
  } catch (const duelbench::estimation_error& e) {
    return fail(DB_ERR_ESTIMATION_FAILED, e.what());
  } catch (const duelbench::aggregation_error& e) {
    return fail(DB_ERR_AGGREGATION, e.what());
  } catch (const duelbench::io_error& e) {
    return fail(DB_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(DB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DB_ERR_INTERNAL, "unknown error");
  }
}

bool key_is(const char* key, const char* a, const char* b = nullptr) {
  return std::strcmp(key, a) == 0 || (b != nullptr && std::strcmp(key, b) == 0);
}

db_status copy_series(const std::vector<double>& series, double* out,
                      size_t len, const char* who) {
  if (out == nullptr)
    return fail(DB_ERR_INVALID_ARGUMENT,
                std::string(who) + ": null output buffer");
  if (len < series.size())
    return fail(DB_ERR_INVALID_ARGUMENT,
                std::string(who) + ": buffer holds " + std::to_string(len) +
                    " values, need " + std::to_string(series.size()));
  std::memcpy(out, series.data(), series.size() * sizeof(double));
  return DB_OK;
}

}  // namespace

extern "C" {

const char* db_version(void) { return duelbench::version_string; }

const char* db_status_name(db_status status) {
  switch (status) {
    case DB_OK: return "DB_OK";
    case DB_ERR_INVALID_ARGUMENT: return "DB_ERR_INVALID_ARGUMENT";
    case DB_ERR_INVALID_CONFIG: return "DB_ERR_INVALID_CONFIG";
    case DB_ERR_SEQUENCING: return "DB_ERR_SEQUENCING";
    case DB_ERR_SAMPLER_DIVERGED: return "DB_ERR_SAMPLER_DIVERGED";
    case DB_ERR_ESTIMATION_FAILED: return "DB_ERR_ESTIMATION_FAILED";
    case DB_ERR_AGGREGATION: return "DB_ERR_AGGREGATION";
    case DB_ERR_IO: return "DB_ERR_IO";
    case DB_ERR_INTERNAL: return "DB_ERR_INTERNAL";
  }
  return "DB_ERR_UNKNOWN";
}

const char* db_last_error(void) { return t_last_error.c_str(); }

db_config* db_config_new(void) {
  try {
    return new db_config{};
  } catch (...) {
    return nullptr;
  }
}

void db_config_free(db_config* cfg) { delete cfg; }

db_status db_config_set_int(db_config* cfg, const char* key,
                            long long value) {
  if (cfg == nullptr || key == nullptr)
    return fail(DB_ERR_INVALID_ARGUMENT, "db_config_set_int: null argument");
  try {
    duelbench::experiment_config& c = cfg->cfg;
    if (key_is(key, "rounds", "T")) {
      if (value < 1)
        throw duelbench::invalid_config_error("rounds must be >= 1");
      c.rounds = static_cast<long>(value);
    } else if (key_is(key, "dim", "d")) {
      if (value < 1) throw duelbench::invalid_config_error("dim must be >= 1");
      c.dim = static_cast<int>(value);
    } else if (key_is(key, "arms", "K")) {
      if (value < 1)
        throw duelbench::invalid_config_error("arms must be >= 1");
      c.num_arms = static_cast<int>(value);
    } else if (key_is(key, "runs")) {
      if (value < 1)
        throw duelbench::invalid_config_error("runs must be >= 1");
      c.runs = static_cast<int>(value);
    } else if (key_is(key, "seed")) {
      c.master_seed = static_cast<std::uint64_t>(value);
    } else if (key_is(key, "threads")) {
      if (value < 0)
        throw duelbench::invalid_config_error("threads must be >= 0");
      c.threads = static_cast<int>(value);
    } else if (key_is(key, "sgld_steps")) {
      if (value < 1)
        throw duelbench::invalid_config_error("sgld_steps must be >= 1");
      c.sgld.inner_steps = static_cast<int>(value);
    } else if (key_is(key, "warm_start")) {
      c.sgld.warm_start = value != 0;
    } else if (key_is(key, "resample_arms")) {
      c.resample_arms = value != 0;
    } else if (key_is(key, "vacdb_layers")) {
      if (value < 1)
        throw duelbench::invalid_config_error("vacdb_layers must be >= 1");
      c.vacdb_layers = static_cast<int>(value);
    } else {
      return fail(DB_ERR_INVALID_ARGUMENT,
                  std::string("unknown integer key '") + key + "'");
    }
    return DB_OK;
  } catch (...) {
    return from_exception();
  }
}

db_status db_config_set_real(db_config* cfg, const char* key, double value) {
  if (cfg == nullptr || key == nullptr)
    return fail(DB_ERR_INVALID_ARGUMENT, "db_config_set_real: null argument");
  try {
    duelbench::experiment_config& c = cfg->cfg;
    auto need = [&](bool ok, const char* msg) {
      if (!ok) throw duelbench::invalid_config_error(msg);
    };
    if (key_is(key, "alpha")) {
      need(value >= 0.0, "alpha must be >= 0");
      c.alpha = value;
      c.mu_override.reset();
    } else if (key_is(key, "mu")) {
      need(value >= 0.0, "mu must be >= 0");
      c.mu_override = value;
    } else if (key_is(key, "eta")) {
      need(value > 0.0, "eta must be > 0");
      c.eta = value;
    } else if (key_is(key, "beta")) {
      need(value >= 0.0, "beta must be >= 0");
      c.beta = value;
    } else if (key_is(key, "lambda")) {
      need(value > 0.0, "lambda must be > 0");
      c.lambda = value;
    } else if (key_is(key, "perturbation", "c")) {
      need(value >= 0.0, "perturbation must be >= 0");
      c.perturbation = value;
    } else if (key_is(key, "bound")) {
      need(value > 0.0, "bound must be > 0");
      c.param_bound = value;
    } else if (key_is(key, "sgld_step0")) {
      need(value > 0.0, "sgld_step0 must be > 0");
      c.sgld.step0 = value;
    } else if (key_is(key, "sgld_decay")) {
      need(value > 0.0 && value <= 1.0, "sgld_decay must be in (0, 1]");
      c.sgld.decay = value;
    } else if (key_is(key, "prior_scale")) {
      need(value > 0.0, "prior_scale must be > 0");
      c.prior.scale = value;
    } else {
      return fail(DB_ERR_INVALID_ARGUMENT,
                  std::string("unknown real key '") + key + "'");
    }
    return DB_OK;
  } catch (...) {
    return from_exception();
  }
}

db_status db_config_set_string(db_config* cfg, const char* key,
                               const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr)
    return fail(DB_ERR_INVALID_ARGUMENT,
                "db_config_set_string: null argument");
  try {
    duelbench::experiment_config& c = cfg->cfg;
    if (key_is(key, "algo")) {
      c.algo = duelbench::algo_from_string(value);
    } else if (key_is(key, "convention")) {
      c.convention = duelbench::convention_from_string(value);
    } else if (key_is(key, "prior")) {
      if (key_is(value, "gaussian"))
        c.prior.kind = duelbench::prior_spec::kind_t::gaussian;
      else if (key_is(value, "ball", "uniform_ball"))
        c.prior.kind = duelbench::prior_spec::kind_t::uniform_ball;
      else
        throw duelbench::invalid_config_error(
            std::string("unknown prior '") + value +
            "' (expected gaussian or ball)");
    } else if (key_is(key, "preset")) {
      duelbench::apply_preset(c, value);
    } else if (key_is(key, "out")) {
      c.out_path = value;
    } else {
      return fail(DB_ERR_INVALID_ARGUMENT,
                  std::string("unknown string key '") + key + "'");
    }
    return DB_OK;
  } catch (...) {
    return from_exception();
  }
}

db_status db_run(const db_config* cfg, db_result** out_result) {
  if (cfg == nullptr || out_result == nullptr)
    return fail(DB_ERR_INVALID_ARGUMENT, "db_run: null argument");
  *out_result = nullptr;
  try {
    auto res = std::make_unique<db_result>();
    res->cfg = cfg->cfg;
    res->set = duelbench::run_experiment(cfg->cfg);
    res->agg = duelbench::aggregate(res->set);
    *out_result = res.release();
    return DB_OK;
  } catch (...) {
    return from_exception();
  }
}

long long db_result_rounds(const db_result* result) {
  return result == nullptr ? 0 : result->set.rounds;
}

int db_result_runs(const db_result* result) {
  return result == nullptr ? 0 : static_cast<int>(result->set.runs.size());
}

int db_result_runs_used(const db_result* result) {
  return result == nullptr ? 0 : result->agg.runs_used;
}

int db_result_run_failed(const db_result* result, int run_index) {
  if (result == nullptr || run_index < 0 ||
      run_index >= static_cast<int>(result->set.runs.size()))
    return -1;
  return result->set.runs[static_cast<std::size_t>(run_index)].failed ? 1 : 0;
}

const char* db_result_run_error(const db_result* result, int run_index) {
  if (result == nullptr || run_index < 0 ||
      run_index >= static_cast<int>(result->set.runs.size()))
    return "";
  return result->set.runs[static_cast<std::size_t>(run_index)].error.c_str();
}

db_status db_result_mean_cumulative(const db_result* result, double* out,
                                    size_t len) {
  if (result == nullptr)
    return fail(DB_ERR_INVALID_ARGUMENT, "db_result_mean_cumulative: null");
  return copy_series(result->agg.mean_cumulative, out, len,
                     "db_result_mean_cumulative");
}

db_status db_result_std_cumulative(const db_result* result, double* out,
                                   size_t len) {
  if (result == nullptr)
    return fail(DB_ERR_INVALID_ARGUMENT, "db_result_std_cumulative: null");
  return copy_series(result->agg.std_cumulative, out, len,
                     "db_result_std_cumulative");
}

db_status db_result_run_cumulative(const db_result* result, int run_index,
                                   double* out, size_t len) {
  if (result == nullptr || run_index < 0 ||
      run_index >= static_cast<int>(result->set.runs.size()))
    return fail(DB_ERR_INVALID_ARGUMENT,
                "db_result_run_cumulative: bad result or run index");
  return copy_series(
      result->set.runs[static_cast<std::size_t>(run_index)].trace.cumulative,
      out, len, "db_result_run_cumulative");
}

double db_result_final_mean(const db_result* result) {
  return result == nullptr ? 0.0 : result->agg.final_mean();
}

double db_result_final_std(const db_result* result) {
  return result == nullptr ? 0.0 : result->agg.final_std();
}

db_status db_result_write_csv(const db_result* result, const char* path) {
  if (result == nullptr || path == nullptr)
    return fail(DB_ERR_INVALID_ARGUMENT, "db_result_write_csv: null argument");
  try {
    duelbench::emit_csv(result->agg, path);
    return DB_OK;
  } catch (...) {
    return from_exception();
  }
}

db_status db_result_write_manifest(const db_result* result,
                                   const char* path) {
  if (result == nullptr || path == nullptr)
    return fail(DB_ERR_INVALID_ARGUMENT,
                "db_result_write_manifest: null argument");
  try {
    duelbench::write_manifest(result->cfg, result->set, path);
    return DB_OK;
  } catch (...) {
    return from_exception();
  }
}

void db_result_free(db_result* result) { delete result; }

db_status db_run_sweep(const db_config* cfg, const double* alphas,
                       size_t count, db_sweep** out_sweep) {
  if (cfg == nullptr || alphas == nullptr || out_sweep == nullptr)
    return fail(DB_ERR_INVALID_ARGUMENT, "db_run_sweep: null argument");
  if (count == 0)
    return fail(DB_ERR_INVALID_ARGUMENT, "db_run_sweep: no alpha values");
  *out_sweep = nullptr;
  try {
    std::vector<double> values(alphas, alphas + count);
    std::vector<duelbench::sweep_entry> entries =
        duelbench::ablation_sweep(cfg->cfg, values);
    auto sweep = std::make_unique<db_sweep>();
    sweep->alphas = values;
    sweep->results.reserve(entries.size());
    for (duelbench::sweep_entry& entry : entries) {
      db_result boxed;
      boxed.cfg = cfg->cfg;
      boxed.cfg.alpha = entry.alpha;
      boxed.cfg.mu_override.reset();
      boxed.cfg.out_path.clear();
      boxed.set = std::move(entry.runs);
      boxed.agg = std::move(entry.agg);
      sweep->results.push_back(std::move(boxed));
    }
    *out_sweep = sweep.release();
    return DB_OK;
  } catch (...) {
    return from_exception();
  }
}

size_t db_sweep_count(const db_sweep* sweep) {
  return sweep == nullptr ? 0 : sweep->results.size();
}

double db_sweep_alpha(const db_sweep* sweep, size_t index) {
  if (sweep == nullptr || index >= sweep->alphas.size()) return 0.0;
  return sweep->alphas[index];
}

const db_result* db_sweep_result(const db_sweep* sweep, size_t index) {
  if (sweep == nullptr || index >= sweep->results.size()) return nullptr;
  return &sweep->results[index];
}

db_status db_sweep_write_summary(const db_sweep* sweep, const char* path) {
  if (sweep == nullptr || path == nullptr)
    return fail(DB_ERR_INVALID_ARGUMENT,
                "db_sweep_write_summary: null argument");
  try {
    std::vector<duelbench::sweep_entry> entries;
    entries.reserve(sweep->results.size());
    for (std::size_t i = 0; i < sweep->results.size(); ++i) {
      duelbench::sweep_entry e;
      e.alpha = sweep->alphas[i];
      e.agg = sweep->results[i].agg;
      entries.push_back(std::move(e));
    }
    duelbench::write_sweep_summary(entries, path);
    return DB_OK;
  } catch (...) {
    return from_exception();
  }
}

void db_sweep_free(db_sweep* sweep) { delete sweep; }

int db_validate(int quick, char** out_report) {
  try {
    std::vector<duelbench::check_result> checks =
        duelbench::run_validation(quick != 0);
    int failures = 0;
    std::string report;
    for (const duelbench::check_result& check : checks) {
      if (!check.pass) ++failures;
      report += check.pass ? "PASS " : "FAIL ";
      report += check.name;
      report += ": ";
      report += check.detail;
      report += "\n";
    }
    if (out_report != nullptr) {
      char* text = static_cast<char*>(std::malloc(report.size() + 1));
      if (text != nullptr) {
        std::memcpy(text, report.c_str(), report.size() + 1);
        *out_report = text;
      } else {
        *out_report = nullptr;
      }
    }
    return failures;
  } catch (...) {
    from_exception();
    if (out_report != nullptr) *out_report = nullptr;
    return -1;
  }
}

void db_string_free(char* text) { std::free(text); }

}  // extern "C"
