#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dicke/noise.hpp"

namespace dicke {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kWorkerEnvVar = "DICKESIM_WORKERS";

enum class ExperimentKind {
  prepare,
  targeted,
  dephasing_rates,
  fidelity_bound,
  jitter_sweep,
  picode,
  adiabatic,
  oracle_check,
};

const char* experiment_name(ExperimentKind kind);

// Full description of one experiment. The same config always produces
// byte-identical outputs, independent of the worker count.
struct RunConfig {
  ExperimentKind kind = ExperimentKind::prepare;
  int n_spins = 500;
  double gamma = 5e6;  // rad/s
  int n_rounds = 0;    // 0 = full K
  NoiseModel noise;
  long trials = 200;
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0 = env var or hardware default
  std::string out_prefix;

  long target_m = 0;                          // targeted
  std::vector<double> gamma_sweep;            // dephasing-rates
  int sweep_rounds = 8;                       // dephasing-rates
  int bound_rounds = 20;                      // fidelity-bound K
  std::vector<int> repetition_sweep = {5};    // fidelity-bound / jitter-sweep M values
  std::vector<double> sigma_sweep;            // jitter-sweep
  int pi_g = 3;                               // picode
  int pi_n = 3;
  double pi_u = 1.0;
  double pi_theta = 0.57056;
  int pi_reps = 5;
  int pi_find_angles = 0;                     // L > 0 runs the angle search
  double adiabatic_g = 1e5;                   // rad/s
  std::vector<int> oracle_sizes = {2, 4, 6, 8, 10};
  int oracle_seeds = 100;

  void validate() const;
};

struct RunResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json document;  // config echo + aggregates + provenance
  std::string summary;              // one line for stdout
};

// Runs the experiment described by the config. Deterministic: trial i of
// any Monte Carlo uses the substream Rng::for_trial(master_seed, i).
RunResult run_experiment(const RunConfig& config);

// Executes, writes <out_prefix>.csv and <out_prefix>.json, prints the
// summary line.
void run_and_write(const RunConfig& config);

std::string render_csv(const RunResult& result);
void write_output_files(const RunConfig& config, const RunResult& result);

// Aggregation helpers (normal-approximation confidence intervals).
struct MeanCi {
  double mean = 0.0;
  double ci95_halfwidth = 0.0;
  long count = 0;
};
MeanCi mean_ci(const std::vector<double>& values);

// "1,3,5" and "1..15" forms.
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

// Flat key=value config file ('#' comments, blank lines ignored); keys are
// long option names without the dashes. Order preserved.
std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::string& path);

// Worker pool size resolution: explicit > env var > hardware.
int resolve_workers(int requested);

// Maps trial-level work onto a bounded pool; results land indexed by
// trial, so scheduling cannot affect output order.
void parallel_for(long count, int workers, const std::function<void(long)>& body);

}  // namespace dicke
