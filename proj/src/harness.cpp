#include "dicke/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <thread>

#include "dicke/adiabatic.hpp"
#include "dicke/oracle.hpp"
#include "dicke/pi_code.hpp"

namespace dicke {

namespace {

using nlohmann::ordered_json;

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

// JSON has no infinity literal; decoherence times echo as "inf" strings.
ordered_json json_seconds(double value) {
  if (std::isinf(value)) return "inf";
  return value;
}

ordered_json config_echo(const RunConfig& c) {
  ordered_json j;
  j["experiment"] = experiment_name(c.kind);
  j["n_spins"] = c.n_spins;
  j["gamma"] = c.gamma;
  j["n_rounds"] = c.n_rounds;
  j["t1"] = json_seconds(c.noise.t1);
  j["tphi"] = json_seconds(c.noise.tphi);
  j["sigma_t"] = c.noise.sigma_t;
  j["repetitions"] = c.noise.repetitions;
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  switch (c.kind) {
    case ExperimentKind::targeted:
      j["target_m"] = c.target_m;
      break;
    case ExperimentKind::dephasing_rates:
      j["gamma_sweep"] = c.gamma_sweep;
      j["sweep_rounds"] = c.sweep_rounds;
      break;
    case ExperimentKind::fidelity_bound:
      j["bound_rounds"] = c.bound_rounds;
      j["repetition_sweep"] = c.repetition_sweep;
      break;
    case ExperimentKind::jitter_sweep:
      j["sigma_sweep"] = c.sigma_sweep;
      j["repetition_sweep"] = c.repetition_sweep;
      break;
    case ExperimentKind::picode:
      j["pi_g"] = c.pi_g;
      j["pi_n"] = c.pi_n;
      j["pi_u"] = c.pi_u;
      j["pi_theta"] = c.pi_theta;
      j["pi_reps"] = c.pi_reps;
      j["pi_find_angles"] = c.pi_find_angles;
      break;
    case ExperimentKind::adiabatic:
      j["adiabatic_g"] = c.adiabatic_g;
      break;
    case ExperimentKind::oracle_check:
      j["oracle_sizes"] = c.oracle_sizes;
      j["oracle_seeds"] = c.oracle_seeds;
      break;
    default:
      break;
  }
  return j;
}

RunResult make_result(const RunConfig& config, std::vector<std::string> columns) {
  RunResult result;
  result.columns = std::move(columns);
  result.document["experiment"] = experiment_name(config.kind);
  result.document["version"] = kVersion;
  result.document["config"] = config_echo(config);
  return result;
}

int count_decays(const PreparationRecord& rec) {
  int n = 0;
  for (const auto& log : rec.round_logs) {
    for (const auto& rep : log.repetitions) n += rep.decayed;
  }
  return n;
}

int count_flips(const PreparationRecord& rec) {
  int n = 0;
  for (const auto& log : rec.round_logs) {
    for (const auto& rep : log.repetitions) n += rep.dephasing_flip;
  }
  return n;
}

int count_ties(const PreparationRecord& rec) {
  int n = 0;
  for (const auto& log : rec.round_logs) n += log.tie_broken;
  return n;
}

std::vector<double> column(const RunResult& result, std::size_t index) {
  std::vector<double> values;
  values.reserve(result.rows.size());
  for (const auto& row : result.rows) values.push_back(row[index]);
  return values;
}

RunResult run_prepare(const RunConfig& config) {
  const PreparationPlan plan = make_plan(config.n_spins, config.gamma, config.n_rounds);
  RunResult result = make_result(
      config, {"trial", "decoded_mz", "fidelity", "success", "decays", "flips", "ties"});
  result.rows.resize(config.trials);
  parallel_for(config.trials, config.workers, [&](long t) {
    Rng rng = Rng::for_trial(config.master_seed, t);
    const PreparationRecord rec = run_noisy_preparation(plan, config.noise, rng);
    result.rows[t] = {static_cast<double>(t),
                      static_cast<double>(rec.decoded_mz),
                      rec.fidelity,
                      rec.all_rounds_succeeded() ? 1.0 : 0.0,
                      static_cast<double>(count_decays(rec)),
                      static_cast<double>(count_flips(rec)),
                      static_cast<double>(count_ties(rec))};
  });
  const MeanCi fidelity = mean_ci(column(result, 2));
  const MeanCi success = mean_ci(column(result, 3));
  ordered_json agg;
  agg["trials"] = config.trials;
  agg["rounds"] = plan.n_rounds;
  agg["total_bits"] = plan.total_bits;
  agg["mean_fidelity"] = fidelity.mean;
  agg["fidelity_ci95"] = fidelity.ci95_halfwidth;
  agg["success_rate"] = success.mean;
  result.document["aggregates"] = agg;
  result.summary = "prepare: N=" + std::to_string(config.n_spins) + " rounds=" +
                   std::to_string(plan.n_rounds) + " trials=" +
                   std::to_string(config.trials) + " mean_fidelity=" +
                   format_double(fidelity.mean) + " +- " +
                   format_double(fidelity.ci95_halfwidth);
  return result;
}

RunResult run_targeted(const RunConfig& config) {
  RunResult result =
      make_result(config, {"trial", "accepted", "decoded_mz", "fidelity"});
  result.rows.resize(config.trials);
  parallel_for(config.trials, config.workers, [&](long t) {
    Rng rng = Rng::for_trial(config.master_seed, t);
    const PreparationRecord rec = run_targeted_preparation(
        config.n_spins, config.target_m, config.gamma, rng, config.n_rounds);
    result.rows[t] = {static_cast<double>(t), rec.accepted ? 1.0 : 0.0,
                      static_cast<double>(rec.decoded_mz), rec.fidelity};
  });
  const MeanCi acceptance = mean_ci(column(result, 1));
  std::vector<double> accepted_fidelities;
  for (const auto& row : result.rows) {
    if (row[1] > 0.5) accepted_fidelities.push_back(row[3]);
  }
  const double p = static_cast<double>(config.target_m) / config.n_spins + 0.5;
  const double p_tilde =
      fidelity(binomial_amplitude_state(config.n_spins, p),
               static_cast<int>(config.target_m));
  ordered_json agg;
  agg["trials"] = config.trials;
  agg["acceptance_rate"] = acceptance.mean;
  agg["acceptance_ci95"] = acceptance.ci95_halfwidth;
  agg["target_probability"] = p_tilde;
  agg["accepted_trials"] = accepted_fidelities.size();
  agg["mean_accepted_fidelity"] =
      accepted_fidelities.empty() ? 0.0 : mean_ci(accepted_fidelities).mean;
  result.document["aggregates"] = agg;
  result.summary = "targeted: m=" + std::to_string(config.target_m) +
                   " acceptance=" + format_double(acceptance.mean) +
                   " (expected " + format_double(p_tilde) + ")";
  return result;
}

RunResult run_dephasing_rates(const RunConfig& config) {
  RunResult result = make_result(config, {"gamma", "round", "t_j", "flip_prob"});
  const std::vector<double>& gammas = config.gamma_sweep;
  if (gammas.empty()) throw std::invalid_argument("dephasing-rates: no gammas given");
  double worst = 0.0;
  for (double gamma : gammas) {
    for (int j = 1; j <= config.sweep_rounds; ++j) {
      const double t = 3.141592653589793238462643383279502884 /
                       (std::ldexp(1.0, j - 1) * gamma);
      const double p = dephasing_flip_prob(t, config.noise.tphi);
      result.rows.push_back({gamma, static_cast<double>(j), t, p});
      worst = std::max(worst, p);
    }
  }
  ordered_json agg;
  agg["max_flip_prob"] = worst;
  result.document["aggregates"] = agg;
  result.summary = "dephasing-rates: " + std::to_string(gammas.size()) + " couplings x " +
                   std::to_string(config.sweep_rounds) +
                   " rounds, max flip prob " + format_double(worst);
  return result;
}

RunResult run_fidelity_bound(const RunConfig& config) {
  RunResult result = make_result(config, {"m", "p"});
  ordered_json points = ordered_json::array();
  for (int m : config.repetition_sweep) {
    const SuccessBound bound =
        success_lower_bound(config.bound_rounds, m, config.gamma, config.noise);
    result.rows.push_back({static_cast<double>(m), bound.total});
    ordered_json point;
    point["m"] = m;
    point["p"] = bound.total;
    point["per_round"] = bound.per_round;
    points.push_back(point);
  }
  ordered_json agg;
  agg["points"] = points;
  result.document["aggregates"] = agg;
  result.summary = "fidelity-bound: K=" + std::to_string(config.bound_rounds) + ", P(M=" +
                   std::to_string(config.repetition_sweep.back()) + ")=" +
                   format_double(result.rows.back()[1]);
  return result;
}

RunResult run_jitter_sweep(const RunConfig& config) {
  RunResult result =
      make_result(config, {"sigma", "m", "trial", "decoded_mz", "fidelity"});
  if (config.sigma_sweep.empty()) throw std::invalid_argument("jitter-sweep: no sigmas");
  const PreparationPlan plan = make_plan(config.n_spins, config.gamma, config.n_rounds);
  const long n_sigma = static_cast<long>(config.sigma_sweep.size());
  const long n_reps = static_cast<long>(config.repetition_sweep.size());
  const long total = n_sigma * n_reps * config.trials;
  result.rows.resize(total);
  parallel_for(total, config.workers, [&](long index) {
    const long t = index % config.trials;
    const long mi = (index / config.trials) % n_reps;
    const long si = index / (config.trials * n_reps);
    NoiseModel noise = config.noise;
    noise.sigma_t = config.sigma_sweep[si];
    noise.repetitions = config.repetition_sweep[mi];
    // substream depends on the trial only: sweep points share randomness
    Rng rng = Rng::for_trial(config.master_seed, t);
    const PreparationRecord rec = run_noisy_preparation(plan, noise, rng);
    result.rows[index] = {noise.sigma_t, static_cast<double>(noise.repetitions),
                          static_cast<double>(t), static_cast<double>(rec.decoded_mz),
                          rec.fidelity};
  });
  ordered_json points = ordered_json::array();
  std::string brief;
  for (long si = 0; si < n_sigma; ++si) {
    for (long mi = 0; mi < n_reps; ++mi) {
      std::vector<double> fidelities(config.trials);
      const long base = (si * n_reps + mi) * config.trials;
      for (long t = 0; t < config.trials; ++t) fidelities[t] = result.rows[base + t][4];
      const MeanCi stats = mean_ci(fidelities);
      ordered_json point;
      point["sigma"] = config.sigma_sweep[si];
      point["m"] = config.repetition_sweep[mi];
      point["mean_fidelity"] = stats.mean;
      point["ci95"] = stats.ci95_halfwidth;
      points.push_back(point);
    }
  }
  ordered_json agg;
  agg["trials_per_point"] = config.trials;
  agg["points"] = points;
  result.document["aggregates"] = agg;
  result.summary = "jitter-sweep: " + std::to_string(n_sigma * n_reps) + " points x " +
                   std::to_string(config.trials) + " trials";
  return result;
}

RunResult run_picode(const RunConfig& config) {
  RunResult result = make_result(config, {"applications", "fidelity", "p_succ"});
  const PiCodeParams params{config.pi_g, config.pi_n, config.pi_u};
  params.validate();
  const bool nine_qubit = config.pi_g == 3 && config.pi_n == 3 && config.pi_u == 1.0;
  ordered_json agg;
  std::vector<double> angles{config.pi_theta};
  if (config.pi_find_angles > 0) {
    const AngleSearchResult found = find_angles(params, config.pi_find_angles);
    angles = found.angles;
    agg["found_angles"] = found.angles;
    agg["residual"] = found.residual;
    agg["converged"] = found.converged;
  }
  double final_fidelity = 0.0, final_p = 0.0;
  for (int m = 1; m <= config.pi_reps; ++m) {
    const PiCodePreparation prep = nine_qubit
                                       ? prepare_9qubit(m, angles[0])
                                       : prepare_probe(params, angles, m);
    result.rows.push_back({static_cast<double>(m), prep.fidelity_vs_probe,
                           prep.success_probability});
    final_fidelity = prep.fidelity_vs_probe;
    final_p = prep.success_probability;
  }
  agg["fidelity"] = final_fidelity;
  agg["p_succ"] = final_p;
  result.document["aggregates"] = agg;
  result.summary = "picode: (g,n,u)=(" + std::to_string(config.pi_g) + "," +
                   std::to_string(config.pi_n) + "," + format_double(config.pi_u) +
                   ") M=" + std::to_string(config.pi_reps) + " fidelity=" +
                   format_double(final_fidelity) + " P_succ=" + format_double(final_p);
  return result;
}

RunResult run_adiabatic(const RunConfig& config) {
  RunResult result =
      make_result(config, {"trial", "accepted", "decoded_m", "fidelity"});
  result.rows.resize(config.trials);
  parallel_for(config.trials, config.workers, [&](long t) {
    Rng rng = Rng::for_trial(config.master_seed, t);
    const PreparationRecord rec =
        adiabatic_preparation(config.n_spins, config.adiabatic_g, rng);
    result.rows[t] = {static_cast<double>(t), rec.accepted ? 1.0 : 0.0,
                      static_cast<double>(rec.decoded_mz), rec.fidelity};
  });
  const AdiabaticPlan plan = make_adiabatic_plan(config.n_spins, config.adiabatic_g);
  const MeanCi acceptance = mean_ci(column(result, 1));
  std::vector<double> accepted;
  for (const auto& row : result.rows) {
    if (row[1] > 0.5) accepted.push_back(row[3]);
  }
  const MeanCi accepted_fidelity = mean_ci(accepted);
  ordered_json agg;
  agg["trials"] = config.trials;
  agg["center_m"] = plan.center_m;
  agg["window_max"] = plan.window_max;
  agg["rounds"] = plan.n_rounds;
  agg["acceptance_rate"] = acceptance.mean;
  agg["mean_accepted_fidelity"] = accepted_fidelity.mean;
  agg["accepted_fidelity_ci95"] = accepted_fidelity.ci95_halfwidth;
  result.document["aggregates"] = agg;
  result.summary = "adiabatic: N=" + std::to_string(config.n_spins) +
                   " accepted=" + format_double(acceptance.mean) +
                   " mean_fidelity=" + format_double(accepted_fidelity.mean);
  return result;
}

RunResult run_oracle_check(const RunConfig& config) {
  RunResult result = make_result(config, {"n", "seed", "bits_match", "max_prob_diff",
                                          "fidelity_full", "fidelity_collective"});
  const long sizes = static_cast<long>(config.oracle_sizes.size());
  const long total = sizes * config.oracle_seeds;
  result.rows.resize(total);
  parallel_for(total, config.workers, [&](long index) {
    const int n = config.oracle_sizes[index / config.oracle_seeds];
    const long seed = index % config.oracle_seeds;
    const PreparationPlan plan = make_plan(n, config.gamma);
    // one substream per (size, seed) cell, shared by both simulators
    Rng rng_full = Rng::for_trial(config.master_seed, index);
    Rng rng_coll = Rng::for_trial(config.master_seed, index);
    const FullRunRecord full = full_pe_run(plan, rng_full);
    const PreparationRecord coll = run_preparation(plan, rng_coll);
    double max_diff = 0.0;
    for (std::size_t j = 0; j < full.born_probs.size(); ++j) {
      max_diff = std::max(max_diff, std::abs(full.born_probs[j] - coll.born_probs[j]));
    }
    const bool match = full.bits == coll.bits && full.decoded_mz == coll.decoded_mz;
    result.rows[index] = {static_cast<double>(n), static_cast<double>(seed),
                          match ? 1.0 : 0.0, max_diff, full.fidelity, coll.fidelity};
  });
  bool all_match = true;
  double worst = 0.0;
  for (const auto& row : result.rows) {
    all_match = all_match && row[2] > 0.5;
    worst = std::max(worst, row[3]);
  }
  ordered_json agg;
  agg["all_match"] = all_match;
  agg["max_prob_diff"] = worst;
  result.document["aggregates"] = agg;
  result.summary = std::string("oracle-check: ") + (all_match ? "all records match" : "MISMATCH") +
                   ", max probability difference " + format_double(worst);
  return result;
}

}  // namespace

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::prepare: return "prepare";
    case ExperimentKind::targeted: return "targeted";
    case ExperimentKind::dephasing_rates: return "dephasing-rates";
    case ExperimentKind::fidelity_bound: return "fidelity-bound";
    case ExperimentKind::jitter_sweep: return "jitter-sweep";
    case ExperimentKind::picode: return "picode";
    case ExperimentKind::adiabatic: return "adiabatic";
    case ExperimentKind::oracle_check: return "oracle-check";
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  noise.validate();
}

MeanCi mean_ci(const std::vector<double>& values) {
  MeanCi out;
  out.count = static_cast<long>(values.size());
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / out.count;
  if (out.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double stddev = std::sqrt(ss / (out.count - 1));
    out.ci95_halfwidth = 1.96 * stddev / std::sqrt(static_cast<double>(out.count));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  const auto range = text.find("..");
  std::vector<int> values;
  if (range != std::string::npos) {
    const int lo = std::stoi(text.substr(0, range));
    const int hi = std::stoi(text.substr(range + 2));
    if (hi < lo) throw std::invalid_argument("bad range: " + text);
    for (int v = lo; v <= hi; ++v) values.push_back(v);
    return values;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string token =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!token.empty()) values.push_back(std::stoi(token));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.empty()) throw std::invalid_argument("empty list: " + text);
  return values;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string token =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!token.empty()) values.push_back(std::stod(token));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.empty()) throw std::invalid_argument("empty list: " + text);
  return values;
}

std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  const auto trim = [](std::string s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return std::string();
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line is not key=value: " + line);
    }
    pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return pairs;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kWorkerEnvVar)) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(long count, int workers, const std::function<void(long)>& body) {
  const int pool = std::min<long>(resolve_workers(workers), count);
  if (pool <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (int w = 0; w < pool; ++w) {
    threads.emplace_back([&]() {
      for (long i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& thread : threads) thread.join();
}

RunResult run_experiment(const RunConfig& config) {
  config.validate();
  switch (config.kind) {
    case ExperimentKind::prepare: return run_prepare(config);
    case ExperimentKind::targeted: return run_targeted(config);
    case ExperimentKind::dephasing_rates: return run_dephasing_rates(config);
    case ExperimentKind::fidelity_bound: return run_fidelity_bound(config);
    case ExperimentKind::jitter_sweep: return run_jitter_sweep(config);
    case ExperimentKind::picode: return run_picode(config);
    case ExperimentKind::adiabatic: return run_adiabatic(config);
    case ExperimentKind::oracle_check: return run_oracle_check(config);
  }
  throw std::invalid_argument("unknown experiment kind");
}

std::string render_csv(const RunResult& result) {
  std::string out;
  for (std::size_t c = 0; c < result.columns.size(); ++c) {
    if (c) out += ',';
    out += result.columns[c];
  }
  out += '\n';
  for (const auto& row : result.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_output_files(const RunConfig& config, const RunResult& result) {
  const std::string prefix =
      config.out_prefix.empty() ? experiment_name(config.kind) : config.out_prefix;
  const std::filesystem::path csv_path = prefix + ".csv";
  if (csv_path.has_parent_path()) {
    std::filesystem::create_directories(csv_path.parent_path());
  }
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    csv << render_csv(result);
  }
  {
    std::ofstream json(prefix + ".json", std::ios::binary);
    if (!json) throw std::runtime_error("cannot write " + prefix + ".json");
    json << result.document.dump(2) << '\n';
  }
}

void run_and_write(const RunConfig& config) {
  const RunResult result = run_experiment(config);
  write_output_files(config, result);
  std::cout << result.summary << '\n';
}

}  // namespace dicke
