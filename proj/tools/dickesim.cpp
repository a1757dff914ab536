#include <CLI11.hpp>
#include <iostream>
#include <limits>
#include <string>

#include "dicke/harness.hpp"

namespace {

using dicke::ExperimentKind;
using dicke::RunConfig;

// Shared option block; every subcommand fills a RunConfig and runs it.
struct CommonFlags {
  std::string m_list;
  std::string sigma_list;
  std::string gamma_list;
  std::string n_list;
};

void add_seed_options(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--trials", config.trials, "Monte Carlo trials");
  cmd->add_option("--seed", config.master_seed, "master seed (trial i uses substream i)");
  cmd->add_option("--workers", config.workers, "worker threads (0 = env/hardware)");
  cmd->add_option("--out-prefix", config.out_prefix,
                  "output prefix; writes <prefix>.csv and <prefix>.json");
}

void add_noise_options(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--t1", config.noise.t1, "ancilla T1 in seconds (inf disables)");
  cmd->add_option("--tphi", config.noise.tphi, "ancilla T_phi in seconds (inf disables)");
  cmd->add_option("--sigma-t", config.noise.sigma_t, "timing jitter stddev in seconds");
  cmd->add_option("--m-reps", config.noise.repetitions, "majority-vote repetitions per round");
}

}  // namespace

namespace {

// Splices "--config FILE" into the token stream: the file's key=value
// pairs become "--key value" tokens placed before the user's remaining
// flags, so explicit flags win under the take-last policy.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> tokens;
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config") {
      if (i + 1 >= argc) throw std::invalid_argument("--config needs a file path");
      config_path = argv[++i];
    } else if (arg.rfind("--config=", 0) == 0) {
      config_path = arg.substr(9);
    } else {
      tokens.push_back(arg);
    }
  }
  if (config_path.empty()) return tokens;
  if (tokens.empty()) throw std::invalid_argument("--config requires a subcommand");
  std::vector<std::string> expanded{tokens.front()};  // subcommand first
  for (const auto& [key, value] : dicke::parse_config_file(config_path)) {
    expanded.push_back("--" + key);
    expanded.push_back(value);
  }
  expanded.insert(expanded.end(), tokens.begin() + 1, tokens.end());
  return expanded;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dicke-state preparation simulator: collective-spin phase estimation,\n"
               "noise analysis, metrology bounds, and brute-force cross-checks"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  RunConfig config;
  CommonFlags flags;

  CLI::App* prepare = app.add_subcommand("prepare", "standard preparation runs");
  prepare->add_option("--n", config.n_spins, "spin number (even)");
  prepare->add_option("--gamma", config.gamma, "coupling in rad/s (5 MHz -> 5e6)");
  prepare->add_option("--rounds", config.n_rounds, "rounds (0 = full K)");
  add_noise_options(prepare, config);
  add_seed_options(prepare, config);

  CLI::App* targeted = app.add_subcommand("targeted", "post-selected |N, m> preparation");
  targeted->add_option("--n", config.n_spins, "spin number (even)");
  targeted->add_option("--m", config.target_m, "target eigenvalue m");
  targeted->add_option("--gamma", config.gamma, "coupling in rad/s");
  targeted->add_option("--rounds", config.n_rounds, "rounds (0 = full K)");
  add_seed_options(targeted, config);

  CLI::App* rates = app.add_subcommand("dephasing-rates",
                                       "readout flip probability per round and coupling");
  rates->add_option("--tphi", config.noise.tphi, "pure dephasing time in seconds (default 2e-6)");
  rates->add_option("--gammas", flags.gamma_list,
                    "comma list of couplings in rad/s (default 1e6,2e6,5e6,1e7)");
  rates->add_option("--rounds", config.sweep_rounds, "rounds to tabulate");
  rates->add_option("--out-prefix", config.out_prefix, "output prefix");

  CLI::App* bound = app.add_subcommand("fidelity-bound",
                                       "success probability lower bound vs repetitions");
  bound->add_option("--k", config.bound_rounds, "rounds of phase estimation");
  bound->add_option("--t1", config.noise.t1, "ancilla T1 in seconds (default 50e-6)");
  bound->add_option("--tphi", config.noise.tphi, "ancilla T_phi in seconds (default 2e-6)");
  bound->add_option("--gamma", config.gamma, "coupling in rad/s");
  bound->add_option("--m", flags.m_list,
                    "repetitions: comma list or a..b range (default 1..15)");
  bound->add_option("--out-prefix", config.out_prefix, "output prefix");

  CLI::App* jitter = app.add_subcommand("jitter-sweep",
                                        "fidelity under timing jitter, majority voting");
  jitter->add_option("--n", config.n_spins, "spin number (even)");
  jitter->add_option("--gamma", config.gamma, "coupling in rad/s");
  jitter->add_option("--rounds", config.n_rounds, "rounds (0 = full K, default 6)");
  jitter->add_option("--sigma", flags.sigma_list,
                     "comma list of jitter stddevs in seconds (default 0.5e-9,1e-9,3e-9,6e-9,10e-9)");
  jitter->add_option("--m", flags.m_list,
                     "repetitions: comma list or a..b range (default 1,3,5)");
  add_seed_options(jitter, config);

  CLI::App* picode = app.add_subcommand("picode",
                                        "permutation-invariant-code probe preparation");
  picode->add_option("--g", config.pi_g, "code parameter g");
  picode->add_option("--n", config.pi_n, "code parameter n");
  picode->add_option("--u", config.pi_u, "code parameter u");
  picode->add_option("--theta", config.pi_theta, "y-projector angle");
  picode->add_option("--reps", config.pi_reps, "phase-filter applications M");
  picode->add_option("--find-angles", config.pi_find_angles,
                     "search this many projector angles numerically");
  picode->add_option("--out-prefix", config.out_prefix, "output prefix");

  CLI::App* adiabatic = app.add_subcommand("adiabatic",
                                           "preparation via the adiabatic conditional phase");
  adiabatic->add_option("--n", config.n_spins, "spin number (even, default 400)");
  adiabatic->add_option("--g", config.adiabatic_g, "single-spin coupling in rad/s");
  add_seed_options(adiabatic, config);

  CLI::App* oracle = app.add_subcommand("oracle-check",
                                        "full-state vs collective simulator agreement");
  oracle->add_option("--n", flags.n_list,
                     "comma list of spin numbers <= 12 (default 2,4,6,8,10)");
  oracle->add_option("--seeds", config.oracle_seeds, "seeds per size");
  oracle->add_option("--gamma", config.gamma, "coupling in rad/s");
  oracle->add_option("--seed", config.master_seed, "master seed");
  oracle->add_option("--workers", config.workers, "worker threads");
  oracle->add_option("--out-prefix", config.out_prefix, "output prefix");

  for (CLI::App* cmd : app.get_subcommands(
           [](const CLI::App*) { return true; })) {
    // listed for --help; consumed before CLI11 sees the real argv
    cmd->add_option("--config", "flat key=value config file; flags override it");
  }

  std::vector<std::string> tokens;
  try {
    tokens = expand_config_args(argc, argv);
  } catch (const std::exception& error) {
    std::cerr << "config error: " << error.what() << '\n';
    return 2;
  }

  try {
    // CLI11 parses vectors of tokens in reverse
    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return 2;  // config errors exit 2
  }

  try {
    if (app.got_subcommand(prepare)) config.kind = ExperimentKind::prepare;
    if (app.got_subcommand(targeted)) config.kind = ExperimentKind::targeted;
    if (app.got_subcommand(rates)) {
      config.kind = ExperimentKind::dephasing_rates;
      if (rates->count("--tphi") == 0) config.noise.tphi = 2e-6;
      if (flags.gamma_list.empty()) flags.gamma_list = "1e6,2e6,5e6,1e7";
      config.gamma_sweep = dicke::parse_double_list(flags.gamma_list);
    }
    if (app.got_subcommand(bound)) {
      config.kind = ExperimentKind::fidelity_bound;
      if (bound->count("--t1") == 0) config.noise.t1 = 50e-6;
      if (bound->count("--tphi") == 0) config.noise.tphi = 2e-6;
      if (flags.m_list.empty()) flags.m_list = "1..15";
      config.repetition_sweep = dicke::parse_int_list(flags.m_list);
    }
    if (app.got_subcommand(jitter)) {
      config.kind = ExperimentKind::jitter_sweep;
      if (jitter->count("--rounds") == 0) config.n_rounds = 6;
      if (flags.sigma_list.empty()) flags.sigma_list = "0.5e-9,1e-9,3e-9,6e-9,10e-9";
      if (flags.m_list.empty()) flags.m_list = "1,3,5";
      config.sigma_sweep = dicke::parse_double_list(flags.sigma_list);
      config.repetition_sweep = dicke::parse_int_list(flags.m_list);
    }
    if (app.got_subcommand(picode)) config.kind = ExperimentKind::picode;
    if (app.got_subcommand(adiabatic)) {
      config.kind = ExperimentKind::adiabatic;
      if (adiabatic->count("--n") == 0) config.n_spins = 400;
    }
    if (app.got_subcommand(oracle)) {
      config.kind = ExperimentKind::oracle_check;
      if (flags.n_list.empty()) flags.n_list = "2,4,6,8,10";
      config.oracle_sizes = dicke::parse_int_list(flags.n_list);
    }
    config.validate();
  } catch (const std::exception& error) {
    std::cerr << "config error: " << error.what() << '\n';
    return 2;
  }

  try {
    dicke::run_and_write(config);
  } catch (const std::invalid_argument& error) {
    std::cerr << "config error: " << error.what() << '\n';
    return 2;
  } catch (const std::domain_error& error) {
    std::cerr << "config error: " << error.what() << '\n';
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "runtime error: " << error.what() << '\n';
    return 1;
  }
  return 0;
}
