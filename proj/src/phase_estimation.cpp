#include "dicke/phase_estimation.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dicke {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace

double PreparationPlan::total_time() const {
  double sum = 0.0;
  for (double t : round_times) sum += t;
  return sum;
}

int bit_count(int n_spins) {
  if (n_spins < 2) throw std::invalid_argument("bit_count: N must be >= 2");
  // Smallest K with 2^K > N, so all of m_z + 2^K fits in K+1 bits:
  // floor(log2 N) + 1 (9 for N = 500, 3 for N = 4).
  return static_cast<int>(std::bit_width(static_cast<unsigned>(n_spins)));
}

PreparationPlan make_plan(int n_spins, double gamma, int n_rounds) {
  if (n_spins < 2 || n_spins % 2 != 0) {
    throw std::invalid_argument("make_plan: N must be even and >= 2");
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("make_plan: gamma must be > 0");
  PreparationPlan plan;
  plan.n_spins = n_spins;
  plan.gamma = gamma;
  plan.total_bits = bit_count(n_spins);
  plan.n_rounds = n_rounds <= 0 ? plan.total_bits : n_rounds;
  if (plan.n_rounds > plan.total_bits) {
    throw std::invalid_argument("make_plan: n_rounds must be <= K = " +
                                std::to_string(plan.total_bits));
  }
  plan.round_times.resize(plan.n_rounds);
  for (int j = 1; j <= plan.n_rounds; ++j) {
    plan.round_times[j - 1] = kPi / (std::ldexp(1.0, j - 1) * gamma);
  }
  return plan;
}

double feedback_angle(int round, long a_prev) {
  if (round < 1) throw std::invalid_argument("feedback_angle: round must be >= 1");
  return kPi * std::ldexp(static_cast<double>(a_prev), 1 - round);
}

bool PreparationRecord::all_rounds_succeeded() const {
  if (round_logs.empty()) return true;
  for (const auto& log : round_logs) {
    if (!log.projector_applied || !log.vote_correct) return false;
  }
  return true;
}

VectorXc round_unitary_diagonal(int n_spins, int round, long a_prev, long offset) {
  if (round < 1) throw std::invalid_argument("round_unitary_diagonal: round must be >= 1");
  const int dim = n_spins + 1;
  VectorXc diag(dim);
  const long half_n = n_spins / 2;
  for (int idx = 0; idx < dim; ++idx) {
    const long m_z = idx - half_n;
    diag[idx] = unit_phase_pow2(m_z - offset - a_prev, round - 1);
  }
  return diag;
}

MatrixXc round_projector(int n_spins, int round, long a_prev, int bit, long offset) {
  const VectorXc u = round_unitary_diagonal(n_spins, round, a_prev, offset);
  const double sign = bit == 0 ? 1.0 : -1.0;
  MatrixXc p = MatrixXc::Zero(n_spins + 1, n_spins + 1);
  for (int k = 0; k <= n_spins; ++k) p(k, k) = 0.5 * (1.0 + sign * u[k]);
  return p;
}

RoundOutcome run_round(CollectiveState& state, int round, long a_prev, Rng& rng,
                       long offset) {
  const VectorXc u = round_unitary_diagonal(state.n_spins, round, a_prev, offset);
  const int dim = state.dim();
  VectorXc kept(dim);
  double p0 = 0.0;
  double total = 0.0;
  for (int k = 0; k < dim; ++k) {
    kept[k] = 0.5 * (state.amplitudes[k] + u[k] * state.amplitudes[k]);
    p0 += std::norm(kept[k]);
    total += std::norm(state.amplitudes[k]);
  }
  const double p1 = total - p0;
  if (p0 < 1e-12 && p1 < 1e-12) {
    throw std::runtime_error("run_round: both branch probabilities vanish");
  }
  RoundOutcome out;
  out.bit = rng.uniform() < p0 ? 0 : 1;
  if (out.bit == 0) {
    out.born_prob = p0;
    state.amplitudes = kept / std::sqrt(p0);
  } else {
    out.born_prob = p1;
    for (int k = 0; k < dim; ++k) {
      kept[k] = 0.5 * (state.amplitudes[k] - u[k] * state.amplitudes[k]);
    }
    state.amplitudes = kept / std::sqrt(p1);
  }
  return out;
}

long decode(long accumulated, int n_bits) {
  const long span = 1L << n_bits;
  if (accumulated < 0 || accumulated >= span) {
    throw std::invalid_argument("decode: accumulated value out of [0, 2^K)");
  }
  return accumulated < span / 2 ? accumulated : accumulated - span;
}

namespace {

PreparationRecord run_rounds(CollectiveState state, const PreparationPlan& plan,
                             Rng& rng) {
  PreparationRecord rec;
  long a = 0;
  for (int j = 1; j <= plan.n_rounds; ++j) {
    const RoundOutcome outcome = run_round(state, j, a, rng, plan.target_offset);
    a += static_cast<long>(outcome.bit) << (j - 1);
    rec.bits.push_back(outcome.bit);
    rec.accumulators.push_back(a);
    rec.born_probs.push_back(outcome.born_prob);
  }
  rec.decoded_mz = plan.target_offset + decode(a, plan.n_rounds);
  rec.final_state = std::move(state);
  rec.fidelity = fidelity(rec.final_state, static_cast<int>(rec.decoded_mz));
  return rec;
}

}  // namespace

PreparationRecord run_preparation(const PreparationPlan& plan, Rng& rng) {
  return run_rounds(initial_plus_state(plan.n_spins), plan, rng);
}

double targeted_rotation_angle(int n_spins, long target_m) {
  if (2 * std::labs(target_m) > n_spins) {
    throw std::invalid_argument("targeted_rotation_angle: |m| must be <= N/2");
  }
  const double p = static_cast<double>(target_m) / n_spins + 0.5;
  // 0.5 (cos x - sin x)^2 = cos^2(x + pi/4) = p  =>  x = acos(sqrt(p)) - pi/4.
  const double chi = std::acos(std::sqrt(p)) - 0.25 * kPi;
  return 2.0 * chi;
}

PreparationRecord run_targeted_preparation(int n_spins, long target_m, double gamma,
                                           Rng& rng, int n_rounds) {
  PreparationPlan plan = make_plan(n_spins, gamma, n_rounds);
  plan.target_offset = target_m;
  const double p = static_cast<double>(target_m) / n_spins + 0.5;
  PreparationRecord rec =
      run_rounds(binomial_amplitude_state(n_spins, p), plan, rng);
  rec.accepted = rec.decoded_mz == target_m;
  return rec;
}

}  // namespace dicke
