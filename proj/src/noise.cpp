#include "dicke/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace dicke {

namespace {

// Possibly jittered measurement-operator pair O(b) = (I + (-1)^b U)/2 with
// U = exp(i pi 2^{1-j} (J_z - offset) + i gamma dt J_z). The timing error
// perturbs only the coupling term (the feedback rotation is a separate,
// exact ancilla gate), so its phase multiplies J_z itself. Samples the
// outcome, collapses, renormalizes. The POVM weights sum to one even when
// the pair is not projective.
RoundOutcome apply_measurement_pair(CollectiveState& state, int round, long offset,
                                    double extra_angle, Rng& rng) {
  VectorXc u = round_unitary_diagonal(state.n_spins, round, 0, offset);
  const int dim = state.dim();
  if (extra_angle != 0.0) {
    const double half_n = 0.5 * state.n_spins;
    for (int k = 0; k < dim; ++k) {
      u[k] *= std::polar(1.0, extra_angle * (k - half_n));
    }
  }
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
    throw std::runtime_error("apply_measurement_pair: inconsistent record");
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

}  // namespace

void NoiseModel::validate() const {
  if (!(t1 > 0.0) || !(tphi > 0.0)) {
    throw std::invalid_argument("NoiseModel: T1 and T_phi must be positive (or infinite)");
  }
  if (sigma_t < 0.0) throw std::invalid_argument("NoiseModel: sigma_t must be >= 0");
  if (repetitions < 1) throw std::invalid_argument("NoiseModel: repetitions must be >= 1");
}

double dephasing_flip_prob(double t, double tphi) {
  if (t < 0.0) throw std::invalid_argument("dephasing_flip_prob: negative time");
  return 0.5 * (-std::expm1(-t / tphi));
}

double decay_prob(double t, double t1) {
  if (t < 0.0) throw std::invalid_argument("decay_prob: negative time");
  return -std::expm1(-0.5 * t / t1);
}

ControlledRotationEvent noisy_controlled_rotation(CollectiveState& state, double t,
                                                  double gamma, const NoiseModel& noise,
                                                  Rng& rng) {
  ControlledRotationEvent event;
  if (!noise.decay_enabled()) return event;
  const double p_decay = decay_prob(t, noise.t1);
  if (rng.uniform() >= p_decay) return event;
  event.decayed = true;
  // Decay time from the exponential with rate 1/T1 truncated to [0, t].
  const double mass = -std::expm1(-t / noise.t1);
  event.decay_time = -noise.t1 * std::log1p(-rng.uniform() * mass);
  state = apply_jz_phase(state, gamma * event.decay_time, 0.0);
  return event;
}

RepetitionEvent noisy_round(CollectiveState& state, int round, long a_prev,
                            const PreparationPlan& plan, const NoiseModel& noise,
                            Rng& rng) {
  const double t = plan.round_times[round - 1];
  RepetitionEvent event;
  const ControlledRotationEvent gate =
      noisy_controlled_rotation(state, t, plan.gamma, noise, rng);
  if (gate.decayed) {
    event.decayed = true;
    event.decay_time = gate.decay_time;
    event.born_prob0 = 0.5;
    event.recorded_bit = rng.uniform() < 0.5 ? 0 : 1;
    return event;
  }
  const double jitter =
      noise.sigma_t > 0.0 ? plan.gamma * rng.normal(0.0, noise.sigma_t) : 0.0;
  const RoundOutcome outcome = apply_measurement_pair(
      state, round, a_prev + plan.target_offset, jitter, rng);
  event.true_bit = outcome.bit;
  event.born_prob0 = outcome.bit == 0 ? outcome.born_prob : 1.0 - outcome.born_prob;
  event.recorded_bit = outcome.bit;
  if (noise.dephasing_enabled()) {
    const double p_flip = dephasing_flip_prob(t, noise.tphi);
    if (rng.uniform() < p_flip) {
      event.dephasing_flip = true;
      event.recorded_bit ^= 1;
    }
  }
  return event;
}

RoundLog majority_round(CollectiveState& state, int round, long a_prev,
                        const PreparationPlan& plan, const NoiseModel& noise,
                        Rng& rng) {
  RoundLog log;
  log.round = round;
  int ones = 0;
  for (int rep = 0; rep < noise.repetitions; ++rep) {
    RepetitionEvent event = noisy_round(state, round, a_prev, plan, noise, rng);
    if (!event.decayed && !log.reference_bit.has_value()) {
      log.reference_bit = event.true_bit;
    }
    ones += event.recorded_bit;
    log.repetitions.push_back(std::move(event));
  }
  const int zeros = noise.repetitions - ones;
  if (ones > zeros) {
    log.voted_bit = 1;
  } else if (zeros > ones) {
    log.voted_bit = 0;
  } else {
    log.tie_broken = true;
    log.voted_bit = rng.uniform() < 0.5 ? 0 : 1;
  }
  log.projector_applied = log.reference_bit.has_value();
  log.vote_correct = log.projector_applied && log.voted_bit == *log.reference_bit;
  return log;
}

PreparationRecord run_noisy_preparation(const PreparationPlan& plan,
                                        const NoiseModel& noise, Rng& rng) {
  noise.validate();
  CollectiveState state = initial_plus_state(plan.n_spins);
  PreparationRecord rec;
  long a = 0;
  for (int j = 1; j <= plan.n_rounds; ++j) {
    RoundLog log = majority_round(state, j, a, plan, noise, rng);
    a += static_cast<long>(log.voted_bit) << (j - 1);
    rec.bits.push_back(log.voted_bit);
    rec.accumulators.push_back(a);
    double born = std::numeric_limits<double>::quiet_NaN();
    for (const auto& rep : log.repetitions) {
      if (!rep.decayed) {
        born = *rep.true_bit == 0 ? rep.born_prob0 : 1.0 - rep.born_prob0;
        break;
      }
    }
    rec.born_probs.push_back(born);
    rec.round_logs.push_back(std::move(log));
  }
  rec.decoded_mz = plan.target_offset + decode(a, plan.n_rounds);
  rec.final_state = std::move(state);
  // Wrong votes can decode outside the physical spectrum; the predicted
  // state then does not exist and the trial counts as fidelity zero.
  rec.fidelity = 2 * std::labs(rec.decoded_mz) <= plan.n_spins
                     ? fidelity(rec.final_state, static_cast<int>(rec.decoded_mz))
                     : 0.0;
  return rec;
}

namespace {

// P(majority of honest + random bits matches the reference | h honest reps
// each correct w.p. 1-q, d decayed reps each correct w.p. 1/2); ties count
// one half.
double vote_success_probability(int honest, int decayed, double q, int m) {
  std::vector<double> honest_pmf(honest + 1), random_pmf(decayed + 1);
  for (int k = 0; k <= honest; ++k) {
    honest_pmf[k] = std::exp(log_binomial(honest, k) + k * std::log1p(-q) +
                             (honest - k) * std::log(q > 0.0 ? q : 1.0));
    if (q == 0.0) honest_pmf[k] = k == honest ? 1.0 : 0.0;
  }
  for (int l = 0; l <= decayed; ++l) {
    random_pmf[l] = std::exp(log_binomial(decayed, l) - decayed * std::log(2.0));
  }
  double total = 0.0;
  for (int k = 0; k <= honest; ++k) {
    for (int l = 0; l <= decayed; ++l) {
      const int correct = k + l;
      double weight = 0.0;
      if (2 * correct > m) {
        weight = 1.0;
      } else if (2 * correct == m) {
        weight = 0.5;
      }
      if (weight > 0.0) total += weight * honest_pmf[k] * random_pmf[l];
    }
  }
  return total;
}

}  // namespace

SuccessBound success_lower_bound(int n_rounds, int repetitions, double gamma,
                                 const NoiseModel& noise) {
  if (n_rounds < 1 || repetitions < 1) {
    throw std::invalid_argument("success_lower_bound: K and M must be >= 1");
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("success_lower_bound: gamma must be > 0");
  constexpr double kPi = 3.141592653589793238462643383279502884;
  SuccessBound bound;
  bound.per_round.resize(n_rounds);
  for (int j = 1; j <= n_rounds; ++j) {
    const double t = kPi / (std::ldexp(1.0, j - 1) * gamma);
    const double pd = noise.decay_enabled() ? decay_prob(t, noise.t1) : 0.0;
    const double q = noise.dephasing_enabled() ? dephasing_flip_prob(t, noise.tphi) : 0.0;
    double pj = 0.0;
    for (int d = 0; d < repetitions; ++d) {
      double weight;
      if (pd == 0.0) {
        weight = d == 0 ? 1.0 : 0.0;
      } else {
        weight = std::exp(log_binomial(repetitions, d) + d * std::log(pd) +
                          (repetitions - d) * std::log1p(-pd));
      }
      if (weight == 0.0) continue;
      pj += weight * vote_success_probability(repetitions - d, d, q, repetitions);
    }
    bound.per_round[j - 1] = pj;
    bound.total *= pj;
  }
  return bound;
}

}  // namespace dicke
