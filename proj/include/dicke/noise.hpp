#pragma once

#include <limits>
#include <vector>

#include "dicke/phase_estimation.hpp"

namespace dicke {

// Ancilla decoherence and control-noise parameters. Infinite times disable
// the corresponding channel; sigma_t = 0 disables timing jitter.
struct NoiseModel {
  double t1 = std::numeric_limits<double>::infinity();    // seconds
  double tphi = std::numeric_limits<double>::infinity();  // seconds
  double sigma_t = 0.0;                                   // seconds
  int repetitions = 1;                                    // M per round

  void validate() const;
  bool decay_enabled() const { return std::isfinite(t1); }
  bool dephasing_enabled() const { return std::isfinite(tphi); }
};

// Readout flip probability from pure dephasing during a gate of duration t:
// (1 - e^{-t/T_phi}) / 2.
double dephasing_flip_prob(double t, double tphi);

// Ancilla decay probability during the echo-integrated controlled rotation:
// 1 - e^{-t/(2 T1)}.
double decay_prob(double t, double t1);

struct ControlledRotationEvent {
  bool decayed = false;
  double decay_time = 0.0;  // in [0, t], set when decayed
};

// Trajectory unravelling of the echo-integrated controlled rotation over
// the collective state: with probability e^{-t/(2T1)} nothing happens here
// (the projective round proceeds); otherwise the ancilla decays at t' drawn
// from the truncated exponential on [0, t] and the unconditional diagonal
// phase e^{i gamma t' J_z} is applied.
ControlledRotationEvent noisy_controlled_rotation(CollectiveState& state, double t,
                                                  double gamma, const NoiseModel& noise,
                                                  Rng& rng);

// One repetition of round j under the full noise stack. If no decay
// happened, the (possibly jittered) measurement operator pair is applied
// with Born sampling and the recorded bit is the true bit XOR a dephasing
// flip; if decay happened, no projection occurs and the recorded bit is
// uniformly random. Draws from rng only for enabled channels, so the
// noiseless limit consumes exactly the ideal round's single uniform.
RepetitionEvent noisy_round(CollectiveState& state, int round, long a_prev,
                            const PreparationPlan& plan, const NoiseModel& noise,
                            Rng& rng);

// M repetitions of round j on the evolving state followed by a majority
// vote on the recorded bits (ties broken uniformly at random).
RoundLog majority_round(CollectiveState& state, int round, long a_prev,
                        const PreparationPlan& plan, const NoiseModel& noise,
                        Rng& rng);

// Full noisy preparation: majority-voted rounds, A_j updated with voted
// bits, decoding and fidelity as in the ideal pipeline.
PreparationRecord run_noisy_preparation(const PreparationPlan& plan,
                                        const NoiseModel& noise, Rng& rng);

struct SuccessBound {
  double total = 1.0;            // P = prod_j P_j
  std::vector<double> per_round; // P_j, j = 1..K
};

// Probability that every round of phase estimation succeeds (at least one
// non-decayed repetition and a correct majority vote, ties counting 1/2),
// computed by exact enumeration over decay and flip counts. Pure
// arithmetic; valid for K = 20 and beyond.
SuccessBound success_lower_bound(int n_rounds, int repetitions, double gamma,
                                 const NoiseModel& noise);

}  // namespace dicke
