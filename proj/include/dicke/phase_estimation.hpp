#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dicke/collective_spin.hpp"
#include "dicke/rng.hpp"

namespace dicke {

// Schedule for one preparation experiment: round j applies the controlled
// rotation for time t_j = pi / (2^{j-1} gamma), so gamma t_j = pi 2^{1-j}.
// gamma is an angular frequency (rad/s) throughout.
struct PreparationPlan {
  int n_spins = 0;
  int n_rounds = 0;       // <= total_bits
  int total_bits = 0;     // K = ceil(log2 N) + 1
  double gamma = 0.0;     // rad/s
  long target_offset = 0; // 0 for the standard scheme
  std::vector<double> round_times;

  double total_time() const;
};

// K = ceil(log2 N) + 1.
int bit_count(int n_spins);

// n_rounds <= 0 selects the full K rounds.
PreparationPlan make_plan(int n_spins, double gamma, int n_rounds = 0);

// Feedback angle for round j given the accumulated record A_{j-1}:
// pi * A_{j-1} * 2^{1-j}.
double feedback_angle(int round, long a_prev);

// One repetition of one measurement within a round, as recorded for the
// noise analysis. decay_time is set only when decayed; true_bit only when
// a projective measurement actually happened.
struct RepetitionEvent {
  bool decayed = false;
  double decay_time = 0.0;
  bool dephasing_flip = false;
  int recorded_bit = 0;
  std::optional<int> true_bit;
  double born_prob0 = 0.0;  // POVM weight of outcome 0 before sampling
};

struct RoundLog {
  int round = 0;
  std::vector<RepetitionEvent> repetitions;
  int voted_bit = 0;
  bool tie_broken = false;
  std::optional<int> reference_bit;  // bit fixed by first non-decayed repetition
  bool projector_applied = false;    // condition (i): at least one non-decayed rep
  bool vote_correct = false;         // condition (ii), defined when projector_applied
};

struct PreparationRecord {
  std::vector<int> bits;
  std::vector<long> accumulators;     // A_j after each round
  std::vector<double> born_probs;     // probability of the branch kept per round
  std::vector<RoundLog> round_logs;   // filled by the noisy pipeline
  long decoded_mz = 0;
  bool accepted = true;               // post-selection verdict (targeted scheme)
  CollectiveState final_state;
  double fidelity = 0.0;              // vs |N, decoded_mz>

  bool all_rounds_succeeded() const;  // conditions (i)+(ii) in every round
};

// The diagonal of U_j = exp(i pi 2^{1-j} (J_z - offset - A_{j-1})); entries
// on the reachable lattice are exactly +-1 (integer phase reduction).
VectorXc round_unitary_diagonal(int n_spins, int round, long a_prev, long offset);

// P(b) = (I + (-1)^b U_j) / 2 as a dense operator (diagnostic / small N).
MatrixXc round_projector(int n_spins, int round, long a_prev, int bit, long offset = 0);

struct RoundOutcome {
  int bit = 0;
  double born_prob = 0.0;
};

// Samples bit b_j with the Born rule, projects and renormalizes in place.
RoundOutcome run_round(CollectiveState& state, int round, long a_prev, Rng& rng,
                       long offset = 0);

// Eigenvalue decoding: A < 2^{K-1} -> A, otherwise A - 2^K. The boundary
// A = 2^{K-1} maps to the negative branch.
long decode(long accumulated, int n_bits);

// Standard scheme: start from |+>^N, run plan.n_rounds rounds, decode.
PreparationRecord run_preparation(const PreparationPlan& plan, Rng& rng);

// Post-selected preparation of |N, m>: rotated initial state, projectors
// offset by m, accepted iff the record decodes to m.
PreparationRecord run_targeted_preparation(int n_spins, long target_m, double gamma,
                                           Rng& rng, int n_rounds = 0);

// Rotation angle 2*chi for the targeted initial state, from
// 0.5 (cos chi - sin chi)^2 = m/N + 1/2.
double targeted_rotation_angle(int n_spins, long target_m);

}  // namespace dicke
