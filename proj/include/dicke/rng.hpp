#pragma once

#include <cmath>
#include <cstdint>

namespace dicke {

// Counter-based pseudo-random generator (SplitMix64): the k-th output is a
// pure function of (seed, k), so streams can be split deterministically.
// Stream derivation rule: the generator for trial i of a run with master
// seed s is Rng(split(s, i)), independent of which worker executes it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // One standard normal via Box-Muller. Consumes two draws, keeps no spare,
  // so the stream position is a fixed function of the call count.
  double normal() {
    const double u = uniform_pos();
    const double v = uniform();
    const double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u)) * std::cos(two_pi * v);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Derives the seed of substream `index` from a master seed.
  static std::uint64_t split(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static Rng for_trial(std::uint64_t master, std::uint64_t trial) {
    return Rng(split(master, trial));
  }

 private:
  std::uint64_t state_;
};

}  // namespace dicke
