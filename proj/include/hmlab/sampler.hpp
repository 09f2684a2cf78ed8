#pragma once

#include <cstdint>
#include <random>

#include "hmlab/geometry.hpp"
#include "hmlab/measure.hpp"

namespace hmlab {

struct WalkConfig {
  double eps_stop = 1e-6;
  std::size_t max_steps = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t n_samples = 10'000;
  // Worker threads; 0 picks std::thread::hardware_concurrency(). Results do
  // not depend on this value.
  unsigned threads = 0;

  // Defaults scaled to the ambient radius: eps_stop = 1e-6 * R.
  static WalkConfig for_domain(const Domain& dom, std::uint64_t seed, std::size_t n_samples);
  void validate(const Domain& dom) const;
  WalkConfig with_seed(std::uint64_t s) const {
    WalkConfig c = *this;
    c.seed = s;
    return c;
  }
  WalkConfig with_samples(std::size_t n) const {
    WalkConfig c = *this;
    c.n_samples = n;
    return c;
  }
};

// Independent stream seed for (seed, stream); walk i of a run uses stream i.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

using WalkRng = std::mt19937_64;

struct WalkOutcome {
  bool absorbed = false;
  BoundaryHit hit;
  std::size_t steps = 0;
};

// One walk-on-spheres path from z0; stops when the boundary distance drops
// below eps_stop and reports the nearest boundary point.
WalkOutcome walk_on_spheres(const Domain& dom, Point z0, double eps_stop, std::size_t max_steps,
                            WalkRng& rng);

// Empirical harmonic measure of dom seen from w: one atom of weight 1/n per
// absorbed walk, in walk-index order. A start closer than eps_stop to the
// boundary yields a flagged point mass at the nearest boundary point.
EmpiricalMeasure sample_harmonic_measure(const Domain& dom, Point w, const WalkConfig& cfg);

struct TailEstimate {
  double probability = 0.0;
  double std_error = 0.0;
  std::size_t absorbed = 0;
};

// Monte Carlo P[|B_T - y| >= eta] over absorbed walks, with binomial standard error.
TailEstimate first_hit_tail_probability(const Domain& dom, Point y, double eta,
                                        const WalkConfig& cfg);
TailEstimate tail_probability(const EmpiricalMeasure& mu, Point y, double eta);

}  // namespace hmlab
