#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmlab/approximation.hpp"
#include "hmlab/geometry.hpp"
#include "hmlab/sampler.hpp"

namespace hmlab {

// ---- Kernel convergence on a grid ----

struct KernelOptions {
  std::vector<int> ladder{1, 2, 3};
  // A property holds "eventually" when it holds on the last min_tail members at least.
  std::size_t min_tail = 2;
};

struct KernelVerdict {
  bool clause1 = true;  // constant basepoints
  bool clause2 = false;
  bool clause3 = false;
  bool ok = false;
  std::vector<std::size_t> tail_starts;  // N_m per ladder rung, 1-based; 0 when none
  std::size_t kernel_cells = 0;
  std::size_t cells_outside_limit = 0;
  bool finite_prefix = true;
};

// K_m = interior_region(limit, w, 1/m, h); an empty K_m holds vacuously.
KernelVerdict check_kernel_convergence(const Domain& limit, std::span<const Domain> seq, Point w,
                                       double h, const KernelOptions& opts = {});

// ---- Weak convergence of harmonic measures ----

struct MeasureOptions {
  std::size_t n_atoms = 2048;
  std::size_t replicates = 5;
  double tolerance = 0.05;
  double deficit_tolerance = 1e-3;
  // Compare against the exact Poisson measure when the limit is a plain disk.
  bool analytic_limit = true;
};

struct MeasureRow {
  std::size_t n = 0;  // position in the sequence, 1-based
  double w1 = 0.0;
  double stderr_w1 = 0.0;
  std::size_t atoms = 0;
  double mass_deficit = 0.0;
  double limit_mass_deficit = 0.0;
  double ambient_mass = 0.0;  // mass absorbed on the ambient circle
};

struct MeasureVerdict {
  std::vector<MeasureRow> rows;
  bool non_increasing = false;
  bool final_below = false;
  bool converging = false;
};

MeasureVerdict check_measure_convergence(const Domain& limit, std::span<const Domain> seq, Point w,
                                         const WalkConfig& cfg, const MeasureOptions& opts = {});

// ---- Uniform regularity ----

struct RegularityOptions {
  std::size_t points_per_domain = 12;
  int ladder_levels = 6;
};

struct RegularityEstimate {
  double delta = 0.0;
  std::optional<double> epsilon_found;
  double min_local_mass = 0.0;
  std::size_t sample_points = 0;
};

// Accepts the first eps = delta / 2^k for which every probe z at distance eps/2
// from some boundary has omega(z, D(z, delta)) - 2 se > 1 - delta.
RegularityEstimate estimate_uniform_regularity(std::span<const Domain> seq, double delta,
                                               const WalkConfig& cfg,
                                               const RegularityOptions& opts = {});

// ---- Uniform perfectness ----

struct PerfectnessResult {
  double witness = 1.0;  // largest separating ratio found
  bool pass = false;
  Point witness_center;
  double witness_radius = 0.0;
  std::size_t probes = 0;
};

// Dyadic radii 2^k covering [diam * 2^-48, diam].
std::vector<double> dyadic_radii(std::span<const Obstacle> K);

PerfectnessResult estimate_uniform_perfectness(std::span<const Obstacle> K, std::size_t samples_per_obstacle,
                                               std::span<const double> radii, double c_star);

// ---- Beurling projection ----

struct BeurlingResult {
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;
  double rhs_se = 0.0;
  bool holds = false;
  std::vector<Obstacle> projection;
};

// Radial hull of each obstacle laid on the positive real axis, overlaps merged.
// The comparison walk starts at -|z|, on the opposite side.
std::vector<Obstacle> circular_projection(std::span<const Obstacle> K);

BeurlingResult beurling_check(std::span<const Obstacle> K, Point z, const WalkConfig& cfg);

// ---- Limit candidate ----

struct LimitCandidate {
  std::vector<GridRegion> chain;
  GridRegion candidate;
};

LimitCandidate extract_limit_candidate(std::span<const Domain> seq, Point w, double r0, int levels,
                                       std::size_t min_tail = 2);

}  // namespace hmlab
