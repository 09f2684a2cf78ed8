#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hmlab/geometry.hpp"
#include "hmlab/measure.hpp"

namespace hmlab {

struct PlanEntry {
  std::size_t source = 0;
  std::size_t target = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<PlanEntry> pairs;
  double cost = 0.0;
};

struct W1Options {
  std::size_t size_cap = 4096;
  double mass_tolerance = 1e-6;
};

struct W1Result {
  double cost = 0.0;
  TransportPlan plan;
};

// Exact Wasserstein-1 distance between two finitely supported measures of
// equal mass. Mass differences up to mass_tolerance are renormalized onto mu's
// mass; larger ones raise MassMismatch. Equal-count uniform-weight inputs go
// through the assignment solver, everything else through network simplex.
W1Result w1_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                     const W1Options& opts = {});

// Max marginal violation of a plan against the two measures (nu rescaled to mu's mass).
double plan_marginal_error(const TransportPlan& plan, const EmpiricalMeasure& mu,
                           const EmpiricalMeasure& nu);
double plan_cost(const TransportPlan& plan, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Dense linear assignment (Jonker-Volgenant shortest augmenting path).
// cost is n x n row-major; returns column assigned to each row.
struct Assignment {
  std::vector<int> row_to_col;
  double cost = 0.0;
};
Assignment solve_assignment(std::span<const double> cost, std::size_t n);

// Row-major Euclidean cost matrix, built with the SIMD distance kernel.
std::vector<double> euclidean_cost_matrix(std::span<const Point> rows, std::span<const Point> cols);

// Primal network simplex on the complete bipartite transportation problem.
// Supplies and demands must balance.
TransportPlan solve_transport_simplex(std::span<const Point> sources, std::span<const double> supply,
                                      std::span<const Point> sinks, std::span<const double> demand);

enum class ReferenceKind { kUniformCircle, kAnalyticPoisson, kPoissonQuantile };

// Harmonic measure of a plain disk discretized at n equally spaced angles
// starting at angle 0: uniform weights, or Poisson-kernel weights seen from w.
// kPoissonQuantile instead places n equal-weight atoms at the midpoint
// quantiles of the harmonic measure from w.
EmpiricalMeasure discretize_reference(const Domain& dom, ReferenceKind kind, std::size_t n_atoms,
                                      Point w = {0.0, 0.0});

// Resamples mu to n equal-weight atoms, preserving total mass. Atoms are put
// in Hilbert-curve order and picked by systematic resampling with a seeded
// offset, so each output atom stands for a spatially compact 1/n share of mass.
EmpiricalMeasure subsample(const EmpiricalMeasure& mu, std::size_t n, std::uint64_t seed);

// Resample both measures to n atoms and match them.
double resampled_w1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t n_atoms,
                    std::uint64_t seed, const W1Options& opts = {});

}  // namespace hmlab
