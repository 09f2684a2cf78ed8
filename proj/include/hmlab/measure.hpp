#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hmlab/geometry.hpp"

namespace hmlab {

struct Atom {
  Point point;
  double weight = 0.0;
  int boundary_id = -1;  // which boundary piece absorbed the walk; not serialized
};

// Finitely supported measure. When produced by the sampler, total_weight is
// the absorbed fraction and the rest of the unit mass belongs to walks that
// hit max_steps.
struct EmpiricalMeasure {
  std::vector<Atom> atoms;
  double total_weight = 0.0;

  std::uint64_t seed = 0;
  double eps_stop = 0.0;
  std::size_t n_samples = 0;
  std::size_t timed_out = 0;
  bool degenerate_start = false;

  std::size_t size() const { return atoms.size(); }
  double timed_out_fraction() const {
    return n_samples == 0 ? 0.0 : static_cast<double>(timed_out) / static_cast<double>(n_samples);
  }
};

EmpiricalMeasure point_mass(Point p, double mass = 1.0);
double weight_sum(const EmpiricalMeasure& mu);
// Mass of atoms absorbed by a given boundary piece (-1 = ambient circle).
double mass_on_boundary(const EmpiricalMeasure& mu, int boundary_id);
double mass_off_ambient(const EmpiricalMeasure& mu);
bool uniform_weights(const EmpiricalMeasure& mu, double rel_tol = 1e-12);

// CSV: '#'-prefixed header lines (total_weight, seed, eps_stop, n_samples),
// then a column row "x,y,weight", then one row per atom.
void write_measure_csv(std::ostream& os, const EmpiricalMeasure& mu);
void write_measure_csv(const std::string& path, const EmpiricalMeasure& mu);
EmpiricalMeasure read_measure_csv(std::istream& is);
EmpiricalMeasure read_measure_csv(const std::string& path);

}  // namespace hmlab
