#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hmlab/convergence.hpp"
#include "hmlab/domain_io.hpp"
#include "hmlab/sampler.hpp"

namespace hmlab {

struct CalibrationResult {
  std::size_t n = 0;
  double r_n = 0.0;
  double achieved_mass = 0.0;
  double target = 0.0;
  double ci_halfwidth = 0.0;
  bool certified = false;  // achieved_mass + ci_halfwidth < target
};

struct CalibrationOptions {
  int iterations = 20;
  std::size_t walks = 20'000;
  double r_max = 0.1;
  double r_min = 1e-12;
  // Keep the floor radius when the target is unreachable instead of throwing.
  bool best_effort = false;
};

struct Scenario {
  std::string name;
  std::string generator;
  Json params = Json::object();
  Domain limit = Domain::unit_disk();
  std::optional<Domain> interior_limit;  // limit used by the interior and kernel checkers when it differs
  std::vector<Domain> family;
  std::vector<std::size_t> indices;  // family index n of each member
  std::vector<Point> basepoints;
  std::vector<double> eps_ladder;
  double tolerance = 0.05;
  std::uint64_t seed = 1;
  WalkConfig walk;
  std::size_t atoms = 2048;
  std::size_t replicates = 5;
  double grid_h = 0.01;
  std::vector<int> kernel_ladder{1, 2, 3};
  std::size_t min_tail = 2;
  std::vector<CalibrationResult> calibration;
};

// Upper Wilson score bound at 95%: returns (p_hat, upper - p_hat).
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t trials);

Domain shrinking_disk(std::size_t n);
Domain slit_circle_domain(double r_n);
Domain radial_teeth_domain(std::size_t n, double r_n);

Scenario gen_shrinking_disks(std::size_t n_max, std::uint64_t seed = 1);
Scenario gen_example_slit_circle(std::size_t n_max, std::uint64_t seed = 1,
                                 const CalibrationOptions& opts = {});
Scenario gen_example_radial_teeth(std::size_t n_max, std::uint64_t seed = 1,
                                  const CalibrationOptions& opts = {});
Scenario generate_scenario(const std::string& name, std::size_t n_max, std::uint64_t seed,
                           const CalibrationOptions& opts = {});

// Calibration of a single member; exposed for tests.
CalibrationResult calibrate_slit_circle(std::size_t n, std::uint64_t seed, const WalkConfig& walk,
                                        const CalibrationOptions& opts);
CalibrationResult calibrate_radial_teeth(std::size_t n, std::uint64_t seed, const WalkConfig& walk,
                                         const CalibrationOptions& opts);
std::vector<Point> radial_teeth_probes(std::size_t n);

Json scenario_to_json(const Scenario& s);
// Rejects certified calibrations whose certificate does not hold.
Scenario scenario_from_json(const Json& j);
Scenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& s);

enum class Checker { kKernel, kInterior, kMeasure };
std::set<Checker> parse_checkers(const std::string& list);

struct ReportRow {
  std::size_t basepoint = 0;
  std::string checker;
  std::string quantity;
  std::size_t n = 0;
  double key = 0.0;  // epsilon or ladder rung when relevant
  double value = 0.0;
  double stderr_value = 0.0;
  std::string status;
};

struct CheckerVerdict {
  std::size_t basepoint = 0;
  std::string checker;
  bool pass = false;
  std::string detail;
};

struct ConvergenceReport {
  std::string scenario;
  std::vector<ReportRow> rows;
  std::vector<CheckerVerdict> verdicts;
  bool all_pass() const;
  std::string csv() const;
  std::string summary() const;
};

ConvergenceReport run_scenario(const Scenario& s, const std::set<Checker>& which);

}  // namespace hmlab
