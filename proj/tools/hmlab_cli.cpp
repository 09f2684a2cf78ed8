#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hmlab/approximation.hpp"
#include "hmlab/convergence.hpp"
#include "hmlab/domain_io.hpp"
#include "hmlab/errors.hpp"
#include "hmlab/measure.hpp"
#include "hmlab/sampler.hpp"
#include "hmlab/scenarios.hpp"
#include "hmlab/transport.hpp"

namespace fs = std::filesystem;
using namespace hmlab;

namespace {

constexpr int kPass = 0;
constexpr int kError = 1;
constexpr int kVerdictFailure = 2;

Point parse_point(const std::string& text) {
  std::stringstream ss(text);
  Point p;
  char comma = 0;
  if (!(ss >> p.x >> comma >> p.y) || comma != ',') {
    throw InvalidArgument("expected a point as x,y but got '" + text + "'");
  }
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
}

struct WalkFlags {
  std::uint64_t seed = 1;
  std::size_t samples = 20'000;
  double eps_stop = 0.0;  // 0 = scaled default
  std::size_t max_steps = 1'000'000;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "master seed");
    app->add_option("--samples", samples, "walks per measure");
    app->add_option("--eps-stop", eps_stop, "absorption shell thickness");
    app->add_option("--max-steps", max_steps, "step cap per walk");
  }
  WalkConfig config(const Domain& dom) const {
    WalkConfig c = WalkConfig::for_domain(dom, seed, samples);
    if (eps_stop > 0.0) c.eps_stop = eps_stop;
    c.max_steps = max_steps;
    return c;
  }
};

std::vector<Obstacle> obstacles_from_file(const std::string& path) {
  const Json j = read_json_file(path);
  std::vector<Obstacle> out;
  const Json& list = j.is_array() ? j : j.at("obstacles");
  for (const Json& o : list) out.push_back(obstacle_from_json(o));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hmlab: harmonic measure and domain convergence laboratory"};
  app.require_subcommand(1);
  int exit_code = kPass;

  // sample
  auto* sample = app.add_subcommand("sample", "sample the harmonic measure of a domain");
  std::string sample_domain, sample_out, sample_w = "0,0";
  WalkFlags sample_flags;
  sample->add_option("domain", sample_domain, "domain JSON file")->required();
  sample->add_option("--w", sample_w, "basepoint x,y");
  sample->add_option("--out", sample_out, "measure CSV (stdout when omitted)");
  sample_flags.add(sample);
  sample->callback([&] {
    const Domain dom = load_domain(sample_domain);
    const EmpiricalMeasure mu = sample_harmonic_measure(dom, parse_point(sample_w), sample_flags.config(dom));
    if (sample_out.empty()) {
      write_measure_csv(std::cout, mu);
    } else {
      write_measure_csv(sample_out, mu);
    }
    std::cerr << "atoms " << mu.size() << ", timed out " << mu.timed_out << "\n";
  });

  // w1
  auto* w1 = app.add_subcommand("w1", "exact Wasserstein-1 distance between two measure CSVs");
  std::string w1_a, w1_b, w1_plan;
  std::size_t w1_atoms = 0;
  std::uint64_t w1_seed = 1;
  w1->add_option("mu", w1_a, "first measure CSV")->required();
  w1->add_option("nu", w1_b, "second measure CSV")->required();
  w1->add_option("--atoms", w1_atoms, "resample both sides to this many atoms first");
  w1->add_option("--seed", w1_seed, "resampling seed");
  w1->add_option("--plan", w1_plan, "write the optimal plan as CSV");
  w1->callback([&] {
    EmpiricalMeasure a = read_measure_csv(w1_a);
    EmpiricalMeasure b = read_measure_csv(w1_b);
    if (w1_atoms > 0) {
      a = subsample(a, w1_atoms, derive_seed(w1_seed, 1));
      b = subsample(b, w1_atoms, derive_seed(w1_seed, 2));
    }
    const W1Result r = w1_distance(a, b);
    std::printf("%.17g\n", r.cost);
    if (!w1_plan.empty()) {
      std::ostringstream os;
      os.precision(17);
      os << "source_idx,target_idx,mass\n";
      for (const PlanEntry& e : r.plan.pairs) os << e.source << ',' << e.target << ',' << e.mass << '\n';
      write_text(w1_plan, os.str());
    }
  });

  // interior
  auto* interior = app.add_subcommand("interior", "common interior approximation of a domain family");
  std::string int_limit, int_w = "0,0", int_out;
  std::vector<std::string> int_seq;
  double int_eps = 0.1, int_h = 0.0;
  interior->add_option("limit", int_limit, "limit domain JSON")->required();
  interior->add_option("members", int_seq, "family member domain JSON files")->required();
  interior->add_option("--w", int_w, "basepoint x,y");
  interior->add_option("--epsilon", int_eps, "approximation quality");
  interior->add_option("--grid-h", int_h, "cell size (default epsilon/16)");
  interior->add_option("--out-dir", int_out, "write verdict.json and region.csv here");
  interior->callback([&] {
    const Domain limit = load_domain(int_limit);
    std::vector<Domain> seq;
    for (const std::string& p : int_seq) seq.push_back(load_domain(p));
    const double h = int_h > 0.0 ? int_h : int_eps / 16.0;
    const InteriorApproxVerdict v = common_interior_approximation(limit, seq, parse_point(int_w), int_eps, h);
    Json j{{"epsilon", v.epsilon},
           {"N", v.tail_start},
           {"ok", v.ok},
           {"worst_boundary_gap", v.worst_boundary_gap},
           {"inclusion_threshold", v.inclusion_threshold},
           {"finite_prefix", v.finite_prefix},
           {"region", region_header_json(v.region)}};
    std::cout << j.dump(2) << "\n";
    if (!int_out.empty()) {
      write_text(fs::path(int_out) / "verdict.json", j.dump(2) + "\n");
      std::ostringstream os;
      write_region_csv(os, v.region);
      write_text(fs::path(int_out) / "region.csv", os.str());
    }
    if (!v.ok) exit_code = kVerdictFailure;
  });

  // check-convergence
  auto* check = app.add_subcommand("check-convergence", "run every checker on a scenario file");
  std::string check_file, check_out = ".";
  std::uint64_t check_seed = 0;
  std::size_t check_samples = 0, check_atoms = 0;
  double check_eps_stop = 0.0, check_h = 0.0, check_tau = 0.0;
  check->add_option("scenario", check_file, "scenario JSON")->required();
  check->add_option("--out-dir", check_out, "report directory");
  check->add_option("--seed", check_seed, "override the scenario seed");
  check->add_option("--samples", check_samples, "override walks per measure");
  check->add_option("--eps-stop", check_eps_stop, "override the absorption shell");
  check->add_option("--atoms", check_atoms, "override the resample size");
  check->add_option("--grid-h", check_h, "override the grid cell size");
  check->add_option("--tolerance", check_tau, "override the W1 tolerance");
  check->callback([&] {
    Scenario s = load_scenario(check_file);
    if (check_seed) s.seed = s.walk.seed = check_seed;
    if (check_samples) s.walk.n_samples = check_samples;
    if (check_eps_stop > 0.0) s.walk.eps_stop = check_eps_stop;
    if (check_atoms) s.atoms = check_atoms;
    if (check_h > 0.0) s.grid_h = check_h;
    if (check_tau > 0.0) s.tolerance = check_tau;
    const ConvergenceReport rep = run_scenario(s, {Checker::kKernel, Checker::kInterior, Checker::kMeasure});
    write_text(fs::path(check_out) / (s.name + "_report.csv"), rep.csv());
    write_text(fs::path(check_out) / (s.name + "_summary.txt"), rep.summary());
    std::cout << rep.summary();
    if (!rep.all_pass()) exit_code = kVerdictFailure;
  });

  // beurling
  auto* beur = app.add_subcommand("beurling", "Monte Carlo check of the Beurling projection inequality");
  std::string beur_file, beur_z = "0,0";
  WalkFlags beur_flags;
  beur->add_option("obstacles", beur_file, "JSON with an obstacle list (or a domain file)")->required();
  beur->add_option("--z", beur_z, "start point x,y");
  beur_flags.add(beur);
  beur->callback([&] {
    const std::vector<Obstacle> K = obstacles_from_file(beur_file);
    const BeurlingResult r =
        beurling_check(K, parse_point(beur_z), beur_flags.config(Domain::unit_disk()));
    std::printf("lhs %.6f +- %.6f\nrhs %.6f +- %.6f\nholds %s\n", r.lhs, r.lhs_se, r.rhs, r.rhs_se,
                r.holds ? "true" : "false");
    if (!r.holds) exit_code = kVerdictFailure;
  });

  // perfectness
  auto* perf = app.add_subcommand("perfectness", "largest separating annulus ratio of a compact set");
  std::string perf_file;
  double perf_c = 16.0;
  std::size_t perf_samples = 32;
  perf->add_option("obstacles", perf_file, "JSON with an obstacle list (or a domain file)")->required();
  perf->add_option("--c-star", perf_c, "pass threshold");
  perf->add_option("--samples", perf_samples, "probe points per obstacle");
  perf->callback([&] {
    const std::vector<Obstacle> K = obstacles_from_file(perf_file);
    const PerfectnessResult r = estimate_uniform_perfectness(K, perf_samples, dyadic_radii(K), perf_c);
    std::printf("witness %.6g at (%.6g, %.6g) r=%.3g\npass %s\n", r.witness, r.witness_center.x,
                r.witness_center.y, r.witness_radius, r.pass ? "true" : "false");
    if (!r.pass) exit_code = kVerdictFailure;
  });

  // regularity
  auto* reg = app.add_subcommand("regularity", "uniform regularity scan over a scenario family");
  std::string reg_file;
  double reg_delta = 0.2;
  WalkFlags reg_flags;
  reg_flags.samples = 2'000;
  reg->add_option("scenario", reg_file, "scenario JSON")->required();
  reg->add_option("--delta", reg_delta, "neighbourhood radius and mass slack");
  reg_flags.add(reg);
  reg->callback([&] {
    const Scenario s = load_scenario(reg_file);
    WalkConfig c = reg_flags.config(s.limit);
    if (reg_flags.eps_stop <= 0.0) c.eps_stop = s.walk.eps_stop;
    const RegularityEstimate e = estimate_uniform_regularity(s.family, reg_delta, c);
    if (e.epsilon_found) {
      std::printf("epsilon %.6g\n", *e.epsilon_found);
    } else {
      std::printf("epsilon none\n");
    }
    std::printf("min_local_mass %.6f over %zu points\n", e.min_local_mass, e.sample_points);
    if (!e.epsilon_found) exit_code = kVerdictFailure;
  });

  // scenario gen / run
  auto* scen = app.add_subcommand("scenario", "generate or run scenario files");
  scen->require_subcommand(1);
  auto* gen = scen->add_subcommand("gen", "generate (and calibrate) a scenario");
  std::string gen_name, gen_out;
  std::size_t gen_nmax = 6, gen_walks = 20'000;
  std::uint64_t gen_seed = 1;
  bool gen_best = false;
  gen->add_option("name", gen_name, "shrinking-disks | slit-circle | radial-teeth")->required();
  gen->add_option("--n-max", gen_nmax, "largest family index");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--walks", gen_walks, "walks per calibration evaluation");
  gen->add_flag("--best-effort", gen_best, "keep uncertified floor radii instead of failing");
  gen->add_option("--out", gen_out, "scenario JSON path")->required();
  gen->callback([&] {
    CalibrationOptions o;
    o.walks = gen_walks;
    o.best_effort = gen_best;
    const Scenario s = generate_scenario(gen_name, gen_nmax, gen_seed, o);
    save_scenario(gen_out, s);
    for (const CalibrationResult& c : s.calibration) {
      std::printf("n=%zu r_n=%.4g mass=%.5f ci=%.5f target=%.5f %s\n", c.n, c.r_n, c.achieved_mass,
                  c.ci_halfwidth, c.target, c.certified ? "certified" : "UNCERTIFIED");
      if (!c.certified) exit_code = kVerdictFailure;
    }
  });
  auto* run = scen->add_subcommand("run", "run checkers on a scenario file");
  std::string run_file, run_checkers = "kernel,interior,measure", run_out = ".";
  run->add_option("file", run_file, "scenario JSON")->required();
  run->add_option("--checkers", run_checkers, "comma separated subset of kernel,interior,measure");
  run->add_option("--out-dir", run_out, "report directory");
  run->callback([&] {
    const Scenario s = load_scenario(run_file);
    const ConvergenceReport rep = run_scenario(s, parse_checkers(run_checkers));
    write_text(fs::path(run_out) / (s.name + "_report.csv"), rep.csv());
    write_text(fs::path(run_out) / (s.name + "_summary.txt"), rep.summary());
    std::cout << rep.summary();
    if (!rep.all_pass()) exit_code = kVerdictFailure;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return exit_code;
}
