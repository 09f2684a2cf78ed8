#include "hmlab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "hmlab/errors.hpp"

namespace hmlab {
namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// Walk settings for scenarios whose obstacles shrink far below the default shell.
WalkConfig fine_walk(std::uint64_t seed) {
  WalkConfig w;
  w.eps_stop = 1e-14;
  w.seed = seed;
  w.n_samples = 20'000;
  return w;
}

std::size_t hits_on_obstacles(const EmpiricalMeasure& mu) {
  std::size_t k = 0;
  for (const Atom& a : mu.atoms) k += a.boundary_id >= 0 ? 1 : 0;
  return k + mu.timed_out;  // timed-out walks count against the certificate
}

// Largest r in [r_min, r_max] (log bisection) whose Wilson bound stays below target.
template <typename Estimate>
CalibrationResult bisect_radius(std::size_t n, double target, const CalibrationOptions& opts,
                                Estimate&& estimate) {
  CalibrationResult res;
  res.n = n;
  res.target = target;
  auto evaluate = [&](double r) {
    const auto [p, half] = estimate(r);
    CalibrationResult c = res;
    c.r_n = r;
    c.achieved_mass = p;
    c.ci_halfwidth = half;
    c.certified = p + half < target;
    return c;
  };
  CalibrationResult hi = evaluate(opts.r_max);
  if (hi.certified) return hi;
  CalibrationResult lo = evaluate(opts.r_min);
  if (!lo.certified) {
    if (opts.best_effort) return lo;
    throw CalibrationFailed("n = " + std::to_string(n) + ": mass bound " +
                            fmt(lo.achieved_mass + lo.ci_halfwidth) + " at the floor radius " +
                            fmt(opts.r_min) + " misses the target " + fmt(target));
  }
  double a = std::log(opts.r_min);
  double b = std::log(opts.r_max);
  for (int it = 0; it < opts.iterations; ++it) {
    const double mid = 0.5 * (a + b);
    CalibrationResult c = evaluate(std::exp(mid));
    if (c.certified) {
      a = mid;
      lo = c;
    } else {
      b = mid;
    }
  }
  return lo;
}

Json walk_to_json(const WalkConfig& w) {
  return Json{{"eps_stop", w.eps_stop}, {"max_steps", w.max_steps}, {"n_samples", w.n_samples}};
}

}  // namespace

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t trials) {
  if (trials == 0) throw InvalidArgument("Wilson interval needs at least one trial");
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {p, center + half - p};
}

Domain shrinking_disk(std::size_t n) {
  if (n < 2) throw InvalidArgument("shrinking disks start at n = 2");
  return Domain::disk({0.0, 0.0}, 1.0 - 1.0 / static_cast<double>(n), "disk-n" + std::to_string(n));
}

Domain slit_circle_domain(double r_n) {
  if (!(r_n > 0.0 && r_n < 0.5)) throw InvalidArgument("arc radius must lie in (0, 1/2)");
  return Domain(Disk{{0.0, 0.0}, 1.0}, {Arc{{0.5, 0.0}, r_n, -kPi + r_n, kPi - r_n}}, "slit-circle");
}

Domain radial_teeth_domain(std::size_t n, double r_n) {
  if (n < 1 || n > 8) throw InvalidArgument("radial teeth need 1 <= n <= 8");
  const double step = std::ldexp(1.0, -static_cast<int>(n));
  if (!(r_n > 0.0 && r_n < step)) throw InvalidArgument("tooth half-length must lie in (0, 2^-n)");
  const std::size_t count = std::size_t{1} << n;
  std::vector<Obstacle> teeth;
  teeth.reserve(count);
  const double mid = 0.5 + step;
  for (std::size_t k = 1; k <= count; ++k) {
    const double phi = 2.0 * kPi * static_cast<double>(k) * step;
    const Point e{std::cos(phi), std::sin(phi)};
    teeth.push_back(Segment{(mid - r_n) * e, (mid + r_n) * e});
  }
  return Domain(Disk{{0.0, 0.0}, 1.0}, std::move(teeth), "radial-teeth-n" + std::to_string(n));
}

Scenario gen_shrinking_disks(std::size_t n_max, std::uint64_t seed) {
  if (n_max < 2) throw InvalidArgument("n_max must be at least 2");
  Scenario s;
  s.name = "shrinking-disks";
  s.generator = "shrinking_disks";
  s.params = {{"n_max", n_max}};
  s.limit = Domain::unit_disk();
  for (std::size_t n = 2; n <= n_max; ++n) {
    s.family.push_back(shrinking_disk(n));
    s.indices.push_back(n);
  }
  s.basepoints = {{0.0, 0.0}, {0.3, 0.0}};
  s.eps_ladder = {0.3, 0.15};
  s.tolerance = 0.05;
  s.seed = seed;
  s.walk = WalkConfig::for_domain(s.limit, seed, 20'000);
  s.grid_h = 0.15 / 16.0;
  return s;
}

CalibrationResult calibrate_slit_circle(std::size_t n, std::uint64_t seed, const WalkConfig& walk,
                                        const CalibrationOptions& opts) {
  const double target = std::ldexp(1.0, -static_cast<int>(n));
  const WalkConfig cfg = walk.with_seed(derive_seed(seed, n)).with_samples(opts.walks);
  return bisect_radius(n, target, opts, [&](double r) {
    const EmpiricalMeasure mu = sample_harmonic_measure(slit_circle_domain(r), {0.0, 0.0}, cfg);
    return wilson_interval(hits_on_obstacles(mu), cfg.n_samples);
  });
}

Scenario gen_example_slit_circle(std::size_t n_max, std::uint64_t seed, const CalibrationOptions& opts) {
  if (n_max < 2) throw InvalidArgument("n_max must be at least 2");
  Scenario s;
  s.name = "slit-circle";
  s.generator = "example_slit_circle";
  s.params = {{"n_max", n_max}, {"best_effort", opts.best_effort}, {"r_min", opts.r_min}};
  s.limit = Domain::unit_disk();
  s.seed = seed;
  s.walk = fine_walk(seed);
  s.basepoints = {{0.0, 0.0}, {0.5, 0.0}};
  for (std::size_t n = 2; n <= n_max; ++n) {
    const CalibrationResult c = calibrate_slit_circle(n, seed, s.walk, opts);
    s.calibration.push_back(c);
    s.family.push_back(slit_circle_domain(c.r_n));
    s.indices.push_back(n);
  }
  for (const Domain& d : s.family) {
    for (const Point& w : s.basepoints) {
      if (!d.contains(w)) throw InvalidArgument("basepoint outside a generated member");
    }
  }
  s.eps_ladder = {0.3, 0.15};
  s.tolerance = 0.05;
  s.grid_h = 0.15 / 16.0;
  return s;
}

std::vector<Point> radial_teeth_probes(std::size_t n) {
  const double step = std::ldexp(1.0, -static_cast<int>(n));
  const double inner = 0.5 + step / 2.0;
  const double outer = 0.5 + 2.0 * step;
  std::vector<Point> probes{{0.0, 0.0}};
  // Along a tooth and halfway between two teeth.
  for (double phi : {0.0, kPi * step}) {
    const Point e{std::cos(phi), std::sin(phi)};
    for (double rad : {0.25, inner, outer}) {
      if (rad < 1.0) probes.push_back(rad * e);
    }
  }
  return probes;
}

CalibrationResult calibrate_radial_teeth(std::size_t n, std::uint64_t seed, const WalkConfig& walk,
                                         const CalibrationOptions& opts) {
  const double target = std::ldexp(1.0, -static_cast<int>(n));
  CalibrationOptions o = opts;
  o.r_max = std::min(opts.r_max, std::ldexp(1.0, -static_cast<int>(n) - 1));
  const WalkConfig cfg = walk.with_seed(derive_seed(seed, n)).with_samples(opts.walks);
  const std::vector<Point> probes = radial_teeth_probes(n);
  return bisect_radius(n, target, o, [&](double r) {
    const Domain dom = radial_teeth_domain(n, r);
    std::pair<double, double> worst{0.0, 0.0};
    std::uint64_t k = 0;
    for (const Point& z : probes) {
      const EmpiricalMeasure mu = sample_harmonic_measure(dom, z, cfg.with_seed(derive_seed(cfg.seed, k++)));
      const auto w = wilson_interval(hits_on_obstacles(mu), cfg.n_samples);
      if (w.first + w.second > worst.first + worst.second) worst = w;
    }
    return worst;
  });
}

Scenario gen_example_radial_teeth(std::size_t n_max, std::uint64_t seed, const CalibrationOptions& opts) {
  if (n_max < 2 || n_max > 8) throw InvalidArgument("n_max must lie in [2, 8]");
  Scenario s;
  s.name = "radial-teeth";
  s.generator = "example_radial_teeth";
  s.params = {{"n_max", n_max}, {"best_effort", opts.best_effort}, {"r_min", opts.r_min}};
  s.limit = Domain::unit_disk();
  s.interior_limit = Domain::disk({0.0, 0.0}, 0.5, "half-disk");
  s.seed = seed;
  s.walk = fine_walk(seed);
  s.basepoints = {{0.0, 0.0}, {0.25, 0.0}};
  for (std::size_t n = 2; n <= n_max; ++n) {
    const CalibrationResult c = calibrate_radial_teeth(n, seed, s.walk, opts);
    s.calibration.push_back(c);
    s.family.push_back(radial_teeth_domain(n, c.r_n));
    s.indices.push_back(n);
  }
  s.eps_ladder = {0.1, 0.05};
  s.tolerance = 0.05;
  s.grid_h = 0.05 / 16.0;
  return s;
}

Scenario generate_scenario(const std::string& name, std::size_t n_max, std::uint64_t seed,
                           const CalibrationOptions& opts) {
  if (name == "shrinking-disks") return gen_shrinking_disks(n_max, seed);
  if (name == "slit-circle") return gen_example_slit_circle(n_max, seed, opts);
  if (name == "radial-teeth") return gen_example_radial_teeth(n_max, seed, opts);
  throw InvalidArgument("unknown scenario generator '" + name +
                        "' (expected shrinking-disks, slit-circle or radial-teeth)");
}

Json scenario_to_json(const Scenario& s) {
  Json j;
  j["name"] = s.name;
  j["generator"] = s.generator;
  j["params"] = s.params;
  j["seed"] = s.seed;
  j["limit"] = domain_to_json(s.limit);
  if (s.interior_limit) j["interior_limit"] = domain_to_json(*s.interior_limit);
  Json fam = Json::array();
  for (std::size_t i = 0; i < s.family.size(); ++i) {
    fam.push_back({{"n", s.indices.at(i)}, {"domain", domain_to_json(s.family[i])}});
  }
  j["family"] = fam;
  Json bps = Json::array();
  for (const Point& p : s.basepoints) bps.push_back(point_to_json(p));
  j["basepoints"] = bps;
  j["epsilon_ladder"] = s.eps_ladder;
  j["tolerance"] = s.tolerance;
  j["walk"] = walk_to_json(s.walk);
  j["atoms"] = s.atoms;
  j["replicates"] = s.replicates;
  j["grid_h"] = s.grid_h;
  j["kernel_ladder"] = s.kernel_ladder;
  j["min_tail"] = s.min_tail;
  Json cal = Json::array();
  for (const CalibrationResult& c : s.calibration) {
    cal.push_back({{"n", c.n},
                   {"r_n", c.r_n},
                   {"achieved_mass", c.achieved_mass},
                   {"target", c.target},
                   {"ci_halfwidth", c.ci_halfwidth},
                   {"certified", c.certified}});
  }
  j["calibration"] = cal;
  return j;
}

Scenario scenario_from_json(const Json& j) {
  try {
    Scenario s;
    s.name = j.at("name").get<std::string>();
    s.generator = j.value("generator", std::string("explicit"));
    s.params = j.value("params", Json::object());
    s.seed = j.value("seed", std::uint64_t{1});
    s.limit = domain_from_json(j.at("limit"));
    if (j.contains("interior_limit")) s.interior_limit = domain_from_json(j.at("interior_limit"));
    for (const Json& m : j.at("family")) {
      s.family.push_back(domain_from_json(m.at("domain")));
      s.indices.push_back(m.value("n", s.family.size()));
    }
    if (s.family.empty()) throw InvalidArgument("scenario family is empty");
    for (const Json& p : j.at("basepoints")) s.basepoints.push_back(point_from_json(p));
    s.eps_ladder = j.value("epsilon_ladder", std::vector<double>{});
    s.tolerance = j.value("tolerance", 0.05);
    s.walk = WalkConfig::for_domain(s.limit, s.seed, 20'000);
    if (j.contains("walk")) {
      const Json& w = j.at("walk");
      s.walk.eps_stop = w.value("eps_stop", s.walk.eps_stop);
      s.walk.max_steps = w.value("max_steps", s.walk.max_steps);
      s.walk.n_samples = w.value("n_samples", s.walk.n_samples);
    }
    s.atoms = j.value("atoms", std::size_t{2048});
    s.replicates = j.value("replicates", std::size_t{5});
    s.grid_h = j.value("grid_h", 0.01);
    s.kernel_ladder = j.value("kernel_ladder", std::vector<int>{1, 2, 3});
    s.min_tail = j.value("min_tail", std::size_t{2});
    if (j.contains("calibration")) {
      for (const Json& c : j.at("calibration")) {
        CalibrationResult r;
        r.n = c.at("n").get<std::size_t>();
        r.r_n = c.at("r_n").get<double>();
        r.achieved_mass = c.at("achieved_mass").get<double>();
        r.target = c.at("target").get<double>();
        r.ci_halfwidth = c.at("ci_halfwidth").get<double>();
        r.certified = c.value("certified", true);
        if (r.certified && !(r.achieved_mass + r.ci_halfwidth < r.target)) {
          throw InvalidArgument("calibration certificate for n = " + std::to_string(r.n) +
                                " does not hold");
        }
        s.calibration.push_back(r);
      }
    }
    for (const Point& w : s.basepoints) {
      if (!s.limit.contains(w)) throw InvalidArgument("basepoint outside the limit domain");
      for (const Domain& d : s.family) {
        if (!d.contains(w)) throw InvalidArgument("basepoint outside member '" + d.label() + "'");
      }
    }
    s.walk.seed = s.seed;
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) { return scenario_from_json(read_json_file(path)); }

void save_scenario(const std::string& path, const Scenario& s) { write_json_file(path, scenario_to_json(s)); }

std::set<Checker> parse_checkers(const std::string& list) {
  std::set<Checker> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "kernel") {
      out.insert(Checker::kKernel);
    } else if (item == "interior") {
      out.insert(Checker::kInterior);
    } else if (item == "measure") {
      out.insert(Checker::kMeasure);
    } else if (!item.empty()) {
      throw InvalidArgument("unknown checker '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("no checkers selected");
  return out;
}

bool ConvergenceReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const CheckerVerdict& v) { return v.pass; });
}

std::string ConvergenceReport::csv() const {
  std::string out = "basepoint,checker,quantity,n,key,value,stderr,status\n";
  for (const ReportRow& r : rows) {
    out += std::to_string(r.basepoint) + ',' + r.checker + ',' + r.quantity + ',' + std::to_string(r.n) +
           ',' + fmt(r.key) + ',' + fmt(r.value) + ',' + fmt(r.stderr_value) + ',' + r.status + '\n';
  }
  return out;
}

std::string ConvergenceReport::summary() const {
  std::string out = "scenario " + scenario + "\n";
  for (const CheckerVerdict& v : verdicts) {
    out += "  basepoint " + std::to_string(v.basepoint) + "  " + v.checker + ": " +
           (v.pass ? "PASS" : "FAIL") + "  " + v.detail + "\n";
  }
  out += std::string("overall: ") + (all_pass() ? "PASS" : "FAIL") + "\n";
  return out;
}

ConvergenceReport run_scenario(const Scenario& s, const std::set<Checker>& which) {
  ConvergenceReport rep;
  rep.scenario = s.name;
  for (std::size_t b = 0; b < s.basepoints.size(); ++b) {
    const Point w = s.basepoints[b];
    if (which.count(Checker::kKernel)) {
      CheckerVerdict v{b, "kernel", false, {}};
      try {
        const Domain& lim = s.interior_limit ? *s.interior_limit : s.limit;
        const KernelVerdict k =
            check_kernel_convergence(lim, s.family, w, s.grid_h, {s.kernel_ladder, s.min_tail});
        for (std::size_t i = 0; i < k.tail_starts.size(); ++i) {
          const std::size_t t = k.tail_starts[i];
          rep.rows.push_back({b, "kernel", "tail_start", t == 0 ? 0 : s.indices.at(t - 1),
                              static_cast<double>(s.kernel_ladder[i]), static_cast<double>(t), 0.0,
                              t == 0 ? "fail" : "ok"});
        }
        rep.rows.push_back({b, "kernel", "clause2", 0, 0.0, k.clause2 ? 1.0 : 0.0, 0.0, k.clause2 ? "ok" : "fail"});
        rep.rows.push_back({b, "kernel", "cells_outside_limit", 0, 0.0,
                            static_cast<double>(k.cells_outside_limit), 0.0, k.clause3 ? "ok" : "fail"});
        v.pass = k.ok;
        v.detail = std::string("clause2=") + (k.clause2 ? "true" : "false") +
                   " clause3=" + (k.clause3 ? "true" : "false") + " (finite prefix)";
      } catch (const Error& e) {
        rep.rows.push_back({b, "kernel", "error", 0, 0.0, 0.0, 0.0, "error"});
        v.detail = std::string("error: ") + e.what();
      }
      rep.rows.push_back({b, "kernel", "verdict", 0, 0.0, v.pass ? 1.0 : 0.0, 0.0, v.pass ? "pass" : "fail"});
      rep.verdicts.push_back(v);
    }
    if (which.count(Checker::kInterior)) {
      CheckerVerdict v{b, "interior", true, {}};
      const Domain& lim = s.interior_limit ? *s.interior_limit : s.limit;
      for (double eps : s.eps_ladder) {
        try {
          const InteriorApproxVerdict iv =
              common_interior_approximation(lim, s.family, w, eps, std::min(s.grid_h, eps / 4.0));
          const std::size_t n = iv.tail_start == 0 ? 0 : s.indices.at(iv.tail_start - 1);
          rep.rows.push_back({b, "interior", "worst_boundary_gap", n, eps, iv.worst_boundary_gap, 0.0,
                              iv.ok ? "ok" : "fail"});
          v.pass = v.pass && iv.ok;
          v.detail += "eps=" + short_fmt(eps) + (iv.ok ? " ok N=" + std::to_string(n) : " not ok") + "; ";
        } catch (const Error& e) {
          rep.rows.push_back({b, "interior", "error", 0, eps, 0.0, 0.0, "error"});
          v.pass = false;
          v.detail += "eps=" + short_fmt(eps) + " error: " + e.what() + "; ";
        }
      }
      rep.rows.push_back({b, "interior", "verdict", 0, 0.0, v.pass ? 1.0 : 0.0, 0.0, v.pass ? "pass" : "fail"});
      rep.verdicts.push_back(v);
    }
    if (which.count(Checker::kMeasure)) {
      CheckerVerdict v{b, "measure", false, {}};
      try {
        MeasureOptions mo;
        mo.n_atoms = s.atoms;
        mo.replicates = s.replicates;
        mo.tolerance = s.tolerance;
        const MeasureVerdict mv = check_measure_convergence(s.limit, s.family, w, s.walk, mo);
        for (const MeasureRow& r : mv.rows) {
          const std::size_t n = s.indices.at(r.n - 1);
          rep.rows.push_back({b, "measure", "w1", n, static_cast<double>(r.atoms), r.w1, r.stderr_w1, "-"});
          rep.rows.push_back({b, "measure", "ambient_mass", n, 0.0, r.ambient_mass, 0.0, "-"});
          rep.rows.push_back({b, "measure", "mass_deficit", n, 0.0, r.mass_deficit, 0.0, "-"});
        }
        v.pass = mv.converging;
        rep.rows.push_back({b, "measure", "non_increasing", 0, 0.0, mv.non_increasing ? 1.0 : 0.0, 0.0,
                            mv.non_increasing ? "ok" : "fail"});
        rep.rows.push_back({b, "measure", "final_below", 0, s.tolerance, mv.final_below ? 1.0 : 0.0, 0.0,
                            mv.final_below ? "ok" : "fail"});
        v.detail = "final W1=" + short_fmt(mv.rows.back().w1) + " +- " + short_fmt(mv.rows.back().stderr_w1) +
                   " (tau " + short_fmt(s.tolerance) + "), non-increasing=" +
                   (mv.non_increasing ? "true" : "false");
      } catch (const Error& e) {
        rep.rows.push_back({b, "measure", "error", 0, 0.0, 0.0, 0.0, "error"});
        v.detail = std::string("error: ") + e.what();
      }
      rep.rows.push_back({b, "measure", "verdict", 0, 0.0, v.pass ? 1.0 : 0.0, 0.0, v.pass ? "pass" : "fail"});
      rep.verdicts.push_back(v);
    }
  }
  return rep;
}

}  // namespace hmlab
