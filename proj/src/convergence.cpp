#include "hmlab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hmlab/errors.hpp"
#include "hmlab/transport.hpp"

namespace hmlab {
namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

std::size_t last_admissible_start(std::size_t len, std::size_t min_tail) {
  if (min_tail == 0) throw InvalidArgument("min_tail must be at least 1");
  if (len < min_tail) return 0;
  return len - min_tail;  // 0-based
}

// Closed cell inside dom: its center is at least half a diagonal from the boundary.
bool cell_inside(double field_value, double h) { return field_value > h * kSqrtHalf; }

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

KernelVerdict check_kernel_convergence(const Domain& limit, std::span<const Domain> seq, Point w,
                                       double h, const KernelOptions& opts) {
  if (seq.empty()) throw InvalidArgument("domain sequence is empty");
  if (opts.ladder.empty()) throw InvalidArgument("kernel ladder is empty");
  if (!limit.contains(w)) throw PointOutsideDomain("basepoint lies outside the limit domain");
  const std::size_t last_start = last_admissible_start(seq.size(), opts.min_tail);

  std::vector<const Domain*> all{&limit};
  for (const Domain& d : seq) all.push_back(&d);
  const Grid grid = Grid::covering(all, h);
  std::vector<std::vector<double>> fields;
  fields.reserve(seq.size());
  for (const Domain& d : seq) fields.push_back(grid.distance_field(d));

  KernelVerdict v;
  v.clause2 = seq.size() >= opts.min_tail;
  for (int m : opts.ladder) {
    if (m <= 0) throw InvalidArgument("kernel ladder entries must be positive");
    GridRegion km;
    try {
      km = interior_region(limit, w, 1.0 / m, h);
    } catch (const EmptyRegion&) {
      v.tail_starts.push_back(1);  // K_m is empty, nothing to absorb
      continue;
    }
    // Smallest N with K_m inside every member from N on. K_m lives on its own lattice.
    std::size_t start = seq.size();
    for (std::size_t n = seq.size(); n-- > 0;) {
      bool inside = true;
      for (const CellIndex& c : km.cells) {
        const Point p = km.center(c);
        if (!seq[n].contains(p) || !cell_inside(seq[n].dist_to_boundary(p), h)) {
          inside = false;
          break;
        }
      }
      if (!inside) break;
      start = n;
    }
    const bool found = start < seq.size() && start <= last_start && seq.size() >= opts.min_tail;
    v.tail_starts.push_back(found ? start + 1 : 0);
    if (!found) v.clause2 = false;
  }

  // Grid kernel: component of w among cells inside each of the last min_tail members.
  std::vector<char> mask(grid.size(), 0);
  if (seq.size() >= opts.min_tail) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      bool in = true;
      for (std::size_t n = last_start; n < seq.size() && in; ++n) in = cell_inside(fields[n][k], h);
      mask[k] = in;
    }
  }
  const std::vector<std::size_t> kernel = grid.flood_fill(mask, grid.cell_of(w));
  v.kernel_cells = kernel.size();
  const std::vector<double> limit_field = grid.distance_field(limit);
  for (std::size_t f : kernel) {
    const CellIndex c = grid.cell(f);
    bool near = false;
    for (int di = -1; di <= 1 && !near; ++di) {
      for (int dj = -1; dj <= 1 && !near; ++dj) {
        const CellIndex nb{c.i + di, c.j + dj};
        near = grid.in_range(nb) && limit_field[grid.flat(nb)] > 0.0;
      }
    }
    if (!near) ++v.cells_outside_limit;
  }
  v.clause3 = !kernel.empty() && v.cells_outside_limit == 0;
  v.ok = v.clause1 && v.clause2 && v.clause3;
  return v;
}

MeasureVerdict check_measure_convergence(const Domain& limit, std::span<const Domain> seq, Point w,
                                         const WalkConfig& cfg, const MeasureOptions& opts) {
  if (seq.empty()) throw InvalidArgument("domain sequence is empty");
  if (opts.replicates == 0) throw InvalidArgument("at least one replicate is required");
  if (!limit.contains(w)) throw PointOutsideDomain("basepoint lies outside the limit domain");

  const bool analytic = opts.analytic_limit && limit.is_plain_disk();
  std::vector<EmpiricalMeasure> references;
  std::vector<double> limit_deficits;
  for (std::size_t k = 0; k < opts.replicates; ++k) {
    if (analytic) {
      references.push_back(discretize_reference(limit, ReferenceKind::kPoissonQuantile, opts.n_atoms, w));
      limit_deficits.push_back(0.0);
    } else {
      const WalkConfig c = cfg.with_seed(derive_seed(cfg.seed, 0x11a17 + k));
      EmpiricalMeasure mu = sample_harmonic_measure(limit, w, c);
      limit_deficits.push_back(1.0 - mu.total_weight);
      references.push_back(subsample(mu, opts.n_atoms, derive_seed(c.seed, 7)));
    }
  }

  MeasureVerdict verdict;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    MeasureRow row;
    row.n = n + 1;
    row.atoms = opts.n_atoms;
    std::vector<double> w1s, deficits, ambient;
    for (std::size_t k = 0; k < opts.replicates; ++k) {
      const WalkConfig c = cfg.with_seed(derive_seed(derive_seed(cfg.seed, n + 1), k));
      const EmpiricalMeasure mu = sample_harmonic_measure(seq[n], w, c);
      const double deficit = 1.0 - mu.total_weight;
      if (std::abs(deficit - limit_deficits[k]) > opts.deficit_tolerance) {
        throw MassMismatch("member " + std::to_string(n + 1) + " loses " + std::to_string(deficit) +
                           " of its mass to timed-out walks against " +
                           std::to_string(limit_deficits[k]) + " for the limit");
      }
      deficits.push_back(deficit);
      ambient.push_back(mass_on_boundary(mu, -1));
      const EmpiricalMeasure a = subsample(mu, opts.n_atoms, derive_seed(c.seed, 7));
      EmpiricalMeasure b = references[k];
      // Both sides carry the member's absorbed mass so that W1 compares shapes.
      for (Atom& atom : b.atoms) atom.weight *= weight_sum(a) / weight_sum(references[k]);
      w1s.push_back(w1_distance(a, b).cost);
    }
    row.w1 = mean(w1s);
    row.stderr_w1 = std_error(w1s);
    row.mass_deficit = mean(deficits);
    row.limit_mass_deficit = mean(limit_deficits);
    row.ambient_mass = mean(ambient);
    verdict.rows.push_back(row);
  }

  verdict.non_increasing = true;
  for (std::size_t i = 1; i < verdict.rows.size(); ++i) {
    const MeasureRow& p = verdict.rows[i - 1];
    const MeasureRow& q = verdict.rows[i];
    const double se = std::hypot(p.stderr_w1, q.stderr_w1);
    if (q.w1 > p.w1 + 2.0 * se) verdict.non_increasing = false;
  }
  verdict.final_below = verdict.rows.back().w1 < opts.tolerance;
  verdict.converging = verdict.non_increasing && verdict.final_below;
  return verdict;
}

namespace {

// Points of the domain at distance about eps/2 from boundary points spread over
// the ambient circle and every obstacle.
std::vector<Point> regularity_probes(const Domain& dom, double eps, std::size_t count) {
  std::vector<Point> probes;
  const Disk& amb = dom.ambient();
  const std::size_t pieces = dom.obstacles().size() + 1;
  const std::size_t per_piece = std::max<std::size_t>(1, count / pieces);
  for (std::size_t k = 0; k < per_piece; ++k) {
    const double th = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(per_piece);
    const Point p = amb.center + (amb.radius - eps / 2.0) * Point{std::cos(th), std::sin(th)};
    if (dom.contains(p)) probes.push_back(p);
  }
  for (const Obstacle& o : dom.obstacles()) {
    for (std::size_t k = 0; k < per_piece; ++k) {
      const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(per_piece);
      const Point q = point_on(o, t);
      for (int d = 0; d < 8; ++d) {
        const double th = 2.0 * std::numbers::pi * d / 8.0 + 0.3;
        const Point p = q + (eps / 2.0) * Point{std::cos(th), std::sin(th)};
        if (dom.contains(p) && dom.boundary_distance(p) < eps) {
          probes.push_back(p);
          break;
        }
      }
    }
  }
  return probes;
}

}  // namespace

RegularityEstimate estimate_uniform_regularity(std::span<const Domain> seq, double delta,
                                               const WalkConfig& cfg, const RegularityOptions& opts) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (seq.empty()) throw InvalidArgument("domain sequence is empty");
  RegularityEstimate est;
  est.delta = delta;
  double eps = delta;
  for (int level = 0; level < opts.ladder_levels; ++level, eps /= 2.0) {
    double worst = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    std::uint64_t stream = 0;
    for (const Domain& dom : seq) {
      for (const Point& z : regularity_probes(dom, eps, opts.points_per_domain)) {
        const WalkConfig c = cfg.with_seed(derive_seed(cfg.seed, stream++));
        const TailEstimate t = first_hit_tail_probability(dom, z, delta, c);
        worst = std::min(worst, (1.0 - t.probability) - 2.0 * t.std_error);
        ++count;
      }
    }
    est.sample_points = count;
    est.min_local_mass = count == 0 ? 0.0 : worst;
    if (count > 0 && worst > 1.0 - delta) {
      est.epsilon_found = eps;
      return est;
    }
  }
  return est;
}

std::vector<double> dyadic_radii(std::span<const Obstacle> K) {
  double diam = 0.0;
  for (const Obstacle& a : K) {
    for (const Obstacle& b : K) {
      diam = std::max(diam, max_distance(b, point_on(a, 0.0)));
    }
    diam = std::max(diam, diameter(a));
  }
  std::vector<double> radii;
  if (!(diam > 0.0)) return radii;
  const int top = static_cast<int>(std::ceil(std::log2(diam)));
  for (int k = top - 48; k <= top; ++k) radii.push_back(std::ldexp(1.0, k));
  return radii;
}

PerfectnessResult estimate_uniform_perfectness(std::span<const Obstacle> K, std::size_t samples_per_obstacle,
                                               std::span<const double> radii, double c_star) {
  if (K.empty()) throw InvalidArgument("perfectness needs a nonempty set");
  if (samples_per_obstacle == 0) throw InvalidArgument("samples_per_obstacle must be positive");
  PerfectnessResult res;
  for (const Obstacle& o : K) {
    for (std::size_t s = 0; s < samples_per_obstacle; ++s) {
      const double t = samples_per_obstacle == 1
                           ? 0.0
                           : static_cast<double>(s) / static_cast<double>(samples_per_obstacle - 1);
      const Point x = point_on(o, t);
      for (double r : radii) {
        ++res.probes;
        // Nearest point of K at distance >= r from x; +inf when K sits inside D(x, r).
        double next = std::numeric_limits<double>::infinity();
        for (const Obstacle& p : K) {
          const double dmax = max_distance(p, x);
          if (dmax < r) continue;
          const double dmin = set_distance(p, x);
          next = std::min(next, dmin >= r ? dmin : r);
        }
        if (!std::isfinite(next)) continue;
        const double ratio = next / r;
        if (ratio > res.witness) {
          res.witness = ratio;
          res.witness_center = x;
          res.witness_radius = r;
        }
      }
    }
  }
  res.pass = res.witness < c_star;
  return res;
}

std::vector<Obstacle> circular_projection(std::span<const Obstacle> K) {
  std::vector<std::pair<double, double>> intervals;
  for (const Obstacle& o : K) {
    const double lo = set_distance(o, {0.0, 0.0});
    const double hi = std::min(1.0, max_distance(o, {0.0, 0.0}));
    if (lo < hi) intervals.emplace_back(lo, hi);
  }
  std::sort(intervals.begin(), intervals.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }
  std::vector<Obstacle> out;
  for (const auto& [lo, hi] : merged) out.push_back(Segment{{lo, 0.0}, {hi, 0.0}});
  return out;
}

BeurlingResult beurling_check(std::span<const Obstacle> K, Point z, const WalkConfig& cfg) {
  if (K.empty()) throw InvalidArgument("Beurling check needs at least one obstacle");
  for (const Obstacle& o : K) {
    if (!(set_distance(o, {0.0, 0.0}) > 0.0)) {
      throw InvalidArgument("obstacles must stay away from the origin");
    }
  }
  const Domain dom(Disk{{0.0, 0.0}, 1.0}, std::vector<Obstacle>(K.begin(), K.end()), "beurling");
  if (!dom.contains(z)) throw PointOutsideDomain("start point must lie in the slit disk");

  BeurlingResult res;
  res.projection = circular_projection(K);
  const Domain proj(Disk{{0.0, 0.0}, 1.0}, res.projection, "beurling-projection");
  const Point zs{-norm(z), 0.0};
  if (!proj.contains(zs)) {
    throw InvalidArgument("-|z| lies on the projected set; choose |z| outside the radial hull");
  }

  auto hit_fraction = [](const EmpiricalMeasure& mu, double* se) {
    const double p = mass_off_ambient(mu);
    const double n = static_cast<double>(mu.n_samples);
    *se = std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
    return p;
  };
  res.lhs = hit_fraction(sample_harmonic_measure(dom, z, cfg.with_seed(derive_seed(cfg.seed, 1))), &res.lhs_se);
  res.rhs = hit_fraction(sample_harmonic_measure(proj, zs, cfg.with_seed(derive_seed(cfg.seed, 2))), &res.rhs_se);
  res.holds = res.lhs >= res.rhs - 2.0 * std::hypot(res.lhs_se, res.rhs_se);
  return res;
}

LimitCandidate extract_limit_candidate(std::span<const Domain> seq, Point w, double r0, int levels,
                                       std::size_t min_tail) {
  if (seq.empty()) throw InvalidArgument("domain sequence is empty");
  if (!(r0 > 0.0)) throw InvalidArgument("r0 must be positive");
  if (levels <= 0) throw InvalidArgument("levels must be positive");
  const std::size_t last_start = last_admissible_start(seq.size(), min_tail);
  if (seq.size() < min_tail) throw InvalidArgument("sequence shorter than the tail length");
  for (std::size_t n = last_start; n < seq.size(); ++n) {
    if (!seq[n].contains(w) || !(seq[n].dist_to_boundary(w) > 2.0 * r0)) {
      throw InvalidArgument("basepoint must be farther than 2 r0 from the boundary of the tail");
    }
  }
  std::vector<const Domain*> all;
  for (const Domain& d : seq) all.push_back(&d);

  LimitCandidate out;
  for (int l = 0; l < levels; ++l) {
    const double h = std::ldexp(r0, -l - 2);
    const double rho = std::ldexp(r0, -l - 1);
    const Grid grid = Grid::covering(all, h);
    std::vector<char> mask(grid.size(), 1);
    for (std::size_t n = last_start; n < seq.size(); ++n) {
      const std::vector<double> field = grid.distance_field(seq[n]);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(field[k] >= rho + h * kSqrtHalf)) mask[k] = 0;
      }
    }
    const CellIndex start = grid.cell_of(w);
    const std::vector<std::size_t> comp = grid.flood_fill(mask, start);
    if (comp.empty()) throw EmptyRegion("no admissible cell around the basepoint");
    out.chain.push_back(make_region(grid, comp, start));
  }
  out.candidate = out.chain.back();
  return out;
}

}  // namespace hmlab
