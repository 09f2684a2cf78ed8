#include "hmlab/sampler.hpp"

#include <algorithm>
#include <numbers>
#include <optional>
#include <thread>
#include <vector>

#include "hmlab/errors.hpp"

namespace hmlab {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

WalkConfig WalkConfig::for_domain(const Domain& dom, std::uint64_t seed, std::size_t n_samples) {
  WalkConfig cfg;
  cfg.eps_stop = 1e-6 * dom.ambient().radius;
  cfg.seed = seed;
  cfg.n_samples = n_samples;
  return cfg;
}

void WalkConfig::validate(const Domain& dom) const {
  if (!(eps_stop > 0.0) || !(eps_stop < dom.ambient().radius)) {
    throw InvalidArgument("eps_stop must lie in (0, ambient radius)");
  }
  if (max_steps < 1000) throw InvalidArgument("max_steps must be at least 1000");
  if (n_samples == 0) throw InvalidArgument("n_samples must be positive");
}

WalkOutcome walk_on_spheres(const Domain& dom, Point z0, double eps_stop, std::size_t max_steps,
                            WalkRng& rng) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  WalkOutcome out;
  Point z = z0;
  double d = dom.boundary_distance(z);
  for (; out.steps < max_steps; ++out.steps) {
    if (d < eps_stop) break;
    const double theta = kTwoPi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    z = {z.x + d * std::cos(theta), z.y + d * std::sin(theta)};
    d = dom.boundary_distance(z);
  }
  if (d < eps_stop) {
    out.absorbed = true;
    out.hit = dom.nearest_boundary_hit(z);
  }
  return out;
}

EmpiricalMeasure sample_harmonic_measure(const Domain& dom, Point w, const WalkConfig& cfg) {
  cfg.validate(dom);
  const double d0 = dom.dist_to_boundary(w);

  EmpiricalMeasure mu;
  mu.seed = cfg.seed;
  mu.eps_stop = cfg.eps_stop;
  mu.n_samples = cfg.n_samples;
  if (d0 < cfg.eps_stop) {
    const BoundaryHit hit = dom.nearest_boundary_hit(w);
    mu.atoms.push_back({hit.point, 1.0, hit.boundary_id});
    mu.total_weight = 1.0;
    mu.degenerate_start = true;
    return mu;
  }

  const std::size_t n = cfg.n_samples;
  std::vector<std::optional<BoundaryHit>> hits(n);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      WalkRng rng(derive_seed(cfg.seed, i));
      const WalkOutcome o = walk_on_spheres(dom, w, cfg.eps_stop, cfg.max_steps, rng);
      if (o.absorbed) hits[i] = o.hit;
    }
  };
  const unsigned workers = worker_count(cfg.threads, n);
  if (workers == 1) {
    run_range(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
      const std::size_t begin = std::min(n, t * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      pool.emplace_back(run_range, begin, end);
    }
  }

  const double weight = 1.0 / static_cast<double>(n);
  mu.atoms.reserve(n);
  for (const auto& h : hits) {
    if (h) {
      mu.atoms.push_back({h->point, weight, h->boundary_id});
    } else {
      ++mu.timed_out;
    }
  }
  mu.total_weight = static_cast<double>(mu.atoms.size()) / static_cast<double>(n);
  return mu;
}

TailEstimate tail_probability(const EmpiricalMeasure& mu, Point y, double eta) {
  TailEstimate est;
  double far = 0.0;
  double total = 0.0;
  for (const Atom& a : mu.atoms) {
    total += a.weight;
    if (distance(a.point, y) >= eta) far += a.weight;
  }
  est.absorbed = mu.degenerate_start ? mu.n_samples : mu.atoms.size();
  if (total > 0.0) est.probability = far / total;
  if (est.absorbed > 0) {
    const double p = est.probability;
    est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(est.absorbed));
  }
  return est;
}

TailEstimate first_hit_tail_probability(const Domain& dom, Point y, double eta,
                                        const WalkConfig& cfg) {
  if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
  return tail_probability(sample_harmonic_measure(dom, y, cfg), y, eta);
}

}  // namespace hmlab
