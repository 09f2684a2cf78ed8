#include "hmlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>

#include "hmlab/errors.hpp"
#include "hmlab/sampler.hpp"

namespace hmlab {
namespace {

std::vector<Point> points_of(const EmpiricalMeasure& mu) {
  std::vector<Point> pts;
  pts.reserve(mu.size());
  for (const Atom& a : mu.atoms) pts.push_back(a.point);
  return pts;
}

// Position of (x, y) along a Hilbert curve filling a 2^order grid.
std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int order) {
  const std::uint32_t side = 1u << order;
  std::uint64_t d = 0;
  for (std::uint32_t s = side >> 1; s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = side - 1 - x;
        y = side - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

}  // namespace

double plan_cost(const TransportPlan& plan, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  double c = 0.0;
  for (const PlanEntry& e : plan.pairs) {
    c += e.mass * distance(mu.atoms.at(e.source).point, nu.atoms.at(e.target).point);
  }
  return c;
}

double plan_marginal_error(const TransportPlan& plan, const EmpiricalMeasure& mu,
                           const EmpiricalMeasure& nu) {
  std::vector<double> out(mu.size(), 0.0), in(nu.size(), 0.0);
  for (const PlanEntry& e : plan.pairs) {
    out.at(e.source) += e.mass;
    in.at(e.target) += e.mass;
  }
  const double scale = weight_sum(mu) / weight_sum(nu);
  double err = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) err = std::max(err, std::abs(out[i] - mu.atoms[i].weight));
  for (std::size_t j = 0; j < nu.size(); ++j) {
    err = std::max(err, std::abs(in[j] - scale * nu.atoms[j].weight));
  }
  return err;
}

W1Result w1_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const W1Options& opts) {
  if (mu.atoms.empty() || nu.atoms.empty()) throw InvalidArgument("w1_distance: empty measure");
  if (mu.size() > opts.size_cap || nu.size() > opts.size_cap) {
    throw SizeCapExceeded("w1_distance: " + std::to_string(std::max(mu.size(), nu.size())) +
                          " atoms exceed the cap of " + std::to_string(opts.size_cap) +
                          "; subsample first");
  }
  const double mass_mu = weight_sum(mu);
  const double mass_nu = weight_sum(nu);
  if (std::abs(mass_mu - mass_nu) > opts.mass_tolerance) {
    throw MassMismatch("w1_distance: total masses " + std::to_string(mass_mu) + " and " +
                       std::to_string(mass_nu) + " differ");
  }
  const double scale = mass_mu / mass_nu;

  W1Result result;
  const std::vector<Point> src = points_of(mu);
  const std::vector<Point> dst = points_of(nu);
  if (mu.size() == nu.size() && uniform_weights(mu) && uniform_weights(nu)) {
    const std::size_t n = mu.size();
    const Assignment a = solve_assignment(euclidean_cost_matrix(src, dst), n);
    const double w = mass_mu / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      result.plan.pairs.push_back({i, static_cast<std::size_t>(a.row_to_col[i]), w});
    }
  } else {
    std::vector<double> supply, demand;
    for (const Atom& a : mu.atoms) supply.push_back(a.weight);
    for (const Atom& a : nu.atoms) demand.push_back(scale * a.weight);
    // Close the rounding gap so the simplex sees an exactly balanced problem.
    const double gap = std::accumulate(supply.begin(), supply.end(), 0.0) -
                       std::accumulate(demand.begin(), demand.end(), 0.0);
    auto largest = std::max_element(demand.begin(), demand.end());
    *largest += gap;
    result.plan = solve_transport_simplex(src, supply, dst, demand);
  }
  result.plan.cost = plan_cost(result.plan, mu, nu);
  result.cost = result.plan.cost;
  return result;
}

EmpiricalMeasure discretize_reference(const Domain& dom, ReferenceKind kind, std::size_t n_atoms,
                                      Point w) {
  if (!dom.is_plain_disk()) {
    throw UnsupportedDomain("reference measures exist only for plain disks, not '" + dom.label() + "'");
  }
  if (n_atoms == 0) throw InvalidArgument("discretize_reference: n_atoms must be positive");
  const Point c = dom.ambient().center;
  const double r = dom.ambient().radius;
  if (kind != ReferenceKind::kUniformCircle && !dom.contains(w)) {
    throw PointOutsideDomain("Poisson reference needs a basepoint inside the disk");
  }
  EmpiricalMeasure mu;
  mu.atoms.reserve(n_atoms);
  const Point wl = w - c;
  if (kind == ReferenceKind::kPoissonQuantile) {
    // Boundary correspondence of the disk automorphism sending w to the center.
    const double rho = norm(wl) / r;
    const double phi = std::atan2(wl.y, wl.x);
    for (std::size_t k = 0; k < n_atoms; ++k) {
      const double psi =
          2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n_atoms);
      const std::complex<double> e = std::polar(1.0, psi);
      const double th = std::arg((e + rho) / (1.0 + rho * e)) + phi;
      mu.atoms.push_back({c + r * Point{std::cos(th), std::sin(th)}, 1.0 / static_cast<double>(n_atoms), -1});
    }
    mu.total_weight = weight_sum(mu);
    mu.n_samples = n_atoms;
    return mu;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < n_atoms; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_atoms);
    const Point e{std::cos(th), std::sin(th)};
    double weight = 1.0;
    if (kind == ReferenceKind::kAnalyticPoisson) {
      const Point diff = r * e - wl;
      weight = (r * r - dot(wl, wl)) / dot(diff, diff);
    }
    mu.atoms.push_back({c + r * e, weight, -1});
    sum += weight;
  }
  for (Atom& a : mu.atoms) a.weight /= sum;
  mu.total_weight = weight_sum(mu);
  mu.n_samples = n_atoms;
  return mu;
}

EmpiricalMeasure subsample(const EmpiricalMeasure& mu, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("subsample: n must be at least 1");
  if (mu.atoms.empty()) throw InvalidArgument("subsample: empty measure");

  double xmin = mu.atoms[0].point.x, xmax = xmin, ymin = mu.atoms[0].point.y, ymax = ymin;
  for (const Atom& a : mu.atoms) {
    xmin = std::min(xmin, a.point.x);
    xmax = std::max(xmax, a.point.x);
    ymin = std::min(ymin, a.point.y);
    ymax = std::max(ymax, a.point.y);
  }
  constexpr int kOrder = 20;
  const double side = std::max({xmax - xmin, ymax - ymin, 1e-300});
  const double cells = static_cast<double>((1u << kOrder) - 1);
  std::vector<std::pair<std::uint64_t, std::size_t>> order(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto gx = static_cast<std::uint32_t>((mu.atoms[i].point.x - xmin) / side * cells);
    const auto gy = static_cast<std::uint32_t>((mu.atoms[i].point.y - ymin) / side * cells);
    order[i] = {hilbert_index(gx, gy, kOrder), i};
  }
  std::sort(order.begin(), order.end());

  const double total = weight_sum(mu);
  std::mt19937_64 rng(derive_seed(seed, 0x5ab5a3b1e));
  const double offset = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double step = total / static_cast<double>(n);

  EmpiricalMeasure out;
  out.atoms.reserve(n);
  out.seed = seed;
  out.eps_stop = mu.eps_stop;
  out.n_samples = mu.n_samples;
  out.timed_out = mu.timed_out;
  std::size_t pos = 0;
  double cumulative = mu.atoms[order[0].second].weight;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = (static_cast<double>(k) + offset) * step;
    while (cumulative <= target && pos + 1 < order.size()) {
      ++pos;
      cumulative += mu.atoms[order[pos].second].weight;
    }
    const Atom& src = mu.atoms[order[pos].second];
    out.atoms.push_back({src.point, step, src.boundary_id});
  }
  out.total_weight = total;
  return out;
}

double resampled_w1(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t n_atoms,
                    std::uint64_t seed, const W1Options& opts) {
  const EmpiricalMeasure a = subsample(mu, n_atoms, derive_seed(seed, 1));
  const EmpiricalMeasure b = subsample(nu, n_atoms, derive_seed(seed, 2));
  return w1_distance(a, b, opts).cost;
}

}  // namespace hmlab
