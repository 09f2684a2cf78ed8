#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "hmlab/errors.hpp"
#include "hmlab/sampler.hpp"
#include "hmlab/transport.hpp"

using namespace hmlab;

namespace {

EmpiricalMeasure measure(const std::vector<Point>& pts, const std::vector<double>& w) {
  EmpiricalMeasure m;
  for (std::size_t i = 0; i < pts.size(); ++i) m.atoms.push_back({pts[i], w[i]});
  m.total_weight = std::accumulate(w.begin(), w.end(), 0.0);
  return m;
}

EmpiricalMeasure uniform_measure(const std::vector<Point>& pts) {
  return measure(pts, std::vector<double>(pts.size(), 1.0 / static_cast<double>(pts.size())));
}

std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> p(n);
  for (auto& q : p) q = {u(rng), u(rng)};
  return p;
}

// Minimum over all n! matchings.
double brute_matching(const std::vector<Point>& a, const std::vector<Point>& b) {
  std::vector<int> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) c += distance(a[i], b[perm[i]]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(a.size());
}

// Integer weights k_i / total split into unit copies.
std::vector<Point> expand(const std::vector<Point>& pts, const std::vector<int>& k) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < pts.size(); ++i) out.insert(out.end(), k[i], pts[i]);
  return out;
}

std::vector<int> random_composition(std::mt19937_64& rng, int total, int parts) {
  std::vector<int> k(parts, 1);
  std::uniform_int_distribution<int> pick(0, parts - 1);
  for (int r = parts; r < total; ++r) ++k[pick(rng)];
  return k;
}

// Geodesic W1 on the unit circle: integral of |F - G - median| over [0, 2 pi).
double circle_w1_upper(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  struct Ev {
    double t;
    double dw;
  };
  std::vector<Ev> ev;
  auto add = [&](const EmpiricalMeasure& m, double sign) {
    for (const Atom& x : m.atoms) {
      double t = std::atan2(x.point.y, x.point.x);
      if (t < 0) t += 2 * std::numbers::pi;
      ev.push_back({t, sign * x.weight / m.total_weight});
    }
  };
  add(a, 1.0);
  add(b, -1.0);
  std::sort(ev.begin(), ev.end(), [](const Ev& x, const Ev& y) { return x.t < y.t; });
  std::vector<std::pair<double, double>> pieces;  // (value of F-G, length)
  double f = 0.0;
  double prev = 0.0;
  for (const Ev& e : ev) {
    pieces.push_back({f, e.t - prev});
    f += e.dw;
    prev = e.t;
  }
  pieces.push_back({f, 2 * std::numbers::pi - prev});
  std::vector<std::pair<double, double>> sorted = pieces;
  std::sort(sorted.begin(), sorted.end());
  double acc = 0.0;
  double median = sorted.back().first;
  for (const auto& [v, len] : sorted) {
    acc += len;
    if (acc >= std::numbers::pi) {
      median = v;
      break;
    }
  }
  double total = 0.0;
  for (const auto& [v, len] : pieces) total += std::abs(v - median) * len;
  return total;
}

double poisson_kernel(double r, double theta) {
  return (1 - r * r) / (2 * std::numbers::pi * (1 - 2 * r * std::cos(theta) + r * r));
}

}  // namespace

TEST_CASE("W1 examples") {
  std::mt19937_64 rng(201);
  const EmpiricalMeasure m = measure(random_points(rng, 6), {0.1, 0.2, 0.05, 0.3, 0.15, 0.2});
  CHECK(w1_distance(m, m).cost == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w1_distance(point_mass({0, 0}), point_mass({1, 0})).cost == 1.0);
  const EmpiricalMeasure split = measure({{-1, 0}, {1, 0}}, {0.5, 0.5});
  CHECK(w1_distance(split, point_mass({0, 0})).cost == doctest::Approx(1.0).epsilon(1e-15));

  for (std::size_t n = 2; n <= 8; ++n) {
    std::vector<Point> a, b;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = 2 * std::numbers::pi * k / n;
      a.push_back({std::cos(t), std::sin(t)});
      b.push_back({std::cos(t + std::numbers::pi / n), std::sin(t + std::numbers::pi / n)});
    }
    const double c = w1_distance(uniform_measure(a), uniform_measure(b)).cost;
    CHECK(c <= 2 * std::sin(std::numbers::pi / (2 * n)) + 1e-12);
    CHECK(std::abs(c - brute_matching(a, b)) <= 1e-9);
  }
}

TEST_CASE("W1 input validation") {
  CHECK_THROWS_AS(w1_distance(point_mass({0, 0}, 1.0), point_mass({1, 0}, 0.9)), MassMismatch);
  // Small differences are absorbed.
  CHECK(w1_distance(point_mass({0, 0}, 1.0), point_mass({1, 0}, 1.0 + 1e-8)).cost ==
        doctest::Approx(1.0));
  W1Options opts;
  opts.size_cap = 4;
  std::mt19937_64 rng(202);
  CHECK_THROWS_AS(w1_distance(uniform_measure(random_points(rng, 5)), point_mass({0, 0}), opts),
                  SizeCapExceeded);
}

TEST_CASE("equal-count matching agrees with brute force") {
  std::mt19937_64 rng(203);
  std::uniform_int_distribution<int> size(1, 8);
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t n = size(rng);
    const auto a = random_points(rng, n);
    const auto b = random_points(rng, n);
    const W1Result r = w1_distance(uniform_measure(a), uniform_measure(b));
    REQUIRE(std::abs(r.cost - brute_matching(a, b)) <= 1e-9);
  }
}

TEST_CASE("general weights agree with the unit-splitting oracle") {
  std::mt19937_64 rng(204);
  std::uniform_int_distribution<int> size(1, 8);
  for (int inst = 0; inst < 100; ++inst) {
    const int na = size(rng);
    const int nb = size(rng);
    const auto pa = random_points(rng, na);
    const auto pb = random_points(rng, nb);
    const auto ka = random_composition(rng, 8, na);
    const auto kb = random_composition(rng, 8, nb);
    std::vector<double> wa(na), wb(nb);
    for (int i = 0; i < na; ++i) wa[i] = ka[i] / 8.0;
    for (int i = 0; i < nb; ++i) wb[i] = kb[i] / 8.0;
    const EmpiricalMeasure mu = measure(pa, wa);
    const EmpiricalMeasure nu = measure(pb, wb);
    const W1Result r = w1_distance(mu, nu);
    REQUIRE(std::abs(r.cost - brute_matching(expand(pa, ka), expand(pb, kb))) <= 1e-9);
    CHECK(plan_marginal_error(r.plan, mu, nu) <= 1e-9);
    CHECK(plan_cost(r.plan, mu, nu) == doctest::Approx(r.cost).epsilon(1e-12));
  }
}

TEST_CASE("network simplex and assignment agree on uniform inputs") {
  std::mt19937_64 rng(205);
  for (std::size_t n : {10u, 50u, 200u}) {
    const auto a = random_points(rng, n);
    const auto b = random_points(rng, n);
    const std::vector<double> w(n, 1.0 / n);
    const double simplex = solve_transport_simplex(a, w, b, w).cost;
    const double jv = w1_distance(uniform_measure(a), uniform_measure(b)).cost;
    CHECK(std::abs(simplex - jv) <= 1e-9);
  }
}

TEST_CASE("metric axioms, plan feasibility and translation invariance") {
  std::mt19937_64 rng(206);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int inst = 0; inst < 30; ++inst) {
    std::vector<EmpiricalMeasure> ms;
    for (int k = 0; k < 3; ++k) {
      const std::size_t n = 3 + (inst + k) % 9;
      std::vector<double> w(n);
      for (auto& x : w) x = u(rng);
      const double s = std::accumulate(w.begin(), w.end(), 0.0);
      for (auto& x : w) x /= s;
      ms.push_back(measure(random_points(rng, n), w));
    }
    const W1Result r01 = w1_distance(ms[0], ms[1]);
    const W1Result r10 = w1_distance(ms[1], ms[0]);
    const double c12 = w1_distance(ms[1], ms[2]).cost;
    const double c02 = w1_distance(ms[0], ms[2]).cost;
    CHECK(std::abs(r01.cost - r10.cost) <= 1e-9);
    CHECK(c02 <= r01.cost + c12 + 1e-9);
    CHECK(r01.cost > 0.0);
    CHECK(plan_marginal_error(r01.plan, ms[0], ms[1]) <= 1e-9);
    for (const PlanEntry& e : r01.plan.pairs) CHECK(e.mass > 0.0);

    EmpiricalMeasure a = ms[0], b = ms[1];
    for (auto& x : a.atoms) x.point = {x.point.x + 3.5, x.point.y - 1.25};
    for (auto& x : b.atoms) x.point = {x.point.x + 3.5, x.point.y - 1.25};
    CHECK(std::abs(w1_distance(a, b).cost - r01.cost) <= 1e-9);
  }
  // Same multiset in another order, with one atom split in two.
  std::vector<Point> p = random_points(rng, 5);
  const EmpiricalMeasure m = measure(p, {0.2, 0.2, 0.2, 0.2, 0.2});
  std::vector<Point> q{p[3], p[0], p[4], p[1], p[2], p[2]};
  const EmpiricalMeasure m2 = measure(q, {0.2, 0.2, 0.2, 0.2, 0.1, 0.1});
  CHECK(w1_distance(m, m2).cost <= 1e-12);
}

TEST_CASE("reference measure examples") {
  const Domain disk = Domain::unit_disk();
  const EmpiricalMeasure u4 = discretize_reference(disk, ReferenceKind::kUniformCircle, 4);
  REQUIRE(u4.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    const double t = std::numbers::pi / 2 * k;
    CHECK(u4.atoms[k].point.x == doctest::Approx(std::cos(t)).epsilon(1e-15));
    CHECK(u4.atoms[k].point.y == doctest::Approx(std::sin(t)).epsilon(1e-15));
    CHECK(u4.atoms[k].weight == 0.25);
  }
  const EmpiricalMeasure p0 = discretize_reference(disk, ReferenceKind::kAnalyticPoisson, 16, {0, 0});
  for (const Atom& a : p0.atoms) CHECK(a.weight == doctest::Approx(1.0 / 16).epsilon(1e-14));

  const EmpiricalMeasure p5 = discretize_reference(disk, ReferenceKind::kAnalyticPoisson, 360, {0.5, 0});
  CHECK(p5.atoms[0].weight / p5.atoms[180].weight == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(weight_sum(p5) == doctest::Approx(1.0).epsilon(1e-12));

  const Domain slit(Disk{{0, 0}, 1}, {Segment{{0, 0}, {0.5, 0}}});
  CHECK_THROWS_AS(discretize_reference(slit, ReferenceKind::kUniformCircle, 8), UnsupportedDomain);
}

TEST_CASE("quantile reference puts equal harmonic mass between atoms") {
  const std::size_t n = 16;
  const Point w{0.5, 0.0};
  const EmpiricalMeasure q = discretize_reference(Domain::unit_disk(), ReferenceKind::kPoissonQuantile, n, w);
  REQUIRE(q.size() == n);
  std::vector<double> t;
  for (const Atom& a : q.atoms) {
    CHECK(std::hypot(a.point.x, a.point.y) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.weight == doctest::Approx(1.0 / n).epsilon(1e-14));
    t.push_back(std::atan2(a.point.y, a.point.x));
  }
  std::sort(t.begin(), t.end());
  // Simpson rule on each gap between consecutive atoms, wrapping around.
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = t[k];
    const double hi = k + 1 < n ? t[k + 1] : t[0] + 2 * std::numbers::pi;
    constexpr int kSteps = 4000;
    const double step = (hi - lo) / kSteps;
    double s = poisson_kernel(0.5, lo) + poisson_kernel(0.5, hi);
    for (int i = 1; i < kSteps; ++i) s += (i % 2 ? 4.0 : 2.0) * poisson_kernel(0.5, lo + i * step);
    CHECK(s * step / 3 == doctest::Approx(1.0 / n).epsilon(1e-9));
  }
  const EmpiricalMeasure weighted =
      discretize_reference(Domain::unit_disk(), ReferenceKind::kAnalyticPoisson, 2048, w);
  const EmpiricalMeasure quant =
      discretize_reference(Domain::unit_disk(), ReferenceKind::kPoissonQuantile, 2048, w);
  CHECK(w1_distance(weighted, quant).cost < 0.005);
}

TEST_CASE("subsample examples") {
  const EmpiricalMeasure pm = subsample(point_mass({0.3, -0.2}, 0.7), 17, 1);
  REQUIRE(pm.size() == 17);
  for (const Atom& a : pm.atoms) {
    CHECK(a.point.x == 0.3);
    CHECK(a.point.y == -0.2);
  }
  CHECK(weight_sum(pm) == doctest::Approx(0.7).epsilon(1e-14));

  std::mt19937_64 rng(207);
  const EmpiricalMeasure mu = uniform_measure(random_points(rng, 64));
  const EmpiricalMeasure s = subsample(mu, 64, 9);
  REQUIRE(s.size() == 64);
  auto key = [](const Atom& a) { return std::make_pair(a.point.x, a.point.y); };
  std::vector<std::pair<double, double>> x, y;
  for (const Atom& a : mu.atoms) x.push_back(key(a));
  for (const Atom& a : s.atoms) y.push_back(key(a));
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  CHECK(x == y);

  const EmpiricalMeasure s2 = subsample(mu, 20, 9);
  const EmpiricalMeasure s3 = subsample(mu, 20, 9);
  for (std::size_t i = 0; i < 20; ++i) CHECK(s2.atoms[i].point.x == s3.atoms[i].point.x);
}

TEST_CASE("resampling error on the uniform circle stays small") {
  WalkConfig c;
  c.n_samples = 100'000;
  c.threads = 1;
  c.seed = 208;
  const EmpiricalMeasure mu = sample_harmonic_measure(Domain::unit_disk(), {0, 0}, c);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    worst = std::max(worst, circle_w1_upper(mu, subsample(mu, 2048, seed)));
  }
  MESSAGE("largest geodesic W1 over 20 resamples: " << worst);
  CHECK(worst <= 0.05);
}
