#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "hmlab/geometry.hpp"
#include "hmlab/kernels/distance.hpp"

using namespace hmlab;
using namespace hmlab::kernels;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

ObstacleBatch random_batch(std::mt19937_64& rng, int segments, int disks, int arcs) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.01, 0.4);
  ObstacleBatch b;
  for (int k = 0; k < segments; ++k) b.segments.push(u(rng), u(rng), u(rng), u(rng));
  for (int k = 0; k < disks; ++k) b.disks.push(u(rng), u(rng), pos(rng));
  for (int k = 0; k < arcs; ++k) {
    const double t0 = 3.0 * u(rng);
    b.arcs.push(u(rng), u(rng), pos(rng), t0, t0 + 6.0 * pos(rng));
  }
  return b;
}

}  // namespace

TEST_CASE("SIMD batch distance matches scalar bit for bit") {
  if (!avx2_supported()) {
    MESSAGE("AVX2 not available; only the scalar path runs here");
    return;
  }
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  // Counts straddle the vector width so remainders are covered.
  for (int s : {0, 1, 3, 4, 5, 9, 64}) {
    for (int d : {0, 2, 4, 7}) {
      for (int a : {0, 1, 4, 6, 13}) {
        const ObstacleBatch b = random_batch(rng, s, d, a);
        for (int k = 0; k < 200; ++k) {
          const double px = u(rng);
          const double py = u(rng);
          REQUIRE(same_bits(min_sq_distance_scalar(b, px, py), min_sq_distance_avx2(b, px, py)));
        }
      }
    }
  }
}

TEST_CASE("SIMD distance row matches scalar bit for bit") {
  if (!avx2_supported()) return;
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 33u, 2048u}) {
    std::vector<double> xs(n), ys(n), a(n), b(n);
    for (std::size_t j = 0; j < n; ++j) {
      xs[j] = u(rng);
      ys[j] = u(rng);
    }
    const double px = u(rng);
    const double py = u(rng);
    distance_row_scalar(px, py, xs, ys, a);
    distance_row_avx2(px, py, xs, ys, b);
    for (std::size_t j = 0; j < n; ++j) REQUIRE(same_bits(a[j], b[j]));
  }
}

TEST_CASE("scalar kernel agrees with the per-obstacle distance") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<Obstacle> obs{Segment{{-0.3, 0.2}, {0.4, -0.1}}, Disk{{0.5, 0.5}, 0.2},
                                  Arc{{-0.4, -0.4}, 0.3, -1.0, 2.0}};
  const Domain dom(Disk{{0, 0}, 2.0}, obs);
  for (int k = 0; k < 1000; ++k) {
    const Point p{u(rng), u(rng)};
    double expected = INFINITY;
    for (const Obstacle& o : obs) expected = std::min(expected, distance(o, p));
    CHECK(std::sqrt(min_sq_distance_scalar(dom.batch(), p.x, p.y)) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("empty batch is infinitely far") {
  ObstacleBatch b;
  CHECK(std::isinf(min_sq_distance(b, 0.0, 0.0)));
}

TEST_CASE("forced ISA is honoured by the dispatcher") {
  const Isa before = active_isa();
  force_isa(Isa::kScalar);
  CHECK(active_isa() == Isa::kScalar);
  CHECK(std::string(isa_name(Isa::kScalar)) == "scalar");
  if (avx2_supported()) {
    force_isa(Isa::kAvx2);
    CHECK(active_isa() == Isa::kAvx2);
  }
  force_isa(before);
}
