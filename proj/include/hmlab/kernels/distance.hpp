#pragma once

// Data-parallel distance kernels. Every kernel has a scalar reference and an
// AVX2 variant; both evaluate the same operation sequence so results agree
// bit for bit (the library is built with -ffp-contract=off).

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hmlab::kernels {

struct SegmentSoA {
  std::vector<double> ax, ay, ux, uy, uu;
  std::size_t size() const { return ax.size(); }
  void push(double x0, double y0, double x1, double y1);
};

struct DiskSoA {
  std::vector<double> cx, cy, r;
  std::size_t size() const { return cx.size(); }
  void push(double x, double y, double radius);
};

// Arcs store the unit mid-direction and cos(half span) so membership of a
// direction in the angular range needs no trigonometry.
struct ArcSoA {
  std::vector<double> cx, cy, r, mx, my, cos_half, e0x, e0y, e1x, e1y;
  std::size_t size() const { return cx.size(); }
  void push(double x, double y, double radius, double theta_min, double theta_max);
};

struct ObstacleBatch {
  SegmentSoA segments;
  DiskSoA disks;
  ArcSoA arcs;
  bool empty() const { return segments.size() + disks.size() + arcs.size() == 0; }
};

// Per-primitive nearest point and squared distance. Shared by the scalar
// kernel and the exact nearest-point queries in geometry.

inline double segment_sq(double px, double py, double ax, double ay, double ux, double uy,
                         double uu, double& qx, double& qy) {
  double t = ((px - ax) * ux + (py - ay) * uy) / uu;
  t = t < 0.0 ? 0.0 : t;
  t = t > 1.0 ? 1.0 : t;
  qx = ax + t * ux;
  qy = ay + t * uy;
  const double dx = qx - px;
  const double dy = qy - py;
  return dx * dx + dy * dy;
}

inline double circle_sq(double px, double py, double cx, double cy, double r, double& qx,
                        double& qy) {
  const double vx = px - cx;
  const double vy = py - cy;
  const double len = std::sqrt(vx * vx + vy * vy);
  if (len == 0.0) {
    qx = cx + r;
    qy = cy;
  } else {
    const double s = r / len;
    qx = cx + vx * s;
    qy = cy + vy * s;
  }
  const double dx = qx - px;
  const double dy = qy - py;
  return dx * dx + dy * dy;
}

inline double arc_sq(double px, double py, double cx, double cy, double r, double mx,
                     double my, double cos_half, double e0x, double e0y, double e1x,
                     double e1y, double& qx, double& qy) {
  const double vx = px - cx;
  const double vy = py - cy;
  const double len = std::sqrt(vx * vx + vy * vy);
  const bool inside = len > 0.0 && (vx * mx + vy * my) >= len * cos_half;
  if (inside) {
    const double s = r / len;
    qx = cx + vx * s;
    qy = cy + vy * s;
  } else {
    const double d0x = e0x - px;
    const double d0y = e0y - py;
    const double d1x = e1x - px;
    const double d1y = e1y - py;
    const double s0 = d0x * d0x + d0y * d0y;
    const double s1 = d1x * d1x + d1y * d1y;
    if (s1 < s0) {
      qx = e1x;
      qy = e1y;
    } else {
      qx = e0x;
      qy = e0y;
    }
  }
  const double dx = qx - px;
  const double dy = qy - py;
  return dx * dx + dy * dy;
}

enum class Isa { kScalar, kAvx2 };

bool avx2_supported();
Isa active_isa();
// Overrides runtime selection (tests and benchmarks). Falls back to scalar
// when AVX2 is requested but unavailable.
void force_isa(Isa isa);
const char* isa_name(Isa isa);

// Minimum squared distance from (px, py) to every primitive in the batch;
// +inf for an empty batch.
double min_sq_distance(const ObstacleBatch& batch, double px, double py);
double min_sq_distance_scalar(const ObstacleBatch& batch, double px, double py);
double min_sq_distance_avx2(const ObstacleBatch& batch, double px, double py);

// out[j] = |(px, py) - (xs[j], ys[j])|.
void distance_row(double px, double py, std::span<const double> xs, std::span<const double> ys,
                  std::span<double> out);
void distance_row_scalar(double px, double py, std::span<const double> xs,
                         std::span<const double> ys, std::span<double> out);
void distance_row_avx2(double px, double py, std::span<const double> xs,
                       std::span<const double> ys, std::span<double> out);

}  // namespace hmlab::kernels
