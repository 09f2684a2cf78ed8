#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hmlab/kernels/distance.hpp"

namespace hmlab::kernels {

void SegmentSoA::push(double x0, double y0, double x1, double y1) {
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  ax.push_back(x0);
  ay.push_back(y0);
  ux.push_back(dx);
  uy.push_back(dy);
  uu.push_back(dx * dx + dy * dy);
}

void DiskSoA::push(double x, double y, double radius) {
  cx.push_back(x);
  cy.push_back(y);
  r.push_back(radius);
}

void ArcSoA::push(double x, double y, double radius, double theta_min, double theta_max) {
  const double mid = 0.5 * (theta_min + theta_max);
  const double half = 0.5 * (theta_max - theta_min);
  cx.push_back(x);
  cy.push_back(y);
  r.push_back(radius);
  mx.push_back(std::cos(mid));
  my.push_back(std::sin(mid));
  cos_half.push_back(std::cos(half));
  e0x.push_back(x + radius * std::cos(theta_min));
  e0y.push_back(y + radius * std::sin(theta_min));
  e1x.push_back(x + radius * std::cos(theta_max));
  e1y.push_back(y + radius * std::sin(theta_max));
}

double min_sq_distance_scalar(const ObstacleBatch& batch, double px, double py) {
  double best = std::numeric_limits<double>::infinity();
  double qx, qy;
  const auto& s = batch.segments;
  for (std::size_t i = 0; i < s.size(); ++i) {
    best = std::min(best, segment_sq(px, py, s.ax[i], s.ay[i], s.ux[i], s.uy[i], s.uu[i], qx, qy));
  }
  const auto& d = batch.disks;
  for (std::size_t i = 0; i < d.size(); ++i) {
    best = std::min(best, circle_sq(px, py, d.cx[i], d.cy[i], d.r[i], qx, qy));
  }
  const auto& a = batch.arcs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    best = std::min(best, arc_sq(px, py, a.cx[i], a.cy[i], a.r[i], a.mx[i], a.my[i],
                                 a.cos_half[i], a.e0x[i], a.e0y[i], a.e1x[i], a.e1y[i], qx, qy));
  }
  return best;
}

void distance_row_scalar(double px, double py, std::span<const double> xs,
                         std::span<const double> ys, std::span<double> out) {
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double dx = px - xs[j];
    const double dy = py - ys[j];
    out[j] = std::sqrt(dx * dx + dy * dy);
  }
}

}  // namespace hmlab::kernels
