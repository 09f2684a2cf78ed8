#include "hmlab/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

#include "hmlab/errors.hpp"

namespace hmlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

int orientation(Point a, Point b, Point c) {
  const double v = cross(b - a, c - a);
  return (v > 0) - (v < 0);
}

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool point_in_polygon(const std::vector<Point>& v, Point p) {
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

// Arc parameters exactly as the kernel batch stores them.
struct ArcParams {
  double mx, my, cos_half, e0x, e0y, e1x, e1y;
};

ArcParams arc_params(const Arc& a) {
  kernels::ArcSoA tmp;
  tmp.push(a.center.x, a.center.y, a.radius, a.theta_min, a.theta_max);
  return {tmp.mx[0], tmp.my[0], tmp.cos_half[0], tmp.e0x[0], tmp.e0y[0], tmp.e1x[0], tmp.e1y[0]};
}

double arc_closest_sq(const Arc& a, Point p, Point& q) {
  const ArcParams k = arc_params(a);
  return kernels::arc_sq(p.x, p.y, a.center.x, a.center.y, a.radius, k.mx, k.my, k.cos_half, k.e0x,
                         k.e0y, k.e1x, k.e1y, q.x, q.y);
}

double segment_closest_sq(Point a, Point b, Point p, Point& q) {
  const double ux = b.x - a.x;
  const double uy = b.y - a.y;
  return kernels::segment_sq(p.x, p.y, a.x, a.y, ux, uy, ux * ux + uy * uy, q.x, q.y);
}

double closest_sq(const Obstacle& obstacle, Point p, Point& q) {
  return std::visit(
      Overloaded{
          [&](const Disk& d) {
            return kernels::circle_sq(p.x, p.y, d.center.x, d.center.y, d.radius, q.x, q.y);
          },
          [&](const Segment& s) { return segment_closest_sq(s.a, s.b, p, q); },
          [&](const Arc& a) { return arc_closest_sq(a, p, q); },
          [&](const Polygon& poly) {
            double best = std::numeric_limits<double>::infinity();
            const auto& v = poly.vertices;
            for (std::size_t i = 0; i < v.size(); ++i) {
              Point cand;
              const double sq = segment_closest_sq(v[i], v[(i + 1) % v.size()], p, cand);
              if (sq < best) {
                best = sq;
                q = cand;
              }
            }
            return best;
          },
      },
      obstacle);
}

std::string describe(Point p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

}  // namespace

Point Arc::start() const {
  return {center.x + radius * std::cos(theta_min), center.y + radius * std::sin(theta_min)};
}

Point Arc::end() const {
  return {center.x + radius * std::cos(theta_max), center.y + radius * std::sin(theta_max)};
}

void validate(const Obstacle& obstacle) {
  std::visit(
      Overloaded{
          [](const Disk& d) {
            if (!is_finite(d.center) || !(d.radius > 0.0) || !std::isfinite(d.radius)) {
              throw InvalidArgument("disk obstacle needs a finite center and radius > 0");
            }
          },
          [](const Segment& s) {
            if (!is_finite(s.a) || !is_finite(s.b)) throw InvalidArgument("segment endpoint not finite");
            if (s.a == s.b) throw InvalidArgument("segment endpoints coincide");
          },
          [](const Arc& a) {
            if (!is_finite(a.center) || !(a.radius > 0.0) || !std::isfinite(a.radius)) {
              throw InvalidArgument("arc obstacle needs a finite center and radius > 0");
            }
            if (!(a.theta_min < a.theta_max) || !(a.theta_max - a.theta_min < kTwoPi)) {
              throw InvalidArgument("arc needs theta_min < theta_max < theta_min + 2*pi");
            }
          },
          [](const Polygon& poly) {
            const auto& v = poly.vertices;
            if (v.size() < 3) throw InvalidArgument("polygon needs at least 3 vertices");
            for (const Point& p : v) {
              if (!is_finite(p)) throw InvalidArgument("polygon vertex not finite");
            }
            bool collinear = true;
            for (std::size_t i = 2; i < v.size() && collinear; ++i) {
              collinear = orientation(v[0], v[1], v[i]) == 0;
            }
            if (collinear) throw InvalidArgument("polygon vertices are collinear");
            const std::size_t n = v.size();
            for (std::size_t i = 0; i < n; ++i) {
              if (v[i] == v[(i + 1) % n]) throw InvalidArgument("polygon has a repeated vertex");
              for (std::size_t j = i + 1; j < n; ++j) {
                const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if (adjacent) continue;
                if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
                  throw InvalidArgument("polygon is not simple");
                }
              }
            }
          },
      },
      obstacle);
}

Point closest_point(const Obstacle& obstacle, Point p) {
  Point q;
  closest_sq(obstacle, p, q);
  return q;
}

double distance(const Obstacle& obstacle, Point p) {
  Point q;
  return std::sqrt(closest_sq(obstacle, p, q));
}

double max_distance(const Obstacle& obstacle, Point p) {
  return std::visit(
      Overloaded{
          [&](const Disk& d) { return distance(p, d.center) + d.radius; },
          [&](const Segment& s) { return std::max(distance(p, s.a), distance(p, s.b)); },
          [&](const Arc& a) {
            const double ends = std::max(distance(p, a.start()), distance(p, a.end()));
            const Point v = p - a.center;
            const double len = norm(v);
            if (len == 0.0) return a.radius;
            // The farthest circle point lies opposite p; use it when the arc covers it.
            const ArcParams k = arc_params(a);
            const bool covered = (-v.x * k.mx - v.y * k.my) >= len * k.cos_half;
            return covered ? std::max(ends, len + a.radius) : ends;
          },
          [&](const Polygon& poly) {
            double best = 0.0;
            for (const Point& v : poly.vertices) best = std::max(best, distance(p, v));
            return best;
          },
      },
      obstacle);
}

bool interior_contains(const Obstacle& obstacle, Point p) {
  if (const auto* d = std::get_if<Disk>(&obstacle)) return distance(p, d->center) < d->radius;
  if (const auto* poly = std::get_if<Polygon>(&obstacle)) {
    return poly->filled && point_in_polygon(poly->vertices, p);
  }
  return false;
}

double set_distance(const Obstacle& obstacle, Point p) {
  return interior_contains(obstacle, p) ? 0.0 : distance(obstacle, p);
}

Point point_on(const Obstacle& obstacle, double t) {
  return std::visit(
      Overloaded{
          [&](const Disk& d) {
            const double th = kTwoPi * t;
            return Point{d.center.x + d.radius * std::cos(th), d.center.y + d.radius * std::sin(th)};
          },
          [&](const Segment& s) { return s.a + t * (s.b - s.a); },
          [&](const Arc& a) {
            const double th = a.theta_min + t * (a.theta_max - a.theta_min);
            return Point{a.center.x + a.radius * std::cos(th), a.center.y + a.radius * std::sin(th)};
          },
          [&](const Polygon& poly) {
            const auto& v = poly.vertices;
            const std::size_t n = v.size();
            double perimeter = 0.0;
            for (std::size_t i = 0; i < n; ++i) perimeter += distance(v[i], v[(i + 1) % n]);
            double target = std::clamp(t, 0.0, 1.0) * perimeter;
            for (std::size_t i = 0; i < n; ++i) {
              const Point a = v[i];
              const Point b = v[(i + 1) % n];
              const double len = distance(a, b);
              if (target <= len || i + 1 == n) return a + std::min(1.0, target / len) * (b - a);
              target -= len;
            }
            return v.front();
          },
      },
      obstacle);
}

double diameter(const Obstacle& obstacle) {
  return std::visit(
      Overloaded{
          [](const Disk& d) { return 2.0 * d.radius; },
          [](const Segment& s) { return distance(s.a, s.b); },
          [](const Arc& a) {
            const double span = a.theta_max - a.theta_min;
            return span >= std::numbers::pi ? 2.0 * a.radius : 2.0 * a.radius * std::sin(0.5 * span);
          },
          [](const Polygon& poly) {
            double best = 0.0;
            for (const Point& a : poly.vertices) {
              for (const Point& b : poly.vertices) best = std::max(best, distance(a, b));
            }
            return best;
          },
      },
      obstacle);
}

const char* type_name(const Obstacle& obstacle) {
  static constexpr const char* kNames[] = {"disk", "segment", "arc", "polygon"};
  return kNames[obstacle.index()];
}

Domain::Domain(Disk ambient, std::vector<Obstacle> obstacles, std::string label)
    : ambient_(ambient), obstacles_(std::move(obstacles)), label_(std::move(label)) {
  if (!is_finite(ambient_.center) || !(ambient_.radius > 0.0) || !std::isfinite(ambient_.radius)) {
    throw InvalidArgument("ambient disk needs a finite center and radius > 0");
  }
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    const Obstacle& o = obstacles_[i];
    validate(o);
    if (set_distance(o, ambient_.center) > ambient_.radius) {
      throw InvalidArgument("obstacle " + std::to_string(i) + " (" + type_name(o) +
                            ") does not meet the closed ambient disk");
    }
    std::visit(Overloaded{
                   [&](const Disk& d) { batch_.disks.push(d.center.x, d.center.y, d.radius); },
                   [&](const Segment& s) { batch_.segments.push(s.a.x, s.a.y, s.b.x, s.b.y); },
                   [&](const Arc& a) {
                     batch_.arcs.push(a.center.x, a.center.y, a.radius, a.theta_min, a.theta_max);
                   },
                   [&](const Polygon& poly) {
                     const auto& v = poly.vertices;
                     for (std::size_t k = 0; k < v.size(); ++k) {
                       const Point b = v[(k + 1) % v.size()];
                       batch_.segments.push(v[k].x, v[k].y, b.x, b.y);
                     }
                   },
               },
               o);
  }
}

Domain Domain::disk(Point center, double radius, std::string label) {
  return Domain(Disk{center, radius}, {}, std::move(label));
}

double Domain::ambient_sq_distance(Point p, Point* q) const {
  Point tmp;
  Point& out = q != nullptr ? *q : tmp;
  return kernels::circle_sq(p.x, p.y, ambient_.center.x, ambient_.center.y, ambient_.radius, out.x,
                            out.y);
}

double Domain::boundary_distance(Point p) const {
  const double obstacles_sq = kernels::min_sq_distance(batch_, p.x, p.y);
  return std::sqrt(std::min(obstacles_sq, ambient_sq_distance(p, nullptr)));
}

BoundaryHit Domain::nearest_boundary_hit(Point p) const {
  BoundaryHit hit;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    Point q;
    const double sq = closest_sq(obstacles_[i], p, q);
    if (sq < best) {
      best = sq;
      hit = {q, static_cast<int>(i)};
    }
  }
  Point q;
  if (ambient_sq_distance(p, &q) < best) hit = {q, -1};
  return hit;
}

bool Domain::contains(Point p) const {
  if (!is_finite(p)) return false;
  if (!(distance(p, ambient_.center) < ambient_.radius)) return false;
  for (const Obstacle& o : obstacles_) {
    if (interior_contains(o, p)) return false;
  }
  return kernels::min_sq_distance(batch_, p.x, p.y) > 0.0;
}

void Domain::require_inside(Point p) const {
  if (!contains(p)) {
    throw PointOutsideDomain("point " + describe(p) + " is not inside domain '" + label_ + "'");
  }
}

double Domain::dist_to_boundary(Point p) const {
  require_inside(p);
  return boundary_distance(p);
}

Point Domain::nearest_boundary_point(Point p) const {
  require_inside(p);
  return nearest_boundary_hit(p).point;
}

}  // namespace hmlab
