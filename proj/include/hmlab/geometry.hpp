#pragma once

#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hmlab/kernels/distance.hpp"

namespace hmlab {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Filled disk.
struct Disk {
  Point center;
  double radius = 0.0;
};

struct Segment {
  Point a;
  Point b;
};

// Closed circular arc, counter-clockwise from theta_min to theta_max.
struct Arc {
  Point center;
  double radius = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;

  Point start() const;
  Point end() const;
};

// Closed polyline; when filled the enclosed interior is removed as well.
struct Polygon {
  std::vector<Point> vertices;
  bool filled = false;
};

using Obstacle = std::variant<Disk, Segment, Arc, Polygon>;

// Throws InvalidArgument when the primitive is degenerate.
void validate(const Obstacle& obstacle);

// Nearest point of the obstacle's boundary curve (circle of a disk, edges of a polygon).
Point closest_point(const Obstacle& obstacle, Point p);
double distance(const Obstacle& obstacle, Point p);
// Largest distance from p to any point of the obstacle.
double max_distance(const Obstacle& obstacle, Point p);
// True when p lies in the removed interior of a filled disk or polygon.
bool interior_contains(const Obstacle& obstacle, Point p);
// Smallest distance from p to the obstacle as a closed set (0 inside filled shapes).
double set_distance(const Obstacle& obstacle, Point p);
// Point on the obstacle at curve parameter t in [0, 1].
Point point_on(const Obstacle& obstacle, double t);
double diameter(const Obstacle& obstacle);
const char* type_name(const Obstacle& obstacle);

struct BoundaryHit {
  Point point;
  int boundary_id = -1;  // obstacle index, -1 for the ambient circle
};

// Bounded planar domain: open ambient disk minus a list of obstacles.
// Immutable after construction; every query is const and thread-safe.
class Domain {
 public:
  Domain(Disk ambient, std::vector<Obstacle> obstacles, std::string label = {});

  static Domain disk(Point center, double radius, std::string label = {});
  static Domain unit_disk() { return disk({0.0, 0.0}, 1.0, "unit-disk"); }

  const Disk& ambient() const { return ambient_; }
  std::span<const Obstacle> obstacles() const { return obstacles_; }
  const std::string& label() const { return label_; }
  bool is_plain_disk() const { return obstacles_.empty(); }

  // Exact distance to the boundary; throws PointOutsideDomain when !contains(p).
  double dist_to_boundary(Point p) const;
  // Boundary point realizing dist_to_boundary. Ties go to the earliest obstacle,
  // the ambient circle comes last.
  Point nearest_boundary_point(Point p) const;
  bool contains(Point p) const;

  // Unchecked versions for walkers that are known to stay inside.
  double boundary_distance(Point p) const;
  BoundaryHit nearest_boundary_hit(Point p) const;

  const kernels::ObstacleBatch& batch() const { return batch_; }

 private:
  void require_inside(Point p) const;
  double ambient_sq_distance(Point p, Point* q) const;

  Disk ambient_;
  std::vector<Obstacle> obstacles_;
  std::string label_;
  kernels::ObstacleBatch batch_;
};

}  // namespace hmlab
