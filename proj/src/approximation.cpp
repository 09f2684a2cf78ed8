#include "hmlab/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "hmlab/errors.hpp"

namespace hmlab {
namespace {

constexpr int kDi[4] = {1, -1, 0, 0};
constexpr int kDj[4] = {0, 0, 1, -1};

}  // namespace

Grid::Grid(Point origin, double h, int nx, int ny) : origin_(origin), h_(h), nx_(nx), ny_(ny) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing must be positive");
  if (nx <= 0 || ny <= 0) throw InvalidArgument("grid must have at least one cell");
  if (static_cast<double>(nx) * ny > 4e7) {
    throw InvalidArgument("grid of " + std::to_string(nx) + " x " + std::to_string(ny) +
                          " cells is too fine");
  }
}

Grid Grid::covering(std::span<const Domain* const> domains, double h) {
  if (domains.empty()) throw InvalidArgument("grid needs at least one domain");
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = xmin;
  double xmax = -xmin;
  double ymax = -xmin;
  for (const Domain* d : domains) {
    const Disk& a = d->ambient();
    xmin = std::min(xmin, a.center.x - a.radius);
    xmax = std::max(xmax, a.center.x + a.radius);
    ymin = std::min(ymin, a.center.y - a.radius);
    ymax = std::max(ymax, a.center.y + a.radius);
  }
  if (!(h > 0.0)) throw InvalidArgument("grid spacing must be positive");
  const double nx = std::ceil((xmax - xmin) / h);
  const double ny = std::ceil((ymax - ymin) / h);
  if (nx * ny > 4e7) throw InvalidArgument("grid spacing is too small for the domain");
  return Grid({xmin, ymin}, h, std::max(1, static_cast<int>(nx)), std::max(1, static_cast<int>(ny)));
}

CellIndex Grid::cell_of(Point p) const {
  return {static_cast<int>(std::floor((p.x - origin_.x) / h_)),
          static_cast<int>(std::floor((p.y - origin_.y) / h_))};
}

std::vector<double> Grid::distance_field(const Domain& dom) const {
  std::vector<double> field(size(), -1.0);
  for (std::size_t k = 0; k < field.size(); ++k) {
    const Point c = center(cell(k));
    if (dom.contains(c)) field[k] = dom.boundary_distance(c);
  }
  return field;
}

std::vector<std::size_t> Grid::flood_fill(const std::vector<char>& mask, CellIndex start) const {
  std::vector<std::size_t> out;
  if (!in_range(start) || !mask[flat(start)]) return out;
  std::vector<char> seen(size(), 0);
  std::vector<CellIndex> stack{start};
  seen[flat(start)] = 1;
  while (!stack.empty()) {
    const CellIndex c = stack.back();
    stack.pop_back();
    out.push_back(flat(c));
    for (int d = 0; d < 4; ++d) {
      const CellIndex nb{c.i + kDi[d], c.j + kDj[d]};
      if (!in_range(nb)) continue;
      const std::size_t f = flat(nb);
      if (mask[f] && !seen[f]) {
        seen[f] = 1;
        stack.push_back(nb);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool GridRegion::contains_cell(CellIndex c) const {
  return std::binary_search(cells.begin(), cells.end(), c);
}

std::vector<CellIndex> GridRegion::boundary_cells() const {
  std::vector<CellIndex> out;
  for (const CellIndex& c : cells) {
    for (int d = 0; d < 4; ++d) {
      if (!contains_cell({c.i + kDi[d], c.j + kDj[d]})) {
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

bool GridRegion::is_connected() const {
  if (cells.empty()) return false;
  std::vector<char> seen(cells.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 0;
  while (!stack.empty()) {
    const CellIndex c = cells[stack.back()];
    stack.pop_back();
    ++count;
    for (int d = 0; d < 4; ++d) {
      const CellIndex nb{c.i + kDi[d], c.j + kDj[d]};
      auto it = std::lower_bound(cells.begin(), cells.end(), nb);
      if (it != cells.end() && *it == nb) {
        const auto k = static_cast<std::size_t>(it - cells.begin());
        if (!seen[k]) {
          seen[k] = 1;
          stack.push_back(k);
        }
      }
    }
  }
  return count == cells.size();
}

GridRegion make_region(const Grid& grid, std::span<const std::size_t> flat_cells, CellIndex marked) {
  GridRegion r;
  r.origin = grid.origin();
  r.h = grid.h();
  r.marked_cell = marked;
  r.cells.reserve(flat_cells.size());
  for (std::size_t f : flat_cells) r.cells.push_back(grid.cell(f));
  std::sort(r.cells.begin(), r.cells.end());
  return r;
}

GridRegion interior_region(const Domain& dom, Point w, double delta, double h) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("delta must be positive");
  if (!(h > 0.0) || h > delta / 4.0) throw InvalidArgument("grid spacing must satisfy 0 < h <= delta/4");
  const double dw = dom.dist_to_boundary(w);
  if (dw < delta / 2.0) {
    throw EmptyRegion("basepoint is closer than delta/2 to the boundary");
  }
  const Domain* ds[] = {&dom};
  const Grid grid = Grid::covering(ds, h);
  const std::vector<double> field = grid.distance_field(dom);
  std::vector<char> mask(field.size());
  for (std::size_t k = 0; k < field.size(); ++k) mask[k] = field[k] >= delta / 2.0;
  const CellIndex start = grid.cell_of(w);
  const std::vector<std::size_t> comp = grid.flood_fill(mask, start);
  if (comp.empty()) throw EmptyRegion("the cell holding the basepoint fails the distance threshold");
  return make_region(grid, comp, start);
}

InteriorApproxVerdict common_interior_approximation(const Domain& limit, std::span<const Domain> seq,
                                                    Point w, double epsilon, double h) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be positive");
  if (!(h > 0.0) || h > epsilon / 4.0) {
    throw InvalidArgument("grid spacing must satisfy 0 < h <= epsilon/4");
  }
  if (seq.empty()) throw InvalidArgument("domain sequence is empty");
  if (!limit.contains(w)) throw PointOutsideDomain("basepoint lies outside the limit domain");

  std::vector<const Domain*> all{&limit};
  for (const Domain& d : seq) all.push_back(&d);
  const Grid grid = Grid::covering(all, h);
  const std::vector<double> limit_field = grid.distance_field(limit);
  std::vector<std::vector<double>> fields;
  fields.reserve(seq.size());
  for (const Domain& d : seq) fields.push_back(grid.distance_field(d));

  // suffix_min[N] = min of the limit field and the fields of members N.. (0-based).
  const std::size_t len = seq.size();
  std::vector<std::vector<double>> suffix_min(len);
  suffix_min[len - 1] = limit_field;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    suffix_min[len - 1][k] = std::min(limit_field[k], fields[len - 1][k]);
  }
  for (std::size_t n = len - 1; n-- > 0;) {
    suffix_min[n] = suffix_min[n + 1];
    for (std::size_t k = 0; k < grid.size(); ++k) {
      suffix_min[n][k] = std::min(suffix_min[n][k], fields[n][k]);
    }
  }
  // The gap at a cell is the largest boundary distance among the limit and the tail.
  std::vector<double> gap = limit_field;
  std::vector<std::vector<double>> suffix_gap(len);
  for (std::size_t n = len; n-- > 0;) {
    for (std::size_t k = 0; k < grid.size(); ++k) gap[k] = std::max(gap[k], std::abs(fields[n][k]));
    suffix_gap[n] = gap;
  }

  std::vector<double> thresholds;
  for (double t = h; t <= epsilon / 2.0; t *= 2.0) thresholds.push_back(t);
  std::reverse(thresholds.begin(), thresholds.end());

  const CellIndex start = grid.cell_of(w);
  InteriorApproxVerdict best;
  best.epsilon = epsilon;
  best.worst_boundary_gap = std::numeric_limits<double>::infinity();
  bool any_region = false;
  std::vector<char> mask(grid.size());
  for (std::size_t n = 0; n < len; ++n) {
    for (double theta : thresholds) {
      for (std::size_t k = 0; k < grid.size(); ++k) mask[k] = suffix_min[n][k] >= theta;
      const std::vector<std::size_t> comp = grid.flood_fill(mask, start);
      if (comp.empty()) continue;
      any_region = true;
      GridRegion region = make_region(grid, comp, start);
      double worst = 0.0;
      for (const CellIndex& c : region.boundary_cells()) {
        worst = std::max(worst, suffix_gap[n][grid.flat(c)]);
      }
      if (worst < best.worst_boundary_gap) {
        best.tail_start = n + 1;
        best.region = std::move(region);
        best.worst_boundary_gap = worst;
        best.inclusion_threshold = theta;
      }
      if (worst < epsilon) {
        best.ok = true;
        return best;
      }
    }
  }
  if (!any_region) throw EmptyRegion("no admissible cell around the basepoint at any threshold");
  best.tail_start = 0;
  return best;
}

bool basepoint_transfer_check(const Domain& limit, std::span<const Domain> seq, Point w, Point w2,
                              double epsilon, double h) {
  if (!limit.contains(w) || !limit.contains(w2)) {
    throw PointOutsideDomain("both basepoints must lie in the limit domain");
  }
  return common_interior_approximation(limit, seq, w, epsilon, h).ok ==
         common_interior_approximation(limit, seq, w2, epsilon, h).ok;
}

Domain region_domain(const GridRegion& region, const Disk& ambient) {
  if (region.cells.empty()) throw EmptyRegion("region has no cells");
  // Unit edges keyed by their line; horizontal edges at y-line j span [i, i+1].
  std::map<int, std::vector<int>> horizontal, vertical;
  for (const CellIndex& c : region.cells) {
    if (!region.contains_cell({c.i, c.j - 1})) horizontal[c.j].push_back(c.i);
    if (!region.contains_cell({c.i, c.j + 1})) horizontal[c.j + 1].push_back(c.i);
    if (!region.contains_cell({c.i - 1, c.j})) vertical[c.i].push_back(c.j);
    if (!region.contains_cell({c.i + 1, c.j})) vertical[c.i + 1].push_back(c.j);
  }
  const double h = region.h;
  const Point o = region.origin;
  std::vector<Obstacle> obstacles;
  auto emit = [&](const std::map<int, std::vector<int>>& lines, bool horiz) {
    for (auto [line, starts] : lines) {
      std::sort(starts.begin(), starts.end());
      starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
      std::size_t k = 0;
      while (k < starts.size()) {
        std::size_t e = k;
        while (e + 1 < starts.size() && starts[e + 1] == starts[e] + 1) ++e;
        const double a = starts[k] * h;
        const double b = (starts[e] + 1) * h;
        const double l = line * h;
        if (horiz) {
          obstacles.push_back(Segment{{o.x + a, o.y + l}, {o.x + b, o.y + l}});
        } else {
          obstacles.push_back(Segment{{o.x + l, o.y + a}, {o.x + l, o.y + b}});
        }
        k = e + 1;
      }
    }
  };
  emit(horizontal, true);
  emit(vertical, false);
  return Domain(ambient, std::move(obstacles), "grid-region");
}

void write_region_csv(std::ostream& os, const GridRegion& region) {
  os << "i,j\n";
  for (const CellIndex& c : region.cells) os << c.i << ',' << c.j << '\n';
}

Json region_header_json(const GridRegion& region) {
  return Json{{"origin", point_to_json(region.origin)},
              {"h", region.h},
              {"marked_cell", {region.marked_cell.i, region.marked_cell.j}},
              {"cell_count", region.cells.size()}};
}

}  // namespace hmlab
