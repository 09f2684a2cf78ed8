#pragma once

#include <compare>
#include <iosfwd>
#include <span>
#include <vector>

#include "hmlab/domain_io.hpp"
#include "hmlab/geometry.hpp"

namespace hmlab {

struct CellIndex {
  int i = 0;
  int j = 0;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

// Uniform lattice of closed h x h cells; cell (i, j) spans
// [origin.x + i h, origin.x + (i+1) h] x [origin.y + j h, origin.y + (j+1) h].
class Grid {
 public:
  Grid(Point origin, double h, int nx, int ny);
  // Lattice covering the ambient disks of all domains, anchored at the lower
  // left corner of their bounding box.
  static Grid covering(std::span<const Domain* const> domains, double h);

  Point origin() const { return origin_; }
  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t flat(CellIndex c) const { return static_cast<std::size_t>(c.j) * nx_ + c.i; }
  CellIndex cell(std::size_t flat) const {
    return {static_cast<int>(flat % nx_), static_cast<int>(flat / nx_)};
  }
  bool in_range(CellIndex c) const { return c.i >= 0 && c.j >= 0 && c.i < nx_ && c.j < ny_; }
  Point center(CellIndex c) const {
    return {origin_.x + (c.i + 0.5) * h_, origin_.y + (c.j + 0.5) * h_};
  }
  CellIndex cell_of(Point p) const;

  // Per-cell boundary distance of dom at cell centers; -1 where the center lies outside.
  std::vector<double> distance_field(const Domain& dom) const;
  // 4-connected component of mask containing start (flat indices, ascending).
  std::vector<std::size_t> flood_fill(const std::vector<char>& mask, CellIndex start) const;

 private:
  Point origin_;
  double h_;
  int nx_;
  int ny_;
};

struct GridRegion {
  Point origin;
  double h = 0.0;
  std::vector<CellIndex> cells;  // sorted
  CellIndex marked_cell;

  bool contains_cell(CellIndex c) const;
  Point center(CellIndex c) const {
    return {origin.x + (c.i + 0.5) * h, origin.y + (c.j + 0.5) * h};
  }
  // Cells with at least one 4-neighbour outside the region.
  std::vector<CellIndex> boundary_cells() const;
  bool is_connected() const;
};

GridRegion make_region(const Grid& grid, std::span<const std::size_t> flat_cells, CellIndex marked);

// Component through w's cell of all cells whose centers are at distance
// >= delta/2 from the boundary. Requires h <= delta/4.
GridRegion interior_region(const Domain& dom, Point w, double delta, double h);

struct InteriorApproxVerdict {
  double epsilon = 0.0;
  std::size_t tail_start = 0;  // N, 1-based index into the sequence; 0 when not found
  GridRegion region;
  bool ok = false;
  double worst_boundary_gap = 0.0;
  double inclusion_threshold = 0.0;
  bool finite_prefix = true;  // the tail was only checked on the supplied members
};

// Searches the smallest N for which a grid region around w lies inside the
// limit and every member from N on, with all boundary cells closer than
// epsilon to each of those boundaries. Cells are admitted at thresholds
// h * 2^k <= epsilon / 2, largest first. Requires h <= epsilon / 4.
InteriorApproxVerdict common_interior_approximation(const Domain& limit,
                                                    std::span<const Domain> seq, Point w,
                                                    double epsilon, double h);

// Whether the verdicts for basepoints w and w2 agree.
bool basepoint_transfer_check(const Domain& limit, std::span<const Domain> seq, Point w, Point w2,
                              double epsilon, double h);

// Domain whose boundary is the outline of the region (merged cell edges as
// segments) inside the given ambient disk. Walks started in the region stay there.
Domain region_domain(const GridRegion& region, const Disk& ambient);

void write_region_csv(std::ostream& os, const GridRegion& region);
Json region_header_json(const GridRegion& region);

}  // namespace hmlab
