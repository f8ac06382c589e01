#pragma once

#include <vector>

#include "sobolab/common.hpp"

namespace sobolab {

// Geometry is kept in integer leaf units: a cube is [lo, lo + size)^n on the
// lattice 2^{-D} Z^n. Depth -1 only occurs as the covering root of a shifted grid.
struct Cube {
  int depth = 0;
  IPoint lo{0, 0};
  int64_t size = 1;

  bool operator==(const Cube& o) const {
    return depth == o.depth && lo == o.lo && size == o.size;
  }
  bool operator!=(const Cube& o) const { return !(*this == o); }
};

enum class Relation { equal, inside, contains, touch, separated, overlap };
const char* to_string(Relation r);

struct GoodnessParams {
  int r = 1;
  double eps = 0.5;
};

class DyadicGrid {
 public:
  DyadicGrid() = default;
  DyadicGrid(int n, int max_depth, IPoint shift = {0, 0});

  int n() const { return n_; }
  int max_depth() const { return D_; }
  const IPoint& shift() const { return shift_; }
  int64_t leaves_per_axis() const { return N_; }
  double leaf_side() const { return 1.0 / static_cast<double>(N_); }
  bool shifted() const { return shift_[0] != 0 || shift_[1] != 0; }
  // Shifted grids get a side-2 root at depth -1 so that one cube covers the box.
  int min_depth() const { return shifted() ? -1 : 0; }

  int64_t side_units(int depth) const;
  double side(int depth) const { return static_cast<double>(side_units(depth)) / N_; }
  double side(const Cube& q) const { return static_cast<double>(q.size) / N_; }

  Cube root() const;
  Cube parent(const Cube& q) const;
  Cube ancestor(const Cube& q, int levels) const;
  Cube child(const Cube& q, int index) const;
  int child_index(const Cube& q) const;
  int child_count() const { return 1 << n_; }
  std::vector<Cube> children(const Cube& q) const;

  IPoint origin(int depth) const;
  IPoint coords(const Cube& q) const;
  Cube cube_at(int depth, const IPoint& coords) const;
  Cube containing(int depth, const IPoint& leaf) const;

  // Cubes at a depth that meet the box: a rectangular block of coordinates.
  IPoint first_lo(int depth) const;
  IPoint count(int depth) const;
  int64_t cubes_at(int depth) const;
  int64_t local_index(const Cube& q) const;
  Cube from_local(int depth, int64_t idx) const;

  bool intersects_box(const Cube& q) const;
  bool protrudes(const Cube& q) const;
  void clipped_range(const Cube& q, IPoint& a, IPoint& b) const;

  Point lower(const Cube& q) const;
  Point center(const Cube& q) const;

 private:
  int n_ = 1;
  int D_ = 1;
  int64_t N_ = 2;
  IPoint shift_{0, 0};
};

DyadicGrid make_grid(int n, int max_depth, IPoint shift = {0, 0});

Relation relation(const Cube& q, const Cube& p, int n);
bool contains(const Cube& outer, const Cube& inner, int n);

// l-infinity distance between closed cubes, leaf units.
int64_t dist_inf(const Cube& a, const Cube& b, int n);
// l-infinity distance from J to the union of the boundaries of the children of I (J inside I).
int64_t dist_child_boundaries(const Cube& J, const Cube& I, int n);
// l-infinity distance from J to the boundary of I (J inside I).
int64_t dist_boundary(const Cube& J, const Cube& I, int n);

bool is_deeply_embedded(const Cube& J, const Cube& I, const GoodnessParams& p, int n);
// depth_cap: coarsest ancestor depth examined; values below the grid's min depth are clamped.
bool is_good(const Cube& J, const DyadicGrid& g, const GoodnessParams& p, int depth_cap);

}  // namespace sobolab
