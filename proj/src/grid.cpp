#include "sobolab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace sobolab {

namespace {
int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
int64_t pos_mod(int64_t a, int64_t b) { return a - floor_div(a, b) * b; }
}  // namespace

const char* to_string(Relation r) {
  switch (r) {
    case Relation::equal: return "equal";
    case Relation::inside: return "inside";
    case Relation::contains: return "contains";
    case Relation::touch: return "touch";
    case Relation::separated: return "separated";
    case Relation::overlap: return "overlap";
  }
  return "?";
}

DyadicGrid::DyadicGrid(int n, int max_depth, IPoint shift) : n_(n), D_(max_depth), shift_(shift) {
  if (n != 1 && n != 2) fail(ErrorKind::invalid_argument, "grid: dimension must be 1 or 2");
  if (max_depth <= 0) fail(ErrorKind::invalid_argument, "grid: depth must be positive");
  if (max_depth > 24) fail(ErrorKind::invalid_argument, "grid: depth too large");
  N_ = int64_t{1} << max_depth;
  if (n == 1) shift_[1] = 0;
  for (int i = 0; i < n; ++i)
    if (shift_[i] < 0 || shift_[i] >= N_) fail(ErrorKind::invalid_argument, "grid: shift outside [0, 2^D)");
}

DyadicGrid make_grid(int n, int max_depth, IPoint shift) { return DyadicGrid(n, max_depth, shift); }

int64_t DyadicGrid::side_units(int depth) const {
  if (depth < -1 || depth > D_) fail(ErrorKind::invalid_argument, "grid: depth out of range");
  return depth >= 0 ? (int64_t{1} << (D_ - depth)) : 2 * N_;
}

Cube DyadicGrid::root() const {
  if (!shifted()) return Cube{0, {0, 0}, N_};
  Cube r{-1, {0, 0}, 2 * N_};
  for (int i = 0; i < n_; ++i) r.lo[i] = shift_[i] - N_;
  return r;
}

IPoint DyadicGrid::origin(int depth) const {
  if (depth < 0) return root().lo;
  const int64_t s = side_units(depth);
  IPoint o{0, 0};
  for (int i = 0; i < n_; ++i) o[i] = pos_mod(shift_[i], s);
  return o;
}

IPoint DyadicGrid::coords(const Cube& q) const {
  const IPoint o = origin(q.depth);
  IPoint c{0, 0};
  for (int i = 0; i < n_; ++i) c[i] = floor_div(q.lo[i] - o[i], q.size);
  return c;
}

Cube DyadicGrid::cube_at(int depth, const IPoint& k) const {
  const int64_t s = side_units(depth);
  const IPoint o = origin(depth);
  Cube q{depth, {0, 0}, s};
  for (int i = 0; i < n_; ++i) q.lo[i] = o[i] + k[i] * s;
  return q;
}

Cube DyadicGrid::containing(int depth, const IPoint& leaf) const {
  if (depth < 0) return root();
  const int64_t s = side_units(depth);
  const IPoint o = origin(depth);
  IPoint k{0, 0};
  for (int i = 0; i < n_; ++i) k[i] = floor_div(leaf[i] - o[i], s);
  return cube_at(depth, k);
}

Cube DyadicGrid::parent(const Cube& q) const {
  if (q.depth <= min_depth()) fail(ErrorKind::invalid_argument, "grid: root has no parent");
  if (q.depth == 0) return root();
  return containing(q.depth - 1, q.lo);
}

Cube DyadicGrid::ancestor(const Cube& q, int levels) const {
  if (levels < 0 || q.depth - levels < min_depth()) fail(ErrorKind::invalid_argument, "grid: ancestor beyond root");
  if (levels == 0) return q;
  if (q.depth - levels < 0) return root();
  return containing(q.depth - levels, q.lo);
}

Cube DyadicGrid::child(const Cube& q, int index) const {
  if (q.depth >= D_) fail(ErrorKind::invalid_argument, "grid: leaf has no children");
  const int64_t h = q.size / 2;
  Cube c{q.depth + 1, q.lo, h};
  // Lexicographic: axis 0 is the most significant bit.
  if (n_ == 1) {
    c.lo[0] += (index & 1) * h;
  } else {
    c.lo[0] += ((index >> 1) & 1) * h;
    c.lo[1] += (index & 1) * h;
  }
  return c;
}

int DyadicGrid::child_index(const Cube& q) const {
  const Cube p = parent(q);
  const int64_t h = q.size;
  if (n_ == 1) return static_cast<int>((q.lo[0] - p.lo[0]) / h);
  return static_cast<int>(((q.lo[0] - p.lo[0]) / h) * 2 + (q.lo[1] - p.lo[1]) / h);
}

std::vector<Cube> DyadicGrid::children(const Cube& q) const {
  std::vector<Cube> out;
  for (int c = 0; c < child_count(); ++c) out.push_back(child(q, c));
  return out;
}

IPoint DyadicGrid::first_lo(int depth) const {
  if (depth < 0) return root().lo;
  const int64_t s = side_units(depth);
  IPoint f{0, 0};
  for (int i = 0; i < n_; ++i) {
    const int64_t m = pos_mod(shift_[i], s);
    f[i] = m == 0 ? 0 : m - s;
  }
  return f;
}

IPoint DyadicGrid::count(int depth) const {
  if (depth < 0) return {1, n_ == 2 ? 1 : 1};
  const int64_t s = side_units(depth);
  const IPoint f = first_lo(depth);
  IPoint c{1, 1};
  for (int i = 0; i < n_; ++i) c[i] = (N_ - f[i] + s - 1) / s;
  return c;
}

int64_t DyadicGrid::cubes_at(int depth) const {
  const IPoint c = count(depth);
  return n_ == 1 ? c[0] : c[0] * c[1];
}

int64_t DyadicGrid::local_index(const Cube& q) const {
  if (q.depth < 0) return 0;
  const IPoint f = first_lo(q.depth);
  const IPoint c = count(q.depth);
  int64_t k0 = (q.lo[0] - f[0]) / q.size;
  if (n_ == 1) return k0;
  int64_t k1 = (q.lo[1] - f[1]) / q.size;
  return k0 * c[1] + k1;
}

Cube DyadicGrid::from_local(int depth, int64_t idx) const {
  if (depth < 0) return root();
  const int64_t s = side_units(depth);
  const IPoint f = first_lo(depth);
  const IPoint c = count(depth);
  Cube q{depth, {0, 0}, s};
  if (n_ == 1) {
    q.lo[0] = f[0] + idx * s;
  } else {
    q.lo[0] = f[0] + (idx / c[1]) * s;
    q.lo[1] = f[1] + (idx % c[1]) * s;
  }
  return q;
}

bool DyadicGrid::intersects_box(const Cube& q) const {
  for (int i = 0; i < n_; ++i)
    if (q.lo[i] >= N_ || q.lo[i] + q.size <= 0) return false;
  return true;
}

bool DyadicGrid::protrudes(const Cube& q) const {
  for (int i = 0; i < n_; ++i)
    if (q.lo[i] < 0 || q.lo[i] + q.size > N_) return true;
  return false;
}

void DyadicGrid::clipped_range(const Cube& q, IPoint& a, IPoint& b) const {
  a = {0, 0};
  b = {1, 1};
  for (int i = 0; i < n_; ++i) {
    a[i] = std::clamp<int64_t>(q.lo[i], 0, N_);
    b[i] = std::clamp<int64_t>(q.lo[i] + q.size, 0, N_);
  }
}

Point DyadicGrid::lower(const Cube& q) const {
  Point p{0, 0};
  for (int i = 0; i < n_; ++i) p[i] = static_cast<double>(q.lo[i]) / N_;
  return p;
}

Point DyadicGrid::center(const Cube& q) const {
  Point p{0, 0};
  for (int i = 0; i < n_; ++i) p[i] = (static_cast<double>(q.lo[i]) + 0.5 * q.size) / N_;
  return p;
}

bool contains(const Cube& outer, const Cube& inner, int n) {
  for (int i = 0; i < n; ++i)
    if (inner.lo[i] < outer.lo[i] || inner.lo[i] + inner.size > outer.lo[i] + outer.size) return false;
  return true;
}

Relation relation(const Cube& q, const Cube& p, int n) {
  bool same = q.size == p.size;
  for (int i = 0; i < n; ++i) same = same && q.lo[i] == p.lo[i];
  if (same) return Relation::equal;
  if (contains(p, q, n)) return Relation::inside;
  if (contains(q, p, n)) return Relation::contains;
  bool interiors_disjoint = false;
  bool closures_meet = true;
  for (int i = 0; i < n; ++i) {
    const int64_t a0 = q.lo[i], a1 = q.lo[i] + q.size, b0 = p.lo[i], b1 = p.lo[i] + p.size;
    if (a1 <= b0 || b1 <= a0) interiors_disjoint = true;
    if (a1 < b0 || b1 < a0) closures_meet = false;
  }
  if (!interiors_disjoint) return Relation::overlap;
  return closures_meet ? Relation::touch : Relation::separated;
}

int64_t dist_inf(const Cube& a, const Cube& b, int n) {
  int64_t d = 0;
  for (int i = 0; i < n; ++i) {
    const int64_t gap = std::max<int64_t>({0, b.lo[i] - (a.lo[i] + a.size), a.lo[i] - (b.lo[i] + b.size)});
    d = std::max(d, gap);
  }
  return d;
}

namespace {
int64_t interval_to_plane(int64_t a0, int64_t a1, int64_t c) {
  if (c <= a0) return a0 - c;
  if (c >= a1) return c - a1;
  return 0;
}
}  // namespace

int64_t dist_child_boundaries(const Cube& J, const Cube& I, int n) {
  int64_t d = INT64_MAX;
  for (int i = 0; i < n; ++i) {
    const int64_t a0 = J.lo[i], a1 = J.lo[i] + J.size;
    for (int64_t c : {I.lo[i], I.lo[i] + I.size / 2, I.lo[i] + I.size}) d = std::min(d, interval_to_plane(a0, a1, c));
  }
  return d;
}

int64_t dist_boundary(const Cube& J, const Cube& I, int n) {
  int64_t d = INT64_MAX;
  for (int i = 0; i < n; ++i) {
    const int64_t a0 = J.lo[i], a1 = J.lo[i] + J.size;
    for (int64_t c : {I.lo[i], I.lo[i] + I.size}) d = std::min(d, interval_to_plane(a0, a1, c));
  }
  return d;
}

bool is_deeply_embedded(const Cube& J, const Cube& I, const GoodnessParams& p, int n) {
  if (relation(J, I, n) != Relation::inside) return false;
  const double lj = static_cast<double>(J.size), li = static_cast<double>(I.size);
  if (lj > std::ldexp(li, -p.r)) return false;
  const double d = static_cast<double>(dist_child_boundaries(J, I, n));
  return d >= 2.0 * std::pow(lj, p.eps) * std::pow(li, 1.0 - p.eps);
}

bool is_good(const Cube& J, const DyadicGrid& g, const GoodnessParams& p, int depth_cap) {
  const int cap = std::max(depth_cap, g.min_depth());
  const double lj = static_cast<double>(J.size);
  // Only ancestors matter: a disjoint I of the same size is separated from J
  // at least as far as the ancestor of J at that level is from J.
  for (int d = J.depth - p.r; d >= cap; --d) {
    const Cube I = g.ancestor(J, J.depth - d);
    const double li = static_cast<double>(I.size);
    const double dist = static_cast<double>(dist_child_boundaries(J, I, g.n()));
    if (dist <= 0.5 * std::pow(lj, p.eps) * std::pow(li, 1.0 - p.eps)) return false;
  }
  return true;
}

}  // namespace sobolab
