#pragma once

// Dyadic cube geometry, rasterized domains with boundary distance fields,
// Whitney decompositions, and the Aikawa boundary-integral probe.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace jnlab {

using Index = std::int64_t;
using IVec = std::vector<Index>;
using RVec = std::vector<double>;

namespace detail {

inline Index floor_div(Index a, Index b) {
  // b > 0
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}

}  // namespace detail

/// Closed dyadic cube prod_i [k_i 2^-j, (k_i+1) 2^-j]; canonical (level, anchor) form.
struct DyadicCube {
  int level = 0;
  IVec anchor;

  int dim() const { return static_cast<int>(anchor.size()); }
  double side() const { return std::ldexp(1.0, -level); }
  double diameter() const { return std::sqrt(static_cast<double>(dim())) * side(); }
  double measure() const { return std::ldexp(1.0, -level * dim()); }

  double lo(int axis) const { return static_cast<double>(anchor[axis]) * side(); }
  double hi(int axis) const { return static_cast<double>(anchor[axis] + 1) * side(); }

  RVec midpoint() const {
    RVec c(anchor.size());
    for (int i = 0; i < dim(); ++i) c[i] = (static_cast<double>(anchor[i]) + 0.5) * side();
    return c;
  }

  bool operator==(const DyadicCube& o) const { return level == o.level && anchor == o.anchor; }
  bool operator!=(const DyadicCube& o) const { return !(*this == o); }
  bool operator<(const DyadicCube& o) const {
    if (level != o.level) return level < o.level;
    return anchor < o.anchor;
  }

  std::vector<DyadicCube> children() const {
    std::vector<DyadicCube> out;
    const int n = dim();
    out.reserve(std::size_t(1) << n);
    for (Index mask = 0; mask < (Index(1) << n); ++mask) {
      DyadicCube c;
      c.level = level + 1;
      c.anchor.resize(n);
      for (int i = 0; i < n; ++i) c.anchor[i] = 2 * anchor[i] + ((mask >> i) & 1);
      out.push_back(std::move(c));
    }
    return out;
  }

  DyadicCube parent() const {
    DyadicCube p;
    p.level = level - 1;
    p.anchor.resize(anchor.size());
    for (std::size_t i = 0; i < anchor.size(); ++i) p.anchor[i] = detail::floor_div(anchor[i], 2);
    return p;
  }
};

/// Axis-parallel closed cube given by center and side length.
struct Cube {
  RVec center;
  double side = 1.0;

  int dim() const { return static_cast<int>(center.size()); }
  double lo(int axis) const { return center[axis] - 0.5 * side; }
  double hi(int axis) const { return center[axis] + 0.5 * side; }
  double measure() const { return std::pow(side, dim()); }

  bool contains(const RVec& p) const {
    for (int i = 0; i < dim(); ++i)
      if (p[i] < lo(i) || p[i] > hi(i)) return false;
    return true;
  }
};

inline Cube dilate(const Cube& q, double lambda) { return Cube{q.center, lambda * q.side}; }

inline Cube to_cube(const DyadicCube& q) { return Cube{q.midpoint(), q.side()}; }

/// Q* = (9/8)Q.
inline Cube star(const DyadicCube& q) { return dilate(to_cube(q), 9.0 / 8.0); }

/// Lebesgue measure of the intersection of two axis-parallel cubes.
inline double overlap_measure(const Cube& a, const Cube& b) {
  double v = 1.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double w = std::min(a.hi(i), b.hi(i)) - std::max(a.lo(i), b.lo(i));
    if (w <= 0.0) return 0.0;
    v *= w;
  }
  return v;
}

/// A proper open subset of R^n sampled on the level-J dyadic grid.
///
/// The grid covers the requested bounding box plus a one-cell complement ring;
/// occupancy is decided by the membership predicate at cell centers, and the
/// distance field holds the exact Euclidean distance from each occupied cell
/// center to the nearest complement cell center.
struct RasterDomain {
  int n = 2;
  int J = 1;
  IVec anchorLo;   // level-J anchor of grid cell (0,...,0); includes the pad ring
  IVec dims;       // grid extent in cells per axis (padded)
  RVec bboxLo, bboxHi;  // requested bounding box (without the pad ring)
  std::vector<std::uint8_t> occ;
  RVec dist;       // distance at cell centers; 0 on complement cells
  bool connected = false;
  Index occupiedCount = 0;

  double cell() const { return std::ldexp(1.0, -J); }
  double cellVolume() const { return std::ldexp(1.0, -J * n); }

  Index size() const {
    Index s = 1;
    for (Index d : dims) s *= d;
    return s;
  }

  Index flatten(const IVec& idx) const {
    Index f = 0;
    for (int i = 0; i < n; ++i) f = f * dims[i] + idx[i];
    return f;
  }

  IVec unflatten(Index flat) const {
    IVec idx(n);
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = flat % dims[i];
      flat /= dims[i];
    }
    return idx;
  }

  RVec center(const IVec& idx) const {
    RVec c(n);
    for (int i = 0; i < n; ++i) c[i] = (static_cast<double>(anchorLo[i] + idx[i]) + 0.5) * cell();
    return c;
  }
  RVec center(Index flat) const { return center(unflatten(flat)); }

  bool inGrid(const IVec& idx) const {
    for (int i = 0; i < n; ++i)
      if (idx[i] < 0 || idx[i] >= dims[i]) return false;
    return true;
  }

  double measure() const { return static_cast<double>(occupiedCount) * cellVolume(); }

  /// Diagonal of the tight bounding box of occupied cells, in domain units.
  double diameter() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = static_cast<double>(occHi_[i] - occLo_[i] + 1) * cell();
      s += w * w;
    }
    return std::sqrt(s);
  }

  /// Number of occupied cells with grid index in the half-open box [lo, hi).
  Index countOccupied(const IVec& lo, const IVec& hi) const {
    for (int i = 0; i < n; ++i)
      if (hi[i] <= lo[i]) return 0;
    Index total = 0;
    // inclusion-exclusion over prefix sums; corners pick hi (bit=0) or lo (bit=1)
    for (Index mask = 0; mask < (Index(1) << n); ++mask) {
      IVec corner(n);
      int sign = 1;
      for (int i = 0; i < n; ++i) {
        if ((mask >> i) & 1) {
          corner[i] = std::clamp<Index>(lo[i], 0, dims[i]);
          sign = -sign;
        } else {
          corner[i] = std::clamp<Index>(hi[i], 0, dims[i]);
        }
      }
      total += sign * prefixAt(corner);
    }
    return total;
  }

  // construction helpers (used by rasterize)
  void finalize();

  IVec occLo_, occHi_;           // tight occupied index bounds
  std::vector<Index> prefix_;    // (dims+1)-shaped prefix sums of occupancy

 private:
  Index prefixAt(const IVec& p) const {
    Index f = 0;
    for (int i = 0; i < n; ++i) f = f * (dims[i] + 1) + p[i];
    return prefix_[f];
  }
};

namespace detail {

// 1D squared distance transform (Felzenszwalb-Huttenlocher lower envelope).
inline void dt1d(RVec& f, RVec& d, std::vector<int>& v, RVec& z) {
  const int m = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < m; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < m; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = (q - v[k]) * double(q - v[k]) + f[v[k]];
  }
}

// Exact n-dimensional squared Euclidean distance transform, in cell units.
// Input: 0 at source cells, +inf elsewhere.
inline void edt(RVec& g, const IVec& dims) {
  const int n = static_cast<int>(dims.size());
  Index total = 1;
  for (Index d : dims) total *= d;
  Index strideAfter = 1;  // product of dims after the current axis
  for (int axis = n - 1; axis >= 0; --axis) {
    const Index m = dims[axis];
    RVec f(m), d(m);
    std::vector<int> v(m);
    RVec z(m + 1);
    const Index lines = total / m;
    for (Index line = 0; line < lines; ++line) {
      // decompose line index into (before, after) parts around the axis
      const Index after = line % strideAfter;
      const Index before = line / strideAfter;
      const Index base = before * m * strideAfter + after;
      for (Index i = 0; i < m; ++i) f[i] = g[base + i * strideAfter];
      dt1d(f, d, v, z);
      for (Index i = 0; i < m; ++i) g[base + i * strideAfter] = d[i];
    }
    strideAfter *= m;
  }
}

}  // namespace detail

inline void RasterDomain::finalize() {
  occupiedCount = 0;
  occLo_.assign(n, std::numeric_limits<Index>::max());
  occHi_.assign(n, std::numeric_limits<Index>::min());
  for (Index f = 0; f < size(); ++f) {
    if (!occ[f]) continue;
    ++occupiedCount;
    IVec idx = unflatten(f);
    for (int i = 0; i < n; ++i) {
      occLo_[i] = std::min(occLo_[i], idx[i]);
      occHi_[i] = std::max(occHi_[i], idx[i]);
    }
  }
  // prefix sums over the (dims+1)^n lattice
  IVec pd(n);
  Index psize = 1;
  for (int i = 0; i < n; ++i) {
    pd[i] = dims[i] + 1;
    psize *= pd[i];
  }
  prefix_.assign(psize, 0);
  IVec idx(n, 0);
  // iterate lattice in lexicographic order; P[p] = sum_{cells < p componentwise}
  for (Index f = 0; f < psize; ++f) {
    Index rem = f;
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = rem % pd[i];
      rem /= pd[i];
    }
    Index val = 0;
    bool interior = true;
    for (int i = 0; i < n; ++i) interior = interior && idx[i] > 0;
    if (interior) {
      IVec c(n);
      for (int i = 0; i < n; ++i) c[i] = idx[i] - 1;
      val = occ[flatten(c)] ? 1 : 0;
      // P(p) = a(p-1) + sum over nonempty S of (-1)^(|S|+1) P(p - e_S)
      for (Index mask = 1; mask < (Index(1) << n); ++mask) {
        int bits = 0;
        Index pf = 0;
        for (int i = 0; i < n; ++i) {
          const Index b = (mask >> i) & 1;
          bits += static_cast<int>(b);
          pf = pf * pd[i] + (idx[i] - b);
        }
        val += (bits % 2 == 1 ? 1 : -1) * prefix_[pf];
      }
    }
    prefix_[f] = val;
  }
  // connectivity over occupied cells, face adjacency
  connected = false;
  if (occupiedCount > 0) {
    std::vector<std::uint8_t> seen(size(), 0);
    Index start = -1;
    for (Index f = 0; f < size(); ++f)
      if (occ[f]) {
        start = f;
        break;
      }
    std::vector<Index> stack{start};
    seen[start] = 1;
    Index reached = 0;
    while (!stack.empty()) {
      const Index f = stack.back();
      stack.pop_back();
      ++reached;
      IVec idx = unflatten(f);
      for (int i = 0; i < n; ++i) {
        for (int d = -1; d <= 1; d += 2) {
          IVec nb = idx;
          nb[i] += d;
          if (!inGrid(nb)) continue;
          const Index g = flatten(nb);
          if (occ[g] && !seen[g]) {
            seen[g] = 1;
            stack.push_back(g);
          }
        }
      }
    }
    connected = (reached == occupiedCount);
  }
}

/// Rasterize a membership predicate over [bboxLo, bboxHi] at resolution J.
///
/// The predicate is evaluated at cell centers. Throws "empty domain" when no
/// cell is occupied and "not a proper subset" when the predicate holds on the
/// whole padded grid.
inline RasterDomain rasterize(const std::function<bool(const RVec&)>& member, RVec bboxLo,
                              RVec bboxHi, int J, int n) {
  if (J < 1) throw std::invalid_argument("resolution J must be >= 1");
  if (n < 1 || static_cast<int>(bboxLo.size()) != n || static_cast<int>(bboxHi.size()) != n)
    throw std::invalid_argument("bounding box dimension mismatch");
  RasterDomain G;
  G.n = n;
  G.J = J;
  G.bboxLo = bboxLo;
  G.bboxHi = bboxHi;
  const double h = G.cell();
  G.anchorLo.resize(n);
  G.dims.resize(n);
  IVec specLo(n), specHi(n);
  for (int i = 0; i < n; ++i) {
    specLo[i] = static_cast<Index>(std::floor(bboxLo[i] / h + 1e-9));
    specHi[i] = static_cast<Index>(std::ceil(bboxHi[i] / h - 1e-9));
    if (specHi[i] <= specLo[i]) throw std::invalid_argument("degenerate bounding box");
    G.anchorLo[i] = specLo[i] - 1;  // pad ring
    G.dims[i] = (specHi[i] - specLo[i]) + 2;
  }
  G.occ.assign(G.size(), 0);
  bool allMember = true;
  for (Index f = 0; f < G.size(); ++f) {
    IVec idx = G.unflatten(f);
    bool ring = false;
    for (int i = 0; i < n; ++i)
      if (idx[i] == 0 || idx[i] == G.dims[i] - 1) ring = true;
    const bool m = member(G.center(idx));
    allMember = allMember && m;
    if (!ring && m) G.occ[f] = 1;
  }
  if (allMember) throw std::invalid_argument("not a proper subset");
  Index count = 0;
  for (auto o : G.occ) count += o;
  if (count == 0) throw std::invalid_argument("empty domain");

  // exact EDT against complement cell centers, then to domain units
  RVec g(G.size());
  for (Index f = 0; f < G.size(); ++f)
    g[f] = G.occ[f] ? std::numeric_limits<double>::infinity() : 0.0;
  detail::edt(g, G.dims);
  G.dist.assign(G.size(), 0.0);
  for (Index f = 0; f < G.size(); ++f)
    if (G.occ[f]) G.dist[f] = std::sqrt(g[f]) * h;

  // chamfer relaxation pass; a no-op for the exact transform, kept as the
  // documented 1-Lipschitz clamp
  for (int sweep = 0; sweep < 2; ++sweep) {
    const bool fwd = (sweep == 0);
    for (Index c = 0; c < G.size(); ++c) {
      const Index f = fwd ? c : G.size() - 1 - c;
      if (!G.occ[f]) continue;
      IVec idx = G.unflatten(f);
      for (int i = 0; i < n; ++i) {
        for (int d = -1; d <= 1; d += 2) {
          IVec nb = idx;
          nb[i] += d;
          if (!G.inGrid(nb)) continue;
          const Index o = G.flatten(nb);
          const double bound = (G.occ[o] ? G.dist[o] : 0.0) + h;
          if (G.dist[f] > bound) G.dist[f] = bound;
        }
      }
    }
  }
  G.finalize();
  return G;
}

/// Whitney decomposition: maximal dyadic cubes (levels 0..J) inside the domain
/// whose estimated boundary distance is at least their diameter.
struct WhitneyDecomposition {
  std::vector<DyadicCube> cubes;
  std::map<int, std::vector<int>> byLevel;
  double residual = 0.0;              // measure of occupied cells not covered
  std::vector<std::int32_t> cellCube; // per grid cell: covering cube index or -1
  int starOverlapMax = 0;             // observed max star multiplicity at cell centers

  int cubeAtCell(Index flat) const { return cellCube[flat]; }
};

namespace detail {

// Distance-field lookup at a point given in half-cell integer units relative
// to the grid origin. Even coordinates sit on cell boundaries; ties resolve to
// the lexicographically smaller cell.
inline double field_at(const RasterDomain& G, const IVec& halfUnits) {
  IVec idx(G.n);
  for (int i = 0; i < G.n; ++i) {
    const Index q = halfUnits[i];
    Index cellIdx = (q % 2 != 0) ? (q - 1) / 2 : q / 2 - 1;
    idx[i] = std::clamp<Index>(cellIdx, 0, G.dims[i] - 1);
  }
  const Index f = G.flatten(idx);
  return G.occ[f] ? G.dist[f] : 0.0;
}

// Conservative estimate of dist(Q, boundary): min of the field over the cube's
// corners and center, minus the cube radius.
inline double dist_estimate(const RasterDomain& G, int level, const IVec& anchor) {
  const int n = G.n;
  const Index scale = Index(1) << (G.J + 1 - level);  // half-cells per cube side
  double minField = std::numeric_limits<double>::infinity();
  IVec q(n);
  for (Index mask = 0; mask < (Index(1) << n); ++mask) {
    for (int i = 0; i < n; ++i)
      q[i] = (anchor[i] + ((mask >> i) & 1)) * scale - 2 * G.anchorLo[i];
    minField = std::min(minField, field_at(G, q));
  }
  for (int i = 0; i < n; ++i) q[i] = anchor[i] * scale + scale / 2 - 2 * G.anchorLo[i];
  minField = std::min(minField, field_at(G, q));
  const double radius = 0.5 * std::sqrt(double(n)) * std::ldexp(1.0, -level);
  return minField - radius;
}

struct WhitneyBuilder {
  const RasterDomain& G;
  WhitneyDecomposition& W;

  // grid index range [lo, hi) of the cube's level-J cells
  bool cellRange(int level, const IVec& anchor, IVec& lo, IVec& hi) const {
    const Index scale = Index(1) << (G.J - level);
    for (int i = 0; i < G.n; ++i) {
      lo[i] = anchor[i] * scale - G.anchorLo[i];
      hi[i] = lo[i] + scale;
      if (hi[i] <= 0 || lo[i] >= G.dims[i]) return false;
    }
    return true;
  }

  void visit(int level, const IVec& anchor) {
    IVec lo(G.n), hi(G.n);
    if (!cellRange(level, anchor, lo, hi)) return;
    bool inside = true;
    for (int i = 0; i < G.n; ++i)
      inside = inside && lo[i] >= 0 && hi[i] <= G.dims[i];
    const Index volume = Index(1) << ((G.J - level) * G.n);
    IVec clo(lo), chi(hi);
    for (int i = 0; i < G.n; ++i) {
      clo[i] = std::max<Index>(clo[i], 0);
      chi[i] = std::min<Index>(chi[i], G.dims[i]);
    }
    const Index occCount = G.countOccupied(clo, chi);
    if (occCount == 0) return;
    if (inside && occCount == volume) {
      const double diam = std::sqrt(double(G.n)) * std::ldexp(1.0, -level);
      if (dist_estimate(G, level, anchor) >= diam) {
        const int id = static_cast<int>(W.cubes.size());
        W.cubes.push_back(DyadicCube{level, anchor});
        W.byLevel[level].push_back(id);
        markCells(lo, hi, id);
        return;
      }
    }
    if (level < G.J) {
      IVec child(G.n);
      for (Index mask = 0; mask < (Index(1) << G.n); ++mask) {
        for (int i = 0; i < G.n; ++i) child[i] = 2 * anchor[i] + ((mask >> i) & 1);
        visit(level + 1, child);
      }
    }
  }

  void markCells(const IVec& lo, const IVec& hi, int id) {
    IVec idx(lo);
    while (true) {
      W.cellCube[G.flatten(idx)] = id;
      int axis = G.n - 1;
      while (axis >= 0) {
        if (++idx[axis] < hi[axis]) break;
        idx[axis] = lo[axis];
        --axis;
      }
      if (axis < 0) break;
    }
  }
};

}  // namespace detail

/// Iterate the grid indices of cells whose centers lie in `box`, clipped to the grid.
/// Calls fn(flatIndex) for each.
template <typename Fn>
void for_cells_in_box(const RasterDomain& G, const Cube& box, Fn&& fn) {
  const double h = G.cell();
  IVec lo(G.n), hi(G.n);
  for (int i = 0; i < G.n; ++i) {
    // center of cell k is at (anchorLo+k+0.5)h; center in [lo, hi] of the box
    lo[i] = static_cast<Index>(std::ceil((box.lo(i) / h) - 0.5 - 1e-12)) - G.anchorLo[i];
    hi[i] = static_cast<Index>(std::floor((box.hi(i) / h) - 0.5 + 1e-12)) + 1 - G.anchorLo[i];
    lo[i] = std::max<Index>(lo[i], 0);
    hi[i] = std::min<Index>(hi[i], G.dims[i]);
    if (lo[i] >= hi[i]) return;
  }
  IVec idx(lo);
  while (true) {
    fn(G.flatten(idx));
    int axis = G.n - 1;
    while (axis >= 0) {
      if (++idx[axis] < hi[axis]) break;
      idx[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
}

inline WhitneyDecomposition whitney(const RasterDomain& G) {
  WhitneyDecomposition W;
  W.cellCube.assign(G.size(), -1);
  detail::WhitneyBuilder builder{G, W};
  // level-0 roots covering the occupied region
  IVec rootLo(G.n), rootHi(G.n);
  const Index scale = Index(1) << G.J;
  for (int i = 0; i < G.n; ++i) {
    rootLo[i] = detail::floor_div(G.anchorLo[i] + G.occLo_[i], scale);
    rootHi[i] = detail::floor_div(G.anchorLo[i] + G.occHi_[i], scale) + 1;
  }
  IVec root(rootLo);
  while (true) {
    builder.visit(0, root);
    int axis = G.n - 1;
    while (axis >= 0) {
      if (++root[axis] < rootHi[axis]) break;
      root[axis] = rootLo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
  Index uncovered = 0;
  for (Index f = 0; f < G.size(); ++f)
    if (G.occ[f] && W.cellCube[f] < 0) ++uncovered;
  W.residual = static_cast<double>(uncovered) * G.cellVolume();

  // observed star multiplicity at occupied cell centers
  std::vector<std::uint16_t> mult(G.size(), 0);
  for (const auto& q : W.cubes) {
    for_cells_in_box(G, star(q), [&](Index f) { ++mult[f]; });
  }
  int maxMult = 0;
  for (Index f = 0; f < G.size(); ++f)
    if (G.occ[f]) maxMult = std::max(maxMult, static_cast<int>(mult[f]));
  W.starOverlapMax = maxMult;
  return W;
}

/// Cell-exact verification report for a Whitney decomposition.
struct WhitneyStats {
  std::size_t cubeCount = 0;
  double residual = 0.0;
  double coverageGap = 0.0;   // |G| - sum |Q| - residual
  bool disjoint = false;      // every cube's cells are marked exactly once
  bool contained = false;     // all cube cells occupied
  bool distanceBounds = false;          // 3/4 diam <= dist <= 6 diam at star cell centers
  double minDistRatio = 0.0;  // min over cubes/star samples of dist/diam
  double maxDistRatio = 0.0;
  int starOverlapMax = 0;
};

inline WhitneyStats check_whitney(const RasterDomain& G, const WhitneyDecomposition& W) {
  WhitneyStats s;
  s.cubeCount = W.cubes.size();
  s.residual = W.residual;
  s.starOverlapMax = W.starOverlapMax;
  s.disjoint = true;
  s.contained = true;
  s.distanceBounds = true;
  s.minDistRatio = std::numeric_limits<double>::infinity();
  s.maxDistRatio = 0.0;
  double covered = 0.0;
  std::vector<Index> cellsSeen(W.cubes.size(), 0);
  for (Index f = 0; f < G.size(); ++f) {
    const int id = W.cellCube[f];
    if (id >= 0) {
      ++cellsSeen[id];
      if (!G.occ[f]) s.contained = false;
    }
  }
  for (std::size_t id = 0; id < W.cubes.size(); ++id) {
    const auto& q = W.cubes[id];
    covered += q.measure();
    const Index want = Index(1) << ((G.J - q.level) * G.n);
    if (cellsSeen[id] != want) s.disjoint = false;  // clipped or double-marked
    const double diam = q.diameter();
    for_cells_in_box(G, star(q), [&](Index f) {
      if (!G.occ[f]) {
        s.distanceBounds = false;
        return;
      }
      const double r = G.dist[f] / diam;
      s.minDistRatio = std::min(s.minDistRatio, r);
      s.maxDistRatio = std::max(s.maxDistRatio, r);
      if (r < 0.75 - 1e-12 || r > 6.0 + 1e-12) s.distanceBounds = false;
    });
  }
  s.coverageGap = G.measure() - covered - W.residual;
  if (W.cubes.empty()) s.minDistRatio = 0.0;
  return s;
}

/// One random trial of the boundary integral estimate.
struct AikawaTrial {
  RVec y;
  double r = 0.0;
  double integral = 0.0;
  double ratio = 0.0;
};

/// Empirical record of sup over (y, r) of r^-s * integral_{B(y,r)} dist^{s-n}.
struct AikawaReport {
  double s = 0.0;
  double epsilon = 0.0;  // n - s
  std::vector<AikawaTrial> trials;
  double supRatio = 0.0;
};

/// Complement cells face-adjacent to an occupied cell; their centers stand in
/// for boundary points.
inline std::vector<Index> boundary_cells(const RasterDomain& G) {
  std::vector<Index> out;
  for (Index f = 0; f < G.size(); ++f) {
    if (G.occ[f]) continue;
    IVec idx = G.unflatten(f);
    bool adj = false;
    for (int i = 0; i < G.n && !adj; ++i) {
      for (int d = -1; d <= 1 && !adj; d += 2) {
        IVec nb = idx;
        nb[i] += d;
        if (G.inGrid(nb) && G.occ[G.flatten(nb)]) adj = true;
      }
    }
    if (adj) out.push_back(f);
  }
  return out;
}

inline AikawaReport aikawa_probe(const RasterDomain& G, double s, int trials,
                                 std::uint64_t seed) {
  if (s <= 0.0) throw std::invalid_argument("exponent must be positive");
  if (s >= G.n) throw std::invalid_argument("exponent must be < n");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  AikawaReport rep;
  rep.s = s;
  rep.epsilon = G.n - s;
  const auto boundary = boundary_cells(G);
  if (boundary.empty()) throw std::runtime_error("domain has no boundary cells");
  std::mt19937_64 rng(seed);
  const double h = G.cell();
  const double rLo = 4.0 * h;
  const double rHi = std::max(G.diameter(), rLo * (1.0 + 1e-9));
  std::uniform_int_distribution<std::size_t> pickY(0, boundary.size() - 1);
  std::uniform_real_distribution<double> pickU(0.0, 1.0);
  rep.trials.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    const Index yf = boundary[pickY(rng)];
    const RVec y = G.center(yf);
    const double r = rLo * std::pow(rHi / rLo, pickU(rng));
    Cube ball;
    ball.center = y;
    ball.side = 2.0 * r;
    double sum = 0.0;
    for_cells_in_box(G, ball, [&](Index f) {
      if (!G.occ[f]) return;
      const RVec c = G.center(f);
      double d2 = 0.0;
      for (int i = 0; i < G.n; ++i) d2 += (c[i] - y[i]) * (c[i] - y[i]);
      if (d2 > r * r) return;
      sum += std::pow(G.dist[f], s - G.n);
    });
    AikawaTrial trial;
    trial.y = y;
    trial.r = r;
    trial.integral = sum * G.cellVolume();
    trial.ratio = trial.integral / std::pow(r, s);
    rep.supRatio = std::max(rep.supRatio, trial.ratio);
    rep.trials.push_back(std::move(trial));
  }
  return rep;
}

}  // namespace jnlab
