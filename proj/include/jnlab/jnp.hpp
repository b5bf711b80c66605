#pragma once

// John-Nirenberg functionals: the global partition functional (exact over
// shifted dyadic families via tree DP), the local functional over dilated-cube
// families, distribution functions, weak norms, and the inequality ratios.

#include <optional>

#include "jnlab/dyadic.hpp"
#include "jnlab/john.hpp"

namespace jnlab {

/// Real-valued function sampled at the occupied cell centers of a domain.
/// Values are indexed by flat grid index; complement entries are ignored.
struct GridFunction {
  const RasterDomain* domain = nullptr;
  RVec values;

  const RasterDomain& G() const { return *domain; }
};

inline GridFunction make_grid_function(const RasterDomain& G,
                                       const std::function<double(const RVec&)>& eval) {
  GridFunction f;
  f.domain = &G;
  f.values.assign(G.size(), 0.0);
  for (Index c = 0; c < G.size(); ++c) {
    if (!G.occ[c]) continue;
    const double v = eval(G.center(c));
    if (!std::isfinite(v)) throw std::runtime_error("function value not finite");
    f.values[c] = v;
  }
  return f;
}

/// Integral average of f over the whole domain.
inline double domain_mean(const GridFunction& f) {
  const RasterDomain& G = f.G();
  double sum = 0.0;
  for (Index c = 0; c < G.size(); ++c)
    if (G.occ[c]) sum += f.values[c];
  return sum / static_cast<double>(G.occupiedCount);
}

struct JNParams {
  double p = 2.0;
  double lambda = 10.0 / 9.0 - 1e-6;  // local dilation factor
  int overlapBound = 8;               // N: max pointwise multiplicity of a local family
  int J = 0;                          // DP depth; 0 means the domain resolution
};

namespace detail {

inline std::vector<Index> box_cells(const RasterDomain& G, const Cube& box) {
  std::vector<Index> cells;
  for_cells_in_box(G, box, [&](Index f) { cells.push_back(f); });
  return cells;
}

inline double mean_of(const GridFunction& f, const std::vector<Index>& cells) {
  double s = 0.0;
  for (Index c : cells) s += f.values[c];
  return s / static_cast<double>(cells.size());
}

// Cells intersecting a box together with their overlap fractions. For boxes
// aligned to whole cells the weights are exactly 0 or 1.
struct WeightedCells {
  std::vector<Index> cells;
  RVec weights;
  double weightSum = 0.0;
};

inline WeightedCells weighted_box_cells(const RasterDomain& G, const Cube& box) {
  WeightedCells out;
  const double h = G.cell();
  Cube grab = box;
  grab.side += h;  // centers of every intersecting cell lie in the grown box
  for_cells_in_box(G, grab, [&](Index f) {
    const RVec c = G.center(f);
    double w = 1.0;
    for (int i = 0; i < G.n; ++i) {
      const double lo = std::max(box.lo(i), c[i] - 0.5 * h);
      const double hi = std::min(box.hi(i), c[i] + 0.5 * h);
      if (hi <= lo) {
        w = 0.0;
        break;
      }
      w *= (hi - lo) / h;
    }
    if (w > 0.0) {
      out.cells.push_back(f);
      out.weights.push_back(w);
      out.weightSum += w;
    }
  });
  return out;
}

inline double weighted_mean(const GridFunction& f, const WeightedCells& wc) {
  double s = 0.0;
  for (std::size_t i = 0; i < wc.cells.size(); ++i) s += wc.weights[i] * f.values[wc.cells[i]];
  return s / wc.weightSum;
}

inline double weighted_osc(const GridFunction& f, const WeightedCells& wc) {
  const double mean = weighted_mean(f, wc);
  double s = 0.0;
  for (std::size_t i = 0; i < wc.cells.size(); ++i)
    s += wc.weights[i] * std::abs(f.values[wc.cells[i]] - mean);
  return s / wc.weightSum;
}

}  // namespace detail

/// Mean oscillation over an axis-parallel cube contained in the domain.
/// Partial boundary cells enter with their overlap fraction, so boxes aligned
/// to whole cells reduce to exact cell sums.
inline double mean_oscillation(const GridFunction& f, const Cube& box) {
  const RasterDomain& G = f.G();
  auto wc = detail::weighted_box_cells(G, box);
  if (wc.cells.empty()) throw std::invalid_argument("cube not contained in G");
  for (Index c : wc.cells)
    if (!G.occ[c]) throw std::invalid_argument("cube not contained in G");
  return detail::weighted_osc(f, wc);
}

inline double mean_oscillation(const GridFunction& f, const DyadicCube& q) {
  return mean_oscillation(f, to_cube(q));
}

/// Result of a partition-functional optimization. The realized family is
/// box(Q) = dilate(Q + shift*cell, dilation) for Q in partition.
struct DPResult {
  double value = 0.0;
  std::vector<DyadicCube> partition;
  IVec shift;              // grid-cell offset of the dyadic lattice; empty or zeros if none
  double dilation = 1.0;   // 9/8 for Whitney-star families
  double residualMeasure = 0.0;
};

/// Geometric box realized by a partition entry.
inline Cube dp_box(const DPResult& r, const RasterDomain& G, std::size_t i) {
  const auto& q = r.partition[i];
  Cube c = to_cube(q);
  if (!r.shift.empty())
    for (int ax = 0; ax < G.n; ++ax) c.center[ax] += static_cast<double>(r.shift[ax]) * G.cell();
  return dilate(c, r.dilation);
}

/// Recompute sum |B| (mean osc over B)^p from the recorded family.
inline double recompute_dp_value(const GridFunction& f, const DPResult& r, double p) {
  const RasterDomain& G = f.G();
  double total = 0.0;
  for (std::size_t i = 0; i < r.partition.size(); ++i) {
    const Cube box = dp_box(r, G, i);
    total += box.measure() * std::pow(mean_oscillation(f, box), p);
  }
  return total;
}

namespace detail {

struct DPGrid {
  IVec lo, dims;  // anchor range per level
  RVec forest, own;
  std::vector<std::uint8_t> admissible;

  Index idx(const IVec& a) const {
    Index f = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) f = f * dims[i] + (a[i] - lo[i]);
    return f;
  }
  bool inRange(const IVec& a) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (a[i] < lo[i] || a[i] >= lo[i] + dims[i]) return false;
    return true;
  }
};

// Prefix sums of f over the grid for O(1) box sums.
struct FieldPrefix {
  const RasterDomain* G;
  RVec prefix;
  IVec pd;

  explicit FieldPrefix(const GridFunction& f) : G(f.domain) {
    const int n = G->n;
    pd.resize(n);
    Index psize = 1;
    for (int i = 0; i < n; ++i) {
      pd[i] = G->dims[i] + 1;
      psize *= pd[i];
    }
    prefix.assign(psize, 0.0);
    IVec idx(n, 0);
    for (Index pf = 0; pf < psize; ++pf) {
      Index rem = pf;
      for (int i = n - 1; i >= 0; --i) {
        idx[i] = rem % pd[i];
        rem /= pd[i];
      }
      bool interior = true;
      for (int i = 0; i < n; ++i) interior = interior && idx[i] > 0;
      double val = 0.0;
      if (interior) {
        IVec c(n);
        for (int i = 0; i < n; ++i) c[i] = idx[i] - 1;
        const Index cf = G->flatten(c);
        val = G->occ[cf] ? f.values[cf] : 0.0;
        for (Index mask = 1; mask < (Index(1) << n); ++mask) {
          int bits = 0;
          Index qf = 0;
          for (int i = 0; i < n; ++i) {
            const Index b = (mask >> i) & 1;
            bits += static_cast<int>(b);
            qf = qf * pd[i] + (idx[i] - b);
          }
          val += (bits % 2 == 1 ? 1.0 : -1.0) * prefix[qf];
        }
      }
      prefix[pf] = val;
    }
  }

  double boxSum(const IVec& lo, const IVec& hi) const {
    const int n = G->n;
    double total = 0.0;
    for (Index mask = 0; mask < (Index(1) << n); ++mask) {
      IVec corner(n);
      int sign = 1;
      for (int i = 0; i < n; ++i) {
        if ((mask >> i) & 1) {
          corner[i] = lo[i];
          sign = -sign;
        } else {
          corner[i] = hi[i];
        }
      }
      Index pf = 0;
      for (int i = 0; i < n; ++i) pf = pf * pd[i] + std::clamp<Index>(corner[i], 0, pd[i] - 1);
      total += sign * prefix[pf];
    }
    return total;
  }
};

struct ShiftedDP {
  const GridFunction& f;
  const RasterDomain& G;
  const FieldPrefix& fp;
  double p;
  int depth;   // bottom DP level
  IVec shift;  // lattice offset in cells
  std::vector<DPGrid> levels;

  // grid cell range [lo, hi) of cube (level, anchor) under the shift
  void cellRange(int level, const IVec& a, IVec& lo, IVec& hi) const {
    const Index S = Index(1) << (G.J - level);
    for (int i = 0; i < G.n; ++i) {
      lo[i] = a[i] * S + shift[i] - G.anchorLo[i];
      hi[i] = lo[i] + S;
    }
  }

  void run() {
    levels.assign(depth + 1, {});
    for (int l = depth; l >= 0; --l) {
      DPGrid& L = levels[l];
      const Index S = Index(1) << (G.J - l);
      L.lo.resize(G.n);
      L.dims.resize(G.n);
      Index count = 1;
      for (int i = 0; i < G.n; ++i) {
        const Index aLo = G.anchorLo[i] + G.occLo_[i] - shift[i];
        const Index aHi = G.anchorLo[i] + G.occHi_[i] - shift[i];
        L.lo[i] = floor_div(aLo, S);
        L.dims[i] = floor_div(aHi, S) - L.lo[i] + 1;
        count *= L.dims[i];
      }
      L.forest.assign(count, 0.0);
      L.own.assign(count, 0.0);
      L.admissible.assign(count, 0);
      IVec a(L.lo);
      while (true) {
        const Index id = L.idx(a);
        IVec clo(G.n), chi(G.n);
        cellRange(l, a, clo, chi);
        bool inside = true;
        for (int i = 0; i < G.n; ++i)
          inside = inside && clo[i] >= 0 && chi[i] <= G.dims[i];
        const Index volume = Index(1) << ((G.J - l) * G.n);
        IVec qlo(clo), qhi(chi);
        for (int i = 0; i < G.n; ++i) {
          qlo[i] = std::clamp<Index>(qlo[i], 0, G.dims[i]);
          qhi[i] = std::clamp<Index>(qhi[i], 0, G.dims[i]);
        }
        const Index occCount = G.countOccupied(qlo, qhi);
        if (inside && occCount == volume) {
          L.admissible[id] = 1;
          const double mean = fp.boxSum(clo, chi) / static_cast<double>(volume);
          double dev = 0.0;
          IVec c(clo);
          while (true) {
            dev += std::abs(f.values[G.flatten(c)] - mean);
            int ax = G.n - 1;
            while (ax >= 0) {
              if (++c[ax] < chi[ax]) break;
              c[ax] = clo[ax];
              --ax;
            }
            if (ax < 0) break;
          }
          const double osc = dev / static_cast<double>(volume);
          const double msr = std::ldexp(1.0, -l * G.n);
          L.own[id] = msr * std::pow(osc, p);
        }
        double childSum = 0.0;
        if (l < depth) {
          const DPGrid& C = levels[l + 1];
          IVec ca(G.n);
          for (Index mask = 0; mask < (Index(1) << G.n); ++mask) {
            for (int i = 0; i < G.n; ++i) ca[i] = 2 * a[i] + ((mask >> i) & 1);
            if (C.inRange(ca)) childSum += C.forest[C.idx(ca)];
          }
        }
        L.forest[id] = L.admissible[id] ? std::max(L.own[id], childSum) : childSum;
        int ax = G.n - 1;
        while (ax >= 0) {
          if (++a[ax] < L.lo[ax] + L.dims[ax]) break;
          a[ax] = L.lo[ax];
          --ax;
        }
        if (ax < 0) break;
      }
    }
  }

  double value() const {
    double total = 0.0;
    const DPGrid& R = levels[0];
    for (double v : R.forest) total += v;
    return total;
  }

  void trace(int level, const IVec& a, std::vector<DyadicCube>& out) const {
    const DPGrid& L = levels[level];
    if (!L.inRange(a)) return;
    const Index id = L.idx(a);
    IVec clo(G.n), chi(G.n), qlo(G.n), qhi(G.n);
    cellRange(level, a, clo, chi);
    for (int i = 0; i < G.n; ++i) {
      qlo[i] = std::clamp<Index>(clo[i], 0, G.dims[i]);
      qhi[i] = std::clamp<Index>(chi[i], 0, G.dims[i]);
    }
    if (G.countOccupied(qlo, qhi) == 0) return;
    double childSum = 0.0;
    if (level < depth) {
      const DPGrid& C = levels[level + 1];
      IVec ca(G.n);
      for (Index mask = 0; mask < (Index(1) << G.n); ++mask) {
        for (int i = 0; i < G.n; ++i) ca[i] = 2 * a[i] + ((mask >> i) & 1);
        if (C.inRange(ca)) childSum += C.forest[C.idx(ca)];
      }
    }
    if (L.admissible[id] && L.own[id] >= childSum) {
      out.push_back(DyadicCube{level, a});
      return;
    }
    if (level < depth) {
      IVec ca(G.n);
      for (Index mask = 0; mask < (Index(1) << G.n); ++mask) {
        for (int i = 0; i < G.n; ++i) ca[i] = 2 * a[i] + ((mask >> i) & 1);
        trace(level + 1, ca, out);
      }
    }
  }
};

}  // namespace detail

/// Exact supremum of sum |Q| (mean osc)^p over partitions drawn from the
/// dyadic cubes contained in G with level <= params.J, by bottom-up tree DP.
/// Optional lattice shifts rerun the DP on translated dyadic grids and keep
/// the best. A lower bound for the unrestricted partition functional.
inline DPResult jn_global_dyadic(const GridFunction& f, const JNParams& params,
                                 const std::vector<IVec>& shifts = {}) {
  if (params.p <= 1.0) throw std::invalid_argument("exponent out of range");
  const RasterDomain& G = f.G();
  const int depth = (params.J >= 1 && params.J <= G.J) ? params.J : G.J;
  detail::FieldPrefix fp(f);

  std::vector<IVec> allShifts;
  allShifts.push_back(IVec(G.n, 0));
  for (const auto& s : shifts)
    if (!(s == IVec(G.n, 0))) allShifts.push_back(s);

  std::optional<DPResult> best;
  for (const auto& shift : allShifts) {
    detail::ShiftedDP dp{f, G, fp, params.p, depth, shift, {}};
    dp.run();
    const double value = dp.value();
    if (!best || value > best->value) {
      DPResult r;
      r.value = value;
      r.shift = shift;
      r.dilation = 1.0;
      const auto& R = dp.levels[0];
      IVec a(R.lo);
      if (!R.forest.empty()) {
        while (true) {
          dp.trace(0, a, r.partition);
          int ax = G.n - 1;
          while (ax >= 0) {
            if (++a[ax] < R.lo[ax] + R.dims[ax]) break;
            a[ax] = R.lo[ax];
            --ax;
          }
          if (ax < 0) break;
        }
      }
      double covered = 0.0;
      for (const auto& q : r.partition) covered += q.measure();
      r.residualMeasure = G.measure() - covered;
      best = std::move(r);
    }
  }
  return *best;
}

namespace detail {

// Sub-domain consisting of the cells of one partition box, with its own
// complement ring and distance field.
inline RasterDomain piece_domain(const RasterDomain& G, const IVec& cellLo, const IVec& cellHi) {
  RasterDomain S;
  S.n = G.n;
  S.J = G.J;
  S.anchorLo.resize(G.n);
  S.dims.resize(G.n);
  for (int i = 0; i < G.n; ++i) {
    S.anchorLo[i] = G.anchorLo[i] + cellLo[i] - 1;
    S.dims[i] = (cellHi[i] - cellLo[i]) + 2;
  }
  S.bboxLo.resize(G.n);
  S.bboxHi.resize(G.n);
  for (int i = 0; i < G.n; ++i) {
    S.bboxLo[i] = static_cast<double>(G.anchorLo[i] + cellLo[i]) * G.cell();
    S.bboxHi[i] = static_cast<double>(G.anchorLo[i] + cellHi[i]) * G.cell();
  }
  S.occ.assign(S.size(), 0);
  for (Index ff = 0; ff < S.size(); ++ff) {
    IVec sidx = S.unflatten(ff);
    bool ring = false;
    for (int i = 0; i < G.n; ++i)
      if (sidx[i] == 0 || sidx[i] == S.dims[i] - 1) ring = true;
    if (!ring) S.occ[ff] = 1;
  }
  RVec g(S.size());
  for (Index ff = 0; ff < S.size(); ++ff)
    g[ff] = S.occ[ff] ? std::numeric_limits<double>::infinity() : 0.0;
  detail::edt(g, S.dims);
  S.dist.assign(S.size(), 0.0);
  for (Index ff = 0; ff < S.size(); ++ff)
    if (S.occ[ff]) S.dist[ff] = std::sqrt(g[ff]) * S.cell();
  S.finalize();
  return S;
}

struct LocalFamily {
  std::vector<DyadicCube> cubes;  // cube + shift determines the star box
  IVec shift;
  std::string label;
};

inline Cube family_box(const RasterDomain& G, const DyadicCube& q, const IVec& shift,
                       double dilation) {
  Cube c = to_cube(q);
  if (!shift.empty())
    for (int i = 0; i < G.n; ++i) c.center[i] += static_cast<double>(shift[i]) * G.cell();
  return dilate(c, dilation);
}

// View of the domain with the dyadic lattice translated by -shift cells;
// Whitney cubes of the view are shifted cubes of the original.
inline RasterDomain shifted_view(const RasterDomain& G, const IVec& shift) {
  RasterDomain V = G;
  for (int i = 0; i < G.n; ++i) V.anchorLo[i] -= shift[i];
  return V;
}

}  // namespace detail

/// Candidate local families considered by jn_local: (a) the Whitney stars of
/// G, (b) per-piece Whitney stars of the optimal dyadic partition, and (c)
/// Whitney stars on half-cube-shifted lattices, which keep oscillation
/// visible when f jumps exactly along dyadic lines. Extra lattice shifts are
/// merged into the search.
inline std::vector<detail::LocalFamily> local_candidate_families(
    const GridFunction& f, const WhitneyDecomposition& W, const JNParams& params,
    const std::vector<IVec>& shifts = {}) {
  const RasterDomain& G = f.G();
  std::vector<detail::LocalFamily> candidates;
  {
    detail::LocalFamily fam;
    fam.cubes = W.cubes;
    fam.shift = IVec(G.n, 0);
    fam.label = "whitney-stars";
    candidates.push_back(std::move(fam));
  }
  {
    DPResult global = jn_global_dyadic(f, params, shifts);
    detail::LocalFamily fam;
    fam.shift = global.shift;
    fam.label = "partition-whitney-stars";
    const RasterDomain view = detail::shifted_view(G, global.shift);
    for (const auto& piece : global.partition) {
      const Index S = Index(1) << (G.J - piece.level);
      IVec cellLo(G.n), cellHi(G.n);
      for (int i = 0; i < G.n; ++i) {
        cellLo[i] = piece.anchor[i] * S - view.anchorLo[i];
        cellHi[i] = cellLo[i] + S;
      }
      RasterDomain sub = detail::piece_domain(view, cellLo, cellHi);
      WhitneyDecomposition Wsub = whitney(sub);
      for (const auto& q : Wsub.cubes) fam.cubes.push_back(q);
    }
    candidates.push_back(std::move(fam));
  }
  std::vector<IVec> lattice;
  for (int s = 1; s <= 4; ++s) {
    const Index d = Index(1) << (G.J - s - 1);
    if (d < 1) break;
    lattice.push_back(IVec(G.n, d));
  }
  for (const auto& s : shifts)
    if (!(s == IVec(G.n, 0))) lattice.push_back(s);
  for (const auto& delta : lattice) {
    detail::LocalFamily fam;
    fam.shift = delta;
    fam.label = "shifted-whitney-stars";
    fam.cubes = whitney(detail::shifted_view(G, delta)).cubes;
    candidates.push_back(std::move(fam));
  }
  return candidates;
}

/// Best value of sum |R*| (mean osc over R*)^p over candidate local families:
/// (a) the Whitney stars of G, (b) per-piece Whitney stars of the optimal
/// dyadic partition (including shifted variants). Families must satisfy
/// lambda R* inside G and pointwise overlap <= N; invalid families are
/// rejected.
inline DPResult jn_local(const GridFunction& f, const WhitneyDecomposition& W,
                         const JNParams& params, const std::vector<IVec>& shifts = {}) {
  if (params.p <= 1.0) throw std::invalid_argument("exponent out of range");
  if (params.lambda <= 1.0) throw std::invalid_argument("dilation factor must exceed 1");
  const RasterDomain& G = f.G();
  const double dil = 9.0 / 8.0;
  const auto candidates = local_candidate_families(f, W, params, shifts);
  std::optional<DPResult> best;
  for (const auto& fam : candidates) {
    if (fam.cubes.empty()) continue;
    // validate: lambda-dilated stars inside G (every intersected cell
    // occupied), pointwise box overlap <= N
    bool valid = true;
    std::vector<std::uint16_t> mult(G.size(), 0);
    for (const auto& q : fam.cubes) {
      const Cube lbox = detail::family_box(G, q, fam.shift, dil * params.lambda);
      const auto wc = detail::weighted_box_cells(G, lbox);
      if (wc.cells.empty()) valid = false;
      for (Index c : wc.cells)
        if (!G.occ[c]) valid = false;
      if (!valid) break;
      const Cube box = detail::family_box(G, q, fam.shift, dil);
      for_cells_in_box(G, box, [&](Index c) { ++mult[c]; });
    }
    if (valid) {
      for (Index c = 0; c < G.size(); ++c)
        if (mult[c] > params.overlapBound) {
          valid = false;
          break;
        }
    }
    if (!valid) continue;

    double value = 0.0;
    Index coveredCells = 0;
    for (Index c = 0; c < G.size(); ++c)
      if (G.occ[c] && mult[c] > 0) ++coveredCells;
    for (const auto& q : fam.cubes) {
      const Cube box = detail::family_box(G, q, fam.shift, dil);
      const auto wc = detail::weighted_box_cells(G, box);
      value += box.measure() * std::pow(detail::weighted_osc(f, wc), params.p);
    }
    if (!best || value > best->value) {
      DPResult r;
      r.value = value;
      r.partition = fam.cubes;
      r.shift = fam.shift;
      r.dilation = dil;
      r.residualMeasure = G.measure() - static_cast<double>(coveredCells) * G.cellVolume();
      best = std::move(r);
    }
  }
  if (!best) throw std::runtime_error("no local partition found");
  return *best;
}

/// Distribution function of |f - c| with exact jump handling on the raster.
struct DistributionProfile {
  double c = 0.0;
  RVec sigmas;       // distinct values of |f - c|, ascending
  RVec measures;     // |{ |f - c| > sigma_i }|
  RVec measuresGE;   // |{ |f - c| >= sigma_i }|
  double totalMeasure = 0.0;

  /// sup over sigma of sigma^p |{ |f - c| > sigma }|; attained at a jump.
  double weakNorm(double p) const {
    double best = 0.0;
    for (std::size_t i = 0; i < sigmas.size(); ++i)
      if (sigmas[i] > 0.0) best = std::max(best, std::pow(sigmas[i], p) * measuresGE[i]);
    return best;
  }
};

inline DistributionProfile distribution(const GridFunction& f, double c) {
  const RasterDomain& G = f.G();
  RVec devs;
  devs.reserve(G.occupiedCount);
  for (Index cf = 0; cf < G.size(); ++cf)
    if (G.occ[cf]) devs.push_back(std::abs(f.values[cf] - c));
  std::sort(devs.begin(), devs.end());
  DistributionProfile prof;
  prof.c = c;
  prof.totalMeasure = G.measure();
  const double vol = G.cellVolume();
  std::size_t i = 0;
  while (i < devs.size()) {
    std::size_t j = i;
    while (j < devs.size() && devs[j] == devs[i]) ++j;
    prof.sigmas.push_back(devs[i]);
    prof.measuresGE.push_back(static_cast<double>(devs.size() - i) * vol);
    prof.measures.push_back(static_cast<double>(devs.size() - j) * vol);
    i = j;
  }
  return prof;
}

/// Optimal-center weak norm: minimizes the weak norm over the centering
/// constant. The finite candidate scan (values, midpoints) is followed by a
/// symmetric ternary refinement of the best brackets, because branch
/// crossings need not fall on midpoints.
struct OptCenter {
  double c = 0.0;
  double weakNorm = 0.0;
};

namespace detail {

struct WeakNormEvaluator {
  RVec w;     // distinct values ascending
  RVec mass;  // per value
  double p;

  // walk distances from c in descending order from both ends; the consumed
  // mass is exactly |{ |f - c| >= d }| when d is evaluated
  double operator()(double c) const {
    std::ptrdiff_t i = 0, j = static_cast<std::ptrdiff_t>(w.size()) - 1;
    double consumed = 0.0, best = 0.0;
    while (i <= j) {
      const double d = std::max(c - w[i], w[j] - c);
      if (d <= 0.0) break;
      while (i <= j && c - w[i] == d) consumed += mass[i++];
      while (i <= j && w[j] - c == d) consumed += mass[j--];
      best = std::max(best, std::pow(d, p) * consumed);
    }
    return best;
  }
};

}  // namespace detail

inline OptCenter weak_norm_opt_c(const GridFunction& f, double p) {
  if (p <= 1.0) throw std::invalid_argument("exponent out of range");
  const RasterDomain& G = f.G();
  const double vol = G.cellVolume();
  RVec vals;
  vals.reserve(G.occupiedCount);
  for (Index c = 0; c < G.size(); ++c)
    if (G.occ[c]) vals.push_back(f.values[c]);
  std::sort(vals.begin(), vals.end());

  detail::WeakNormEvaluator eval;
  eval.p = p;
  for (std::size_t i = 0; i < vals.size();) {
    std::size_t j = i;
    while (j < vals.size() && vals[j] == vals[i]) ++j;
    eval.w.push_back(vals[i]);
    eval.mass.push_back(static_cast<double>(j - i) * vol);
    i = j;
  }

  const std::size_t m = eval.w.size();
  if (m == 1) return OptCenter{eval.w[0], 0.0};

  RVec cands;
  if (m <= 2048) {
    cands = eval.w;
    for (std::size_t i = 0; i + 1 < m; ++i) cands.push_back(0.5 * (eval.w[i] + eval.w[i + 1]));
  } else {
    // quantile subsample; the ternary refinement recovers the local optimum
    for (std::size_t k = 0; k < 2048; ++k) {
      const std::size_t i = (k * (m - 1)) / 2047;
      cands.push_back(eval.w[i]);
      if (i + 1 < m) cands.push_back(0.5 * (eval.w[i] + eval.w[i + 1]));
    }
  }
  if (m <= 400) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) cands.push_back(0.5 * (eval.w[i] + eval.w[j]));
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  RVec scores(cands.size());
  std::size_t bestIdx = 0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    scores[i] = eval(cands[i]);
    if (scores[i] < scores[bestIdx]) bestIdx = i;
  }

  // refine the brackets around the best few candidates; symmetric ternary
  // probes keep the search affine-equivariant
  std::vector<std::size_t> order(cands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double bestC = cands[bestIdx], bestW = scores[bestIdx];
  const std::size_t refineCount = std::min<std::size_t>(order.size(), 12);
  for (std::size_t oi = 0; oi < refineCount; ++oi) {
    const std::size_t i = order[oi];
    double lo = (i == 0) ? cands[i] : cands[i - 1];
    double hi = (i + 1 == cands.size()) ? cands[i] : cands[i + 1];
    for (int it = 0; it < 120 && hi - lo > 0.0; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      const double w1 = eval(m1), w2 = eval(m2);
      if (w1 < bestW) {
        bestW = w1;
        bestC = m1;
      }
      if (w2 < bestW) {
        bestW = w2;
        bestC = m2;
      }
      if (w1 < w2)
        hi = m2;
      else if (w2 < w1)
        lo = m1;
      else {
        lo = m1;
        hi = m2;
      }
    }
  }
  return OptCenter{bestC, bestW};
}

struct RatioReport {
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
  bool infinite = false;  // numerator > 0 over a vanishing denominator
};

namespace detail {

inline RatioReport make_ratio(double num, double den) {
  RatioReport r;
  r.numerator = num;
  r.denominator = den;
  if (num == 0.0) {
    r.ratio = 0.0;
  } else if (den == 0.0) {
    r.ratio = std::numeric_limits<double>::infinity();
    r.infinite = true;
  } else {
    r.ratio = num / den;
  }
  return r;
}

}  // namespace detail

/// Weak-type inequality ratio: weak norm of f - f_G against the local
/// functional.
inline RatioReport weak_type_ratio(const GridFunction& f, const WhitneyDecomposition& W,
                                   const JNParams& params,
                                   const std::vector<IVec>& shifts = {}) {
  if (params.p <= 1.0) throw std::invalid_argument("exponent out of range");
  const RasterDomain& G = f.G();
  if (!G.connected) throw std::invalid_argument("f_G meaningless across components");
  const double fG = domain_mean(f);
  const double num = distribution(f, fG).weakNorm(params.p);
  const double den = jn_local(f, W, params, shifts).value;
  return detail::make_ratio(num, den);
}

/// Local-to-global ratio: global dyadic functional against the local one.
inline RatioReport local_to_global_ratio(const GridFunction& f, const WhitneyDecomposition& W,
                                         const JNParams& params,
                                         const std::vector<IVec>& shifts = {}) {
  const double num = jn_global_dyadic(f, params, shifts).value;
  const double den = jn_local(f, W, params, shifts).value;
  return detail::make_ratio(num, den);
}

inline RatioReport local_to_global_ratio(const GridFunction& f, const JNParams& params,
                                         const std::vector<IVec>& shifts = {}) {
  return local_to_global_ratio(f, whitney(f.G()), params, shifts);
}

struct LemmaReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool infinite = false;
};

/// Chain-decomposition bound: both centered mean oscillations of f over the
/// domain against the Whitney-star sum, normalized by |H|.
inline LemmaReport lemma_chain_bound(const GridFunction& f, const ChainDecomposition& cd,
                                     double p) {
  if (p <= 1.0) throw std::invalid_argument("exponent out of range");
  if (cd.domain == nullptr || cd.chains.empty())
    throw std::invalid_argument("requires chain decomposition");
  const RasterDomain& G = *cd.domain;
  const auto& W = cd.whitney;

  const double fH = domain_mean(f);
  const Cube q0s = star(W.cubes[cd.centerCube]);
  const double fQ0 = detail::weighted_mean(f, detail::weighted_box_cells(G, q0s));

  double devH = 0.0, devQ0 = 0.0;
  for (Index c = 0; c < G.size(); ++c) {
    if (!G.occ[c]) continue;
    devH += std::abs(f.values[c] - fH);
    devQ0 += std::abs(f.values[c] - fQ0);
  }
  const double count = static_cast<double>(G.occupiedCount);
  const double lhs = std::pow(devQ0 / count, p) + std::pow(devH / count, p);

  double rhs = 0.0;
  for (const auto& q : W.cubes) {
    const Cube box = star(q);
    rhs += box.measure() * std::pow(detail::weighted_osc(f, detail::weighted_box_cells(G, box)), p);
  }
  rhs /= G.measure();

  LemmaReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  const RatioReport r = detail::make_ratio(lhs, rhs);
  rep.ratio = r.ratio;
  rep.infinite = r.infinite;
  return rep;
}

}  // namespace jnlab
