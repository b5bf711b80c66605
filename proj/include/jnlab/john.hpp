#pragma once

// John-condition probing via discrete deep-seeking geodesics, chain
// decompositions of Whitney cubes with shadows, and verification of the
// chain conditions.

#include <queue>
#include <sstream>

#include "jnlab/dyadic.hpp"

namespace jnlab {

struct JohnSample {
  RVec x;
  double length = 0.0;      // arc length of the curve from x to the center
  double worstRatio = 0.0;  // max over traversed cells of t / dist
};

/// One-sided certificate for the John condition: a concrete family of curves
/// realizes betaEstimate, so the true John constant of the rasterized domain
/// is at most this value.
struct JohnReport {
  RVec center;
  double betaEstimate = 1.0;
  std::vector<JohnSample> samples;
  double lengthBoundRatio = 0.0;  // max curve length / diam(G)
};

namespace detail {

inline Index cell_of(const RasterDomain& G, const RVec& p) {
  IVec idx(G.n);
  const double h = G.cell();
  for (int i = 0; i < G.n; ++i) {
    const double u = p[i] / h - static_cast<double>(G.anchorLo[i]);
    double fl = std::floor(u);
    Index k = static_cast<Index>(fl);
    if (u == fl) k -= 1;  // points on a gridline belong to the lower cell
    if (k < 0 || k >= G.dims[i]) throw std::invalid_argument("center outside domain");
    idx[i] = k;
  }
  return G.flatten(idx);
}

inline std::vector<IVec> moore_offsets(int n) {
  std::vector<IVec> out;
  IVec d(n, -1);
  while (true) {
    bool allZero = true;
    for (Index v : d) allZero = allZero && v == 0;
    if (!allZero) out.push_back(d);
    int ax = n - 1;
    while (ax >= 0) {
      if (++d[ax] <= 1) break;
      d[ax] = -1;
      --ax;
    }
    if (ax < 0) break;
  }
  return out;
}

/// Shortest-path tree for the cost sum(step * (1/dist(a) + 1/dist(b)) / 2)
/// over occupied cells with full diagonal adjacency. The cost rewards curves
/// that stay deep inside the domain.
struct Geodesics {
  Index source = -1;
  std::vector<double> cost;
  std::vector<Index> parent;

  bool reached(Index f) const { return parent[f] >= 0 || f == source; }
};

inline Geodesics dijkstra_deep(const RasterDomain& G, Index source) {
  Geodesics out;
  out.source = source;
  out.cost.assign(G.size(), std::numeric_limits<double>::infinity());
  out.parent.assign(G.size(), -1);
  const double h = G.cell();
  const auto offsets = moore_offsets(G.n);
  RVec stepLen(offsets.size());
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    int nz = 0;
    for (Index v : offsets[k]) nz += (v != 0);
    stepLen[k] = h * std::sqrt(static_cast<double>(nz));
  }
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  out.cost[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    const auto [c, u] = pq.top();
    pq.pop();
    if (c > out.cost[u]) continue;
    const IVec idx = G.unflatten(u);
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      IVec nb = idx;
      bool ok = true;
      for (int i = 0; i < G.n; ++i) {
        nb[i] += offsets[k][i];
        if (nb[i] < 0 || nb[i] >= G.dims[i]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const Index v = G.flatten(nb);
      if (!G.occ[v]) continue;
      const double w = stepLen[k] * 0.5 * (1.0 / G.dist[u] + 1.0 / G.dist[v]);
      const double nc = out.cost[u] + w;
      if (nc < out.cost[v]) {
        out.cost[v] = nc;
        out.parent[v] = u;
        pq.push({nc, v});
      } else if (nc == out.cost[v] && u < out.parent[v]) {
        out.parent[v] = u;  // lexicographic tie-break, cost unchanged
      }
    }
  }
  return out;
}

/// Walk the tree path from `from` to the source, visiting each cell with its
/// arc position t measured from `from`. Returns the total arc length.
template <typename Fn>
double walk_path(const RasterDomain& G, const Geodesics& geo, Index from, Fn&& visit) {
  const double h = G.cell();
  double t = 0.0;
  Index cur = from;
  visit(cur, 0.0);
  while (cur != geo.source) {
    const Index nxt = geo.parent[cur];
    if (nxt < 0) throw std::runtime_error("sample unreachable");
    const IVec a = G.unflatten(cur), b = G.unflatten(nxt);
    int nz = 0;
    for (int i = 0; i < G.n; ++i) nz += (a[i] != b[i]);
    t += h * std::sqrt(static_cast<double>(nz));
    cur = nxt;
    visit(cur, t);
  }
  return t;
}

}  // namespace detail

/// Estimate the John constant from x0 by routing discrete deep-seeking curves
/// from sampled cells to x0. Upper estimate: the curves exhibited achieve it.
inline JohnReport john_probe(const RasterDomain& G, const RVec& x0, int samples,
                             std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const Index cell0 = detail::cell_of(G, x0);
  if (!G.occ[cell0]) throw std::invalid_argument("center outside domain");
  const auto geo = detail::dijkstra_deep(G, cell0);

  std::vector<Index> occupied;
  occupied.reserve(G.occupiedCount);
  for (Index f = 0; f < G.size(); ++f)
    if (G.occ[f]) occupied.push_back(f);

  std::vector<Index> chosen;
  if (static_cast<Index>(samples) >= G.occupiedCount) {
    chosen = occupied;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, occupied.size() - 1);
    chosen.reserve(samples);
    for (int i = 0; i < samples; ++i) chosen.push_back(occupied[pick(rng)]);
  }

  JohnReport rep;
  rep.center = x0;
  double maxLen = 0.0;
  double maxRatio = 0.0;
  rep.samples.reserve(chosen.size());
  for (Index f : chosen) {
    if (!geo.reached(f)) throw std::runtime_error("sample unreachable");
    JohnSample s;
    s.x = G.center(f);
    s.worstRatio = 0.0;
    s.length = detail::walk_path(G, geo, f, [&](Index c, double t) {
      s.worstRatio = std::max(s.worstRatio, t / G.dist[c]);
    });
    maxLen = std::max(maxLen, s.length);
    maxRatio = std::max(maxRatio, s.worstRatio);
    rep.samples.push_back(std::move(s));
  }
  rep.lengthBoundRatio = maxLen / G.diameter();
  rep.betaEstimate = std::max({1.0, maxRatio, rep.lengthBoundRatio});
  return rep;
}

/// Chain of Whitney cubes joining the central cube to a terminal cube.
/// Entries are indices into the decomposition's cube list.
struct Chain {
  int terminal = -1;
  std::vector<int> sequence;  // Q_0 first, terminal last, no duplicates
};

struct ChainDecomposition {
  const RasterDomain* domain = nullptr;
  WhitneyDecomposition whitney;
  int centerCube = -1;
  RVec center;
  std::vector<Chain> chains;              // aligned with whitney.cubes
  std::vector<std::vector<int>> shadows;  // R -> terminals Q with R in C(Q)
  double curveConstant = 1.0;             // empirical rho: max t / dist over all curves
};

namespace detail {

// Face-adjacency between Whitney cubes, read off the cell cover: for every
// cube face, the cube ids of the cell layer just outside.
inline std::vector<std::vector<int>> cube_adjacency(const RasterDomain& G,
                                                    const WhitneyDecomposition& W) {
  std::vector<std::vector<int>> adj(W.cubes.size());
  for (std::size_t id = 0; id < W.cubes.size(); ++id) {
    const auto& q = W.cubes[id];
    const Index scale = Index(1) << (G.J - q.level);
    IVec lo(G.n), hi(G.n);
    for (int i = 0; i < G.n; ++i) {
      lo[i] = q.anchor[i] * scale - G.anchorLo[i];
      hi[i] = lo[i] + scale;
    }
    for (int axis = 0; axis < G.n; ++axis) {
      for (int side = 0; side < 2; ++side) {
        IVec idx(lo);
        idx[axis] = side == 0 ? lo[axis] - 1 : hi[axis];
        if (idx[axis] < 0 || idx[axis] >= G.dims[axis]) continue;
        // iterate the (n-1)-dimensional face layer
        while (true) {
          if (G.inGrid(idx)) {
            const int other = W.cellCube[G.flatten(idx)];
            if (other >= 0 && other != static_cast<int>(id)) adj[id].push_back(other);
          }
          int ax = G.n - 1;
          while (ax >= 0) {
            if (ax == axis) {
              --ax;
              continue;
            }
            if (++idx[ax] < hi[ax]) break;
            idx[ax] = lo[ax];
            --ax;
          }
          if (ax < 0) break;
        }
      }
    }
    std::sort(adj[id].begin(), adj[id].end());
    adj[id].erase(std::unique(adj[id].begin(), adj[id].end()), adj[id].end());
  }
  return adj;
}

// Remove cube-level loops: keeps the first visit of each cube; every
// consecutive pair of the result was consecutive in the input.
inline std::vector<int> erase_loops(const std::vector<int>& seq, int cubeCount) {
  std::vector<int> stack;
  std::vector<int> pos(cubeCount, -1);
  for (int id : seq) {
    if (!stack.empty() && stack.back() == id) continue;
    if (pos[id] >= 0) {
      while (static_cast<int>(stack.size()) > pos[id] + 1) {
        pos[stack.back()] = -1;
        stack.pop_back();
      }
      continue;
    }
    pos[id] = static_cast<int>(stack.size());
    stack.push_back(id);
  }
  return stack;
}

inline double star_overlap_ratio(const WhitneyDecomposition& W, int a, int b) {
  const Cube sa = star(W.cubes[a]), sb = star(W.cubes[b]);
  const double ov = overlap_measure(sa, sb);
  return ov / std::max(sa.measure(), sb.measure());
}

}  // namespace detail

/// Build the chain decomposition: for each Whitney cube, route the discrete
/// deep curve from its midpoint to x0, read off the visited cubes (diagonal
/// steps expanded through face neighbors), erase loops, and repair any
/// consecutive pair whose stars fail the overlap bound by splicing a path in
/// the cube face-adjacency graph.
inline ChainDecomposition build_chains(const RasterDomain& G, const WhitneyDecomposition& W,
                                       const RVec& x0) {
  ChainDecomposition cd;
  cd.domain = &G;
  cd.whitney = W;
  cd.center = x0;
  const Index cell0 = detail::cell_of(G, x0);
  if (!G.occ[cell0]) throw std::invalid_argument("center outside domain");
  cd.centerCube = W.cellCube[cell0];
  if (cd.centerCube < 0)
    throw std::invalid_argument("center cell is not covered by a Whitney cube");
  const auto geo = detail::dijkstra_deep(G, cell0);
  const auto adj = detail::cube_adjacency(G, W);
  const int m = static_cast<int>(W.cubes.size());
  const double overlapFloor = 1.0 / 64.0;

  cd.chains.resize(m);
  cd.shadows.assign(m, {});
  double rho = 1.0;

  for (int qi = 0; qi < m; ++qi) {
    const Index target = detail::cell_of(G, W.cubes[qi].midpoint());
    if (!geo.reached(target)) throw std::runtime_error("sample unreachable");

    // raw cell path, terminal first; rho uses the unexpanded curve
    std::vector<Index> cells;
    detail::walk_path(G, geo, target, [&](Index c, double t) {
      cells.push_back(c);
      rho = std::max(rho, t / G.dist[c]);
    });

    // expand diagonal steps through face-adjacent cells where possible
    std::vector<Index> expanded;
    expanded.push_back(cells.front());
    for (std::size_t s = 0; s + 1 < cells.size(); ++s) {
      IVec a = G.unflatten(cells[s]);
      const IVec b = G.unflatten(cells[s + 1]);
      while (a != b) {
        int bestAxis = -1, bestRank = -1;
        for (int i = 0; i < G.n; ++i) {
          if (a[i] == b[i]) continue;
          IVec step = a;
          step[i] += (b[i] > a[i]) ? 1 : -1;
          const Index f = G.flatten(step);
          int rank = 0;
          if (G.occ[f]) rank = (W.cellCube[f] >= 0) ? 2 : 1;
          if (rank > bestRank) {
            bestRank = rank;
            bestAxis = i;
          }
        }
        if (bestRank <= 0) break;  // diagonal squeeze: keep the direct jump
        a[bestAxis] += (b[bestAxis] > a[bestAxis]) ? 1 : -1;
        expanded.push_back(G.flatten(a));
      }
      if (a != b) expanded.push_back(cells[s + 1]);
    }

    // visited cubes, loops erased; path runs terminal -> center
    std::vector<int> raw;
    for (Index c : expanded) {
      const int id = W.cellCube[c];
      if (id >= 0) raw.push_back(id);
    }
    std::vector<int> seq = detail::erase_loops(raw, m);

    // repair pairs that fail the overlap floor via the face-adjacency graph
    for (int round = 0; round < 3; ++round) {
      bool dirty = false;
      std::vector<int> repaired;
      repaired.push_back(seq.front());
      for (std::size_t s = 0; s + 1 < seq.size(); ++s) {
        const int a = seq[s], b = seq[s + 1];
        if (detail::star_overlap_ratio(W, a, b) >= overlapFloor) {
          repaired.push_back(b);
          continue;
        }
        // BFS from a to b over face neighbors
        std::vector<int> prev(m, -2);
        std::queue<int> bfs;
        bfs.push(a);
        prev[a] = -1;
        while (!bfs.empty() && prev[b] == -2) {
          const int u = bfs.front();
          bfs.pop();
          for (int v : adj[u])
            if (prev[v] == -2) {
              prev[v] = u;
              bfs.push(v);
            }
        }
        if (prev[b] == -2) {
          repaired.push_back(b);  // no bridge; keep the pair and record it
          continue;
        }
        std::vector<int> bridge;
        for (int v = b; v != a; v = prev[v]) bridge.push_back(v);
        for (auto it = bridge.rbegin(); it != bridge.rend(); ++it) repaired.push_back(*it);
        dirty = true;
      }
      seq = detail::erase_loops(repaired, m);
      if (!dirty) break;
    }

    // hard failure only when consecutive stars do not meet at all
    for (std::size_t s = 0; s + 1 < seq.size(); ++s) {
      if (detail::star_overlap_ratio(W, seq[s], seq[s + 1]) <= 0.0) {
        std::ostringstream msg;
        msg << "chain construction failed: cubes " << seq[s] << " and " << seq[s + 1]
            << " have disjoint stars (terminal " << qi << ")";
        throw std::runtime_error(msg.str());
      }
    }

    if (seq.back() != cd.centerCube || seq.front() != qi) {
      // the walk runs terminal -> center by construction; anything else is a bug
      std::ostringstream msg;
      msg << "chain construction failed: endpoints of chain " << qi;
      throw std::runtime_error(msg.str());
    }
    std::reverse(seq.begin(), seq.end());
    cd.chains[qi].terminal = qi;
    cd.chains[qi].sequence = std::move(seq);
  }
  cd.curveConstant = rho;

  for (int qi = 0; qi < m; ++qi)
    for (int r : cd.chains[qi].sequence) cd.shadows[r].push_back(qi);
  return cd;
}

struct ConditionCheck {
  bool pass = false;
  std::string witness;
};

struct ChainConditionReport {
  double p = 2.0;
  int tau = 0;
  double sigma = 0.0;
  double shadowRadiusConstant = 0.0;  // smallest C with shadows inside B(y_R, C l(R))
  double overlapConstant = 1.0;       // worst consecutive-star overlap ratio
  ConditionCheck condition1, condition2, condition3;
};

/// Verify chain conditions: the side-length bound, the per-level count bound
/// (both determine tau), and the shadow sum (sigma).
inline ChainConditionReport verify_chains(const ChainDecomposition& cd, double p) {
  if (p <= 1.0) throw std::invalid_argument("exponent out of range");
  if (cd.domain == nullptr || cd.chains.empty())
    throw std::invalid_argument("requires chain decomposition");
  const RasterDomain& G = *cd.domain;
  const auto& W = cd.whitney;
  ChainConditionReport rep;
  rep.p = p;

  // condition (1): smallest tau with l(Q) <= 2^tau l(R) for all R in C(Q)
  int tau1 = 0;
  int w1q = -1, w1r = -1;
  for (const auto& chain : cd.chains) {
    const int jq = W.cubes[chain.terminal].level;
    for (int r : chain.sequence) {
      const int d = W.cubes[r].level - jq;
      if (d > tau1) {
        tau1 = d;
        w1q = chain.terminal;
        w1r = r;
      }
    }
  }
  // condition (2): smallest tau with per-level chain counts <= 2^tau
  int maxCount = 1;
  int w2q = -1, w2level = 0;
  for (const auto& chain : cd.chains) {
    std::map<int, int> perLevel;
    for (int r : chain.sequence) ++perLevel[W.cubes[r].level];
    for (auto [lvl, cnt] : perLevel)
      if (cnt > maxCount) {
        maxCount = cnt;
        w2q = chain.terminal;
        w2level = lvl;
      }
  }
  int tau2 = 0;
  while ((1 << tau2) < maxCount) ++tau2;
  rep.tau = std::max(tau1, tau2);
  {
    std::ostringstream w;
    w << "max level gap " << tau1 << " (terminal " << w1q << ", chain cube " << w1r
      << "); max per-level count " << maxCount << " (terminal " << w2q << ", level "
      << w2level << ")";
    rep.condition1 = {true, w.str()};
    rep.condition2 = {true, w.str()};
  }

  // condition (3): observed supremum of the shadow sum
  double sigma = 0.0;
  int wr = -1;
  for (std::size_t r = 0; r < W.cubes.size(); ++r) {
    const int j = W.cubes[r].level;
    double sum = 0.0;
    for (int q : cd.shadows[r]) {
      const int k = W.cubes[q].level;
      sum += W.cubes[q].measure() * std::pow(double(rep.tau + 1 + k - j), p);
    }
    sum /= W.cubes[r].measure();
    if (sum > sigma) {
      sigma = sum;
      wr = static_cast<int>(r);
    }
  }
  rep.sigma = sigma;
  {
    std::ostringstream w;
    w << "sup attained at cube " << wr;
    rep.condition3 = {std::isfinite(sigma), w.str()};
  }

  // smallest C with union of shadow cubes inside B(y_R, C l(R))
  double cstd = 0.0;
  const double h = G.cell();
  for (std::size_t r = 0; r < W.cubes.size(); ++r) {
    const RVec xr = W.cubes[r].midpoint();
    const Index cellR = detail::cell_of(G, xr);
    const double dr = G.dist[cellR];
    // nearest complement cell center to xr, ties lexicographic
    RVec yr;
    double best = std::numeric_limits<double>::infinity();
    Cube box;
    box.center = xr;
    box.side = 2.0 * (dr + 2.0 * h);
    for_cells_in_box(G, box, [&](Index f) {
      if (G.occ[f]) return;
      const RVec c = G.center(f);
      double d2 = 0.0;
      for (int i = 0; i < G.n; ++i) d2 += (c[i] - xr[i]) * (c[i] - xr[i]);
      const double d = std::sqrt(d2);
      if (d < best - 1e-15) {
        best = d;
        yr = c;
      }
    });
    if (yr.empty()) continue;
    const double lR = W.cubes[r].side();
    for (int q : cd.shadows[r]) {
      const auto& cube = W.cubes[q];
      for (Index mask = 0; mask < (Index(1) << G.n); ++mask) {
        double d2 = 0.0;
        for (int i = 0; i < G.n; ++i) {
          const double corner = ((mask >> i) & 1) ? cube.hi(i) : cube.lo(i);
          d2 += (corner - yr[i]) * (corner - yr[i]);
        }
        cstd = std::max(cstd, std::sqrt(d2) / lR);
      }
    }
  }
  rep.shadowRadiusConstant = cstd;

  // worst consecutive-star overlap
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& chain : cd.chains)
    for (std::size_t s = 0; s + 1 < chain.sequence.size(); ++s)
      worst = std::min(worst,
                       detail::star_overlap_ratio(W, chain.sequence[s], chain.sequence[s + 1]));
  rep.overlapConstant = std::isfinite(worst) ? worst : 1.0;
  return rep;
}

}  // namespace jnlab
