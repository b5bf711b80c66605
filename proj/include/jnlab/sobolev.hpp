#pragma once

// Necessity-side checks: discrete gradients, the (q*, q)-Poincare quotient,
// its weak-norm variant, and the fractional weak quotient driven by a
// pairwise double sum.

#include "jnlab/jnp.hpp"

namespace jnlab {

/// Per-axis finite-difference field on occupied cells, in domain units.
struct GradientField {
  const RasterDomain* domain = nullptr;
  std::vector<RVec> comps;  // comps[axis][flatIndex]

  double normAt(Index f) const {
    double s = 0.0;
    for (const auto& c : comps) s += c[f] * c[f];
    return std::sqrt(s);
  }
};

/// Forward differences where the forward neighbor is occupied, backward
/// otherwise, zero where the cell is isolated along the axis. The one-sided
/// stencil stays inside the domain near the boundary.
inline GradientField gradient(const GridFunction& f) {
  const RasterDomain& G = f.G();
  GradientField out;
  out.domain = f.domain;
  out.comps.assign(G.n, RVec(G.size(), 0.0));
  const double h = G.cell();
  for (Index c = 0; c < G.size(); ++c) {
    if (!G.occ[c]) continue;
    const IVec idx = G.unflatten(c);
    for (int ax = 0; ax < G.n; ++ax) {
      IVec fwd = idx, bwd = idx;
      fwd[ax] += 1;
      bwd[ax] -= 1;
      const bool hasFwd = G.inGrid(fwd) && G.occ[G.flatten(fwd)];
      const bool hasBwd = G.inGrid(bwd) && G.occ[G.flatten(bwd)];
      if (hasFwd)
        out.comps[ax][c] = (f.values[G.flatten(fwd)] - f.values[c]) / h;
      else if (hasBwd)
        out.comps[ax][c] = (f.values[c] - f.values[G.flatten(bwd)]) / h;
    }
  }
  return out;
}

struct QuotientReport {
  double q = 1.0;
  double qStar = 0.0;      // nq/(n-q), or nq/(n - delta q) for the fractional form
  double delta = 0.0;      // 0 when not applicable
  double lhs = 0.0;
  double rhs = 0.0;
  double quotient = 0.0;
  bool infinite = false;
  bool nearExponentBoundary = false;  // fractional form close to p = n/(n-delta)
};

namespace detail {

inline void fill_ratio(QuotientReport& rep) {
  const RatioReport r = make_ratio(rep.lhs, rep.rhs);
  rep.quotient = r.ratio;
  rep.infinite = r.infinite;
}

inline double gradient_energy(const GridFunction& f, double q) {
  const RasterDomain& G = f.G();
  const GradientField grad = gradient(f);
  double s = 0.0;
  for (Index c = 0; c < G.size(); ++c)
    if (G.occ[c]) s += std::pow(grad.normAt(c), q);
  return s * G.cellVolume();
}

}  // namespace detail

/// Strong (q*, q)-Poincare quotient: int |f - f_G|^{q*} over
/// (int |grad f|^q)^{q*/q}, both as Riemann sums.
inline QuotientReport poincare_quotient(const GridFunction& f, double q) {
  const RasterDomain& G = f.G();
  if (q >= G.n) throw std::invalid_argument("Sobolev exponent undefined");
  if (q < 1.0) throw std::invalid_argument("exponent out of range");
  QuotientReport rep;
  rep.q = q;
  rep.qStar = G.n * q / (G.n - q);
  const double fG = domain_mean(f);
  double lhs = 0.0;
  for (Index c = 0; c < G.size(); ++c)
    if (G.occ[c]) lhs += std::pow(std::abs(f.values[c] - fG), rep.qStar);
  rep.lhs = lhs * G.cellVolume();
  rep.rhs = std::pow(detail::gradient_energy(f, q), rep.qStar / q);
  detail::fill_ratio(rep);
  return rep;
}

/// Weak variant: the optimal-center weak norm at exponent q* replaces the
/// strong integral on the left side.
inline QuotientReport weak_poincare_quotient(const GridFunction& f, double q) {
  const RasterDomain& G = f.G();
  if (q >= G.n) throw std::invalid_argument("Sobolev exponent undefined");
  if (q < 1.0) throw std::invalid_argument("exponent out of range");
  QuotientReport rep;
  rep.q = q;
  rep.qStar = G.n * q / (G.n - q);
  rep.lhs = weak_norm_opt_c(f, rep.qStar).weakNorm;
  rep.rhs = std::pow(detail::gradient_energy(f, q), rep.qStar / q);
  detail::fill_ratio(rep);
  return rep;
}

/// Fractional weak quotient: the optimal-center weak norm at p = nq/(n-dq)
/// against the Gagliardo-type double sum, exact when the pair count fits the
/// budget and unbiasedly subsampled otherwise. Diagonal pairs are excluded.
inline QuotientReport fractional_weak_quotient(const GridFunction& f, double q, double delta,
                                               Index pairBudget, std::uint64_t seed) {
  const RasterDomain& G = f.G();
  if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("delta must be in (0, 1)");
  if (q <= 1.0 || q >= G.n / delta)
    throw std::invalid_argument("exponent out of range: need 1 < q < n/delta");
  if (pairBudget < 1) throw std::invalid_argument("pair budget must be positive");
  QuotientReport rep;
  rep.q = q;
  rep.delta = delta;
  rep.qStar = G.n * q / (G.n - delta * q);  // p = q^{*,delta}
  const double boundary = G.n / (G.n - delta);
  rep.nearExponentBoundary = rep.qStar < 1.05 * boundary;

  std::vector<Index> occ;
  occ.reserve(G.occupiedCount);
  for (Index c = 0; c < G.size(); ++c)
    if (G.occ[c]) occ.push_back(c);
  const Index m = static_cast<Index>(occ.size());
  const double kernelPow = G.n + delta * q;
  const double vol2 = G.cellVolume() * G.cellVolume();

  auto integrand = [&](Index a, Index b) {
    const RVec xa = G.center(occ[a]), xb = G.center(occ[b]);
    double d2 = 0.0;
    for (int i = 0; i < G.n; ++i) d2 += (xa[i] - xb[i]) * (xa[i] - xb[i]);
    const double diff = std::abs(f.values[occ[a]] - f.values[occ[b]]);
    return std::pow(diff, q) / std::pow(std::sqrt(d2), kernelPow);
  };

  double base = 0.0;
  const Index totalPairs = m * (m - 1);
  if (m * m <= pairBudget) {
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b)
        if (a != b) base += integrand(a, b);
    base *= vol2;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> pick(0, m - 1);
    std::uniform_int_distribution<Index> pickOther(0, m - 2);
    double acc = 0.0;
    for (Index t = 0; t < pairBudget; ++t) {
      const Index a = pick(rng);
      Index b = pickOther(rng);
      if (b >= a) ++b;
      acc += integrand(a, b);
    }
    base = acc / static_cast<double>(pairBudget) * static_cast<double>(totalPairs) * vol2;
  }

  rep.lhs = weak_norm_opt_c(f, rep.qStar).weakNorm;
  rep.rhs = std::pow(base, rep.qStar / q);
  detail::fill_ratio(rep);
  return rep;
}

}  // namespace jnlab
