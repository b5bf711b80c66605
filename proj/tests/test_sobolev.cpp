#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "jnlab/sobolev.hpp"

using namespace jnlab;

namespace {

RasterDomain make_square(int J) {
  auto pred = [](const RVec& p) {
    return p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0;
  };
  return rasterize(pred, {0.0, 0.0}, {1.0, 1.0}, J, 2);
}

RasterDomain make_cusp(int k, int J) {
  auto pred = [k](const RVec& p) {
    return p[0] > 0.0 && p[0] < 1.0 && std::abs(p[1]) < std::pow(p[0], k);
  };
  return rasterize(pred, {0.0, -1.0}, {1.0, 1.0}, J, 2);
}

}  // namespace

TEST_CASE("gradient of simple functions") {
  RasterDomain G = make_square(6);
  const double h = G.cell();

  SECTION("constant gives the zero field") {
    GridFunction f = make_grid_function(G, [](const RVec&) { return 3.0; });
    GradientField g = gradient(f);
    for (Index c = 0; c < G.size(); ++c)
      if (G.occ[c]) CHECK(g.normAt(c) == 0.0);
  }

  SECTION("affine functions are differentiated exactly") {
    GridFunction f = make_grid_function(G, [](const RVec& p) { return p[0]; });
    GradientField g = gradient(f);
    for (Index c = 0; c < G.size(); ++c)
      if (G.occ[c]) {
        CHECK(g.comps[0][c] == Catch::Approx(1.0).margin(1e-12));
        CHECK(g.comps[1][c] == Catch::Approx(0.0).margin(1e-12));
      }
  }

  SECTION("quadratic error obeys the Taylor remainder") {
    GridFunction f = make_grid_function(G, [](const RVec& p) { return p[0] * p[0]; });
    GradientField g = gradient(f);
    for (Index c = 0; c < G.size(); ++c) {
      if (!G.occ[c]) continue;
      const RVec x = G.center(c);
      CHECK(std::abs(g.comps[0][c] - 2.0 * x[0]) <= 2.0 * h + 1e-12);
    }
  }

  SECTION("zero gradient iff constant on each component") {
    auto twoRooms = [](const RVec& p) {
      const bool left = p[0] > 0.1 && p[0] < 0.3 && p[1] > 0.1 && p[1] < 0.3;
      const bool right = p[0] > 0.6 && p[0] < 0.9 && p[1] > 0.1 && p[1] < 0.3;
      return left || right;
    };
    RasterDomain D = rasterize(twoRooms, {0.0, 0.0}, {1.0, 1.0}, 6, 2);
    GridFunction f = make_grid_function(D, [](const RVec& p) { return p[0] < 0.5 ? 2.0 : 7.0; });
    GradientField g = gradient(f);
    for (Index c = 0; c < D.size(); ++c)
      if (D.occ[c]) CHECK(g.normAt(c) == 0.0);
  }
}

TEST_CASE("poincare quotient") {
  SECTION("parameter validation") {
    RasterDomain G = make_square(4);
    GridFunction f = make_grid_function(G, [](const RVec&) { return 0.0; });
    CHECK_THROWS_WITH(poincare_quotient(f, 2.0),
                      Catch::Matchers::ContainsSubstring("Sobolev exponent undefined"));
    CHECK_THROWS_WITH(poincare_quotient(f, 0.5),
                      Catch::Matchers::ContainsSubstring("exponent out of range"));
  }

  SECTION("constant function") {
    RasterDomain G = make_square(4);
    GridFunction f = make_grid_function(G, [](const RVec&) { return 2.0; });
    QuotientReport rep = poincare_quotient(f, 1.0);
    CHECK(rep.quotient == 0.0);
  }

  SECTION("linear function gives 1/12 on the square") {
    RasterDomain G = make_square(8);
    GridFunction f = make_grid_function(G, [](const RVec& p) { return p[0]; });
    QuotientReport rep = poincare_quotient(f, 1.0);
    CHECK(rep.qStar == Catch::Approx(2.0));
    CHECK(rep.rhs == Catch::Approx(1.0));
    CHECK(rep.quotient == Catch::Approx(1.0 / 12.0).epsilon(0.02));
  }

  SECTION("cusp tip functions have growing quotients") {
    double prev = 0.0;
    for (int k : {2, 3, 4, 5}) {
      RasterDomain G = make_cusp(k, 7);
      GridFunction f =
          make_grid_function(G, [k](const RVec& p) { return std::pow(p[0], 1.0 - k); });
      QuotientReport rep = poincare_quotient(f, 1.0);
      CHECK(std::isfinite(rep.quotient));
      CHECK(rep.quotient > prev);
      prev = rep.quotient;
    }
  }
}

TEST_CASE("weak poincare quotient") {
  RasterDomain G = make_square(7);

  SECTION("constant function") {
    GridFunction f = make_grid_function(G, [](const RVec&) { return 1.0; });
    CHECK(weak_poincare_quotient(f, 1.0).quotient == 0.0);
  }

  SECTION("weak form is dominated by the strong form") {
    // Chebyshev: the weak norm at the optimal center is at most the strong
    // integral at that center; corpus check against the f_G-centered form.
    std::vector<GridFunction> corpus;
    corpus.push_back(make_grid_function(G, [](const RVec& p) { return p[0]; }));
    corpus.push_back(make_grid_function(
        G, [](const RVec& p) { return ((p[0] < 0.5) == (p[1] < 0.5)) ? 1.0 : -1.0; }));
    GridFunction logd;
    logd.domain = &G;
    logd.values.assign(G.size(), 0.0);
    for (Index c = 0; c < G.size(); ++c)
      if (G.occ[c]) logd.values[c] = -std::log(G.dist[c]);
    corpus.push_back(std::move(logd));

    for (const auto& f : corpus) {
      const double q = 1.0;
      const double qs = 2.0;
      QuotientReport weak = weak_poincare_quotient(f, q);
      OptCenter oc = weak_norm_opt_c(f, qs);
      double intAtC = 0.0, intAtMean = 0.0;
      const double fG = domain_mean(f);
      for (Index c = 0; c < G.size(); ++c)
        if (G.occ[c]) {
          intAtC += std::pow(std::abs(f.values[c] - oc.c), qs);
          intAtMean += std::pow(std::abs(f.values[c] - fG), qs);
        }
      intAtC *= G.cellVolume();
      intAtMean *= G.cellVolume();
      CHECK(weak.lhs <= intAtC + 1e-12);
      CHECK(intAtC <= std::pow(2.0, qs) * intAtMean + 1e-12);
    }
  }

  SECTION("linear function weak quotient is at most the strong one") {
    GridFunction f = make_grid_function(G, [](const RVec& p) { return p[0]; });
    QuotientReport weak = weak_poincare_quotient(f, 1.0);
    QuotientReport strong = poincare_quotient(f, 1.0);
    CHECK(weak.quotient <= strong.quotient * 1.02);
    CHECK(weak.quotient > 0.0);
  }
}

TEST_CASE("fractional weak quotient") {
  RasterDomain G = make_square(4);  // 16x16 grid
  GridFunction f = make_grid_function(G, [](const RVec& p) { return p[0]; });

  SECTION("parameter validation") {
    CHECK_THROWS_WITH(fractional_weak_quotient(f, 2.0, 1.5, 100, 1),
                      Catch::Matchers::ContainsSubstring("delta must be in (0, 1)"));
    CHECK_THROWS_WITH(fractional_weak_quotient(f, 5.0, 0.5, 100, 1),
                      Catch::Matchers::ContainsSubstring("exponent out of range"));
    CHECK_THROWS_WITH(fractional_weak_quotient(f, 1.0, 0.5, 100, 1),
                      Catch::Matchers::ContainsSubstring("exponent out of range"));
  }

  SECTION("constant function") {
    GridFunction c = make_grid_function(G, [](const RVec&) { return 4.0; });
    QuotientReport rep = fractional_weak_quotient(c, 2.0, 0.5, 1 << 30, 1);
    CHECK(rep.quotient == 0.0);
  }

  SECTION("exchange symmetry of the double sum") {
    // the exact ordered-pair sum equals twice the unordered-pair sum
    const double q = 2.0, delta = 0.5;
    std::vector<Index> occ;
    for (Index c = 0; c < G.size(); ++c)
      if (G.occ[c]) occ.push_back(c);
    double ordered = 0.0, unordered = 0.0;
    const double kernelPow = 2.0 + delta * q;
    for (std::size_t a = 0; a < occ.size(); ++a)
      for (std::size_t b = 0; b < occ.size(); ++b) {
        if (a == b) continue;
        const RVec xa = G.center(occ[a]), xb = G.center(occ[b]);
        const double d = std::hypot(xa[0] - xb[0], xa[1] - xb[1]);
        const double v =
            std::pow(std::abs(f.values[occ[a]] - f.values[occ[b]]), q) / std::pow(d, kernelPow);
        ordered += v;
        if (a < b) unordered += v;
      }
    CHECK(ordered == Catch::Approx(2.0 * unordered).epsilon(1e-12));
  }

  SECTION("subsampled estimate is unbiased and concentrates") {
    const double q = 2.0, delta = 0.5;
    QuotientReport exact = fractional_weak_quotient(f, q, delta, 1 << 30, 1);
    REQUIRE(exact.rhs > 0.0);
    const double exactBase = std::pow(exact.rhs, q / exact.qStar);

    int within5 = 0;
    double meanBase = 0.0, m2 = 0.0;
    const int seeds = 20;
    for (int s = 1; s <= seeds; ++s) {
      QuotientReport sub = fractional_weak_quotient(f, q, delta, 10000, s);
      const double base = std::pow(sub.rhs, q / sub.qStar);
      if (std::abs(base - exactBase) <= 0.05 * exactBase) ++within5;
      const double d = base - meanBase;
      meanBase += d / s;
      m2 += d * (base - meanBase);
    }
    CHECK(within5 >= 18);
    const double se = std::sqrt(m2 / (seeds - 1)) / std::sqrt(double(seeds));
    CHECK(std::abs(meanBase - exactBase) <= 2.0 * se + 1e-12);
  }

  SECTION("near-boundary flag") {
    // p = nq/(n - dq) close to n/(n - d) happens as q approaches 1
    RasterDomain G5 = make_square(3);
    GridFunction g = make_grid_function(G5, [](const RVec& p) { return p[1]; });
    QuotientReport rep = fractional_weak_quotient(g, 1.02, 0.5, 1 << 30, 1);
    CHECK(rep.nearExponentBoundary);
    QuotientReport far = fractional_weak_quotient(g, 2.0, 0.5, 1 << 30, 1);
    CHECK(!far.nearExponentBoundary);
  }
}

TEST_CASE("sobolev scaling invariance") {
  RasterDomain G = make_square(5);
  GridFunction f;
  f.domain = &G;
  f.values.assign(G.size(), 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Index c = 0; c < G.size(); ++c)
    if (G.occ[c]) f.values[c] = u(rng);

  const double a = -3.0;
  GridFunction g;
  g.domain = &G;
  g.values.assign(G.size(), 0.0);
  for (Index c = 0; c < G.size(); ++c)
    if (G.occ[c]) g.values[c] = a * f.values[c];

  QuotientReport pf = poincare_quotient(f, 1.0);
  QuotientReport pg = poincare_quotient(g, 1.0);
  const double scale = std::pow(std::abs(a), pf.qStar);
  CHECK(pg.lhs == Catch::Approx(scale * pf.lhs).epsilon(1e-9));
  CHECK(pg.rhs == Catch::Approx(scale * pf.rhs).epsilon(1e-9));
  CHECK(pg.quotient == Catch::Approx(pf.quotient).epsilon(1e-9));

  QuotientReport wf = weak_poincare_quotient(f, 1.0);
  QuotientReport wg = weak_poincare_quotient(g, 1.0);
  CHECK(wg.quotient == Catch::Approx(wf.quotient).epsilon(1e-9));

  QuotientReport ff = fractional_weak_quotient(f, 2.0, 0.5, 1 << 30, 3);
  QuotientReport fg = fractional_weak_quotient(g, 2.0, 0.5, 1 << 30, 3);
  CHECK(fg.quotient == Catch::Approx(ff.quotient).epsilon(1e-9));
}
