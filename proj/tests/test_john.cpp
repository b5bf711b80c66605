#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "jnlab/john.hpp"

using namespace jnlab;

namespace {

RasterDomain make_square(int J) {
  auto pred = [](const RVec& p) {
    return p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0;
  };
  return rasterize(pred, {0.0, 0.0}, {1.0, 1.0}, J, 2);
}

RasterDomain make_disk(int J) {
  auto pred = [](const RVec& p) {
    const double dx = p[0] - 0.5, dy = p[1] - 0.5;
    return dx * dx + dy * dy < 0.25;
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

TEST_CASE("john probe on the disk is nearly radial") {
  RasterDomain G = make_disk(8);
  JohnReport rep = john_probe(G, {0.5, 0.5}, 1 << 20, 1);  // all cells
  CHECK(rep.betaEstimate >= 1.0);
  CHECK(rep.betaEstimate <= 1.3);
}

TEST_CASE("john probe on the square stays under 3") {
  RasterDomain G = make_square(8);
  JohnReport rep = john_probe(G, {0.5, 0.5}, 1 << 20, 1);
  CHECK(rep.betaEstimate <= 3.0);
  CHECK(rep.lengthBoundRatio <= rep.betaEstimate);
}

TEST_CASE("john probe beta grows with cusp sharpness") {
  double prev = 0.0;
  for (int k : {2, 3, 4}) {
    RasterDomain G = make_cusp(k, 8);
    JohnReport rep = john_probe(G, {0.75, 0.0}, 1 << 20, 1);
    CHECK(rep.betaEstimate > prev);
    prev = rep.betaEstimate;
  }
}

TEST_CASE("john probe error cases") {
  RasterDomain G = make_disk(5);
  CHECK_THROWS_WITH(john_probe(G, {0.01, 0.01}, 4, 1),
                    Catch::Matchers::ContainsSubstring("center outside domain"));

  auto twoRooms = [](const RVec& p) {
    const bool left = p[0] > 0.1 && p[0] < 0.3 && p[1] > 0.1 && p[1] < 0.3;
    const bool right = p[0] > 0.7 && p[0] < 0.9 && p[1] > 0.1 && p[1] < 0.3;
    return left || right;
  };
  RasterDomain D = rasterize(twoRooms, {0.0, 0.0}, {1.0, 1.0}, 6, 2);
  REQUIRE(!D.connected);
  CHECK_THROWS_WITH(john_probe(D, {0.2, 0.2}, 1 << 20, 1),
                    Catch::Matchers::ContainsSubstring("sample unreachable"));
}

TEST_CASE("chain decomposition on the unit square") {
  RasterDomain G = make_square(7);
  WhitneyDecomposition W = whitney(G);
  ChainDecomposition cd = build_chains(G, W, {0.5, 0.5});

  SECTION("center chain is the single cube") {
    const auto& c0 = cd.chains[cd.centerCube];
    REQUIRE(c0.sequence.size() == 1);
    CHECK(c0.sequence[0] == cd.centerCube);
  }

  SECTION("chains start at the center cube, end at the terminal, no duplicates") {
    for (int q = 0; q < static_cast<int>(W.cubes.size()); ++q) {
      const auto& seq = cd.chains[q].sequence;
      REQUIRE(!seq.empty());
      CHECK(seq.front() == cd.centerCube);
      CHECK(seq.back() == q);
      std::set<int> uniq(seq.begin(), seq.end());
      CHECK(uniq.size() == seq.size());
    }
  }

  SECTION("consecutive stars overlap with constant at least 1/64") {
    double worst = 1.0;
    for (const auto& chain : cd.chains) {
      for (std::size_t s = 0; s + 1 < chain.sequence.size(); ++s) {
        const Cube a = star(W.cubes[chain.sequence[s]]);
        const Cube b = star(W.cubes[chain.sequence[s + 1]]);
        const double ratio = overlap_measure(a, b) / std::max(a.measure(), b.measure());
        worst = std::min(worst, ratio);
      }
    }
    CHECK(worst >= 1.0 / 64.0);
  }

  SECTION("shadows are the exact transpose of chains") {
    std::size_t chainTotal = 0, shadowTotal = 0;
    for (const auto& c : cd.chains) chainTotal += c.sequence.size();
    for (const auto& s : cd.shadows) shadowTotal += s.size();
    CHECK(chainTotal == shadowTotal);
    for (int q = 0; q < static_cast<int>(W.cubes.size()); ++q) {
      for (int r : cd.chains[q].sequence) {
        const auto& sh = cd.shadows[r];
        CHECK(std::find(sh.begin(), sh.end(), q) != sh.end());
      }
    }
    for (int r = 0; r < static_cast<int>(W.cubes.size()); ++r) {
      for (int q : cd.shadows[r]) {
        const auto& seq = cd.chains[q].sequence;
        CHECK(std::find(seq.begin(), seq.end(), r) != seq.end());
      }
    }
  }

  SECTION("curve constant is recorded") { CHECK(cd.curveConstant >= 1.0); }
}

TEST_CASE("verify_chains on a single-cube domain") {
  // 6x6 cell block at J=4: exactly one cell qualifies as a Whitney cube
  const double h = 1.0 / 16.0;
  auto pred = [&](const RVec& p) {
    return p[0] > 4 * h && p[0] < 10 * h && p[1] > 4 * h && p[1] < 10 * h;
  };
  RasterDomain G = rasterize(pred, {0.0, 0.0}, {1.0, 1.0}, 4, 2);
  WhitneyDecomposition W = whitney(G);
  REQUIRE(W.cubes.size() == 1);
  ChainDecomposition cd = build_chains(G, W, W.cubes[0].midpoint());
  ChainConditionReport rep = verify_chains(cd, 2.0);
  CHECK(rep.tau == 0);
  CHECK(rep.sigma == Catch::Approx(1.0));
  CHECK(rep.condition1.pass);
  CHECK(rep.condition2.pass);
  CHECK(rep.condition3.pass);
}

TEST_CASE("verify_chains parameter validation") {
  RasterDomain G = make_square(5);
  WhitneyDecomposition W = whitney(G);
  ChainDecomposition cd = build_chains(G, W, {0.5, 0.5});
  CHECK_THROWS_WITH(verify_chains(cd, 1.0),
                    Catch::Matchers::ContainsSubstring("exponent out of range"));
}

TEST_CASE("verify_chains on the square") {
  RasterDomain G = make_square(7);
  WhitneyDecomposition W = whitney(G);
  ChainDecomposition cd = build_chains(G, W, {0.5, 0.5});
  ChainConditionReport rep = verify_chains(cd, 2.0);
  CHECK(rep.tau >= 1);
  CHECK(std::isfinite(rep.sigma));
  CHECK(rep.sigma > 0.0);
  CHECK(rep.overlapConstant >= 1.0 / 64.0);
  CHECK(rep.shadowRadiusConstant > 0.0);

  SECTION("sigma is monotone in p") {
    ChainConditionReport rep3 = verify_chains(cd, 3.0);
    CHECK(rep3.sigma >= rep.sigma);
  }

  SECTION("sigma and the shadow radius are stable under refinement") {
    RasterDomain G8 = make_square(8);
    WhitneyDecomposition W8 = whitney(G8);
    ChainDecomposition cd8 = build_chains(G8, W8, {0.5, 0.5});
    ChainConditionReport rep8 = verify_chains(cd8, 2.0);
    CHECK(std::abs(rep8.sigma - rep.sigma) <= 0.15 * std::max(rep.sigma, rep8.sigma));
    CHECK(std::abs(rep8.shadowRadiusConstant - rep.shadowRadiusConstant) <=
          0.25 * std::max(rep.shadowRadiusConstant, rep8.shadowRadiusConstant));
  }
}

TEST_CASE("shadow radius constant is stable across the John corpus") {
  auto lshape = [](const RVec& p) {
    if (!(p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0)) return false;
    return !(p[0] >= 0.5 && p[1] >= 0.5);
  };
  auto disk = [](const RVec& p) {
    const double dx = p[0] - 0.5, dy = p[1] - 0.5;
    return dx * dx + dy * dy < 0.25;
  };
  for (auto pred : {std::function<bool(const RVec&)>(lshape),
                    std::function<bool(const RVec&)>(disk)}) {
    double prev = 0.0;
    for (int J : {7, 8}) {
      RasterDomain G = rasterize(pred, {0.0, 0.0}, {1.0, 1.0}, J, 2);
      WhitneyDecomposition W = whitney(G);
      Index deepest = -1;
      for (Index c = 0; c < G.size(); ++c)
        if (G.occ[c] && (deepest < 0 || G.dist[c] > G.dist[deepest])) deepest = c;
      ChainDecomposition cd = build_chains(G, W, G.center(deepest));
      ChainConditionReport cc = verify_chains(cd, 2.0);
      if (prev > 0.0)
        CHECK(std::abs(cc.shadowRadiusConstant - prev) <=
              0.25 * std::max(prev, cc.shadowRadiusConstant));
      prev = cc.shadowRadiusConstant;
    }
  }
}

TEST_CASE("level-gap weight estimate holds over the shadow pairs") {
  // For every shadow pair (R at level j, Q at level k >= j - tau) and epsilon
  // in (0, n), the combination (l(Q)/l(R))^eps (tau+1+k-j)^p is bounded by
  // C(eps, p) 2^(tau eps) with C = 2^eps sup_m 2^(-m eps) m^p.
  RasterDomain G = make_square(7);
  WhitneyDecomposition W = whitney(G);
  ChainDecomposition cd = build_chains(G, W, {0.5, 0.5});
  ChainConditionReport cc = verify_chains(cd, 2.0);
  for (double eps : {0.25, 0.5}) {
    for (double p : {1.5, 2.0, 3.0}) {
      double supTerm = 0.0;
      for (int m = 1; m <= 100000; ++m)
        supTerm = std::max(supTerm, std::pow(2.0, -m * eps) * std::pow(double(m), p));
      const double bound = std::pow(2.0, eps) * supTerm * std::pow(2.0, cc.tau * eps);
      double worst = 0.0;
      for (std::size_t r = 0; r < W.cubes.size(); ++r) {
        const int j = W.cubes[r].level;
        for (int q : cd.shadows[r]) {
          const int k = W.cubes[q].level;
          const double ratio = W.cubes[q].side() / W.cubes[r].side();
          worst = std::max(worst,
                           std::pow(ratio, eps) * std::pow(double(cc.tau + 1 + k - j), p));
        }
      }
      CHECK(worst <= bound + 1e-9);
    }
  }
}

TEST_CASE("verify_chains completes on the cusp and reports a larger sigma") {
  RasterDomain G = make_cusp(4, 8);
  WhitneyDecomposition W = whitney(G);
  ChainDecomposition cd = build_chains(G, W, {0.75, 0.0});
  ChainConditionReport cusp = verify_chains(cd, 2.0);
  CHECK(std::isfinite(cusp.sigma));

  RasterDomain S = make_square(8);
  WhitneyDecomposition WS = whitney(S);
  ChainDecomposition cds = build_chains(S, WS, {0.5, 0.5});
  ChainConditionReport square = verify_chains(cds, 2.0);
  CHECK(cusp.sigma > square.sigma);
}
