#pragma once

// Corpus generators, experiment pipelines, and report serialization for the
// command-line driver.

#include <chrono>
#include <sstream>

#include <json.hpp>

#include "jnlab/dyadic.hpp"
#include "jnlab/john.hpp"
#include "jnlab/jnp.hpp"
#include "jnlab/sobolev.hpp"

namespace jnlab {

inline constexpr const char* kToolkitName = "jnp-lab";
inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

using json = nlohmann::json;

/// Description of a generator domain. Supported kinds: square, rect(w,h),
/// lshape, koch(depth), cusp(k), rooms(count,neckWidth), ball.
struct DomainSpec {
  std::string kind = "square";
  double rectW = 1.0, rectH = 0.5;
  int kochDepth = 3;
  double cuspK = 2.0;
  int roomCount = 2;
  double neckWidth = 0.125;

  bool john() const { return kind != "cusp" && kind != "rooms"; }

  std::string label() const {
    std::ostringstream os;
    os << kind;
    if (kind == "rect") os << ":" << rectW << "," << rectH;
    if (kind == "koch") os << ":" << kochDepth;
    if (kind == "cusp") os << ":" << cuspK;
    if (kind == "rooms") os << ":" << roomCount << "," << neckWidth;
    return os.str();
  }
};

/// Description of a generator function. Supported kinds: constant(v),
/// halfIndicator(axis), quadrant, linear(axis), logDist(cap), distPow(alpha),
/// radialPow(beta,cx,cy), haarSum(depth,seed).
struct FunctionSpec {
  std::string kind = "constant";
  double value = 0.0;
  int axis = 0;
  double cap = std::numeric_limits<double>::infinity();
  double alpha = 0.5;
  double beta = 0.5;
  RVec center;
  int depth = 3;
  std::uint64_t seed = 1;

  std::string label() const {
    std::ostringstream os;
    os << kind;
    if (kind == "constant") os << ":" << value;
    if (kind == "halfIndicator" || kind == "linear") os << ":" << axis;
    if (kind == "logDist" && std::isfinite(cap)) os << ":" << cap;
    if (kind == "distPow") os << ":" << alpha;
    if (kind == "radialPow") os << ":" << beta;
    if (kind == "haarSum") os << ":" << depth << "," << seed;
    return os.str();
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Point2 = std::array<double, 2>;

inline std::vector<Point2> koch_polygon(int depth) {
  const double R = 0.44;  // snowflake spans most of the unit box
  std::vector<Point2> poly;
  for (int k = 0; k < 3; ++k) {
    const double ang = M_PI / 2.0 + 2.0 * M_PI * k / 3.0;
    poly.push_back({0.5 + R * std::cos(ang), 0.5 + R * std::sin(ang)});
  }
  for (int it = 0; it < depth; ++it) {
    std::vector<Point2> next;
    next.reserve(poly.size() * 4);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2 a = poly[i];
      const Point2 b = poly[(i + 1) % poly.size()];
      const double dx = b[0] - a[0], dy = b[1] - a[1];
      const Point2 p1{a[0] + dx / 3.0, a[1] + dy / 3.0};
      const Point2 p2{a[0] + 2.0 * dx / 3.0, a[1] + 2.0 * dy / 3.0};
      // outward bump for a counterclockwise polygon
      const double ex = p2[0] - p1[0], ey = p2[1] - p1[1];
      const double c = std::cos(-M_PI / 3.0), s = std::sin(-M_PI / 3.0);
      const Point2 tip{p1[0] + c * ex - s * ey, p1[1] + s * ex + c * ey};
      next.push_back(a);
      next.push_back(p1);
      next.push_back(tip);
      next.push_back(p2);
    }
    poly = std::move(next);
  }
  return poly;
}

inline bool point_in_polygon(const std::vector<Point2>& poly, double px, double py) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const double yi = poly[i][1], yj = poly[j][1];
    if ((yi > py) != (yj > py)) {
      const double xint = poly[i][0] + (py - yi) * (poly[j][0] - poly[i][0]) / (yj - yi);
      if (px < xint) inside = !inside;
    }
  }
  return inside;
}

}  // namespace detail

/// Rasterize a corpus domain at resolution J.
inline RasterDomain gen_domain(const DomainSpec& spec, int J) {
  if (spec.kind == "square") {
    return rasterize(
        [](const RVec& p) { return p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0; },
        {0.0, 0.0}, {1.0, 1.0}, J, 2);
  }
  if (spec.kind == "rect") {
    const double w = spec.rectW, h = spec.rectH;
    return rasterize(
        [w, h](const RVec& p) { return p[0] > 0.0 && p[0] < w && p[1] > 0.0 && p[1] < h; },
        {0.0, 0.0}, {w, h}, J, 2);
  }
  if (spec.kind == "lshape") {
    return rasterize(
        [](const RVec& p) {
          if (!(p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0)) return false;
          return !(p[0] >= 0.5 && p[1] >= 0.5);
        },
        {0.0, 0.0}, {1.0, 1.0}, J, 2);
  }
  if (spec.kind == "koch") {
    auto poly = detail::koch_polygon(spec.kochDepth);
    return rasterize(
        [poly](const RVec& p) { return detail::point_in_polygon(poly, p[0], p[1]); },
        {0.0, 0.0}, {1.0, 1.0}, J, 2);
  }
  if (spec.kind == "cusp") {
    const double k = spec.cuspK;
    return rasterize(
        [k](const RVec& p) {
          return p[0] > 0.0 && p[0] < 1.0 && std::abs(p[1]) < std::pow(p[0], k);
        },
        {0.0, -1.0}, {1.0, 1.0}, J, 2);
  }
  if (spec.kind == "rooms") {
    const int m = spec.roomCount;
    const double w = spec.neckWidth;
    const double extent = 1.5 * m - 0.5;
    return rasterize(
        [m, w](const RVec& p) {
          if (p[1] <= 0.0 || p[1] >= 1.0) return false;
          for (int i = 0; i < m; ++i) {
            const double x0 = 1.5 * i;
            if (p[0] > x0 && p[0] < x0 + 1.0) return true;
          }
          for (int i = 0; i + 1 < m; ++i) {
            const double x0 = 1.5 * i + 1.0;
            if (p[0] >= x0 && p[0] <= x0 + 0.5 && std::abs(p[1] - 0.5) < 0.5 * w) return true;
          }
          return false;
        },
        {0.0, 0.0}, {extent, 1.0}, J, 2);
  }
  if (spec.kind == "ball") {
    return rasterize(
        [](const RVec& p) {
          const double dx = p[0] - 0.5, dy = p[1] - 0.5;
          return dx * dx + dy * dy < 0.25;
        },
        {0.0, 0.0}, {1.0, 1.0}, J, 2);
  }
  throw std::invalid_argument("unknown domain kind: " + spec.kind);
}

/// Evaluate a corpus function on the occupied cells of a domain.
inline GridFunction gen_function(const FunctionSpec& spec, const RasterDomain& G) {
  GridFunction f;
  f.domain = &G;
  f.values.assign(G.size(), 0.0);
  const double h = G.cell();
  RVec mid(G.n);
  for (int i = 0; i < G.n; ++i) mid[i] = 0.5 * (G.bboxLo[i] + G.bboxHi[i]);

  for (Index c = 0; c < G.size(); ++c) {
    if (!G.occ[c]) continue;
    const RVec p = G.center(c);
    double v = 0.0;
    if (spec.kind == "constant") {
      v = spec.value;
    } else if (spec.kind == "halfIndicator") {
      v = p[spec.axis] < mid[spec.axis] ? 1.0 : 0.0;
    } else if (spec.kind == "quadrant") {
      v = ((p[0] < mid[0]) == (p[1] < mid[1])) ? 1.0 : -1.0;
    } else if (spec.kind == "linear") {
      v = p[spec.axis];
    } else if (spec.kind == "logDist") {
      v = std::min(spec.cap, -std::log(G.dist[c]));
    } else if (spec.kind == "distPow") {
      v = std::pow(G.dist[c], -spec.alpha);
    } else if (spec.kind == "radialPow") {
      RVec x0 = spec.center.empty() ? mid : spec.center;
      double r2 = 0.0;
      for (int i = 0; i < G.n; ++i) r2 += (p[i] - x0[i]) * (p[i] - x0[i]);
      v = std::pow(std::max(std::sqrt(r2), h), -spec.beta);
    } else if (spec.kind == "haarSum") {
      double acc = 0.0;
      for (int l = 1; l <= spec.depth; ++l) {
        std::uint64_t key = spec.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(l);
        for (int i = 0; i < G.n; ++i) {
          const Index anchor =
              detail::floor_div(G.anchorLo[i] + G.unflatten(c)[i], Index(1) << (G.J - l));
          key = detail::splitmix64(key ^ static_cast<std::uint64_t>(anchor + 0x7fffffff));
        }
        acc += (key & 1) ? 1.0 : -1.0;
      }
      v = acc;
    } else {
      throw std::invalid_argument("unknown function kind: " + spec.kind);
    }
    if (!std::isfinite(v)) throw std::runtime_error("function value not finite");
    f.values[c] = v;
  }
  return f;
}

/// Deepest occupied cell center, ties resolved lexicographically; the default
/// John center of a generated domain.
inline RVec john_center(const RasterDomain& G) {
  Index best = -1;
  for (Index c = 0; c < G.size(); ++c) {
    if (!G.occ[c]) continue;
    if (best < 0 || G.dist[c] > G.dist[best]) best = c;
  }
  return G.center(best);
}

struct ExperimentConfig {
  std::string pipeline = "jn";
  std::vector<DomainSpec> domains;
  std::vector<FunctionSpec> functions;
  std::vector<double> ps = {2.0};
  int J = 6;
  double q = 1.0;
  double delta = 0.5;
  double lambda = 10.0 / 9.0 - 1e-6;
  int overlapBound = 8;
  Index pairBudget = 10000;
  std::uint64_t seed = 1;
  double aikawaS = 1.5;
  int aikawaTrials = 200;
  int johnSamples = 4096;
};

struct ExperimentReport {
  json payload;             // deterministic serialized content
  double wallClockMs = 0.0; // reported separately, never serialized
  bool invariantViolated = false;

  std::string serialize() const { return payload.dump(2) + "\n"; }
};

namespace detail {

inline json ratio_json(const RatioReport& r) {
  json j;
  j["numerator"] = r.numerator;
  j["denominator"] = r.denominator;
  j["infinite"] = r.infinite;
  j["ratio"] = r.infinite ? json("inf") : json(r.ratio);
  return j;
}

inline json quotient_json(const QuotientReport& r) {
  json j;
  j["q"] = r.q;
  j["qStar"] = r.qStar;
  if (r.delta > 0.0) j["delta"] = r.delta;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["quotient"] = r.infinite ? json("inf") : json(r.quotient);
  if (r.nearExponentBoundary) j["nearExponentBoundary"] = true;
  return j;
}

inline void aggregate_ratios(json& report, const std::vector<double>& ratios) {
  json agg;
  if (!ratios.empty()) {
    RVec sorted(ratios);
    std::sort(sorted.begin(), sorted.end());
    agg["maxRatio"] = sorted.back();
    agg["medianRatio"] = sorted[sorted.size() / 2];
    agg["count"] = sorted.size();
  } else {
    agg["count"] = 0;
  }
  report["aggregate"] = agg;
}

}  // namespace detail

/// Run one experiment pipeline over the configured grid. Deterministic for a
/// fixed (config, seed); wall-clock time lives outside the payload.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  json& out = rep.payload;
  out["schemaVersion"] = kReportSchemaVersion;
  out["toolkit"] = {{"name", kToolkitName}, {"version", kToolkitVersion}};
  out["pipeline"] = cfg.pipeline;
  out["seed"] = cfg.seed;
  {
    json params;
    params["J"] = cfg.J;
    params["ps"] = cfg.ps;
    params["q"] = cfg.q;
    params["delta"] = cfg.delta;
    params["lambda"] = cfg.lambda;
    params["overlapBound"] = cfg.overlapBound;
    params["pairBudget"] = cfg.pairBudget;
    json doms = json::array(), fns = json::array();
    for (const auto& d : cfg.domains) doms.push_back(d.label());
    for (const auto& f : cfg.functions) fns.push_back(f.label());
    params["domains"] = doms;
    params["functions"] = fns;
    out["params"] = params;
  }

  json items = json::array();
  std::vector<double> ratios;

  JNParams jn;
  jn.lambda = cfg.lambda;
  jn.overlapBound = cfg.overlapBound;

  if (cfg.pipeline == "whitney") {
    for (const auto& dspec : cfg.domains) {
      RasterDomain G = gen_domain(dspec, cfg.J);
      WhitneyDecomposition W = whitney(G);
      WhitneyStats st = check_whitney(G, W);
      AikawaReport ak = aikawa_probe(G, cfg.aikawaS, cfg.aikawaTrials, cfg.seed);
      json item;
      item["domain"] = dspec.label();
      item["cubes"] = st.cubeCount;
      item["residual"] = st.residual;
      item["coverageGap"] = st.coverageGap;
      item["disjoint"] = st.disjoint;
      item["contained"] = st.contained;
      item["distanceBounds"] = st.distanceBounds;
      item["minDistRatio"] = st.minDistRatio;
      item["maxDistRatio"] = st.maxDistRatio;
      item["starOverlapMax"] = st.starOverlapMax;
      item["aikawa"] = {{"s", ak.s}, {"epsilon", ak.epsilon}, {"supRatio", ak.supRatio},
                        {"trials", ak.trials.size()}};
      if (!st.disjoint || !st.contained || !st.distanceBounds) rep.invariantViolated = true;
      items.push_back(std::move(item));
    }
  } else if (cfg.pipeline == "chains") {
    for (const auto& dspec : cfg.domains) {
      RasterDomain G = gen_domain(dspec, cfg.J);
      WhitneyDecomposition W = whitney(G);
      const RVec x0 = john_center(G);
      JohnReport jr = john_probe(G, x0, cfg.johnSamples, cfg.seed);
      ChainDecomposition cd = build_chains(G, W, x0);
      for (double p : cfg.ps) {
        ChainConditionReport cc = verify_chains(cd, p);
        json item;
        item["domain"] = dspec.label();
        item["p"] = p;
        item["betaEstimate"] = jr.betaEstimate;
        item["rho"] = cd.curveConstant;
        item["tau"] = cc.tau;
        item["sigma"] = cc.sigma;
        item["shadowRadiusConstant"] = cc.shadowRadiusConstant;
        item["overlapConstant"] = cc.overlapConstant;
        item["conditionsPass"] =
            cc.condition1.pass && cc.condition2.pass && cc.condition3.pass;
        if (!cc.condition3.pass) {
          rep.invariantViolated = true;
          item["witness"] = cc.condition3.witness;
        }
        items.push_back(std::move(item));
      }
    }
  } else if (cfg.pipeline == "jn") {
    for (const auto& dspec : cfg.domains) {
      RasterDomain G = gen_domain(dspec, cfg.J);
      for (const auto& fspec : cfg.functions) {
        GridFunction f = gen_function(fspec, G);
        for (double p : cfg.ps) {
          jn.p = p;
          DPResult r = jn_global_dyadic(f, jn);
          json item;
          item["domain"] = dspec.label();
          item["function"] = fspec.label();
          item["p"] = p;
          item["value"] = r.value;
          item["partitionSize"] = r.partition.size();
          item["residual"] = r.residualMeasure;
          items.push_back(std::move(item));
        }
      }
    }
  } else if (cfg.pipeline == "weak" || cfg.pipeline == "l2g") {
    for (const auto& dspec : cfg.domains) {
      RasterDomain G = gen_domain(dspec, cfg.J);
      WhitneyDecomposition W = whitney(G);
      for (const auto& fspec : cfg.functions) {
        GridFunction f = gen_function(fspec, G);
        for (double p : cfg.ps) {
          jn.p = p;
          const RatioReport r = cfg.pipeline == "weak" ? weak_type_ratio(f, W, jn)
                                                       : local_to_global_ratio(f, W, jn);
          json item;
          item["domain"] = dspec.label();
          item["function"] = fspec.label();
          item["p"] = p;
          item.update(detail::ratio_json(r));
          if (!r.infinite) ratios.push_back(r.ratio);
          items.push_back(std::move(item));
        }
      }
    }
  } else if (cfg.pipeline == "poincare") {
    for (const auto& dspec : cfg.domains) {
      RasterDomain G = gen_domain(dspec, cfg.J);
      for (const auto& fspec : cfg.functions) {
        GridFunction f = gen_function(fspec, G);
        json item;
        item["domain"] = dspec.label();
        item["function"] = fspec.label();
        item["strong"] = detail::quotient_json(poincare_quotient(f, cfg.q));
        item["weak"] = detail::quotient_json(weak_poincare_quotient(f, cfg.q));
        items.push_back(std::move(item));
      }
    }
  } else if (cfg.pipeline == "fractional") {
    for (const auto& dspec : cfg.domains) {
      RasterDomain G = gen_domain(dspec, cfg.J);
      for (const auto& fspec : cfg.functions) {
        GridFunction f = gen_function(fspec, G);
        json item;
        item["domain"] = dspec.label();
        item["function"] = fspec.label();
        item["fractional"] = detail::quotient_json(
            fractional_weak_quotient(f, cfg.q, cfg.delta, cfg.pairBudget, cfg.seed));
        items.push_back(std::move(item));
      }
    }
  } else if (cfg.pipeline == "necessity-sweep") {
    const double p = cfg.ps.empty() ? 2.0 : cfg.ps[0];
    jn.p = p;
    double prevRatio = -1.0, prevBeta = -1.0;
    bool monotone = true;
    for (int k : {2, 3, 4, 5}) {
      DomainSpec dspec;
      dspec.kind = "cusp";
      dspec.cuspK = k;
      RasterDomain G = gen_domain(dspec, cfg.J);
      WhitneyDecomposition W = whitney(G);
      FunctionSpec fspec;
      fspec.kind = "logDist";
      fspec.cap = k;
      GridFunction f = gen_function(fspec, G);
      const RatioReport r = weak_type_ratio(f, W, jn);
      JohnReport jr = john_probe(G, john_center(G), cfg.johnSamples, cfg.seed);
      json item;
      item["domain"] = dspec.label();
      item["function"] = fspec.label();
      item["p"] = p;
      item.update(detail::ratio_json(r));
      item["betaEstimate"] = jr.betaEstimate;
      if (!r.infinite) ratios.push_back(r.ratio);
      if (r.ratio <= prevRatio || jr.betaEstimate <= prevBeta) monotone = false;
      prevRatio = r.ratio;
      prevBeta = jr.betaEstimate;
      items.push_back(std::move(item));
    }
    out["trend"] = {{"strictlyIncreasing", monotone}};
    if (!monotone) rep.invariantViolated = true;
  } else {
    throw std::invalid_argument("unknown pipeline: " + cfg.pipeline);
  }

  out["items"] = std::move(items);
  detail::aggregate_ratios(out, ratios);
  out["invariantViolated"] = rep.invariantViolated;
  rep.wallClockMs = std::chrono::duration<double, std::milli>(
      std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Flat CSV view: one row per item with the common numeric columns.
inline std::string report_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "domain,function,p,numerator,denominator,ratio,residual,tau,sigma\n";
  auto field = [](const json& item, const char* key) -> std::string {
    if (!item.contains(key)) return "";
    const auto& v = item[key];
    if (v.is_string()) return v.get<std::string>();
    return json(v).dump();
  };
  for (const auto& item : rep.payload["items"]) {
    os << field(item, "domain") << "," << field(item, "function") << "," << field(item, "p")
       << "," << field(item, "numerator") << "," << field(item, "denominator") << ","
       << field(item, "ratio") << "," << field(item, "residual") << "," << field(item, "tau")
       << "," << field(item, "sigma") << "\n";
  }
  return os.str();
}

/// Parse "kind" or "kind:a[,b]" into a DomainSpec.
inline DomainSpec parse_domain(const std::string& text) {
  DomainSpec d;
  const auto colon = text.find(':');
  d.kind = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::istringstream is(text.substr(colon + 1));
    std::string tok;
    while (std::getline(is, tok, ',')) args.push_back(std::stod(tok));
  }
  if (d.kind == "rect") {
    if (args.size() > 0) d.rectW = args[0];
    if (args.size() > 1) d.rectH = args[1];
  } else if (d.kind == "koch") {
    if (!args.empty()) d.kochDepth = static_cast<int>(args[0]);
  } else if (d.kind == "cusp") {
    if (!args.empty()) d.cuspK = args[0];
  } else if (d.kind == "rooms") {
    if (args.size() > 0) d.roomCount = static_cast<int>(args[0]);
    if (args.size() > 1) d.neckWidth = args[1];
  } else if (d.kind != "square" && d.kind != "lshape" && d.kind != "ball") {
    throw std::invalid_argument("unknown domain kind: " + d.kind);
  }
  return d;
}

/// Parse "kind" or "kind:args" into a FunctionSpec.
inline FunctionSpec parse_function(const std::string& text) {
  FunctionSpec f;
  const auto colon = text.find(':');
  f.kind = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::istringstream is(text.substr(colon + 1));
    std::string tok;
    while (std::getline(is, tok, ',')) args.push_back(std::stod(tok));
  }
  if (f.kind == "constant") {
    if (!args.empty()) f.value = args[0];
  } else if (f.kind == "halfIndicator" || f.kind == "linear") {
    if (!args.empty()) f.axis = static_cast<int>(args[0]);
  } else if (f.kind == "logDist") {
    if (!args.empty()) f.cap = args[0];
  } else if (f.kind == "distPow") {
    if (!args.empty()) f.alpha = args[0];
  } else if (f.kind == "radialPow") {
    if (!args.empty()) f.beta = args[0];
    if (args.size() >= 3) f.center = {args[1], args[2]};
  } else if (f.kind == "haarSum") {
    if (args.size() > 0) f.depth = static_cast<int>(args[0]);
    if (args.size() > 1) f.seed = static_cast<std::uint64_t>(args[1]);
  } else if (f.kind != "quadrant") {
    throw std::invalid_argument("unknown function kind: " + f.kind);
  }
  return f;
}

/// Parse a JSON config document with the same field names as the CLI flags.
inline ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("pipeline")) cfg.pipeline = j["pipeline"].get<std::string>();
  if (j.contains("J")) cfg.J = j["J"].get<int>();
  if (j.contains("q")) cfg.q = j["q"].get<double>();
  if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
  if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
  if (j.contains("overlapBound")) cfg.overlapBound = j["overlapBound"].get<int>();
  if (j.contains("pairBudget")) cfg.pairBudget = j["pairBudget"].get<Index>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("aikawaS")) cfg.aikawaS = j["aikawaS"].get<double>();
  if (j.contains("aikawaTrials")) cfg.aikawaTrials = j["aikawaTrials"].get<int>();
  if (j.contains("johnSamples")) cfg.johnSamples = j["johnSamples"].get<int>();
  if (j.contains("ps")) cfg.ps = j["ps"].get<std::vector<double>>();
  if (j.contains("p")) cfg.ps = {j["p"].get<double>()};
  if (j.contains("domains")) {
    for (const auto& d : j["domains"]) {
      if (d.is_string())
        cfg.domains.push_back(parse_domain(d.get<std::string>()));
      else {
        DomainSpec spec;
        spec.kind = d.value("kind", "square");
        spec.rectW = d.value("rectW", spec.rectW);
        spec.rectH = d.value("rectH", spec.rectH);
        spec.kochDepth = d.value("kochDepth", spec.kochDepth);
        spec.cuspK = d.value("cuspK", spec.cuspK);
        spec.roomCount = d.value("roomCount", spec.roomCount);
        spec.neckWidth = d.value("neckWidth", spec.neckWidth);
        cfg.domains.push_back(spec);
      }
    }
  }
  if (j.contains("functions")) {
    for (const auto& fj : j["functions"]) {
      if (fj.is_string())
        cfg.functions.push_back(parse_function(fj.get<std::string>()));
      else {
        FunctionSpec spec;
        spec.kind = fj.value("kind", "constant");
        spec.value = fj.value("value", spec.value);
        spec.axis = fj.value("axis", spec.axis);
        spec.cap = fj.value("cap", spec.cap);
        spec.alpha = fj.value("alpha", spec.alpha);
        spec.beta = fj.value("beta", spec.beta);
        spec.depth = fj.value("depth", spec.depth);
        spec.seed = fj.value("seed", spec.seed);
        cfg.functions.push_back(spec);
      }
    }
  }
  return cfg;
}

}  // namespace jnlab
