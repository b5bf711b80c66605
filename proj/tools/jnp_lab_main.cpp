// Command-line driver: runs one experiment pipeline and writes the report.
//
// Exit codes: 0 success, 1 invalid configuration, 2 invariant or assertion
// failure (a witness is included in the report when available).

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "jnlab/lab.hpp"

namespace {

int run(int argc, char** argv) {
  CLI::App app{"jnp-lab: partition functionals and chain decompositions on raster domains"};

  std::string pipeline;
  app.add_option("pipeline", pipeline,
                 "whitney | chains | jn | weak | l2g | poincare | fractional | necessity-sweep")
      ->required();

  std::vector<std::string> domainArgs, functionArgs;
  std::vector<double> ps;
  std::string outPath, csvPath, configPath;
  int J = -1;
  double q = -1.0, delta = -1.0, lambda = -1.0, aikawaS = -1.0;
  std::int64_t pairBudget = -1;
  std::int64_t seed = -1;
  int overlapBound = -1, aikawaTrials = -1, johnSamples = -1;

  app.add_option("--domain", domainArgs, "domain spec, e.g. square, cusp:2, rooms:3,0.125");
  app.add_option("--function", functionArgs,
                 "function spec, e.g. quadrant, logDist:4, haarSum:3,42");
  app.add_option("--p", ps, "exponents p > 1");
  app.add_option("--J", J, "raster resolution (level-J cells)");
  app.add_option("--q", q, "Sobolev exponent q");
  app.add_option("--delta", delta, "fractional smoothness in (0,1)");
  app.add_option("--lambda", lambda, "local dilation factor > 1");
  app.add_option("--overlap-bound", overlapBound, "max pointwise family overlap N");
  app.add_option("--pair-budget", pairBudget, "pair budget for the fractional double sum");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--aikawa-s", aikawaS, "boundary integral exponent s in (0, n)");
  app.add_option("--aikawa-trials", aikawaTrials, "boundary integral trials");
  app.add_option("--samples", johnSamples, "curve probe sample count");
  app.add_option("--out", outPath, "report output path (default stdout)");
  app.add_option("--csv", csvPath, "also write a flat CSV to this path");
  app.add_option("--config", configPath, "JSON config document; flags override it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    jnlab::ExperimentConfig cfg;
    if (!configPath.empty()) {
      std::ifstream in(configPath);
      if (!in) throw std::invalid_argument("cannot open config: " + configPath);
      cfg = jnlab::parse_config(jnlab::json::parse(in));
    }
    cfg.pipeline = pipeline;
    if (J >= 0) cfg.J = J;
    if (q >= 0.0) cfg.q = q;
    if (delta >= 0.0) cfg.delta = delta;
    if (lambda >= 0.0) cfg.lambda = lambda;
    if (overlapBound >= 0) cfg.overlapBound = overlapBound;
    if (pairBudget >= 0) cfg.pairBudget = pairBudget;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (aikawaS >= 0.0) cfg.aikawaS = aikawaS;
    if (aikawaTrials >= 0) cfg.aikawaTrials = aikawaTrials;
    if (johnSamples >= 0) cfg.johnSamples = johnSamples;
    for (const auto& d : domainArgs) cfg.domains.push_back(jnlab::parse_domain(d));
    for (const auto& f : functionArgs) cfg.functions.push_back(jnlab::parse_function(f));
    if (!ps.empty()) cfg.ps = ps;
    if (cfg.domains.empty() && cfg.pipeline != "necessity-sweep")
      cfg.domains.push_back(jnlab::DomainSpec{});
    const bool needsFunctions = cfg.pipeline == "jn" || cfg.pipeline == "weak" ||
                                cfg.pipeline == "l2g" || cfg.pipeline == "poincare" ||
                                cfg.pipeline == "fractional";
    if (cfg.functions.empty() && needsFunctions)
      throw std::invalid_argument("pipeline '" + cfg.pipeline +
                                  "' needs at least one --function");

    jnlab::ExperimentReport rep = jnlab::run_experiment(cfg);

    if (outPath.empty()) {
      std::cout << rep.serialize();
    } else {
      std::ofstream out(outPath);
      if (!out) throw std::invalid_argument("cannot open output: " + outPath);
      out << rep.serialize();
    }
    if (!csvPath.empty()) {
      std::ofstream out(csvPath);
      if (!out) throw std::invalid_argument("cannot open output: " + csvPath);
      out << jnlab::report_csv(rep);
    }
    std::cerr << "wall clock: " << rep.wallClockMs << " ms\n";
    return rep.invariantViolated ? 2 : 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
