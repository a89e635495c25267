// mococo: run experiments, the value-iteration oracle, and inspect results.

#include "mococo/experiment.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

using namespace mococo;

namespace {

int cmdRun(const std::string& configPath, std::optional<std::uint64_t> seed, const std::string& out,
           unsigned threads, bool quiet) {
  RunConfig config = loadRunConfig(configPath);
  if (seed) config.seed = *seed;
  config.threads = threads;
  config.validate();

  std::function<void(const GenerationRecord&)> progress;
  if (!quiet) {
    progress = [](const GenerationRecord& g) {
      std::fprintf(stderr, "gen %3d  solutions %4zu  best %.3f  mean %.3f  |F1| %zu\n", g.gen, g.solutions,
                   g.bestPerf, g.meanPerf, g.front1Size);
    };
  }
  const auto outcome = runExperiment(config, out, progress);
  std::cout << "front: " << outcome.front.size() << " solutions, best id " << outcome.bestSolutionId << "\n"
            << "wrote " << outcome.artifacts.frontCsv.string() << ", " << outcome.artifacts.frontFrbs.string()
            << ", " << outcome.artifacts.bestRules.string() << "\n";
  return 0;
}

int cmdOracle(int bins, int eta, std::uint64_t seed, double tol, const std::string& out) {
  const auto [report, policy] = runOracle(bins, eta, seed, tol);
  std::filesystem::create_directories(out);
  const auto dir = std::filesystem::path(out);
  policy.save(dir / "oracle_policy.bin");
  writeTextFile(dir / "oracle_report.json", oracleReportJson(report));
  std::printf("oracle: bins %d  eta %d  seed %llu  sweeps %zu  perf %.4f%s\n", report.bins, report.eta,
              static_cast<unsigned long long>(report.seed), report.sweeps, report.perf.perf,
              report.perf.failed ? "  (coverage failure)" : "");
  return 0;
}

int cmdRender(const std::string& path, std::optional<std::size_t> id) {
  const FrbsFile file = parseFrbsFile(readTextFile(path));
  for (const auto& s : file.solutions) {
    if (id && s.solutionId != *id) continue;
    std::cout << "# solution " << s.solutionId << "  tag " << s.db.tag.label() << "  perf " << s.objectives.perf
              << "  complexity " << s.objectives.complexity << "\n";
    for (const auto& line : renderStored(file, s.solutionId)) std::cout << line << "\n";
  }
  if (id) renderStored(file, *id);  // throws when the id is absent
  return 0;
}

int cmdMerge(const std::vector<std::string>& inputs, const std::string& out, const std::string& hist) {
  std::vector<std::vector<FrontRecord>> fronts;
  for (const auto& p : inputs) fronts.push_back(parseFrontCsv(readTextFile(p)));
  const auto merged = mergeFronts(fronts);
  writeTextFile(out, formatFrontCsv(merged));
  if (!hist.empty()) writeTextFile(hist, formatHistogramCsv(complexityHistogram(merged)));
  std::cout << "merged " << inputs.size() << " fronts, " << merged.size() << " rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy MoCoCo: multiobjective cooperative coevolution of fuzzy rule-based systems"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string configPath, out = "out";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run one seeded experiment");
  run->add_option("--config", configPath, "JSON config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out, "Output directory");
  run->add_option("--threads", threads, "Worker threads (0 = all cores)");
  run->add_flag("--quiet", quiet, "No per-generation progress");

  int bins = 1000, eta = 30;
  std::uint64_t oracleSeed = 0;
  double tol = 1e-6;
  std::string oracleOut = "oracle";
  auto* oracle = app.add_subcommand("oracle", "Value-iteration reference policy for Mountain Car");
  oracle->add_option("--bins", bins, "Bins per feature")->check(CLI::Range(2, 100000));
  oracle->add_option("--seed", oracleSeed, "Run seed whose start states are evaluated");
  oracle->add_option("--eta", eta, "Number of start states")->check(CLI::PositiveNumber);
  oracle->add_option("--tol", tol, "Convergence tolerance");
  oracle->add_option("--out", oracleOut, "Output directory");

  std::string frbsPath;
  std::optional<std::size_t> solutionId;
  auto* render = app.add_subcommand("render", "Print the rules of stored solutions");
  render->add_option("--frbs", frbsPath, "FRBS JSON file")->required()->check(CLI::ExistingFile);
  render->add_option("--solution-id", solutionId, "Only this solution");

  std::vector<std::string> inputs;
  std::string mergeOut, hist;
  auto* merge = app.add_subcommand("merge", "Concatenate per-run front CSVs");
  merge->add_option("inputs", inputs, "Front CSV files")->required()->check(CLI::ExistingFile);
  merge->add_option("--out", mergeOut, "Merged front CSV")->required();
  merge->add_option("--hist", hist, "Also write a complexity histogram CSV");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmdRun(configPath, seed, out, threads, quiet);
    if (*oracle) return cmdOracle(bins, eta, oracleSeed, tol, oracleOut);
    if (*render) return cmdRender(frbsPath, solutionId);
    if (*merge) return cmdMerge(inputs, mergeOut, hist);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
