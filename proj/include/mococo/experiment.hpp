#pragma once

#include "mococo/coevo.hpp"
#include "mococo/render.hpp"
#include "mococo/value_iteration.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mococo {

inline constexpr std::string_view kToolVersion = "1.0.0";

struct RunConfig {
  Hyperparams hyperparams;
  std::string environment = "mountain-car";
  std::uint64_t seed = 0;
  double perfUpperBound = -96.0;
  Vocabulary vocabulary = mountainCarVocabulary();
  unsigned threads = 0;  // execution detail, not recorded in the manifest

  void validate() const;
};

/// Parses a JSON config. Absent keys keep their defaults; unknown keys are
/// rejected. A run manifest is accepted as well (its "config" object is used).
RunConfig parseRunConfig(std::string_view json);
RunConfig loadRunConfig(const std::filesystem::path& path);

/// Canonical JSON of every field that affects results.
std::string runConfigJson(const RunConfig& config);

/// Manifest that fully determines a run: tool version, seed and config.
std::string manifestJson(const RunConfig& config);

struct FrontRecord {
  double perf = 0.0;
  int complexity = 0;
  SubspeciesTag tag;
  std::uint64_t runSeed = 0;
  std::size_t solutionId = 0;

  friend bool operator==(const FrontRecord&, const FrontRecord&) = default;
};

inline constexpr std::string_view kFrontCsvHeader = "perf,complexity,tag,runSeed,solutionId";

std::string formatFrontCsv(const std::vector<FrontRecord>& rows);
/// Throws std::invalid_argument on a header or field mismatch.
std::vector<FrontRecord> parseFrontCsv(std::string_view text);

/// Concatenates runs in input order.
std::vector<FrontRecord> mergeFronts(const std::vector<std::vector<FrontRecord>>& fronts);

/// (complexity, count) in ascending complexity.
std::vector<std::pair<int, std::size_t>> complexityHistogram(const std::vector<FrontRecord>& rows);
std::string formatHistogramCsv(const std::vector<std::pair<int, std::size_t>>& histogram);

std::string formatGenerationsCsv(const std::vector<GenerationRecord>& records, const std::vector<SubspeciesTag>& tags);

/// Solution as stored in FRBS files: genotypes plus the decoded phenotype.
struct StoredSolution {
  std::size_t solutionId = 0;
  ObjectivePoint objectives;
  bool failed = false;
  DbGenotype db;
  RbGenotype rb;
};

struct FrbsFile {
  std::uint64_t runSeed = 0;
  double omega = kDefaultValidFraction;
  std::vector<Interval> featureDomains;
  Vocabulary vocabulary;
  std::vector<StoredSolution> solutions;
};

std::string frbsFileJson(const FrbsFile& file);
FrbsFile parseFrbsFile(std::string_view json);

/// Decoded FRBS of a stored solution.
Frbs decodeStored(const FrbsFile& file, const StoredSolution& solution);

/// Rendered rules of the stored solution with the given id.
std::vector<std::string> renderStored(const FrbsFile& file, std::size_t solutionId);

struct RunArtifacts {
  std::filesystem::path frontCsv;
  std::filesystem::path generationsCsv;
  std::filesystem::path frontFrbs;
  std::filesystem::path bestFrbs;
  std::filesystem::path bestRules;
  std::filesystem::path manifest;
};

struct ExperimentOutcome {
  RunArtifacts artifacts;
  RunResult result;
  std::vector<FrontRecord> front;
  std::size_t bestSolutionId = 0;
};

/// Builds the configured problem; start states come from the run seed.
Problem makeProblem(const RunConfig& config);

/// Runs one seeded experiment and writes its artifacts into `outDir`.
ExperimentOutcome runExperiment(const RunConfig& config, const std::filesystem::path& outDir,
                                std::function<void(const GenerationRecord&)> onGeneration = {});

struct OracleReport {
  int bins = 0;
  int eta = 0;
  std::uint64_t seed = 0;
  std::uint64_t initialStateSeed = 0;
  PerfResult perf;
  std::size_t sweeps = 0;
};

/// Value-iteration oracle over the start states a run with `seed` would use.
std::pair<OracleReport, DiscretePolicy> runOracle(int bins, int eta, std::uint64_t seed, double convergenceTol = 1e-6);
std::string oracleReportJson(const OracleReport& report);

std::string readTextFile(const std::filesystem::path& path);
void writeTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace mococo
