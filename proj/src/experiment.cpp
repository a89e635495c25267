#include "mococo/experiment.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mococo {

using Json = nlohmann::ordered_json;

namespace {

std::string formatDouble(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

template <class T>
T parseNumber(std::string_view field, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw std::invalid_argument("malformed " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> splitFields(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) return out;
    line.remove_prefix(comma + 1);
  }
}

std::vector<std::string_view> splitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

const std::set<std::string>& knownConfigKeys() {
  static const std::set<std::string> keys{
      "environment", "seed",        "numGens",         "dbPopSize",      "rbPopSize",      "dbPCross",
      "dbMutSigma",  "rbPCross",    "rbPMut",          "rbPUnspec",      "beta",           "eta",
      "omega",       "subspecies",  "perfUpperBound",  "featureNames",   "linguisticValues", "actionNames"};
  return keys;
}

Json vocabularyValuesJson(const Vocabulary& v) {
  Json values = Json::array();
  for (const auto& perFeature : v.values) {
    Json byCount = Json::object();
    for (const auto& [m, names] : perFeature) byCount[std::to_string(m)] = names;
    values.push_back(byCount);
  }
  return values;
}

std::vector<std::map<int, std::vector<std::string>>> parseVocabularyValues(const Json& j) {
  std::vector<std::map<int, std::vector<std::string>>> out;
  for (const auto& perFeature : j) {
    std::map<int, std::vector<std::string>> byCount;
    for (const auto& [key, names] : perFeature.items()) {
      const int m = parseNumber<int>(key, "linguistic value count");
      auto list = names.get<std::vector<std::string>>();
      if (list.size() != static_cast<std::size_t>(m)) {
        throw std::invalid_argument("linguisticValues entry \"" + key + "\" lists " + std::to_string(list.size()) +
                                    " names");
      }
      byCount.emplace(m, std::move(list));
    }
    out.push_back(std::move(byCount));
  }
  return out;
}

Json domainsJson(const std::vector<Interval>& domains) {
  Json out = Json::array();
  for (const auto& d : domains) out.push_back({d.lo, d.hi});
  return out;
}

const char* shapeName(SetShape s) {
  switch (s) {
    case SetShape::LowerTrapezoid: return "lower-trapezoid";
    case SetShape::Triangle: return "triangle";
    case SetShape::UpperTrapezoid: return "upper-trapezoid";
  }
  return "?";
}

Json solutionJson(const FrbsFile& file, const StoredSolution& s) {
  const Frbs frbs = decodeStored(file, s);
  const auto labels = file.vocabulary.labelsFor(s.db.tag);
  Json partitions = Json::array();
  for (std::size_t i = 0; i < frbs.db().partitions.size(); ++i) {
    const auto& p = frbs.db().partitions[i];
    Json sets = Json::array();
    for (std::size_t j = 0; j < p.size(); ++j) {
      const auto& fs = p.sets()[j];
      sets.push_back({{"name", labels.values[i][j]},
                      {"shape", shapeName(fs.shape)},
                      {"points", {fs.left, fs.core, fs.right}}});
    }
    partitions.push_back({{"feature", labels.features[i]}, {"domain", {p.domain().lo, p.domain().hi}}, {"sets", sets}});
  }
  const auto lines = renderRules(frbs.rb(), labels);
  Json rules = Json::array();
  for (std::size_t r = 0; r < frbs.rb().rules.size(); ++r) {
    const auto& rule = frbs.rb().rules[r];
    Json masks = Json::array();
    for (std::size_t i = 0; i < rule.masks.size(); ++i) {
      Json bits = Json::array();
      for (int j = 0; j < s.db.tag[i]; ++j) bits.push_back(static_cast<int>(rule.masks[i] >> j & 1u));
      masks.push_back(bits);
    }
    rules.push_back({{"masks", masks}, {"action", rule.action}, {"text", lines[r]}});
  }
  return {{"solutionId", s.solutionId},
          {"tag", s.db.tag.label()},
          {"perf", s.objectives.perf},
          {"complexity", s.objectives.complexity},
          {"failed", s.failed},
          {"numActions", s.rb.numActions},
          {"dbGenotype", s.db.alleles},
          {"rbGenotype", s.rb.alleles},
          {"partitions", partitions},
          {"rules", rules}};
}

Json parseJson(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed " + std::string(what) + ": " + e.what());
  }
}

}  // namespace

// ---- configuration ---------------------------------------------------------

void RunConfig::validate() const {
  if (environment != "mountain-car") {
    throw std::invalid_argument("unknown environment '" + environment + "' (only mountain-car is available)");
  }
  hyperparams.validate(2, McConfig::kNumActions);
  if (!(perfUpperBound > McConfig{}.returnLowerBound())) {
    throw std::invalid_argument("perfUpperBound must exceed the environment's lower bound");
  }
  for (const auto& perFeature : vocabulary.values) {
    for (const auto& [m, names] : perFeature) {
      if (names.size() != static_cast<std::size_t>(m)) throw std::invalid_argument("linguistic value count mismatch");
    }
  }
  if (!vocabulary.actions.empty() && vocabulary.actions.size() != McConfig::kNumActions) {
    throw std::invalid_argument("actionNames must name every action");
  }
}

RunConfig parseRunConfig(std::string_view text) {
  Json j = parseJson(text, "config");
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (j.contains("config")) {
    if (!j["config"].is_object()) throw std::invalid_argument("manifest has no config object");
    j = j["config"];
  }
  for (const auto& [key, value] : j.items()) {
    if (!knownConfigKeys().contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }

  RunConfig c;
  auto& hp = c.hyperparams;
  try {
    auto read = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::remove_reference_t<decltype(field)>>();
    };
    read("environment", c.environment);
    read("seed", c.seed);
    read("numGens", hp.numGens);
    read("dbPopSize", hp.dbPopSize);
    read("rbPopSize", hp.rbPopSize);
    read("dbPCross", hp.dbPCross);
    read("dbMutSigma", hp.dbMutSigma);
    read("rbPCross", hp.rbPCross);
    read("rbPMut", hp.rbPMut);
    read("rbPUnspec", hp.rbPUnspec);
    read("beta", hp.beta);
    read("eta", hp.eta);
    read("omega", hp.omega);
    read("perfUpperBound", c.perfUpperBound);
    if (j.contains("subspecies")) {
      hp.tags.clear();
      for (const auto& label : j["subspecies"].get<std::vector<std::string>>()) {
        hp.tags.push_back(SubspeciesTag::parse(label));
      }
    }
    read("featureNames", c.vocabulary.features);
    read("actionNames", c.vocabulary.actions);
    if (j.contains("linguisticValues")) c.vocabulary.values = parseVocabularyValues(j["linguisticValues"]);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config field has the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig loadRunConfig(const std::filesystem::path& path) { return parseRunConfig(readTextFile(path)); }

std::string runConfigJson(const RunConfig& c) {
  const auto& hp = c.hyperparams;
  std::vector<std::string> tags;
  for (const auto& t : hp.tags) tags.push_back(t.label());
  const Json j = {{"environment", c.environment},
                  {"seed", c.seed},
                  {"numGens", hp.numGens},
                  {"dbPopSize", hp.dbPopSize},
                  {"rbPopSize", hp.rbPopSize},
                  {"dbPCross", hp.dbPCross},
                  {"dbMutSigma", hp.dbMutSigma},
                  {"rbPCross", hp.rbPCross},
                  {"rbPMut", hp.rbPMut},
                  {"rbPUnspec", hp.rbPUnspec},
                  {"beta", hp.beta},
                  {"eta", hp.eta},
                  {"omega", hp.omega},
                  {"subspecies", tags},
                  {"perfUpperBound", c.perfUpperBound},
                  {"featureNames", c.vocabulary.features},
                  {"linguisticValues", vocabularyValuesJson(c.vocabulary)},
                  {"actionNames", c.vocabulary.actions}};
  return j.dump(2) + "\n";
}

std::string manifestJson(const RunConfig& c) {
  const Json j = {{"tool", "mococo"},
                  {"version", std::string(kToolVersion)},
                  {"seed", c.seed},
                  {"initialStateSeed", deriveSeed(c.seed, RngStream::InitialStates)},
                  {"config", Json::parse(runConfigJson(c))}};
  return j.dump(2) + "\n";
}

// ---- tabular outputs -------------------------------------------------------

std::string formatFrontCsv(const std::vector<FrontRecord>& rows) {
  std::string out(kFrontCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += formatDouble(r.perf) + ',' + std::to_string(r.complexity) + ',' + r.tag.label() + ',' +
           std::to_string(r.runSeed) + ',' + std::to_string(r.solutionId) + '\n';
  }
  return out;
}

std::vector<FrontRecord> parseFrontCsv(std::string_view text) {
  const auto lines = splitLines(text);
  if (lines.empty() || lines.front() != kFrontCsvHeader) {
    throw std::invalid_argument("front CSV must start with header '" + std::string(kFrontCsvHeader) + "'");
  }
  std::vector<FrontRecord> rows;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto f = splitFields(lines[n]);
    if (f.size() != 5) throw std::invalid_argument("front CSV line " + std::to_string(n + 1) + " needs 5 fields");
    rows.push_back({parseNumber<double>(f[0], "perf"), parseNumber<int>(f[1], "complexity"),
                    SubspeciesTag::parse(f[2]), parseNumber<std::uint64_t>(f[3], "runSeed"),
                    parseNumber<std::size_t>(f[4], "solutionId")});
  }
  return rows;
}

std::vector<FrontRecord> mergeFronts(const std::vector<std::vector<FrontRecord>>& fronts) {
  if (fronts.empty()) throw std::invalid_argument("nothing to merge");
  std::vector<FrontRecord> merged;
  for (const auto& f : fronts) merged.insert(merged.end(), f.begin(), f.end());
  return merged;
}

std::vector<std::pair<int, std::size_t>> complexityHistogram(const std::vector<FrontRecord>& rows) {
  std::map<int, std::size_t> counts;
  for (const auto& r : rows) ++counts[r.complexity];
  return {counts.begin(), counts.end()};
}

std::string formatHistogramCsv(const std::vector<std::pair<int, std::size_t>>& histogram) {
  std::string out = "complexity,count\n";
  for (const auto& [c, n] : histogram) out += std::to_string(c) + ',' + std::to_string(n) + '\n';
  return out;
}

std::string formatGenerationsCsv(const std::vector<GenerationRecord>& records, const std::vector<SubspeciesTag>& tags) {
  std::string out = "gen,solutions,bestPerf,meanPerf,front1Size";
  for (const auto& t : tags) out += ",db_" + t.label();
  for (const auto& t : tags) out += ",rb_" + t.label();
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.gen) + ',' + std::to_string(r.solutions) + ',' + formatDouble(r.bestPerf) + ',' +
           formatDouble(r.meanPerf) + ',' + std::to_string(r.front1Size);
    for (int c : r.dbCounts) out += ',' + std::to_string(c);
    for (int c : r.rbCounts) out += ',' + std::to_string(c);
    out += '\n';
  }
  return out;
}

// ---- FRBS files ------------------------------------------------------------

Frbs decodeStored(const FrbsFile& file, const StoredSolution& s) {
  return Frbs(decodeDb(s.db, file.featureDomains, file.omega), decodeRb(s.rb));
}

std::string frbsFileJson(const FrbsFile& file) {
  Json solutions = Json::array();
  for (const auto& s : file.solutions) solutions.push_back(solutionJson(file, s));
  const Json j = {{"runSeed", file.runSeed},
                  {"omega", file.omega},
                  {"featureDomains", domainsJson(file.featureDomains)},
                  {"featureNames", file.vocabulary.features},
                  {"linguisticValues", vocabularyValuesJson(file.vocabulary)},
                  {"actionNames", file.vocabulary.actions},
                  {"solutions", solutions}};
  return j.dump(2) + "\n";
}

FrbsFile parseFrbsFile(std::string_view text) {
  const Json j = parseJson(text, "FRBS file");
  FrbsFile file;
  try {
    file.runSeed = j.at("runSeed").get<std::uint64_t>();
    file.omega = j.at("omega").get<double>();
    for (const auto& d : j.at("featureDomains")) file.featureDomains.push_back({d.at(0).get<double>(), d.at(1).get<double>()});
    file.vocabulary.features = j.at("featureNames").get<std::vector<std::string>>();
    file.vocabulary.values = parseVocabularyValues(j.at("linguisticValues"));
    file.vocabulary.actions = j.at("actionNames").get<std::vector<std::string>>();
    for (const auto& s : j.at("solutions")) {
      const auto tag = SubspeciesTag::parse(s.at("tag").get<std::string>());
      file.solutions.push_back(
          {s.at("solutionId").get<std::size_t>(),
           {s.at("perf").get<double>(), s.at("complexity").get<int>()},
           s.at("failed").get<bool>(),
           DbGenotype(tag, s.at("dbGenotype").get<std::vector<double>>()),
           RbGenotype(tag, s.at("numActions").get<int>(), s.at("rbGenotype").get<std::vector<int>>())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("FRBS file does not match the expected schema: ") + e.what());
  }
  return file;
}

std::vector<std::string> renderStored(const FrbsFile& file, std::size_t solutionId) {
  const auto it = std::find_if(file.solutions.begin(), file.solutions.end(),
                               [&](const StoredSolution& s) { return s.solutionId == solutionId; });
  if (it == file.solutions.end()) {
    throw std::invalid_argument("no solution with id " + std::to_string(solutionId) + " in FRBS file");
  }
  return renderRules(decodeStored(file, *it).rb(), file.vocabulary.labelsFor(it->db.tag));
}

// ---- runs ------------------------------------------------------------------

Problem makeProblem(const RunConfig& config) {
  config.validate();
  const McConfig mc;
  auto starts = sampleInitialStates(deriveSeed(config.seed, RngStream::InitialStates),
                                    static_cast<std::size_t>(config.hyperparams.eta));
  return mountainCarProblem(mc, std::move(starts), config.perfUpperBound);
}

ExperimentOutcome runExperiment(const RunConfig& config, const std::filesystem::path& outDir,
                                std::function<void(const GenerationRecord&)> onGeneration) {
  const Problem problem = makeProblem(config);
  std::filesystem::create_directories(outDir);

  ExperimentOutcome outcome;
  RunOptions options;
  options.threads = config.threads;
  options.onGeneration = std::move(onGeneration);
  outcome.result = runFuzzyMococo(problem, config.hyperparams, config.seed, options);
  const auto& result = outcome.result;

  FrbsFile frontFile{config.seed, config.hyperparams.omega, problem.featureDomains, config.vocabulary, {}};
  for (auto idx : result.front) {
    const auto& s = result.solutions[idx];
    outcome.front.push_back({s.objectives.perf, s.objectives.complexity, s.tag(), config.seed, idx});
    frontFile.solutions.push_back({idx, s.objectives, s.failed, s.db, s.rb});
  }
  if (frontFile.solutions.empty()) throw std::logic_error("run produced an empty front");

  // Best performer, then lowest complexity, then lowest id.
  const auto best = std::min_element(frontFile.solutions.begin(), frontFile.solutions.end(),
                                     [](const StoredSolution& a, const StoredSolution& b) {
                                       if (a.objectives.perf != b.objectives.perf) return a.objectives.perf > b.objectives.perf;
                                       if (a.objectives.complexity != b.objectives.complexity) {
                                         return a.objectives.complexity < b.objectives.complexity;
                                       }
                                       return a.solutionId < b.solutionId;
                                     });
  outcome.bestSolutionId = best->solutionId;
  FrbsFile bestFile = frontFile;
  bestFile.solutions = {*best};

  auto& a = outcome.artifacts;
  a.frontCsv = outDir / "front.csv";
  a.generationsCsv = outDir / "generations.csv";
  a.frontFrbs = outDir / "front_frbs.json";
  a.bestFrbs = outDir / "best_frbs.json";
  a.bestRules = outDir / "best_rules.txt";
  a.manifest = outDir / "manifest.json";

  writeTextFile(a.frontCsv, formatFrontCsv(outcome.front));
  writeTextFile(a.generationsCsv, formatGenerationsCsv(result.generations, config.hyperparams.tags));
  writeTextFile(a.frontFrbs, frbsFileJson(frontFile));
  writeTextFile(a.bestFrbs, frbsFileJson(bestFile));

  std::string rules = "# solution " + std::to_string(best->solutionId) + ", tag " + best->db.tag.label() +
                      ", perf " + formatDouble(best->objectives.perf) + ", complexity " +
                      std::to_string(best->objectives.complexity) + "\n";
  for (const auto& line : renderStored(bestFile, best->solutionId)) rules += line + "\n";
  writeTextFile(a.bestRules, rules);
  writeTextFile(a.manifest, manifestJson(config));
  return outcome;
}

std::pair<OracleReport, DiscretePolicy> runOracle(int bins, int eta, std::uint64_t seed, double convergenceTol) {
  if (eta < 1) throw std::invalid_argument("eta must be >= 1");
  OracleReport report;
  report.bins = bins;
  report.eta = eta;
  report.seed = seed;
  report.initialStateSeed = deriveSeed(seed, RngStream::InitialStates);
  const auto starts = sampleInitialStates(report.initialStateSeed, static_cast<std::size_t>(eta));
  auto vi = valueIterationOracle(bins, convergenceTol, starts);
  report.perf = vi.perf;
  report.sweeps = vi.residuals.size();
  return {report, std::move(vi.policy)};
}

std::string oracleReportJson(const OracleReport& r) {
  const Json j = {{"bins", r.bins},           {"eta", r.eta},          {"seed", r.seed},
                  {"initialStateSeed", r.initialStateSeed},             {"perf", r.perf.perf},
                  {"failed", r.perf.failed},  {"sweeps", r.sweeps}};
  return j.dump(2) + "\n";
}

// ---- files -----------------------------------------------------------------

std::string readTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace mococo
